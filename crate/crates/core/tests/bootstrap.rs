use langcc_core::driver::{bootstrap, run_tests, BootstrapError};
use langcc_core::{compile_source, parse_lang_spec, CompileOptions};

const META: &str = include_str!("../fixtures/meta.lang");

#[test]
fn meta_compiles_conflict_free_at_k1() {
    let c = compile_source(META, "meta", CompileOptions::default()).unwrap_or_else(|e| panic!("{e}"));
    assert_eq!(c.lang.tables.k, 1);
    assert!(c.automaton.conflicts.is_empty());
    let spec = parse_lang_spec(META).unwrap();
    let report = run_tests(&spec, &c.lang, false);
    assert!(report.passed(), "{}", report.render());
}

#[test]
fn meta_is_self_hosting() {
    assert!(META.lines().count() <= 250);
    match bootstrap(META, CompileOptions::default()) {
        Ok(_) => {}
        Err(BootstrapError::Mismatch { hand, generated }) => {
            assert_eq!(hand, generated);
        }
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn generated_frontend_agrees_on_every_fixture() {
    let c = compile_source(META, "meta", CompileOptions::default()).unwrap();
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut seen = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.extension().is_none_or(|x| x != "lang") {
            continue;
        }
        let src = std::fs::read_to_string(&path).unwrap();
        let tree = c.lang.parse(&src, None).unwrap_or_else(|e| panic!("{}: {}", path.display(), e.render(&src)));
        let generated = langcc_core::meta::spec_from_value(&src, &tree).unwrap();
        assert_eq!(generated, parse_lang_spec(&src).unwrap(), "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 7);
}

#[test]
fn generated_frontend_reports_semantic_errors() {
    let c = compile_source(META, "meta", CompileOptions::default()).unwrap();
    let src = "tokens {} lexer { main { m } main { n } } parser { main { S } S <- eps; }";
    let tree = c.lang.parse(src, None).unwrap();
    let err = langcc_core::meta::spec_from_value(src, &tree).unwrap_err();
    assert!(err.to_string().contains("duplicate `main`"), "{err}");
    assert_eq!(err.0[0].loc.col, 30);
}
