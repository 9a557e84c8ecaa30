//! Every shipped fixture compiles and passes its own embedded tests.

use std::path::Path;

use langcc_core::driver::run_tests;
use langcc_core::{compile_source, parse_lang_spec, CompileOptions};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

pub fn lrk_dump() -> String {
    let c = compile_source(&fixture("lrk.lang"), "lrk", CompileOptions { k: 2, max_k: 2, rd: false }).unwrap();
    c.automaton.dump(&c.lang.cfg)
}

#[test]
fn lrk_item_sets_match_golden() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/lrk.lr2.golden");
    let dump = lrk_dump();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &dump).unwrap();
    }
    assert_eq!(dump, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn all_fixtures_pass_embedded_tests() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".lang"))
        .collect();
    names.sort();
    for name in names {
        let src = fixture(&name);
        let spec = parse_lang_spec(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let c = match compile_source(&src, &name, CompileOptions::default()) {
            Ok(c) => c,
            Err(e) if name.contains("noprec") => {
                assert!(e.to_string().contains("conflict"), "{name}: {e}");
                continue;
            }
            Err(e) => panic!("{name}: {e}"),
        };
        let report = run_tests(&spec, &c.lang, false);
        assert!(report.passed(), "{name}:\n{}", report.render());
    }
}
