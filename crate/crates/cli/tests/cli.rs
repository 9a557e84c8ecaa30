use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn langcc(args: &[&std::ffi::OsStr]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_langcc")).args(args).output().unwrap()
}

fn datacc(args: &[&std::ffi::OsStr]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_datacc")).args(args).output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn calc_compiles_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = langcc(&[fixture("calc.lang").as_os_str(), dir.path().as_os_str()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let clang = std::fs::read_to_string(dir.path().join("calc.clang")).unwrap();
    let lang = langcc_core::CompiledLang::from_json(&clang).unwrap();
    assert!(lang.parse("x = 1 + 2", None).is_ok());
    let schema = std::fs::read_to_string(dir.path().join("calc.ast.schema")).unwrap();
    assert!(schema.contains("data Expr"));
    assert!(text(&out.stdout).contains("round trip ok"));
}

#[test]
fn noprec_reports_conflicts_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = langcc(&[fixture("calc_noprec.lang").as_os_str(), dir.path().as_os_str(), "--max-k".as_ref(), "1".as_ref()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("===== LR conflict"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn meta_compiles() {
    let dir = tempfile::tempdir().unwrap();
    let out = langcc(&[fixture("meta.lang").as_os_str(), dir.path().as_os_str()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
}

#[test]
fn rd_switch_changes_the_notice() {
    let out = langcc(&[fixture("calc.lang").as_os_str(), "--rd=on".as_ref(), "--no-test".as_ref()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(!text(&out.stderr).contains("recursive descent is off"));
    let out = langcc(&[fixture("calc.lang").as_os_str(), "--no-test".as_ref()]);
    assert!(text(&out.stderr).contains("recursive descent is off"));
    assert!(out.stdout.is_empty());
}

#[test]
fn parse_and_format_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "x = 1+2").unwrap();
    let out = langcc(&[fixture("calc.lang").as_os_str(), "--no-test".as_ref(), "--parse".as_ref(), good.as_os_str()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).starts_with("Stmt::Assign{"));
    let out = langcc(&[fixture("calc.lang").as_os_str(), "--no-test".as_ref(), "--format".as_ref(), good.as_os_str()]);
    assert_eq!(text(&out.stdout), "x = 1 + 2\n");

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "7 + (5 + / 3)").unwrap();
    let out = langcc(&[fixture("calc.lang").as_os_str(), "--no-test".as_ref(), "--parse".as_ref(), bad.as_os_str()]);
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert!(err.contains("Unexpected token: `/`\nLine 1, column 10:"), "{err}");

    let out = langcc(&[
        fixture("calc.lang").as_os_str(),
        "--no-test".as_ref(),
        "--start".as_ref(),
        "Expr".as_ref(),
        "--parse".as_ref(),
        good.as_os_str(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dumps_go_to_stdout() {
    let out = langcc(&[
        fixture("lrk.lang").as_os_str(),
        "--no-test".as_ref(),
        "--dump-lexer".as_ref(),
        "--dump-grammar".as_ref(),
        "--dump-lr".as_ref(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s = text(&out.stdout);
    assert!(s.contains("mode body (main)"));
    assert!(s.contains("LR(2) states: 5"));
}

#[test]
fn failing_embedded_test_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(fixture("parens.lang")).unwrap().replace("`x(x)()`", "`x(x)(`");
    let p = dir.path().join("p.lang");
    std::fs::write(&p, src).unwrap();
    let out = langcc(&[p.as_os_str()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("FAIL"));
    let out = langcc(&[p.as_os_str(), "--no-test".as_ref()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn frontend_diagnostics_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.lang");
    std::fs::write(&p, "tokens {\n  a <- ;\n}").unwrap();
    let out = langcc(&[p.as_os_str()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("broken.lang:2:8:"), "{}", text(&out.stderr));
}

#[test]
fn io_and_usage_errors_exit_2() {
    let out = langcc(&["/definitely/missing.lang".as_ref()]);
    assert_eq!(out.status.code(), Some(2));
    let out = langcc(&[fixture("calc.lang").as_os_str(), "/definitely/missing/dir".as_ref()]);
    assert_eq!(out.status.code(), Some(2));
    let out = langcc(&["--no-such-flag".as_ref()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn datacc_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("shapes.data");
    std::fs::write(&good, "data Color { Red; Green; }\ndata Pair[T] { fst: T; snd: T; }\n").unwrap();
    let out = datacc(&[good.as_os_str(), dir.path().as_os_str()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let schema = std::fs::read_to_string(dir.path().join("shapes.schema")).unwrap();
    assert_eq!(langcc_core::datacc::parse_data_spec(&schema).unwrap().render(), schema);

    let bad = dir.path().join("bad.data");
    std::fs::write(&bad, "data X { y: Nope; }").unwrap();
    assert_eq!(datacc(&[bad.as_os_str(), dir.path().as_os_str()]).status.code(), Some(1));
    assert_eq!(datacc(&[good.as_os_str(), "/definitely/missing/dir".as_ref()]).status.code(), Some(2));
}
