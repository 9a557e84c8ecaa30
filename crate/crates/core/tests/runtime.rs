use std::sync::Arc;

use langcc_core::runtime::{location_fmt_str, Bounds, Node, ParseErrorKind, Value};
use langcc_core::{compile_source, CompileOptions, CompiledLang};

fn calc() -> CompiledLang {
    compile_source(include_str!("../fixtures/calc.lang"), "calc", CompileOptions::default()).unwrap().lang
}

fn walk(v: &Value, f: &mut dyn FnMut(&Value)) {
    f(v);
    match v {
        Value::Node(n) => n.fields.iter().for_each(|(_, x)| walk(x, f)),
        Value::Opt(Some(x)) => walk(x, f),
        Value::Seq(s) => s.items.iter().for_each(|x| walk(x, f)),
        _ => {}
    }
}

#[test]
fn error_block_matches_worked_example() {
    let l = calc();
    let e = l.parse("7 + (5 + / 3)", None).unwrap_err();
    assert_eq!(
        format!("Parse error: {}", e.render("7 + (5 + / 3)")),
        "Parse error: Unexpected token: `/`\nLine 1, column 10:\n\n  7 + (5 + / 3)\n           ^    \n"
    );
    assert!(matches!(e.kind, ParseErrorKind::UnexpectedToken { .. }));
}

#[test]
fn location_blocks() {
    let s = "4 / (3 - (15 / 5))";
    assert_eq!(location_fmt_str(s, Bounds::new(2, 3)), format!("Line 1, column 3:\n\n  {s}\n    ^{}\n", " ".repeat(16)));
    assert_eq!(location_fmt_str("x", Bounds::new(0, 1)), "Line 1, column 1:\n\n  x\n  ^ \n");
    assert_eq!(location_fmt_str("a\nbc", Bounds::new(3, 4)), "Line 2, column 2:\n\n  bc\n   ^ \n");
}

#[test]
fn single_literal() {
    let l = calc();
    let v = l.parse("1", None).unwrap();
    assert_eq!(v.debug_string(), r#"Stmt::Expr{x: Expr::Lit::Int_{val: "1"}}"#);
    let e = l.parse("", None).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::UnexpectedEof { .. }));
    assert_eq!(e.offset(), 0);
}

#[test]
fn precedence_shapes_the_tree() {
    let l = calc();
    let v = l.parse("1 - 2 - 3", Some("Expr")).unwrap();
    assert_eq!(
        v.debug_string(),
        r#"Expr::BinOp1{x: Expr::BinOp1{x: Expr::Lit::Int_{val: "1"}, op: Expr_BinOp1_op::Sub, y: Expr::Lit::Int_{val: "2"}}, op: Expr_BinOp1_op::Sub, y: Expr::Lit::Int_{val: "3"}}"#
    );
    let v = l.parse("a^b^c", Some("Expr")).unwrap();
    // `^` is declared left-associative in the fixture.
    assert!(v.debug_string().starts_with("Expr::BinOp3{x: Expr::BinOp3"));
    let v = l.parse("-x^2", Some("Expr")).unwrap();
    assert!(v.debug_string().starts_with("Expr::UnaryPre{op: Expr_UnaryPre_op::Neg, x: Expr::BinOp3"));
}

#[test]
fn bounds_nest_and_blame_operators() {
    let l = calc();
    let s = "y = (a - b) / c^d^e";
    let v = l.parse(s, None).unwrap();
    let mut checked = 0;
    walk(&v, &mut |x| {
        if let Value::Node(n) = x {
            let mut prev_end = n.bounds.start;
            for (_, c) in &n.fields {
                if let Some(b) = c.bounds() {
                    assert!(n.bounds.contains(&b), "{} {:?} ⊉ {:?}", n.variant(), n.bounds, b);
                    assert!(b.start >= prev_end);
                    prev_end = b.end;
                    checked += 1;
                }
            }
        }
    });
    assert!(checked > 8);
    let root = v.as_node().unwrap();
    assert_eq!((root.bounds.start, root.bounds.end), (0, s.len()));
    let div = root.field("y").unwrap().as_node().unwrap();
    let op = div.field("op").unwrap().as_node().unwrap();
    assert_eq!(op.variant(), "Expr_BinOp2_op.Div");
    assert_eq!(&s[op.bounds.start..op.bounds.end], "/");
}

#[test]
fn schema_conformance_and_downcast() {
    let l = calc();
    for s in ["x = 1 + 2", "(1 + 2) * -3", "y = (a - b) / c^d^e"] {
        let v = l.parse(s, None).unwrap();
        l.check_schema(&v).unwrap();
    }
    let v = l.parse("1; x = 2;", Some("Prog")).unwrap();
    l.check_schema(&v).unwrap();
    let v = l.parse("x", None).unwrap();
    let n: &Arc<Node> = v.as_node().unwrap();
    let got = l.node_downcast(n, &["Stmt"]).unwrap().unwrap();
    assert!(Arc::ptr_eq(&got, n));
    let inner = n.field("x").unwrap().as_node().unwrap();
    assert!(l.node_downcast(inner, &["Expr", "Lit"]).unwrap().is_none());
    assert!(l.node_downcast(inner, &["Zzz"]).is_err());
}

#[test]
fn calc_roundtrips() {
    let l = calc();
    for s in ["x = 1 + 2", "1 + 2 * 3", "1 - 2 - 3", "-x^2", "(1 + 2) * -3", "y = (a - b) / c^d^e", "4 / (3 - (15 / 5))"] {
        assert_eq!(l.roundtrip_check(s, None).unwrap(), None, "{s}");
    }
    assert_eq!(l.roundtrip_check("1   +  2", None).unwrap(), Some(2));
    let prog = "x = 1;\ny = x * 2;";
    assert_eq!(l.roundtrip_check(prog, Some("Prog")).unwrap(), None);
}

#[test]
fn artifact_json_roundtrip_and_digest() {
    let a = calc();
    let b = calc();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.digest(), b.digest());
    let back = CompiledLang::from_json(&a.to_json()).unwrap();
    assert_eq!(back, a);
    assert_eq!(back.parse("1 + 2", None).unwrap(), a.parse("1 + 2", None).unwrap());
    let bad = a.to_json().replacen("\"version\":1", "\"version\":99", 1);
    assert!(CompiledLang::from_json(&bad).is_err());
}

#[test]
fn lex_errors_surface_with_offsets() {
    let l = calc();
    let e = l.parse("1 + $", None).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Lex(_)));
    assert_eq!(e.offset(), 4);
}


#[test]
fn calc_embedded_tests_pass() {
    let src = include_str!("../fixtures/calc.lang");
    let spec = langcc_core::parse_lang_spec(src).unwrap();
    let l = calc();
    let r = langcc_core::driver::run_tests(&spec, &l, false);
    assert!(r.passed(), "{}", r.render());
    assert_eq!(r.parse.len(), 11);
}
