use super::*;
use crate::grammar::tests::lower_src;

const CALC: &str = include_str!("../../fixtures/calc.lang");

pub(crate) const LRK: &str = r#"
tokens {
    op <= `a` | `b`;
    ws <= ` `;
}
lexer {
    main { body }
    mode body {
        op => { emit; }
        ws => { pass; }
        eof => { pop; }
    }
}
parser {
    main { S }
    S <- x:A `a`;
    A.Empty <- eps;
    A.One <- `a`;
}
"#;

fn build(src: &str, k: usize, rd: bool) -> (crate::grammar::Cfg, LrAutomaton) {
    let l = lower_src(src);
    let a = build_lr(&l.cfg, k, LrOptions { rd }).unwrap();
    (l.cfg, a)
}

#[test]
fn calc_lr1_has_no_conflicts() {
    let (cfg, a) = build(CALC, 1, false);
    assert!(a.conflicts.is_empty(), "{}", a.dump(&cfg));
    assert!(a.states.len() > 20);
}

#[test]
fn zero_lookahead_rejected() {
    let l = lower_src(CALC);
    assert_eq!(build_lr(&l.cfg, 0, LrOptions::default()).unwrap_err(), LrBuildError::ZeroLookahead);
}

#[test]
fn needs_two_tokens() {
    let (_, a1) = build(LRK, 1, false);
    assert_eq!(a1.conflicts.len(), 1);
    let c = &a1.conflicts[0];
    assert_eq!(c.actions.len(), 2);
    let (_, a2) = build(LRK, 2, false);
    assert!(a2.conflicts.is_empty());
}

#[test]
fn calc_without_precedence_conflicts() {
    let src = CALC.replace(
        "    prec {\n        Expr.BinOp1 assoc_left;\n        Expr.BinOp2 assoc_left;\n        Expr.UnaryPre prefix;\n        Expr.BinOp3 assoc_left;\n        Expr.Id Expr.Lit.Int_ Expr.Paren;\n    }\n",
        "",
    );
    assert_ne!(src, CALC);
    let (_, a) = build(&src, 1, false);
    assert!(!a.conflicts.is_empty());
}

#[test]
fn rd_variant_is_conflict_free_on_calc() {
    let (cfg, a) = build(CALC, 1, true);
    assert!(a.conflicts.is_empty(), "{}", a.dump(&cfg));
    let recurs = a
        .states
        .iter()
        .flat_map(|s| s.actions.values())
        .filter(|x| matches!(x, LrAction::Recur { .. }))
        .count();
    assert!(recurs > 0);
}

#[test]
fn tables_roundtrip_through_json() {
    let (cfg, a) = build(CALC, 1, false);
    let t = LrTables::from_automaton(&a, &cfg.starts, cfg.terminals.len());
    let js = serde_json::to_string(&t).unwrap();
    let mut back: LrTables = serde_json::from_str(&js).unwrap();
    back.reindex(cfg.terminals.len());
    assert_eq!(t, back);
    let s0 = back.starts[0].1;
    assert_eq!(back.action(s0, &[1]), t.action(s0, &[1]));
}
