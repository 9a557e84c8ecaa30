use super::*;
use crate::meta::parse_lang_spec;

fn spec(tokens: &str, modes: &str) -> crate::meta::LangSpec {
    let src = format!("tokens {{ {tokens} }} lexer {{ main {{ body }} {modes} }} parser {{ main {{ S }} S <- eps; }}");
    parse_lang_spec(&src).unwrap_or_else(|e| panic!("{e}"))
}

const CALC_TOKENS: &str = "id <- alpha (alpha | digit)*; int_lit <- `0` | (`1`..`9`) digit*; \
    alpha <= `a`..`z` | `A`..`Z`; digit <= `0`..`9`; op <= `=` | `+`; \
    top <= id | int_lit | op; ws_inline <= ` ` | `\\t`;";

const CALC_MODES: &str = "mode body { top => { emit; } ws_inline => { pass; } `\\n` => { pass; } \
    `//` => { push comment_single; pass; } eof => { pop; } } \
    mode comment_single { `\\n` => { pop_extract; } eof => { pop_extract; } _ => { pass; } }";

fn texts(prog: &LexerProgram, out: &LexOutput) -> Vec<(String, String)> {
    out.tokens.iter().map(|t| (prog.terminals.name(t.term), t.text.clone())).collect()
}

#[test]
fn comment_mode_extracts() {
    let prog = compile_lexer(&spec(CALC_TOKENS, CALC_MODES)).unwrap();
    assert_eq!(prog.modes.len(), 2);
    let out = lex(&prog, "x = 1 // hi\n").unwrap();
    let want: Vec<(String, String)> =
        [("id", "x"), ("`=`", "="), ("int_lit", "1")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    assert_eq!(texts(&prog, &out), want);
    assert_eq!(out.extracts.len(), 1);
    assert_eq!(out.extracts[0].mode, "comment_single");
    assert_eq!(out.extracts[0].text, "// hi");
    assert_eq!((out.extracts[0].start, out.extracts[0].end), (6, 11));
    // Comment running into end of input.
    let out = lex(&prog, "x // tail").unwrap();
    assert_eq!(out.extracts[0].text, "// tail");
}

#[test]
fn leading_zero_splits() {
    let prog = compile_lexer(&spec(CALC_TOKENS, CALC_MODES)).unwrap();
    let out = lex(&prog, "01").unwrap();
    let names: Vec<(String, String)> = texts(&prog, &out);
    assert_eq!(names, vec![("int_lit".into(), "0".into()), ("int_lit".into(), "1".into())]);
}

#[test]
fn overlapping_rules_are_ambiguous() {
    let s = spec("", "mode body { `a` => { pass; } `a`..`b` => { pass; } eof => { pop; } }");
    match compile_lexer(&s) {
        Err(LexCompileError::Ambiguity { witness, .. }) => assert_eq!(witness, "a"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn eof_only_mode() {
    let prog = compile_lexer(&spec("", "mode body { eof => { pop; } }")).unwrap();
    let accepts = prog.modes[0].dfa.states.iter().filter(|s| s.accept.is_some()).count();
    assert_eq!(accepts, 1);
    assert_eq!(lex(&prog, "").unwrap(), LexOutput::default());
    assert!(matches!(lex(&prog, "x"), Err(LexError::NoMatch { offset: 0 })));
}

#[test]
fn stack_errors() {
    let s = spec("", "mode body { `a` => { pass; } `b` => { pass; pop; } eof => { push inner; } } mode inner { `c` => { pass; } }");
    let prog = compile_lexer(&s).unwrap();
    assert!(matches!(lex(&prog, "abab"), Err(LexError::PrematureEmpty { offset: 2 })));
    assert!(matches!(lex(&prog, "aa"), Err(LexError::StackNonemptyAtEof { .. })));
    assert!(lex(&prog, "aab").is_ok());
}

#[test]
fn empty_match_rejected() {
    let s = spec("", "mode body { `a`* => { pass; } eof => { pop; } }");
    assert!(matches!(compile_lexer(&s), Err(LexCompileError::EmptyMatch { .. })));
}

#[test]
fn keywords_beat_identifiers() {
    let toks = "id <- (`a`..`z`)+; kw <= `if` | `then`; top <= kw | id; ws <= ` `;";
    let prog = compile_lexer(&spec(toks, "mode body { top => { emit; } ws => { pass; } eof => { pop; } }")).unwrap();
    let out = lex(&prog, "if iff then").unwrap();
    let names: Vec<String> = out.tokens.iter().map(|t| prog.terminals.name(t.term)).collect();
    assert_eq!(names, vec!["`if`", "id", "`then`"]);
}

#[test]
fn pop_emit_collects_buffer() {
    let toks = "str_lit <- `\"`; q <= `\"`;";
    let modes = "mode body { q => { push s; pass; } ` ` => { pass; } eof => { pop; } } \
                 mode s { q => { pass; pop_emit str_lit; } `a`..`z` => { pass; } }";
    let prog = compile_lexer(&spec(toks, modes)).unwrap();
    let out = lex(&prog, "\"ab\" \"c\"").unwrap();
    let t: Vec<&str> = out.tokens.iter().map(|t| t.text.as_str()).collect();
    assert_eq!(t, vec!["\"ab\"", "\"c\""]);
    assert_eq!((out.tokens[1].start, out.tokens[1].end), (5, 8));
}

#[test]
fn line_col() {
    assert_eq!(token_bounds_to_linecol("7 + (5 + / 3)", 9), (1, 10));
    assert_eq!(token_bounds_to_linecol("4 / (3 - (15 / 5))", 2), (1, 3));
    assert_eq!(token_bounds_to_linecol("ab\ncé d", 7), (2, 4));
    assert_eq!(token_bounds_to_linecol("anything", 0), (1, 1));
}

#[test]
fn dump_is_stable() {
    let prog = compile_lexer(&spec(CALC_TOKENS, CALC_MODES)).unwrap();
    let a = prog.dump();
    assert_eq!(a, compile_lexer(&spec(CALC_TOKENS, CALC_MODES)).unwrap().dump());
    assert!(a.starts_with("mode body (main): "));
}
