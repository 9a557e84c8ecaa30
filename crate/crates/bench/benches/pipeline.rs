use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use langcc_bench::{calc_program, CALC, CALC_NOPREC, META};
use langcc_core::compiled::conflict_report;
use langcc_core::grammar::lower_grammar;
use langcc_core::lexer::compile_lexer;
use langcc_core::lr::{build_lr, LrOptions};
use langcc_core::{compile_source, parse_lang_spec, CompileOptions};

fn compile(c: &mut Criterion) {
    let mut g = c.benchmark_group("compile");
    for (name, src) in [("calc", CALC), ("meta", META)] {
        g.bench_function(name, |b| b.iter(|| compile_source(src, name, CompileOptions::default()).unwrap()));
    }
    g.finish();
}

fn trace(c: &mut Criterion) {
    let spec = parse_lang_spec(CALC_NOPREC).unwrap();
    let lexer = compile_lexer(&spec).unwrap();
    let cfg = lower_grammar(&spec, &lexer.terminals).unwrap().cfg;
    let a = build_lr(&cfg, 1, LrOptions::default()).unwrap();
    c.bench_function("trace/calc_noprec", |b| b.iter(|| conflict_report(&cfg, &a)));
}

fn parse(c: &mut Criterion) {
    let lang = compile_source(CALC, "calc", CompileOptions::default()).unwrap().lang;
    let mut g = c.benchmark_group("parse");
    for n in [1000, 5000] {
        let prog = calc_program(n);
        g.throughput(Throughput::Bytes(prog.len() as u64));
        g.bench_with_input(BenchmarkId::new("calc", n), &prog, |b, p| b.iter(|| lang.parse(p, Some("Prog")).unwrap()));
    }
    let prog = calc_program(1000);
    let tree = lang.parse(&prog, Some("Prog")).unwrap();
    g.bench_function("print/calc/1000", |b| b.iter(|| lang.pretty_print(&tree).unwrap()));
    g.finish();
}

criterion_group!(benches, compile, trace, parse);
criterion_main!(benches);
