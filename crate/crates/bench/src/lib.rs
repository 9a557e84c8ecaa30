//! Inputs shared by the benchmarks.

pub const CALC: &str = include_str!("../../core/fixtures/calc.lang");
pub const CALC_NOPREC: &str = include_str!("../../core/fixtures/calc_noprec.lang");
pub const META: &str = include_str!("../../core/fixtures/meta.lang");

/// `n` calc statements, one per line, cycling through a few shapes.
pub fn calc_program(n: usize) -> String {
    let shapes = ["x{i} = {i} + y * (3 - z{i})", "-a^2^b / {i}", "(1 + 2) * -x{i}", "y = x{i}"];
    let mut out = String::new();
    for i in 0..n {
        out.push_str(&shapes[i % shapes.len()].replace("{i}", &i.to_string()));
        out.push_str(";\n");
    }
    out
}
