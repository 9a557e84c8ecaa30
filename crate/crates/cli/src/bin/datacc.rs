//! `datacc X.data GEN_PATH`: checks a datatype description and writes its
//! canonical form to `GEN_PATH/X.schema`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use langcc_core::datacc::{parse_data_spec, DataError, TypeDef};

#[derive(Parser, Debug)]
#[command(name = "datacc", version, about = "Algebraic datatype checker")]
struct Args {
    input: PathBuf,
    /// Existing directory receiving `X.schema`.
    gen_path: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let src = match std::fs::read_to_string(&args.input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("datacc: {}: {e}", args.input.display());
            return ExitCode::from(2);
        }
    };
    if !args.gen_path.is_dir() {
        eprintln!("datacc: {}: not a directory", args.gen_path.display());
        return ExitCode::from(2);
    }
    let schema = match parse_data_spec(&src) {
        Ok(s) => s,
        Err(e) => {
            let sep = if matches!(e, DataError::Syntax { .. }) { "" } else { " " };
            eprintln!("{}:{sep}{e}", args.input.display());
            return ExitCode::from(1);
        }
    };
    let stem = args.input.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let out = args.gen_path.join(format!("{stem}.schema"));
    if let Err(e) = std::fs::write(&out, schema.render()) {
        eprintln!("datacc: {}: {e}", out.display());
        return ExitCode::from(2);
    }
    for t in schema.types.values() {
        let shape = match &t.def {
            TypeDef::Product(fs) => format!("product, {} field(s)", fs.len()),
            TypeDef::Sum(cs) => format!("sum, {} case(s)", cs.len()),
            TypeDef::Enum(ns) => format!("enum, {} case(s)", ns.len()),
        };
        let params = if t.params.is_empty() { String::new() } else { format!("[{}]", t.params.join(", ")) };
        println!("{}{params}: {shape}", t.name);
    }
    ExitCode::SUCCESS
}
