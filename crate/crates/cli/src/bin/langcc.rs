//! `langcc X.lang [GEN_PATH]`: compiles a language description into a parse
//! table artifact, runs its embedded tests, and optionally parses or
//! reformats a file with the result.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use langcc_core::compiled::{conflict_report, source_digest};
use langcc_core::driver::run_tests;
use langcc_core::grammar::lower_grammar;
use langcc_core::lexer::compile_lexer;
use langcc_core::lr::{build_lr, LrOptions};
use langcc_core::{parse_lang_spec, CompiledLang};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Parser, Debug)]
#[command(name = "langcc", version, about = "LR(k) parser generator for .lang descriptions")]
struct Args {
    /// A `.lang` description, or a `.clang` artifact from an earlier run.
    input: PathBuf,
    /// Directory receiving `X.clang` and `X.ast.schema`. Must exist.
    gen_path: Option<PathBuf>,
    /// Largest lookahead tried before reporting conflicts.
    #[arg(long, default_value_t = 2)]
    max_k: usize,
    /// Compile nonterminal slots as recursive-descent calls where possible.
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    rd: Switch,
    #[arg(long)]
    dump_lexer: bool,
    #[arg(long)]
    dump_grammar: bool,
    #[arg(long)]
    dump_lr: bool,
    /// Also write the conflict report to this file.
    #[arg(long, value_name = "FILE")]
    conflicts_out: Option<PathBuf>,
    /// Parse FILE and print its tree.
    #[arg(long, value_name = "FILE")]
    parse: Option<PathBuf>,
    /// Start nonterminal for `--parse` and `--format`.
    #[arg(long, value_name = "NONTERM")]
    start: Option<String>,
    /// Parse FILE and print it back in normal form.
    #[arg(long, value_name = "FILE")]
    format: Option<PathBuf>,
    /// Skip the embedded `compile_test` and `test` stanzas.
    #[arg(long)]
    no_test: bool,
}

enum Fail {
    Io(String),
    Diag(String),
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, data: &str) -> Result<(), Fail> {
    std::fs::write(path, data).map_err(|e| Fail::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Diag(m)) => {
            if !m.is_empty() {
                eprintln!("{m}");
            }
            ExitCode::from(1)
        }
        Err(Fail::Io(m)) => {
            eprintln!("langcc: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> Result<(), Fail> {
    if let Some(dir) = &args.gen_path {
        if !dir.is_dir() {
            return Err(Fail::Io(format!("{}: not a directory", dir.display())));
        }
    }
    let src = read(&args.input)?;
    let stem = args.input.file_stem().and_then(|s| s.to_str()).unwrap_or("out").to_string();
    let lang = if args.input.extension().is_some_and(|e| e == "clang") {
        CompiledLang::from_json(&src).map_err(|e| Fail::Diag(format!("{}: {e}", args.input.display())))?
    } else {
        compile(args, &src, &stem)?
    };
    if let Some(f) = &args.parse {
        let text = read(f)?;
        match lang.parse(&text, args.start.as_deref()) {
            Ok(v) => println!("{}", v.debug_string()),
            Err(e) => return Err(Fail::Diag(format!("{}: {}", f.display(), e.render(&text)))),
        }
    }
    if let Some(f) = &args.format {
        let text = read(f)?;
        let v = lang
            .parse(&text, args.start.as_deref())
            .map_err(|e| Fail::Diag(format!("{}: {}", f.display(), e.render(&text))))?;
        let out = lang.pretty_print(&v).map_err(|e| Fail::Diag(format!("{}: {e}", f.display())))?;
        print!("{out}");
        if !out.ends_with('\n') {
            println!();
        }
    }
    Ok(())
}

fn compile(args: &Args, src: &str, stem: &str) -> Result<CompiledLang, Fail> {
    let file = args.input.display().to_string();
    let diag = |e: &dyn std::fmt::Display| {
        Fail::Diag(e.to_string().lines().map(|l| format!("{file}:{l}")).collect::<Vec<_>>().join("\n"))
    };
    let spec = parse_lang_spec(src).map_err(|e| diag(&e))?;
    let lexer = compile_lexer(&spec).map_err(|e| Fail::Diag(format!("{file}: {e}")))?;
    if args.dump_lexer {
        print!("{}", lexer.dump());
    }
    let lowered = lower_grammar(&spec, &lexer.terminals).map_err(|e| diag(&e))?;
    if args.dump_grammar {
        print!("{}", lowered.cfg.dump());
    }
    let opts = LrOptions { rd: args.rd == Switch::On };
    let mut k = 1;
    let automaton = loop {
        let a = build_lr(&lowered.cfg, k, opts).map_err(|e| Fail::Diag(format!("{file}: {e}")))?;
        if a.conflicts.is_empty() || k >= args.max_k {
            break a;
        }
        k += 1;
    };
    if args.dump_lr {
        print!("{}", automaton.dump(&lowered.cfg));
    }
    for n in &automaton.notices {
        eprintln!("note: {n}");
    }
    if !automaton.conflicts.is_empty() {
        let report = conflict_report(&lowered.cfg, &automaton);
        if let Some(p) = &args.conflicts_out {
            write(p, &report)?;
        }
        eprint!("{report}");
        return Err(Fail::Diag(format!(
            "{file}: {} LR conflict(s) at k = {}",
            automaton.conflicts.len(),
            automaton.k
        )));
    }
    let mut lang = CompiledLang::assemble(stem, lexer, lowered, &automaton);
    lang.source_digest = Some(source_digest(src));
    if let Some(dir) = &args.gen_path {
        write(&dir.join(format!("{stem}.clang")), &lang.to_json())?;
        write(&dir.join(format!("{stem}.ast.schema")), &lang.schema.render())?;
    }
    if !args.no_test {
        let report = run_tests(&spec, &lang, opts.rd);
        print!("{}", report.render());
        if !report.passed() {
            return Err(Fail::Diag(format!("{file}: {} embedded test(s) failed", report.failures())));
        }
    }
    Ok(lang)
}
