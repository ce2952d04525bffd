//! Command-line surface: parse an algebra document, run one verification
//! command, and emit the report as canonical JSON or aligned text.
//!
//! Exit codes: 0 all executed checks passed; 1 check failures; 2 parse or
//! usage errors; 3 hypothesis violations; 4 memory-cap refusals.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use nhl_core::algebra::{AlgebraDocument, CheckLevel};
use nhl_core::complexes::DEFAULT_COLUMN_CAP;
use nhl_core::report::{render_text, run_document, to_canonical_json, Command, RunConfig};
use nhl_core::{Error, FieldSpec};

#[derive(Parser)]
#[command(
    name = "nhl",
    version,
    about = "Exact homology, long exact sequences, and spectral pages for \
             n-ary Leibniz and Filippov algebras given by structure constants"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the bracket identities and the module axiom suite.
    Check(CommonArgs),
    /// Tabulate betti numbers for all eight homology theories.
    Homology(CommonArgs),
    /// Assemble the long exact sequences and the projection ladder.
    Les(CommonArgs),
    /// Verify the filtration pages, their product identities, and the limit.
    Ss(CommonArgs),
    /// Everything above in one document.
    Report(CommonArgs),
}

impl Cmd {
    fn split(self) -> (Command, CommonArgs) {
        match self {
            Cmd::Check(a) => (Command::Check, a),
            Cmd::Homology(a) => (Command::Homology, a),
            Cmd::Les(a) => (Command::Les, a),
            Cmd::Ss(a) => (Command::Ss, a),
            Cmd::Report(a) => (Command::Report, a),
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Algebra document (json with structure constants).
    input: PathBuf,

    /// Highest homology degree to compute.
    #[arg(long, default_value_t = 2)]
    max_degree: usize,

    /// Coefficient field, overriding the document: "prime:P" or "rational".
    #[arg(long)]
    field: Option<String>,

    /// Checker effort: fast, full, or certify (cross-field rerun).
    #[arg(long, default_value = "full")]
    check_level: String,

    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Report rendering.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Include the module action matrices in the report.
    #[arg(long)]
    dump_actions: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::Hypothesis(_) => 3,
        Error::MemoryCap { .. } => 4,
        _ => 1,
    }
}

fn column_cap() -> anyhow::Result<usize> {
    match std::env::var("NHL_MEMORY_CAP_COLS") {
        Ok(v) => {
            let cap: usize = v
                .trim()
                .parse()
                .context("NHL_MEMORY_CAP_COLS must be a positive integer")?;
            anyhow::ensure!(cap > 0, "NHL_MEMORY_CAP_COLS must be positive");
            Ok(cap)
        }
        Err(_) => Ok(DEFAULT_COLUMN_CAP),
    }
}

fn real_main(cli: Cli) -> anyhow::Result<ExitCode> {
    let (command, args) = cli.command.split();

    let level: CheckLevel = args.check_level.parse()?;
    let field: Option<FieldSpec> = args.field.as_deref().map(str::parse).transpose()?;
    let cfg = RunConfig {
        max_degree: args.max_degree,
        level,
        cap: column_cap()?,
        dump_actions: args.dump_actions,
    };

    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("cannot read {}", args.input.display()))?;
    let doc = AlgebraDocument::from_json(&text)?;

    let started = Instant::now();
    let report = run_document(&doc, field, command, &cfg)?;

    let rendered = match args.format {
        Format::Json => to_canonical_json(&report),
        Format::Text => {
            // Wall-clock time is text-only: the json form stays byte-stable.
            let mut t = render_text(&report);
            t.push_str(&format!(
                "elapsed: {:.3}s\n",
                started.elapsed().as_secs_f64()
            ));
            t
        }
    };

    match &args.output {
        Some(path) => fs::write(path, rendered.as_bytes())
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{rendered}"),
    }

    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<Error>()
                .map(exit_code_for)
                .unwrap_or(2);
            ExitCode::from(code)
        }
    }
}
