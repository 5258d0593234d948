//! `pencilrank`: Kronecker structure, minimal ranks and orbit families of
//! matrix pencils, and the approximation experiments built on them.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 internal failure.

mod analyze;
mod approx;
mod sequence;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pencilrank::kcf::Field;
use pencilrank_cli::{DocError, PencilDocument};

#[derive(Parser, Debug)]
#[command(name = "pencilrank", version, about = "Exact and numerical analysis of matrix pencils")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structure, minimal ranks, attaining transform, multilinear rank and family of a pencil
    Analyze(analyze::AnalyzeArgs),
    /// Write the canonical representative of a family
    Canonical(CanonicalArgs),
    /// Alternating least squares for the two-block approximation of a pencil
    Approx(approx::ApproxArgs),
    /// Members of the convergent sequences and their distance logs
    #[command(subcommand)]
    Sequence(sequence::SequenceCommand),
}

#[derive(clap::Args, Debug)]
struct CanonicalArgs {
    /// Family name as in the catalog, e.g. `R2,2` or `S'3,2`
    family: String,
    /// Parameter binding `name=value` with a rational value; repeatable
    #[arg(long = "param", short = 'p', value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Output file (default: standard output)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Field {
        match f {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        }
    }
}

/// Why a command failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Internal(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "error: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<pencilrank::Error> for Failure {
    fn from(e: pencilrank::Error) -> Self {
        match e {
            pencilrank::Error::Internal(_) => Failure::Internal(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn read_document(path: &Path) -> Result<PencilDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    PencilDocument::parse(&text).map_err(|e: DocError| Failure::Input(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to standard output when absent.
pub fn emit(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn canonical(args: &CanonicalArgs) -> CmdResult {
    use pencilrank::classify::{canonical_representative, FamilyLabel};
    use pencilrank::exact::rational::parse_rational;

    let mut bindings = vec![];
    for kv in &args.params {
        let (k, v) = kv.split_once('=').ok_or_else(|| Failure::Input(format!("expected NAME=VALUE, got `{kv}`")))?;
        let v = parse_rational(v).ok_or_else(|| Failure::Input(format!("`{v}` is not a rational number")))?;
        bindings.push((k.trim().to_string(), v));
    }
    let refs: Vec<(&str, _)> = bindings.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    let label = FamilyLabel::new(&args.family, &refs)?;
    let p = canonical_representative(&label)?;
    let doc = PencilDocument::from_pencil(&p, &[format!("family {label}")]);
    emit(args.output.as_deref(), &doc.to_string())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Analyze(a) => analyze::run(&a),
        Command::Canonical(a) => canonical(&a),
        Command::Approx(a) => approx::run(&a),
        Command::Sequence(s) => sequence::run(&s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // a panic is a broken internal invariant, not bad input
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("{f}");
            ExitCode::from(match f {
                Failure::Input(_) => 2,
                Failure::Internal(_) => 3,
            })
        }
        Err(_) => ExitCode::from(3),
    }
}
