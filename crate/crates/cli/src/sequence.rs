use std::path::{Path, PathBuf};

use pencilrank::btd::{random_full_rank, sequence_pn, sequence_zp, tight_instance, ZpVariant};
use pencilrank::exact::rational::{fmt_rational, parse_rational, to_f64};
use pencilrank::exact::Rational;
use pencilrank::kcf::Field;
use pencilrank::minrank::minimal_ranks;
use pencilrank_cli::document::PencilDocument;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::DEFAULT_SEED;
use crate::{CmdResult, Failure};

#[derive(Clone, Debug)]
pub struct Indices(pub Vec<u64>);

/// `a..b` (inclusive) or a comma-separated list.
fn parse_indices(s: &str) -> Result<Indices, String> {
    let p = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("`{x}`: {e}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (p(a)?, p(b)?);
        if a > b {
            return Err(format!("empty range {a}..{b}"));
        }
        return Ok(Indices((a..=b).collect()));
    }
    s.split(',').map(p).collect::<Result<_, _>>().map(Indices)
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational number"))
}

/// `j,a,b`: a Q block of size 2j with eigenvalues −a ± ib.
fn parse_q(s: &str) -> Result<(usize, Rational, Rational), String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [j, a, b] = parts[..] else { return Err("expected `j,a,b`".into()) };
    Ok((j.trim().parse::<usize>().map_err(|e| e.to_string())?, parse_rat(a)?, parse_rat(b)?))
}

#[derive(clap::Subcommand, Debug)]
pub enum SequenceCommand {
    /// Z_p = W_p + λE approaching J_{2k}(a) + λE (optionally ⊕ a Q block)
    Zp(ZpArgs),
    /// Pₙ = n(B + A/n)(C + D/n)ᵀ ⊗ (1, 1/n) − nBCᵀ ⊗ (1, 0)
    Pn(PnArgs),
}

#[derive(clap::Args, Debug)]
pub struct ZpArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_parser = parse_rat, default_value = "0")]
    pub a: Rational,
    /// Indices p: `1..100` or `1,10,1000`
    #[arg(long, value_parser = parse_indices)]
    pub p: Indices,
    /// Replace the tail of the Jordan block by a Q block `j,a,b`
    #[arg(long, value_parser = parse_q)]
    pub q_block: Option<(usize, Rational, Rational)>,
    /// Directory for the member documents
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Distance log (default: standard output)
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum PnInstance {
    /// Random integer stacks of full column rank
    Random,
    /// Shared columns so that rank[A B] = rank[C D] = 3s′/2 exactly (s′ = 4)
    Tight,
}

#[derive(clap::Args, Debug)]
pub struct PnArgs {
    #[arg(long, value_enum, default_value = "random")]
    pub instance: PnInstance,
    #[arg(long, default_value_t = 6)]
    pub rows: usize,
    #[arg(long, default_value_t = 6)]
    pub cols: usize,
    /// Columns s′ of A, B, C, D
    #[arg(long, default_value_t = 4)]
    pub sprime: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Indices n: `1..100` or `10,100,1000`
    #[arg(long, value_parser = parse_indices)]
    pub index: Indices,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn std::io::Write>>, Failure> {
    let out: Box<dyn std::io::Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?),
        None => Box::new(std::io::stdout()),
    };
    Ok(csv::Writer::from_writer(out))
}

fn write_doc(dir: &Path, name: &str, doc: &PencilDocument) -> CmdResult {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, doc.to_string()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct ZpRow {
    p: u64,
    distance: String,
    distance_decimal: f64,
    rho_r: usize,
    rho_s: usize,
}

fn zp(args: &ZpArgs) -> CmdResult {
    let variant = match &args.q_block {
        None => ZpVariant::Plain,
        Some((j, qa, qb)) => ZpVariant::WithQ { j: *j, qa: qa.clone(), qb: qb.clone() },
    };
    let ps = &args.p.0;
    if ps.is_empty() {
        return Err(Failure::Input("no indices p given".into()));
    }
    let mut w = writer(args.csv.as_deref())?;
    for (i, &p) in ps.iter().enumerate() {
        let z = sequence_zp(args.k, &args.a, &variant, p)?;
        let rho = minimal_ranks(&z.pencil, Field::Real);
        let dist = z.distance();
        w.serialize(ZpRow { p, distance: fmt_rational(&dist), distance_decimal: to_f64(&dist), rho_r: rho.r, rho_s: rho.s })?;
        if let Some(dir) = &args.out_dir {
            let note = format!("Z_p member k={} a={} p={p}", args.k, fmt_rational(&args.a));
            write_doc(dir, &format!("zp_p{p}.txt"), &PencilDocument::from_pencil(&z.pencil, &[note]))?;
            if i == 0 {
                let note = format!("Z_p limit k={} a={}", args.k, fmt_rational(&args.a));
                write_doc(dir, "zp_limit.txt", &PencilDocument::from_pencil(&z.limit, &[note]))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PnRow {
    n: u64,
    distance: f64,
    scaled_distance: f64,
    bound: f64,
    max_factor_norm: f64,
    factor_residual: f64,
    rank_ab: usize,
    rank_cd: usize,
    cond_ex: bool,
}

fn pn(args: &PnArgs) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (m, n, sp) = (args.rows, args.cols, args.sprime);
    let [a, b, c, d] = match args.instance {
        PnInstance::Tight => {
            if sp != 4 {
                return Err(Failure::Input("the tight instance has s′ = 4".into()));
            }
            tight_instance(m, n, &mut rng)?
        }
        PnInstance::Random => {
            if sp == 0 || sp > m.min(n) {
                return Err(Failure::Input(format!("s′ = {sp} must lie in 1..={}", m.min(n))));
            }
            [
                random_full_rank(m, sp, &mut rng),
                random_full_rank(m, sp, &mut rng),
                random_full_rank(n, sp, &mut rng),
                random_full_rank(n, sp, &mut rng),
            ]
        }
    };
    let ns = &args.index.0;
    if ns.is_empty() {
        return Err(Failure::Input("no indices n given".into()));
    }
    let mut w = writer(args.csv.as_deref())?;
    let mut cond = None;
    for (i, &k) in ns.iter().enumerate() {
        let mem = sequence_pn(&a, &b, &c, &d, k)?;
        cond = Some(mem.cond_ex);
        w.serialize(PnRow {
            n: k,
            distance: mem.distance,
            scaled_distance: mem.distance * k as f64,
            bound: mem.bound,
            max_factor_norm: mem.factors.max_factor_norm(),
            factor_residual: mem.factors.objective,
            rank_ab: mem.rank_ab,
            rank_cd: mem.rank_cd,
            cond_ex: mem.cond_ex,
        })?;
        if let Some(dir) = &args.out_dir {
            write_doc(dir, &format!("pn_n{k}.txt"), &PencilDocument::from_pencil(&mem.pencil, &[format!("P_n member n={k}")]))?;
            if i == 0 {
                write_doc(dir, "pn_limit.txt", &PencilDocument::from_pencil(&mem.limit, &["P_n limit".to_string()]))?;
            }
        }
    }
    w.flush()?;
    if let Some(c) = cond {
        eprintln!("rank condition min(rank[A B], rank[C D]) > 3s′/2: {c}");
    }
    Ok(())
}

pub fn run(cmd: &SequenceCommand) -> CmdResult {
    match cmd {
        SequenceCommand::Zp(a) => zp(a),
        SequenceCommand::Pn(a) => pn(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pencilrank::exact::rational::to_decimal;

    #[test]
    fn index_lists() {
        assert_eq!(parse_indices("1..4").unwrap().0, vec![1, 2, 3, 4]);
        assert_eq!(parse_indices("10,100").unwrap().0, vec![10, 100]);
        assert!(parse_indices("5..2").is_err());
        assert!(parse_indices("x").is_err());
        assert_eq!(to_decimal(&parse_rat("1/4").unwrap(), 2), "0.25");
    }
}
