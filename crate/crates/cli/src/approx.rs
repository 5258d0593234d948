use std::path::PathBuf;

use pencilrank::btd::{
    als_trials, divergence_experiment, float_pencil_to_tensor, pencil_to_tensor, write_log_csv, ExperimentConfig,
    TrialSummary,
};
use pencilrank_cli::document::EntryMode;
use serde_json::json;

use crate::{emit, read_document, CmdResult, Failure};

/// Default seed of every randomized command.
pub const DEFAULT_SEED: u64 = 2024;

fn parse_ranks(s: &str) -> Result<(usize, usize), String> {
    let (r, t) = s.split_once(',').ok_or("expected `r,s`")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((p(r)?, p(t)?))
}

#[derive(clap::Args, Debug)]
pub struct ApproxArgs {
    /// Pencil document (d = 2)
    pub file: PathBuf,
    /// Block ranks `r,s` with r ≥ s
    #[arg(long, value_parser = parse_ranks)]
    pub ranks: (usize, usize),
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Sweeps per trial
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    /// Trial i starts from seed + i
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Stop when the relative decrease falls below this (0 runs all sweeps)
    #[arg(long, default_value_t = 0.0)]
    pub rel_tol: f64,
    /// Also run the control ranks and the divergence checks (pencils without real eigenvalues)
    #[arg(long)]
    pub experiment: bool,
    /// Per-iteration log: trial, iter, objective, max_factor_norm, cond_wz, sigma_min_block1, sigma_min_block2
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary report as JSON
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

pub fn run(args: &ApproxArgs) -> CmdResult {
    let doc = read_document(&args.file)?;
    if doc.d != 2 {
        return Err(Failure::Input(format!("approximation needs a pencil (d = 2), got d = {}", doc.d)));
    }
    let (r, s) = args.ranks;
    let cfg = ExperimentConfig { trials: args.trials, iters: args.iters, seed: args.seed, rel_tol: args.rel_tol, ..Default::default() };
    if args.trials == 0 || args.iters == 0 {
        return Err(Failure::Input("trials and iterations must be positive".into()));
    }
    let (summary, logs) = if args.experiment {
        if doc.mode != EntryMode::Rational {
            return Err(Failure::Input("the experiment needs rational entries".into()));
        }
        let p = doc.exact_pencil().expect("d = 2");
        let rep = divergence_experiment(&p, r, s, &cfg)?;
        println!("best objective: {:e} (control {:e})", rep.best_objective, rep.control_best_objective);
        println!("monotone in every trial: {}", rep.all_monotone);
        println!("factor growth ≥ ×{} in every trial: {}", cfg.thresholds.norm_growth, rep.growth_in_every_trial);
        println!("cond([w z]) ≥ {:e} in the best decile: {}", cfg.thresholds.cond, rep.cond_in_best_decile);
        println!("control strictly better: {}", rep.control_strictly_better);
        println!("control factors bounded: {}", rep.control_bounded);
        let v = serde_json::to_value(&rep).expect("serializable report");
        (v, rep.logs)
    } else {
        let t = match doc.mode {
            EntryMode::Rational => pencil_to_tensor(&doc.exact_pencil().expect("d = 2")),
            EntryMode::Float => float_pencil_to_tensor(&doc.float_pencil(1.0).expect("d = 2")),
        };
        let logs = als_trials(&t, r, s, &cfg)?;
        let trials: Vec<TrialSummary> =
            logs.iter().enumerate().map(|(i, l)| TrialSummary::from_log(i, args.seed + i as u64, l)).collect();
        let best = trials.iter().map(|x| x.final_objective).fold(f64::INFINITY, f64::min);
        let monotone = trials.iter().all(|x| x.monotone);
        println!("best objective: {best:e} over {} trials", trials.len());
        println!("monotone in every trial: {monotone}");
        let v = json!({
            "ranks": [r, s],
            "input_norm": t.norm(),
            "config": cfg,
            "trials": trials,
            "best_objective": best,
            "all_monotone": monotone,
        });
        (v, logs)
    };
    if let Some(path) = &args.csv {
        let f = std::fs::File::create(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        write_log_csv(&logs, std::io::BufWriter::new(f))?;
    }
    if let Some(path) = &args.summary {
        emit(Some(path), &(serde_json::to_string_pretty(&summary).expect("plain JSON values") + "\n"))?;
    }
    Ok(())
}
