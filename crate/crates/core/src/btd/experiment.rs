//! Repeated ALS runs on pencils without real eigenvalues, with a control run
//! one rank higher where the infimum is attained.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minrank::in_c;
use crate::pencil::Pencil;

use super::{als_approximate, pencil_to_tensor, AlsInit, DivergenceLog};

/// Acceptance knobs of the experiment; none of them is a theoretical constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceThresholds {
    /// Required ratio of the final max factor norm to that of the starting point.
    pub norm_growth: f64,
    /// Required cond([w z]) at the end of best-decile trials.
    pub cond: f64,
    /// Control factor norms must stay below this multiple of ‖P‖.
    pub control_factor_bound: f64,
    /// Iterations ignored when comparing objective curves.
    pub burn_in: usize,
}

impl Default for DivergenceThresholds {
    fn default() -> Self {
        DivergenceThresholds { norm_growth: 10.0, cond: 1e3, control_factor_bound: 10.0, burn_in: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub iters: usize,
    pub seed: u64,
    pub rel_tol: f64,
    pub thresholds: DivergenceThresholds,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { trials: 20, iters: 10_000, seed: 2024, rel_tol: 0.0, thresholds: DivergenceThresholds::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub seed: u64,
    pub iterations: usize,
    pub final_objective: f64,
    pub initial_max_factor_norm: f64,
    pub final_max_factor_norm: f64,
    pub peak_max_factor_norm: f64,
    pub norm_growth: f64,
    pub final_cond_wz: f64,
    pub monotone: bool,
    pub min_norm_steps: usize,
}

impl TrialSummary {
    pub fn from_log(trial: usize, seed: u64, log: &DivergenceLog) -> Self {
        let last = log.records.last();
        let init = log.initial_max_factor_norm;
        let fin = last.map_or(0.0, |r| r.max_factor_norm);
        TrialSummary {
            trial,
            seed,
            iterations: log.records.len(),
            final_objective: last.map_or(f64::NAN, |r| r.objective),
            initial_max_factor_norm: init,
            final_max_factor_norm: fin,
            peak_max_factor_norm: log.records.iter().map(|r| r.max_factor_norm).fold(0.0, f64::max),
            norm_growth: if init > 0.0 { fin / init } else { f64::INFINITY },
            final_cond_wz: last.map_or(f64::NAN, |r| r.cond_wz),
            monotone: log.monotone_violations == 0,
            min_norm_steps: log.min_norm_steps(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub ranks: (usize, usize),
    pub control_ranks: (usize, usize),
    pub input_norm: f64,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialSummary>,
    pub control: Vec<TrialSummary>,
    pub best_objective: f64,
    pub control_best_objective: f64,
    /// Trial indices whose final objective is in the best decile.
    pub best_decile: Vec<usize>,
    pub all_monotone: bool,
    pub growth_in_every_trial: bool,
    pub cond_in_best_decile: bool,
    pub control_strictly_better: bool,
    pub control_bounded: bool,
    pub control_dominates_after_burn_in: bool,
    #[serde(skip)]
    pub logs: Vec<DivergenceLog>,
    #[serde(skip)]
    pub control_logs: Vec<DivergenceLog>,
}

/// `cfg.trials` seeded ALS runs in parallel; trial i uses seed `cfg.seed + i`.
pub fn als_trials(t: &super::Tensor3, r: usize, s: usize, cfg: &ExperimentConfig) -> Result<Vec<DivergenceLog>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| als_approximate(t, r, s, AlsInit::Seed(cfg.seed + i as u64), cfg.iters, cfg.rel_tol).map(|x| x.1))
        .collect()
}

/// Objective at iteration `it` (1-based), holding the last value after an early stop.
fn objective_at(log: &DivergenceLog, it: usize) -> f64 {
    log.records.get(it - 1).or(log.records.last()).map_or(f64::INFINITY, |r| r.objective)
}

/// ALS with ranks (2k−1, 2k−1) on a 2k×2k pencil without real eigenvalues,
/// against the control ranks (2k, 2k−1).
pub fn divergence_experiment(p: &Pencil, r: usize, s: usize, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if !in_c(p) {
        return Err(Error::NotInC);
    }
    let n = p.n();
    if r != n - 1 || s != n - 1 {
        return Err(Error::InvalidRanks(format!("expected ({}, {}), got ({r}, {s})", n - 1, n - 1)));
    }
    if cfg.trials == 0 || cfg.iters == 0 {
        return Err(Error::InvalidParameter("trials and iterations must be positive".into()));
    }
    let t = pencil_to_tensor(p);
    let input_norm = t.norm();
    let logs = als_trials(&t, r, s, cfg)?;
    let control_logs = als_trials(&t, n, n - 1, cfg)?;
    let seeds = |i: usize| cfg.seed + i as u64;
    let trials: Vec<TrialSummary> = logs.iter().enumerate().map(|(i, l)| TrialSummary::from_log(i, seeds(i), l)).collect();
    let control: Vec<TrialSummary> =
        control_logs.iter().enumerate().map(|(i, l)| TrialSummary::from_log(i, seeds(i), l)).collect();

    let best = |v: &[TrialSummary]| v.iter().map(|x| x.final_objective).fold(f64::INFINITY, f64::min);
    let best_objective = best(&trials);
    let control_best_objective = best(&control);

    let mut order: Vec<usize> = (0..trials.len()).collect();
    order.sort_by(|&a, &b| trials[a].final_objective.total_cmp(&trials[b].final_objective));
    let decile = trials.len().div_ceil(10);
    let best_decile: Vec<usize> = order[..decile].to_vec();

    let th = &cfg.thresholds;
    let last_iter = logs.iter().chain(&control_logs).map(|l| l.records.len()).max().unwrap_or(0);
    let dominates = (th.burn_in.max(1)..=last_iter).all(|it| {
        let e = logs.iter().map(|l| objective_at(l, it)).fold(f64::INFINITY, f64::min);
        let c = control_logs.iter().map(|l| objective_at(l, it)).fold(f64::INFINITY, f64::min);
        c < e
    });

    Ok(ExperimentReport {
        ranks: (r, s),
        control_ranks: (n, n - 1),
        input_norm,
        config: cfg.clone(),
        all_monotone: trials.iter().all(|x| x.monotone),
        growth_in_every_trial: trials.iter().all(|x| x.norm_growth >= th.norm_growth),
        cond_in_best_decile: best_decile.iter().all(|&i| trials[i].final_cond_wz >= th.cond),
        control_strictly_better: control_best_objective < best_objective,
        control_bounded: control.iter().all(|x| x.peak_max_factor_norm <= th.control_factor_bound * input_norm),
        control_dominates_after_burn_in: dominates,
        best_decile,
        trials,
        control,
        best_objective,
        control_best_objective,
        logs,
        control_logs,
    })
}

#[derive(Serialize)]
struct CsvRow {
    trial: usize,
    iter: usize,
    objective: f64,
    max_factor_norm: f64,
    cond_wz: f64,
    sigma_min_block1: f64,
    sigma_min_block2: f64,
}

/// One CSV row per iteration per trial, trial index = position in `logs`.
pub fn write_log_csv<W: Write>(logs: &[DivergenceLog], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for (trial, log) in logs.iter().enumerate() {
        for r in &log.records {
            w.serialize(CsvRow {
                trial,
                iter: r.iter,
                objective: r.objective,
                max_factor_norm: r.max_factor_norm,
                cond_wz: r.cond_wz,
                sigma_min_block1: r.sigma_min_block1,
                sigma_min_block2: r.sigma_min_block2,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    #[test]
    fn rejects_pencils_with_real_eigenvalues() {
        let cfg = ExperimentConfig { trials: 1, iters: 1, ..Default::default() };
        assert_eq!(divergence_experiment(&Pencil::jordan(2, &rat(0)), 1, 1, &cfg).unwrap_err(), Error::NotInC);
        let q = Pencil::q_block(1, &rat(0), &rat(1)).unwrap();
        assert!(divergence_experiment(&q, 2, 1, &cfg).is_err());
    }

    #[test]
    fn small_run_and_csv() {
        let q = Pencil::q_block(1, &rat(0), &rat(1)).unwrap();
        let cfg = ExperimentConfig { trials: 3, iters: 300, ..Default::default() };
        let rep = divergence_experiment(&q, 1, 1, &cfg).unwrap();
        assert!(rep.all_monotone);
        assert!(rep.control_strictly_better);
        let mut buf = vec![];
        write_log_csv(&rep.logs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("trial,iter,objective,max_factor_norm,cond_wz,sigma_min_block1,sigma_min_block2\n"));
        assert_eq!(text.lines().count(), 1 + 3 * 300);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["ranks"], serde_json::json!([1, 1]));
    }
}
