//! Grids of (saving rate, surplus rate) runs with replicate seeds.
//!
//! Each replicate is an independent run. Gini comes from the `t2` snapshot,
//! total exchange from the pool accumulated over all `t_max` exchanges, and
//! tau from the `t1`/`t2` snapshot pair. Replicates run in parallel on the
//! current rayon pool; results are reduced in (lambda, gamma, replicate)
//! order, so output does not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exchange::{run_simulation, SimulationParams};
use crate::metrics::{gini, kendall_tau, total_exchange};
use crate::rng::derive_seed;

pub const DEFAULT_N_AGENTS: usize = 1000;
pub const DEFAULT_T_MAX: u64 = 100_000;
pub const DEFAULT_REPLICATES: u32 = 5;

/// `t1` as a fraction of `t_max` (99 000 of 100 000 by default).
pub const T1_FRACTION: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lambda_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub n_agents: usize,
    pub initial_asset: f64,
    pub t_max: u64,
    /// First tau snapshot.
    pub t1: u64,
    /// Second tau snapshot, also the Gini snapshot.
    pub t2: u64,
    pub replicates: u32,
    pub base_seed: u64,
}

impl SweepSpec {
    /// Spec with N = 1000, t_max = 10^5, t1 = 99 000, t2 = t_max and 5 replicates.
    pub fn new(lambda_values: Vec<f64>, gamma_values: Vec<f64>) -> Self {
        SweepSpec {
            lambda_values,
            gamma_values,
            n_agents: DEFAULT_N_AGENTS,
            initial_asset: 1.0,
            t_max: DEFAULT_T_MAX,
            t1: default_t1(DEFAULT_T_MAX),
            t2: DEFAULT_T_MAX,
            replicates: DEFAULT_REPLICATES,
            base_seed: 0,
        }
    }

    /// Sets `t_max` and rescales `t1`/`t2` to their default proportions.
    pub fn with_t_max(mut self, t_max: u64) -> Self {
        self.t_max = t_max;
        self.t1 = default_t1(t_max);
        self.t2 = t_max;
        self
    }

    pub fn with_replicates(mut self, replicates: u32) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_agents(mut self, n_agents: usize) -> Self {
        self.n_agents = n_agents;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda_values.is_empty() || self.gamma_values.is_empty() {
            return Err(invalid("sweep grids must be non-empty"));
        }
        for &v in self.lambda_values.iter().chain(&self.gamma_values) {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("grid value {v} outside [0, 1]")));
            }
        }
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        if !(self.t1 < self.t2 && self.t2 <= self.t_max) {
            return Err(invalid(format!(
                "need t1 < t2 <= t_max, got t1={}, t2={}, t_max={}",
                self.t1, self.t2, self.t_max
            )));
        }
        Ok(())
    }

    /// Seed of one replicate, a stable hash of the base seed and the cell coordinates.
    pub fn replicate_seed(&self, lambda_idx: usize, gamma_idx: usize, replicate: u32) -> u64 {
        derive_seed(self.base_seed, &[lambda_idx as u64, gamma_idx as u64, replicate as u64])
    }

    pub fn run_params(&self, lambda_idx: usize, gamma_idx: usize, replicate: u32) -> Result<SimulationParams> {
        SimulationParams::new(
            self.n_agents,
            self.lambda_values[lambda_idx],
            self.gamma_values[gamma_idx],
            self.t_max,
            self.replicate_seed(lambda_idx, gamma_idx, replicate),
        )?
        .with_initial_asset(self.initial_asset)?
        .with_snapshots(vec![self.t1, self.t2])
    }
}

pub fn default_t1(t_max: u64) -> u64 {
    (T1_FRACTION * t_max as f64).round() as u64
}

/// Aggregated indexes of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub lambda: f64,
    pub gamma: f64,
    pub mean_g: f64,
    pub mean_f: f64,
    pub mean_tau: f64,
    pub std_g: f64,
    pub std_f: f64,
    pub std_tau: f64,
    pub replicates: u32,
}

/// Indexes from one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub g: f64,
    pub f: f64,
    pub tau: f64,
}

/// Gini at `t2`, total exchange over `t_max`, tau between `t1` and `t2`.
pub fn evaluate_run(params: &SimulationParams, t1: u64, t2: u64) -> Result<RunMetrics> {
    let run = run_simulation(params)?;
    let missing = |t| invalid(format!("run has no snapshot at t={t}"));
    let first = run.snapshot(t1).ok_or_else(|| missing(t1))?;
    let second = run.snapshot(t2).ok_or_else(|| missing(t2))?;
    Ok(RunMetrics {
        g: gini(second.assets())?.0,
        f: total_exchange(run.cumulative_pool, params.t_max)?.0,
        tau: kendall_tau(first.assets(), second.assets())?.0,
    })
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    spec.validate()?;
    let n_gamma = spec.gamma_values.len();
    let reps = spec.replicates as usize;
    let jobs = spec.lambda_values.len() * n_gamma * reps;

    let results: Vec<RunMetrics> = (0..jobs)
        .into_par_iter()
        .map(|job| {
            let (li, gi, r) = (job / (n_gamma * reps), (job / reps) % n_gamma, (job % reps) as u32);
            spec.run_params(li, gi, r)
                .and_then(|p| evaluate_run(&p, spec.t1, spec.t2))
                .map_err(|e| Error::Cell {
                    lambda: spec.lambda_values[li],
                    gamma: spec.gamma_values[gi],
                    replicate: r,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    Ok(results
        .chunks(reps)
        .enumerate()
        .map(|(cell_idx, runs)| {
            let (li, gi) = (cell_idx / n_gamma, cell_idx % n_gamma);
            aggregate(spec.lambda_values[li], spec.gamma_values[gi], runs)
        })
        .collect())
}

/// Mean and population (1/R) standard deviation per index.
pub fn aggregate(lambda: f64, gamma: f64, runs: &[RunMetrics]) -> SweepCell {
    let stats = |pick: fn(&RunMetrics) -> f64| {
        let n = runs.len() as f64;
        let mean = runs.iter().map(pick).sum::<f64>() / n;
        let var = runs.iter().map(|r| (pick(r) - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    let (mean_g, std_g) = stats(|r| r.g);
    let (mean_f, std_f) = stats(|r| r.f);
    let (mean_tau, std_tau) = stats(|r| r.tau);
    SweepCell {
        lambda,
        gamma,
        mean_g,
        mean_f,
        mean_tau,
        std_g,
        std_f,
        std_tau,
        replicates: runs.len() as u32,
    }
}

/// Gini index sampled over time in a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiniSeries {
    pub lambda: f64,
    pub gamma: f64,
    pub times: Vec<u64>,
    pub g_values: Vec<f64>,
}

/// One run with snapshots at `sample_times` (replacing those in `params`).
pub fn gini_time_series(params: &SimulationParams, sample_times: &[u64]) -> Result<GiniSeries> {
    let params = params.clone().with_snapshots(sample_times.to_vec())?;
    let run = run_simulation(&params)?;
    let g_values = run
        .snapshots
        .values()
        .map(|p| gini(p.assets()).map(|g| g.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(GiniSeries {
        lambda: params.saving_rate,
        gamma: params.surplus_rate,
        times: sample_times.to_vec(),
        g_values,
    })
}
