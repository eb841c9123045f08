//! Configuration file schema. Every section and key is optional; missing
//! keys take the defaults below. Unknown keys are rejected.
//!
//! ```toml
//! out = "out"
//! format = "csv"          # or "json": also write JSON summaries
//!
//! [simulation]
//! n_agents = 1000
//! saving_rate = 0.25
//! surplus_rate = 0.5
//! initial_asset = 1.0
//! t_max = 100000
//! seed = 0
//! snapshot_times = [0, 1000, 10000, 100000]
//! histogram_bins = 50
//! # tau_t1 = 99000      # defaults to 0.99 * t_max
//!
//! [sweep]
//! lambda_values = [0.05, 0.10, ..., 0.95]
//! gamma_values = [0.0, 0.1, 0.5, 1.0]
//! n_agents = 1000
//! initial_asset = 1.0
//! t_max = 100000
//! # t1 = 99000          # defaults to 0.99 * t_max
//! # t2 = 100000         # defaults to t_max
//! replicates = 5
//! base_seed = 0
//!
//! [fit]
//! # table = "out/sweep.csv"
//!
//! [empirical]
//! # data = "data/oecd_table1.csv"
//! # thresholds = [200.0, 450.0]   # defaults to the 33rd/67th percentiles of f
//! ```

use std::path::{Path, PathBuf};

use anyhow::Context;
use kinex_core::sweep::{default_t1, SweepSpec};
use kinex_core::SimulationParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub out: PathBuf,
    pub format: OutputFormat,
    pub simulation: SimulationConfig,
    pub sweep: SweepConfig,
    pub fit: FitConfig,
    pub empirical: EmpiricalConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            out: PathBuf::from("out"),
            format: OutputFormat::Csv,
            simulation: SimulationConfig::default(),
            sweep: SweepConfig::default(),
            fit: FitConfig::default(),
            empirical: EmpiricalConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub n_agents: usize,
    pub saving_rate: f64,
    pub surplus_rate: f64,
    pub initial_asset: f64,
    pub t_max: u64,
    pub seed: u64,
    /// Defaults to 0, 10^3, 10^4, 10^5 (those not past `t_max`) and `t_max`.
    pub snapshot_times: Option<Vec<u64>>,
    pub histogram_bins: usize,
    /// First snapshot of the tau pair; the second is `t_max`.
    pub tau_t1: Option<u64>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            n_agents: 1000,
            saving_rate: 0.25,
            surplus_rate: 0.5,
            initial_asset: 1.0,
            t_max: 100_000,
            seed: 0,
            snapshot_times: None,
            histogram_bins: 50,
            tau_t1: None,
        }
    }
}

impl SimulationConfig {
    /// Fills in defaults that depend on other fields.
    pub fn resolve(&mut self) {
        if self.snapshot_times.is_none() {
            let mut times: Vec<u64> = [0, 1_000, 10_000, 100_000]
                .into_iter()
                .filter(|&t| t <= self.t_max)
                .collect();
            if times.last() != Some(&self.t_max) {
                times.push(self.t_max);
            }
            self.snapshot_times = Some(times);
        }
        if self.tau_t1.is_none() {
            self.tau_t1 = Some(default_t1(self.t_max));
        }
    }

    pub fn tau_t1(&self) -> u64 {
        self.tau_t1.unwrap_or_else(|| default_t1(self.t_max))
    }

    /// Run parameters. Snapshots cover the configured schedule plus the tau pair.
    pub fn params(&self) -> anyhow::Result<SimulationParams> {
        if self.histogram_bins == 0 {
            anyhow::bail!("simulation.histogram_bins must be at least 1");
        }
        let t1 = self.tau_t1();
        if t1 >= self.t_max {
            anyhow::bail!("simulation.tau_t1 ({t1}) must be below t_max ({})", self.t_max);
        }
        let mut times = self.snapshot_times.clone().unwrap_or_default();
        if times.windows(2).any(|w| w[0] >= w[1]) {
            anyhow::bail!("simulation.snapshot_times must be strictly ascending");
        }
        times.extend([t1, self.t_max]);
        times.sort_unstable();
        times.dedup();
        let params = SimulationParams::new(
            self.n_agents,
            self.saving_rate,
            self.surplus_rate,
            self.t_max,
            self.seed,
        )?
        .with_initial_asset(self.initial_asset)?
        .with_snapshots(times)?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lambda_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub n_agents: usize,
    pub initial_asset: f64,
    pub t_max: u64,
    pub t1: Option<u64>,
    pub t2: Option<u64>,
    pub replicates: u32,
    pub base_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lambda_values: (1..=19).map(|k| k as f64 * 0.05).map(round_grid).collect(),
            gamma_values: vec![0.0, 0.1, 0.5, 1.0],
            n_agents: 1000,
            initial_asset: 1.0,
            t_max: 100_000,
            t1: None,
            t2: None,
            replicates: 5,
            base_seed: 0,
        }
    }
}

fn round_grid(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

impl SweepConfig {
    pub fn resolve(&mut self) {
        self.t1.get_or_insert(default_t1(self.t_max));
        self.t2.get_or_insert(self.t_max);
    }

    pub fn spec(&self) -> anyhow::Result<SweepSpec> {
        let spec = SweepSpec {
            lambda_values: self.lambda_values.clone(),
            gamma_values: self.gamma_values.clone(),
            n_agents: self.n_agents,
            initial_asset: self.initial_asset,
            t_max: self.t_max,
            t1: self.t1.unwrap_or_else(|| default_t1(self.t_max)),
            t2: self.t2.unwrap_or(self.t_max),
            replicates: self.replicates,
            base_seed: self.base_seed,
        };
        spec.validate()?;
        if spec.n_agents < 2 {
            anyhow::bail!("sweep.n_agents must be at least 2");
        }
        if !(spec.initial_asset.is_finite() && spec.initial_asset > 0.0) {
            anyhow::bail!("sweep.initial_asset must be positive");
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmpiricalConfig {
    pub data: Option<PathBuf>,
    pub thresholds: Option<[f64; 2]>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Config> {
        match path {
            None => Ok(Config::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
            }
        }
    }

    pub fn parse(text: &str) -> anyhow::Result<Config> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }
}
