//! Pairwise asset exchange with a surplus-contribution rate.
//!
//! In every exchange both agents keep a fraction `saving_rate` of their
//! assets. The poorer agent stakes the rest of its assets. The richer agent
//! stakes the same amount plus a fraction `surplus_rate` of the difference
//! between the two surpluses. The pooled stake is split at a uniform random
//! fraction `epsilon`: the agent in position `i` receives `epsilon * pool`
//! and the agent in position `j` receives the remainder.
//!
//! `surplus_rate = 0` stakes only the poorer agent's surplus on both sides;
//! `surplus_rate = 1` stakes both full surpluses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{sample_pair_unchecked, SimRng};

/// Full specification of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationParams {
    pub n_agents: usize,
    /// Fraction of assets each agent withholds from an exchange.
    pub saving_rate: f64,
    /// Fraction of the richer agent's excess surplus that enters the pool.
    pub surplus_rate: f64,
    pub initial_asset: f64,
    /// Number of pairwise exchanges. One exchange per time tick.
    pub t_max: u64,
    pub seed: u64,
    /// Times at which a copy of the population is kept. Time 0 is the
    /// state before the first exchange.
    pub snapshot_times: Vec<u64>,
}

impl SimulationParams {
    /// Parameters with unit initial assets and a single snapshot at `t_max`.
    pub fn new(
        n_agents: usize,
        saving_rate: f64,
        surplus_rate: f64,
        t_max: u64,
        seed: u64,
    ) -> Result<Self> {
        let params = SimulationParams {
            n_agents,
            saving_rate,
            surplus_rate,
            initial_asset: 1.0,
            t_max,
            seed,
            snapshot_times: vec![t_max],
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_initial_asset(mut self, initial_asset: f64) -> Result<Self> {
        self.initial_asset = initial_asset;
        self.validate()?;
        Ok(self)
    }

    pub fn with_snapshots(mut self, times: impl Into<Vec<u64>>) -> Result<Self> {
        self.snapshot_times = times.into();
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 2 {
            return Err(invalid(format!("n_agents must be at least 2, got {}", self.n_agents)));
        }
        if !(0.0..=1.0).contains(&self.saving_rate) {
            return Err(invalid(format!("saving_rate must lie in [0, 1], got {}", self.saving_rate)));
        }
        if !(0.0..=1.0).contains(&self.surplus_rate) {
            return Err(invalid(format!(
                "surplus_rate must lie in [0, 1], got {}",
                self.surplus_rate
            )));
        }
        if !(self.initial_asset.is_finite() && self.initial_asset > 0.0) {
            return Err(invalid(format!(
                "initial_asset must be positive and finite, got {}",
                self.initial_asset
            )));
        }
        if self.t_max == 0 {
            return Err(invalid("t_max must be positive"));
        }
        if self.snapshot_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("snapshot_times must be strictly ascending"));
        }
        if let Some(&last) = self.snapshot_times.last() {
            if last > self.t_max {
                return Err(invalid(format!(
                    "snapshot time {last} exceeds t_max {}",
                    self.t_max
                )));
            }
        }
        Ok(())
    }
}

/// Asset holdings of every agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    assets: Vec<f64>,
}

impl Population {
    pub fn uniform(n_agents: usize, initial_asset: f64) -> Self {
        Population { assets: vec![initial_asset; n_agents] }
    }

    /// Wraps an existing asset vector; every entry must be finite and non-negative.
    pub fn from_assets(assets: Vec<f64>) -> Result<Self> {
        if let Some(bad) = assets.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(invalid(format!("asset value {bad} is negative or non-finite")));
        }
        Ok(Population { assets })
    }

    pub fn assets(&self) -> &[f64] {
        &self.assets
    }

    pub fn len(&self) -> usize {
        self.assets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assets.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.assets.iter().sum()
    }

    pub fn into_assets(self) -> Vec<f64> {
        self.assets
    }
}

/// Result of applying the exchange rule to one pair of holdings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transfer {
    /// Total stake put into the exchange by both agents.
    pub pool: f64,
    pub new_mi: f64,
    pub new_mj: f64,
}

/// One recorded exchange of a running simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub i: usize,
    pub j: usize,
    pub epsilon: f64,
    pub pool: f64,
    pub new_mi: f64,
    pub new_mj: f64,
}

/// Applies the exchange rule to holdings `m_i`, `m_j`.
///
/// Which agent counts as poorer is decided by the holdings on entry; equal
/// holdings make both branches coincide.
pub fn exchange_step(m_i: f64, m_j: f64, saving_rate: f64, surplus_rate: f64, epsilon: f64) -> Result<Transfer> {
    for (name, m) in [("m_i", m_i), ("m_j", m_j)] {
        if !(m.is_finite() && m >= 0.0) {
            return Err(invalid(format!("{name} must be finite and non-negative, got {m}")));
        }
    }
    for (name, v) in [("saving_rate", saving_rate), ("surplus_rate", surplus_rate), ("epsilon", epsilon)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(invalid(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    Ok(transfer(m_i, m_j, saving_rate, surplus_rate, epsilon))
}

#[inline]
pub(crate) fn transfer(m_i: f64, m_j: f64, saving_rate: f64, surplus_rate: f64, epsilon: f64) -> Transfer {
    let stake_rate = 1.0 - saving_rate;
    let (poor, rich) = if m_i <= m_j { (m_i, m_j) } else { (m_j, m_i) };
    let poor_stake = stake_rate * poor;
    let rich_stake = stake_rate * (poor + surplus_rate * (rich - poor));
    let pool = poor_stake + rich_stake;

    // rounding in rich_stake can overshoot `rich` by an ulp
    let poor_keeps = poor - poor_stake;
    let rich_keeps = (rich - rich_stake).max(0.0);
    let (keep_i, keep_j) = if m_i <= m_j {
        (poor_keeps, rich_keeps)
    } else {
        (rich_keeps, poor_keeps)
    };
    Transfer {
        pool,
        new_mi: keep_i + epsilon * pool,
        new_mj: keep_j + (1.0 - epsilon) * pool,
    }
}

/// Stepwise simulation state, for callers that want to observe every exchange.
#[derive(Debug, Clone)]
pub struct Simulation {
    saving_rate: f64,
    surplus_rate: f64,
    rng: SimRng,
    assets: Vec<f64>,
    time: u64,
    cumulative_pool: f64,
}

impl Simulation {
    pub fn new(params: &SimulationParams) -> Result<Self> {
        params.validate()?;
        Ok(Simulation {
            saving_rate: params.saving_rate,
            surplus_rate: params.surplus_rate,
            rng: SimRng::from_seed(params.seed),
            assets: vec![params.initial_asset; params.n_agents],
            time: 0,
            cumulative_pool: 0.0,
        })
    }

    /// Performs one exchange: draws a pair, then `epsilon`, then applies the rule.
    #[inline]
    pub fn step(&mut self) -> StepOutcome {
        let (i, j) = sample_pair_unchecked(&mut self.rng, self.assets.len());
        let epsilon = self.rng.unit();
        let t = transfer(self.assets[i], self.assets[j], self.saving_rate, self.surplus_rate, epsilon);
        self.assets[i] = t.new_mi;
        self.assets[j] = t.new_mj;
        self.cumulative_pool += t.pool;
        self.time += 1;
        StepOutcome { i, j, epsilon, pool: t.pool, new_mi: t.new_mi, new_mj: t.new_mj }
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn assets(&self) -> &[f64] {
        &self.assets
    }

    pub fn cumulative_pool(&self) -> f64 {
        self.cumulative_pool
    }

    pub fn population(&self) -> Population {
        Population { assets: self.assets.clone() }
    }
}

/// Output of [`run_simulation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub snapshots: BTreeMap<u64, Population>,
    /// Sum of the pool over every exchange, accumulated in step order.
    pub cumulative_pool: f64,
    pub params: SimulationParams,
}

impl RunResult {
    pub fn snapshot(&self, t: u64) -> Option<&Population> {
        self.snapshots.get(&t)
    }

    /// The latest recorded snapshot.
    pub fn last_snapshot(&self) -> Option<(u64, &Population)> {
        self.snapshots.iter().next_back().map(|(t, p)| (*t, p))
    }
}

/// Runs `t_max` exchanges from a uniform initial population.
pub fn run_simulation(params: &SimulationParams) -> Result<RunResult> {
    let mut sim = Simulation::new(params)?;
    let mut snapshots = BTreeMap::new();
    let mut pending = params.snapshot_times.iter().copied().peekable();

    while pending.peek() == Some(&0) {
        snapshots.insert(0, sim.population());
        pending.next();
    }
    for _ in 0..params.t_max {
        sim.step();
        if pending.peek() == Some(&sim.time()) {
            snapshots.insert(sim.time(), sim.population());
            pending.next();
        }
    }
    Ok(RunResult {
        snapshots,
        cumulative_pool: sim.cumulative_pool(),
        params: params.clone(),
    })
}
