//! Kinetic asset-exchange simulation in which the richer agent of each pair
//! stakes a tunable share of its excess surplus, with the measurements used
//! to study it: Gini index (disparity), total exchange (flow) and Kendall
//! rank correlation between snapshots (how frozen the ranking is).
//!
//! * [`exchange`]: the pairwise exchange rule and full runs.
//! * [`metrics`]: Gini, total exchange, Kendall tau, histogram, gamma fit.
//! * [`sweep`]: parallel grids over saving and surplus rates.
//! * [`fitting`]: least-squares laws relating the indexes.
//! * [`empirical`]: country indicator tables mapped onto the same variables.

// negated comparisons below deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod empirical;
pub mod error;
pub mod exchange;
pub mod fitting;
pub mod metrics;
pub mod rng;
pub mod sweep;

pub use error::{Error, Result};
pub use exchange::{exchange_step, run_simulation, Population, RunResult, Simulation, SimulationParams, StepOutcome, Transfer};
pub use fitting::{fit_linear, law5_points, law6_points, FitResult, LawPoints, XYPoint};
pub use metrics::{gamma_fit, gini, histogram, kendall_tau, total_exchange, FlowValue, GammaFit, GiniValue, Histogram, TauValue};
pub use rng::{sample_pair, SimRng};
pub use sweep::{gini_time_series, run_sweep, GiniSeries, SweepCell, SweepSpec};
