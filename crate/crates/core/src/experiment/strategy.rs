use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{exhaustive_search, greedy_allocation_with};
use crate::error::{Error, Result};
use crate::model::{EvaluationResult, NetworkScenario, SubframeAllocation};
use crate::optimizer::{evaluate_with, pso_optimize_with, PartitionPolicy, PsoConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// PSO subframe allocation with optimal partitioning.
    Jsatps,
    GreedyOtps,
    GreedyEqual,
    Exhaustive,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::Jsatps, Strategy::GreedyOtps, Strategy::GreedyEqual, Strategy::Exhaustive];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Jsatps => "jsatps",
            Strategy::GreedyOtps => "greedy-otps",
            Strategy::GreedyEqual => "greedy-equal",
            Strategy::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown strategy `{s}`")))
    }
}

/// Knobs shared by every strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub pso: PsoConfig,
    pub greedy_step: f64,
    pub exhaustive_step: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            pso: PsoConfig::default(),
            greedy_step: crate::baselines::DEFAULT_GREEDY_STEP,
            exhaustive_step: 0.05,
        }
    }
}

pub fn solve(
    strategy: Strategy,
    s: &NetworkScenario,
    eta: f64,
    settings: &SolverSettings,
) -> Result<(SubframeAllocation, EvaluationResult)> {
    match strategy {
        Strategy::Jsatps => {
            let o = pso_optimize_with(s, eta, &settings.pso, PartitionPolicy::Optimal)?;
            Ok((o.allocation, o.result))
        }
        Strategy::GreedyOtps | Strategy::GreedyEqual => {
            let policy = if strategy == Strategy::GreedyOtps {
                PartitionPolicy::Optimal
            } else {
                PartitionPolicy::Equal
            };
            let alloc = greedy_allocation_with(s, eta, settings.greedy_step, policy)?;
            let result = evaluate_with(s, &alloc, eta, policy)?;
            Ok((alloc, result))
        }
        Strategy::Exhaustive => exhaustive_search(s, eta, settings.exhaustive_step),
    }
}
