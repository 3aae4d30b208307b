use serde::{Deserialize, Serialize};

use super::pso::{pso_optimize_with, PsoConfig};
use super::PartitionPolicy;
use crate::error::{Error, Result};
use crate::model::{NetworkScenario, SubframeAllocation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub eta: f64,
    pub total_mi_bits: f64,
    pub total_delay_s: f64,
    pub utility: f64,
    pub allocation: SubframeAllocation,
}

/// One PSO run per `η`, all with the same configuration and seed.
pub fn pareto_sweep(s: &NetworkScenario, etas: &[f64], config: &PsoConfig) -> Result<Vec<ParetoPoint>> {
    if etas.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("eta list must be sorted ascending"));
    }
    etas.iter()
        .map(|&eta| {
            let o = pso_optimize_with(s, eta, config, PartitionPolicy::Optimal)?;
            Ok(ParetoPoint {
                eta,
                total_mi_bits: o.result.total_mi_bits,
                total_delay_s: o.result.total_delay_s,
                utility: o.result.utility,
                allocation: o.allocation,
            })
        })
        .collect()
}
