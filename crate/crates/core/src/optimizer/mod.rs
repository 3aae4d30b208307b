//! Cobb-Douglas utility and the PSO search over subframe allocations.

mod encoding;
mod pareto;
mod pso;

pub use encoding::{decode, encode, dimensions};
pub use pareto::{pareto_sweep, ParetoPoint};
pub use pso::{pso_optimize, pso_optimize_with, Particle, PsoConfig, PsoOutcome, PsoTrace};

use serde::{Deserialize, Serialize};

use crate::channel::{radar_sinr_sue, radar_sinr_tue, mi_bits};
use crate::delay::{cloud_path, sue_terms, tue_terms, SueDelayBreakdown, TueDelayBreakdown};
use crate::error::Result;
use crate::model::{EvaluationResult, NetworkScenario, PartitionSue, PartitionTue, SubframeAllocation};
use crate::partition::sue::partition_sues_with;
use crate::partition::tue::partition_tues_with;

/// Lower bound applied to every communication fraction during evaluation.
pub const TAU_FLOOR: f64 = 1e-6;

/// How tasks are partitioned once the allocation is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionPolicy {
    /// Closed-form optimal partitioning with cloud admission.
    #[default]
    Optimal,
    /// Equal shares across every tier; every user offloads to the cloud.
    Equal,
}

/// `U = I^η / t^(1-η)`
pub fn utility(total_mi_bits: f64, total_delay_s: f64, eta: f64) -> f64 {
    total_mi_bits.powf(eta) / total_delay_s.powf(1.0 - eta)
}

pub fn evaluate(s: &NetworkScenario, alloc: &SubframeAllocation, eta: f64) -> Result<EvaluationResult> {
    evaluate_with(s, alloc, eta, PartitionPolicy::Optimal)
}

pub fn evaluate_with(
    s: &NetworkScenario,
    alloc: &SubframeAllocation,
    eta: f64,
    policy: PartitionPolicy,
) -> Result<EvaluationResult> {
    alloc.validate(s.num_bs())?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(crate::error::Error::invalid(format!("eta must lie in [0,1], got {eta}")));
    }
    let tau_ub: Vec<f64> = alloc.tau_ub.iter().map(|t| t.max(TAU_FLOOR)).collect();
    let tau_b = alloc.tau_b.max(TAU_FLOOR);
    let tau_us = alloc.tau_us.max(TAU_FLOOR);

    let mut per_tue_mi = Vec::with_capacity(s.num_tues());
    for (n, bs) in s.base_stations.iter().enumerate() {
        for k in 0..bs.tues.len() {
            let sinr = radar_sinr_tue(s, n, k)?;
            per_tue_mi.push(mi_bits(alloc.theta_ub[n], s.radio.frame_bs_s, s.radio.bandwidth_bs_hz, sinr));
        }
    }
    let per_sue_mi = (0..s.num_sues())
        .map(|k| {
            let sinr = radar_sinr_sue(s, k)?;
            Ok(mi_bits(alloc.theta_us, s.radio.frame_sat_s, s.radio.bandwidth_sat_hz, sinr))
        })
        .collect::<Result<Vec<f64>>>()?;

    let (tue_partitions, per_tue_delay, cloud_count_tue, sue_partitions, per_sue_delay, cloud_count_sue) =
        match policy {
            PartitionPolicy::Optimal => {
                let t = partition_tues_with(s, &tau_ub, tau_b)?;
                let u = partition_sues_with(s, tau_us)?;
                (
                    t.partitions,
                    t.breakdowns.iter().map(|b| b.t_total).collect::<Vec<_>>(),
                    t.cloud_count,
                    u.partitions,
                    u.breakdowns.iter().map(|b| b.t_total).collect::<Vec<_>>(),
                    u.cloud_count,
                )
            }
            PartitionPolicy::Equal => equal_split(s, &tau_ub, tau_b, tau_us)?,
        };

    let total_mi_bits = per_tue_mi.iter().chain(&per_sue_mi).sum::<f64>();
    let total_delay_s = per_tue_delay.iter().chain(&per_sue_delay).sum::<f64>();
    Ok(EvaluationResult {
        eta,
        total_mi_bits,
        total_delay_s,
        utility: utility(total_mi_bits, total_delay_s, eta),
        per_tue_mi,
        per_sue_mi,
        per_tue_delay,
        per_sue_delay,
        tue_partitions,
        sue_partitions,
        cloud_count_tue,
        cloud_count_sue,
    })
}

type EqualSplit = (Vec<PartitionTue>, Vec<f64>, usize, Vec<PartitionSue>, Vec<f64>, usize);

fn equal_split(s: &NetworkScenario, tau_ub: &[f64], tau_b: f64, tau_us: f64) -> Result<EqualSplit> {
    let third = 1.0 / 3.0;
    let pt = PartitionTue { alpha: third, beta: third, kappa: 1.0 - 2.0 * third };
    let ps = PartitionSue { alpha: 0.5, kappa: 0.5 };
    let k_tue = s.num_tues();
    let k_sue = s.num_sues();
    let mut tue_delays = Vec::with_capacity(k_tue);
    for (n, bs) in s.base_stations.iter().enumerate() {
        let cloud = cloud_path(s, n, k_tue, tau_b)?;
        for k in 0..bs.tues.len() {
            let terms = tue_terms(s, n, k, tau_ub[n])?;
            tue_delays.push(TueDelayBreakdown::compute(&terms, &cloud, &pt).t_total);
        }
    }
    let sue_delays = (0..k_sue)
        .map(|k| Ok(SueDelayBreakdown::compute(&sue_terms(s, k, k_sue, tau_us)?, &ps).t_total))
        .collect::<Result<Vec<f64>>>()?;
    Ok((vec![pt; k_tue], tue_delays, k_tue, vec![ps; k_sue], sue_delays, k_sue))
}
