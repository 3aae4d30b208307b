//! Local-only versus local-cloud partitioning of SUE tasks.

use serde::{Deserialize, Serialize};

use crate::delay::{sue_terms, trip_delay_sue, SueDelayBreakdown, SueTerms};
use crate::error::{Error, Result};
use crate::model::{NetworkScenario, PartitionSue, SubframeAllocation};

fn local_only_partition(terms: &SueTerms) -> (PartitionSue, SueDelayBreakdown) {
    let p = PartitionSue { alpha: 1.0, kappa: 0.0 };
    (p, SueDelayBreakdown::compute(terms, &p))
}

/// Strict test `t_local > t_trip` on a local-only breakdown.
pub fn cloud_admission_sue(local: &SueDelayBreakdown, trip_s: f64) -> bool {
    local.t_local > trip_s
}

/// Local-cloud split equalizing `t_u` and `t_c`.
pub fn solve_local_cloud(terms: &SueTerms) -> Result<(PartitionSue, SueDelayBreakdown)> {
    let u = terms.data_bits * terms.uplink_s_per_bit;
    let v = terms.data_bits * terms.local_s_per_bit;
    let trip = terms.trip_s;
    let alpha = (u + trip) / (u + v);
    let kappa = (v - trip) / (u + v);
    let in_range = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
    if !(in_range(alpha) && in_range(kappa)) {
        return Err(Error::RatioOutOfRange { alpha, beta: 0.0, kappa });
    }
    let p = PartitionSue { alpha, kappa };
    Ok((p, SueDelayBreakdown::compute(terms, &p)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuePartitioning {
    pub partitions: Vec<PartitionSue>,
    pub breakdowns: Vec<SueDelayBreakdown>,
    pub cloud_count: usize,
}

impl SuePartitioning {
    pub fn total_delay(&self) -> f64 {
        self.breakdowns.iter().map(|b| b.t_total).sum()
    }
}

pub fn local_only(s: &NetworkScenario, k: usize) -> Result<(PartitionSue, SueDelayBreakdown)> {
    Ok(local_only_partition(&sue_terms(s, k, 0, 0.0)?))
}

fn admitted(s: &NetworkScenario, k: usize) -> Result<bool> {
    let (_, b) = local_only(s, k)?;
    Ok(cloud_admission_sue(&b, trip_delay_sue(s, k)?))
}

/// `K^{u_s,c}`. Does not depend on the allocation.
pub fn count_cloud_sues(s: &NetworkScenario) -> Result<usize> {
    let mut count = 0;
    for k in 0..s.num_sues() {
        count += usize::from(admitted(s, k)?);
    }
    Ok(count)
}

pub fn local_cloud_split(
    s: &NetworkScenario,
    alloc: &SubframeAllocation,
    cloud_count: usize,
    k: usize,
) -> Result<(PartitionSue, SueDelayBreakdown)> {
    alloc.validate(s.num_bs())?;
    if alloc.tau_us <= 0.0 {
        return Err(Error::infeasible("tau_us must be > 0 for cloud offloading"));
    }
    if cloud_count == 0 {
        return Err(Error::infeasible("cloud user count must be >= 1"));
    }
    if !admitted(s, k)? {
        return Err(Error::invalid(format!("SUE {k} is not admitted to the cloud")));
    }
    let terms = sue_terms(s, k, cloud_count, alloc.tau_us)?;
    Ok(solve_local_cloud(&terms).unwrap_or_else(|_| local_only_partition(&terms)))
}

pub(crate) fn partition_sues_with(s: &NetworkScenario, tau_us: f64) -> Result<SuePartitioning> {
    let admitted: Vec<bool> = (0..s.num_sues()).map(|k| admitted(s, k)).collect::<Result<_>>()?;
    let total_admitted = admitted.iter().filter(|&&a| a).count();
    if total_admitted > 0 && tau_us <= 0.0 {
        return Err(Error::infeasible("SUEs are offloaded to the cloud but tau_us = 0"));
    }
    let mut excluded = vec![false; admitted.len()];
    let mut cloud_count = total_admitted;
    let mut repeat = false;
    loop {
        let mut out = SuePartitioning {
            partitions: Vec::with_capacity(admitted.len()),
            breakdowns: Vec::with_capacity(admitted.len()),
            cloud_count,
        };
        let mut newly_excluded = false;
        for k in 0..admitted.len() {
            let terms = sue_terms(s, k, cloud_count, tau_us)?;
            let chosen = if admitted[k] && !excluded[k] {
                match solve_local_cloud(&terms) {
                    Ok(r) => r,
                    Err(_) => {
                        if !repeat {
                            excluded[k] = true;
                            newly_excluded = true;
                        }
                        local_only_partition(&terms)
                    }
                }
            } else {
                local_only_partition(&terms)
            };
            out.partitions.push(chosen.0);
            out.breakdowns.push(chosen.1);
        }
        if !newly_excluded || repeat {
            return Ok(out);
        }
        repeat = true;
        cloud_count = total_admitted - excluded.iter().filter(|&&e| e).count();
    }
}

pub fn partition_all_sues(s: &NetworkScenario, alloc: &SubframeAllocation) -> Result<SuePartitioning> {
    alloc.validate(s.num_bs())?;
    partition_sues_with(s, alloc.tau_us)
}
