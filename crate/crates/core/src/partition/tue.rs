//! Optimal partitioning of TUE tasks across local, edge and cloud execution.
//!
//! Pass one computes the local-edge split of every task and counts the tasks
//! whose edge compute delay exceeds the cloud round trip. Pass two gives those
//! tasks the three-way split that equalizes local, edge and cloud completion
//! times; all other tasks keep their local-edge split.

use serde::{Deserialize, Serialize};

use crate::delay::{cloud_path, tue_terms, trip_delay_bs, CloudPath, TueDelayBreakdown, TueTerms};
use crate::error::{Error, Result};
use crate::model::{NetworkScenario, PartitionTue, SubframeAllocation};

/// Local-edge split equalizing `t_u` and `t_b`.
pub fn solve_local_edge(terms: &TueTerms, trip_s: f64) -> (PartitionTue, TueDelayBreakdown) {
    let offload = terms.uplink_s_per_bit + terms.edge_s_per_bit;
    let (alpha, beta) = if offload.is_finite() {
        let denom = offload + terms.local_s_per_bit;
        (offload / denom, terms.local_s_per_bit / denom)
    } else {
        // no usable uplink
        (1.0, 0.0)
    };
    let p = PartitionTue { alpha, beta, kappa: 0.0 };
    let cloud = CloudPath { backhaul_s_per_bit: 0.0, trip_s };
    (p, TueDelayBreakdown::compute(terms, &cloud, &p))
}

/// Strict test `t_edge > t_trip` on a local-edge breakdown.
pub fn cloud_admission_tue(edge: &TueDelayBreakdown, trip_s: f64) -> bool {
    edge.t_edge > trip_s
}

/// Three-way split equalizing `t_u`, `t_b` and `t_c`.
///
/// Fails with [`Error::RatioOutOfRange`] when the closed form leaves `[0, 1]`
/// (or is not finite), which only happens for tasks that should not be
/// offloaded to the cloud or under degenerate link parameters.
pub fn solve_local_edge_cloud(
    terms: &TueTerms,
    cloud: &CloudPath,
) -> Result<(PartitionTue, TueDelayBreakdown)> {
    let d = terms.data_bits;
    let local = terms.local_s_per_bit;
    let up = terms.uplink_s_per_bit;
    let edge = terms.edge_s_per_bit;
    let back = cloud.backhaul_s_per_bit;
    let trip = cloud.trip_s;

    // Edge and backhaul act as two parallel sinks for the offloaded share:
    // harmonic per-bit cost and the share of the trip delay that the edge absorbs.
    let parallel = edge * back / (edge + back);
    let edge_weight = edge / (edge + back);

    let alpha = (d * (up + parallel) + edge_weight * trip) / (d * (up + parallel + local));
    let beta = ((1.0 - alpha) * d * back + trip) / (d * (edge + back));
    let kappa = ((1.0 - alpha) * d * edge - trip) / (d * (edge + back));

    let in_range = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
    if !(in_range(alpha) && in_range(beta) && in_range(kappa)) {
        return Err(Error::RatioOutOfRange { alpha, beta, kappa });
    }
    let p = PartitionTue { alpha, beta, kappa };
    Ok((p, TueDelayBreakdown::compute(terms, cloud, &p)))
}

/// Result of running the two-pass partitioning over every TUE, flattened in
/// `(bs, tue)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuePartitioning {
    pub partitions: Vec<PartitionTue>,
    pub breakdowns: Vec<TueDelayBreakdown>,
    /// Local-edge delays from pass one.
    pub local_edge_delays: Vec<f64>,
    pub cloud_count: usize,
}

impl TuePartitioning {
    pub fn total_delay(&self) -> f64 {
        self.breakdowns.iter().map(|b| b.t_total).sum()
    }
}

/// Pass-one state of a single TUE.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FirstPass {
    pub terms: TueTerms,
    pub partition: PartitionTue,
    pub breakdown: TueDelayBreakdown,
    pub admitted: bool,
}

pub(crate) fn first_pass_bs(s: &NetworkScenario, n: usize, tau_ub: f64) -> Result<Vec<FirstPass>> {
    let trip_s = trip_delay_bs(s, n)?;
    (0..s.base_stations[n].tues.len())
        .map(|k| {
            let terms = tue_terms(s, n, k, tau_ub)?;
            let (partition, breakdown) = solve_local_edge(&terms, trip_s);
            let admitted = cloud_admission_tue(&breakdown, trip_s);
            Ok(FirstPass { terms, partition, breakdown, admitted })
        })
        .collect()
}

/// Pass-two outcome for one TUE given the cloud count. `Err` carries the
/// local-edge fallback when the three-way closed form is out of range.
pub(crate) fn second_pass(
    s: &NetworkScenario,
    n: usize,
    first: &FirstPass,
    cloud_count: usize,
    tau_b: f64,
) -> Result<Result<(PartitionTue, TueDelayBreakdown), (PartitionTue, TueDelayBreakdown)>> {
    if !first.admitted {
        return Ok(Ok((first.partition, first.breakdown)));
    }
    let cloud = cloud_path(s, n, cloud_count, tau_b)?;
    Ok(solve_local_edge_cloud(&first.terms, &cloud).map_err(|_| (first.partition, first.breakdown)))
}

pub(crate) fn partition_tues_with(
    s: &NetworkScenario,
    tau_ub: &[f64],
    tau_b: f64,
) -> Result<TuePartitioning> {
    let mut firsts = Vec::with_capacity(s.num_bs());
    for (n, &tau) in tau_ub.iter().enumerate() {
        if tau <= 0.0 {
            return Err(Error::infeasible(format!("tau_ub of BS {n} must be > 0")));
        }
        firsts.push(first_pass_bs(s, n, tau)?);
    }
    let admitted = firsts.iter().flatten().filter(|f| f.admitted).count();
    if admitted > 0 && tau_b <= 0.0 {
        return Err(Error::infeasible("TUEs are offloaded to the cloud but tau_b = 0"));
    }

    let mut excluded = vec![false; s.num_tues()];
    let mut cloud_count = admitted;
    let mut out;
    let mut repeat = false;
    loop {
        out = TuePartitioning {
            partitions: Vec::with_capacity(excluded.len()),
            breakdowns: Vec::with_capacity(excluded.len()),
            local_edge_delays: Vec::with_capacity(excluded.len()),
            cloud_count,
        };
        let mut newly_excluded = false;
        for (idx, (n, first)) in firsts
            .iter()
            .enumerate()
            .flat_map(|(n, bs)| bs.iter().map(move |f| (n, f)))
            .enumerate()
        {
            let chosen = if excluded[idx] {
                (first.partition, first.breakdown)
            } else {
                match second_pass(s, n, first, cloud_count, tau_b)? {
                    Ok(r) => r,
                    Err(fallback) => {
                        if !repeat {
                            excluded[idx] = true;
                            newly_excluded = true;
                        }
                        fallback
                    }
                }
            };
            out.partitions.push(chosen.0);
            out.breakdowns.push(chosen.1);
            out.local_edge_delays.push(first.breakdown.t_total);
        }
        if !newly_excluded || repeat {
            break;
        }
        // one repeat of the count without the rejected tasks
        repeat = true;
        cloud_count = admitted - excluded.iter().filter(|&&e| e).count();
    }
    Ok(out)
}

fn tau_of(s: &NetworkScenario, alloc: &SubframeAllocation, n: usize) -> Result<f64> {
    alloc.validate(s.num_bs())?;
    let tau = *alloc
        .tau_ub
        .get(n)
        .ok_or_else(|| Error::invalid(format!("BS index {n} out of range")))?;
    if tau <= 0.0 {
        return Err(Error::infeasible(format!("tau_ub of BS {n} must be > 0")));
    }
    Ok(tau)
}

pub fn local_edge_split(
    s: &NetworkScenario,
    alloc: &SubframeAllocation,
    n: usize,
    k: usize,
) -> Result<(PartitionTue, TueDelayBreakdown)> {
    let tau = tau_of(s, alloc, n)?;
    let terms = tue_terms(s, n, k, tau)?;
    Ok(solve_local_edge(&terms, trip_delay_bs(s, n)?))
}

/// `K^{u_b,c}`: number of TUEs whose local-edge edge delay exceeds the trip delay.
pub fn count_cloud_tues(s: &NetworkScenario, alloc: &SubframeAllocation) -> Result<usize> {
    let mut count = 0;
    for n in 0..s.num_bs() {
        let tau = tau_of(s, alloc, n)?;
        count += first_pass_bs(s, n, tau)?.iter().filter(|f| f.admitted).count();
    }
    Ok(count)
}

pub fn local_edge_cloud_split(
    s: &NetworkScenario,
    alloc: &SubframeAllocation,
    cloud_count: usize,
    n: usize,
    k: usize,
) -> Result<(PartitionTue, TueDelayBreakdown)> {
    let tau = tau_of(s, alloc, n)?;
    if alloc.tau_b <= 0.0 {
        return Err(Error::infeasible("tau_b must be > 0 for cloud offloading"));
    }
    if cloud_count == 0 {
        return Err(Error::infeasible("cloud user count must be >= 1"));
    }
    let terms = tue_terms(s, n, k, tau)?;
    let trip = trip_delay_bs(s, n)?;
    let (_, edge) = solve_local_edge(&terms, trip);
    if !cloud_admission_tue(&edge, trip) {
        return Err(Error::invalid(format!(
            "TUE {k} of BS {n} is not admitted to the cloud (t_edge {} <= trip {trip})",
            edge.t_edge
        )));
    }
    solve_local_edge_cloud(&terms, &cloud_path(s, n, cloud_count, alloc.tau_b)?)
}

pub fn partition_all_tues(s: &NetworkScenario, alloc: &SubframeAllocation) -> Result<TuePartitioning> {
    alloc.validate(s.num_bs())?;
    partition_tues_with(s, &alloc.tau_ub, alloc.tau_b)
}
