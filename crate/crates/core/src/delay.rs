//! Completion-delay model for TUE and SUE tasks.
//!
//! Delays are expressed through per-bit coefficients (seconds per bit) so the
//! closed-form partitioning and the brute-force oracles can share one
//! vocabulary. Download, cloud compute and feeder-link transmission delays are
//! zero.

use serde::{Deserialize, Serialize};

use crate::channel::{rate_bs, rate_sue, rate_tue};
use crate::error::{Error, Result};
use crate::model::{NetworkScenario, PartitionSue, PartitionTue, SubframeAllocation};

/// Per-bit delay coefficients of one TUE task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TueTerms {
    pub data_bits: f64,
    /// `C / f`
    pub local_s_per_bit: f64,
    /// `K^b_n / (R^{u_b} τ^{u_b}_n)`
    pub uplink_s_per_bit: f64,
    /// `C K^b_n / F^b`
    pub edge_s_per_bit: f64,
}

/// BS-to-cloud leg of a TUE task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudPath {
    /// `K^{u_b,c} / (R^b τ^b)`
    pub backhaul_s_per_bit: f64,
    pub trip_s: f64,
}

/// Per-bit delay coefficients of one SUE task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SueTerms {
    pub data_bits: f64,
    /// `C / f`
    pub local_s_per_bit: f64,
    /// `K^{u_s,c} / (R^{u_s} τ^{u_s})`
    pub uplink_s_per_bit: f64,
    pub trip_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TueDelayBreakdown {
    pub t_local: f64,
    pub t_up: f64,
    pub t_edge: f64,
    pub t_bs_up: f64,
    pub t_trip: f64,
    pub t_u: f64,
    pub t_b: f64,
    pub t_c: f64,
    pub t_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SueDelayBreakdown {
    pub t_local: f64,
    pub t_up: f64,
    pub t_trip: f64,
    pub t_u: f64,
    pub t_c: f64,
    pub t_total: f64,
}

// A zero share never pays for an unusable link (0 * inf).
fn leg(fraction: f64, data_bits: f64, s_per_bit: f64) -> f64 {
    if fraction == 0.0 {
        0.0
    } else {
        fraction * data_bits * s_per_bit
    }
}

impl TueDelayBreakdown {
    pub fn compute(terms: &TueTerms, cloud: &CloudPath, p: &PartitionTue) -> Self {
        let d = terms.data_bits;
        let t_local = leg(p.alpha, d, terms.local_s_per_bit);
        let t_up = leg(1.0 - p.alpha, d, terms.uplink_s_per_bit);
        let t_edge = leg(p.beta, d, terms.edge_s_per_bit);
        let t_bs_up = leg(p.kappa, d, cloud.backhaul_s_per_bit);
        let t_trip = cloud.trip_s;
        let t_u = t_local;
        let t_b = t_up + t_edge;
        let t_c = t_up + t_bs_up + t_trip;
        let t_total = if p.kappa > 0.0 { t_u.max(t_b).max(t_c) } else { t_u.max(t_b) };
        TueDelayBreakdown { t_local, t_up, t_edge, t_bs_up, t_trip, t_u, t_b, t_c, t_total }
    }
}

impl SueDelayBreakdown {
    pub fn compute(terms: &SueTerms, p: &PartitionSue) -> Self {
        let d = terms.data_bits;
        let t_local = leg(p.alpha, d, terms.local_s_per_bit);
        let t_up = leg(p.kappa, d, terms.uplink_s_per_bit);
        let t_trip = terms.trip_s;
        let t_u = t_local;
        let t_c = t_up + t_trip;
        let t_total = if p.kappa > 0.0 { t_u.max(t_c) } else { t_u };
        SueDelayBreakdown { t_local, t_up, t_trip, t_u, t_c, t_total }
    }
}

/// `t^{b,trip}_n = 2 o^b_n / c + 2 o^s / c + t^cloud`
pub fn trip_delay_bs(s: &NetworkScenario, n: usize) -> Result<f64> {
    let bs = s
        .base_stations
        .get(n)
        .ok_or_else(|| Error::invalid(format!("BS index {n} out of range")))?;
    Ok(trip(s, bs.sat_path_m))
}

/// `t^{u_s,trip}_k = 2 o^{u_s}_k / c + 2 o^s / c + t^cloud`
pub fn trip_delay_sue(s: &NetworkScenario, k: usize) -> Result<f64> {
    Ok(trip(s, s.sue_at(k)?.sat_path_m))
}

fn trip(s: &NetworkScenario, uplink_path_m: f64) -> f64 {
    let c = s.radio.speed_of_light_m_per_s;
    2.0 * uplink_path_m / c + 2.0 * s.radio.gateway_path_m / c + s.radio.cloud_rtt_s
}

fn per_bit_inverse(num: f64, rate: f64, share: f64) -> f64 {
    let r = rate * share;
    if r > 0.0 {
        num / r
    } else {
        f64::INFINITY
    }
}

/// Coefficients of TUE `k` of BS `n` under the communication fraction `tau_ub`.
pub fn tue_terms(s: &NetworkScenario, n: usize, k: usize, tau_ub: f64) -> Result<TueTerms> {
    let (bs, tue) = s.tue_at(n, k)?;
    let k_n = bs.tues.len() as f64;
    let c = tue.task.workload_cycles_per_bit;
    Ok(TueTerms {
        data_bits: tue.task.data_bits,
        local_s_per_bit: c / tue.local_cpu_hz,
        uplink_s_per_bit: per_bit_inverse(k_n, rate_tue(s, n, k)?, tau_ub),
        edge_s_per_bit: c * k_n / bs.edge_cpu_hz,
    })
}

/// Backhaul coefficient and trip delay of BS `n` with `cloud_count` TUEs sharing `tau_b`.
pub fn cloud_path(s: &NetworkScenario, n: usize, cloud_count: usize, tau_b: f64) -> Result<CloudPath> {
    Ok(CloudPath {
        backhaul_s_per_bit: per_bit_inverse(cloud_count as f64, rate_bs(s, n)?, tau_b),
        trip_s: trip_delay_bs(s, n)?,
    })
}

pub fn sue_terms(s: &NetworkScenario, k: usize, cloud_count: usize, tau_us: f64) -> Result<SueTerms> {
    let sue = s.sue_at(k)?;
    Ok(SueTerms {
        data_bits: sue.task.data_bits,
        local_s_per_bit: sue.task.workload_cycles_per_bit / sue.local_cpu_hz,
        uplink_s_per_bit: per_bit_inverse(cloud_count as f64, rate_sue(s, k)?, tau_us),
        trip_s: trip_delay_sue(s, k)?,
    })
}

/// Delay breakdown of TUE `k` at BS `n` for an explicit partition.
pub fn tue_delay(
    s: &NetworkScenario,
    alloc: &SubframeAllocation,
    partition: &PartitionTue,
    cloud_count: usize,
    n: usize,
    k: usize,
) -> Result<TueDelayBreakdown> {
    alloc.validate(s.num_bs())?;
    partition.validate()?;
    let tau = alloc.tau_ub[n];
    if partition.beta + partition.kappa > 0.0 && tau <= 0.0 {
        return Err(Error::infeasible(format!("BS {n} offloads data but tau_ub = 0")));
    }
    if partition.kappa > 0.0 {
        if cloud_count == 0 {
            return Err(Error::infeasible("kappa > 0 requires a cloud user count >= 1"));
        }
        if alloc.tau_b <= 0.0 {
            return Err(Error::infeasible("kappa > 0 but tau_b = 0"));
        }
    }
    let terms = tue_terms(s, n, k, tau)?;
    let cloud = cloud_path(s, n, cloud_count, alloc.tau_b)?;
    Ok(TueDelayBreakdown::compute(&terms, &cloud, partition))
}

/// Delay breakdown of SUE `k` for an explicit partition.
pub fn sue_delay(
    s: &NetworkScenario,
    alloc: &SubframeAllocation,
    partition: &PartitionSue,
    cloud_count: usize,
    k: usize,
) -> Result<SueDelayBreakdown> {
    alloc.validate(s.num_bs())?;
    partition.validate()?;
    if partition.kappa > 0.0 {
        if cloud_count == 0 {
            return Err(Error::infeasible("kappa > 0 requires a cloud user count >= 1"));
        }
        if alloc.tau_us <= 0.0 {
            return Err(Error::infeasible("kappa > 0 but tau_us = 0"));
        }
    }
    let terms = sue_terms(s, k, cloud_count, alloc.tau_us)?;
    Ok(SueDelayBreakdown::compute(&terms, partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy_scenario;

    #[test]
    fn trip_zero_paths() {
        let mut s = toy_scenario(1, 1, 1);
        s.base_stations[0].sat_path_m = 0.0;
        s.sues[0].sat_path_m = 0.0;
        s.radio.gateway_path_m = 0.0;
        s.radio.cloud_rtt_s = 0.1;
        assert!((trip_delay_bs(&s, 0).unwrap() - 0.1).abs() < 1e-15);
        assert!((trip_delay_sue(&s, 0).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn trip_eight_thousand_km() {
        let mut s = toy_scenario(1, 1, 1);
        s.radio.speed_of_light_m_per_s = 3e8;
        s.radio.gateway_path_m = 8e6;
        s.base_stations[0].sat_path_m = 8e6;
        s.sues[0].sat_path_m = 8e6;
        s.radio.cloud_rtt_s = 0.1;
        let expected = 4.0 * 8e6 / 3e8 + 0.1;
        assert!((trip_delay_bs(&s, 0).unwrap() - expected).abs() < 1e-15);
        assert!((trip_delay_sue(&s, 0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.2067).abs() < 1e-4);
        s.base_stations[0].sat_path_m = 9e6;
        assert!(trip_delay_bs(&s, 0).unwrap() > expected);
    }

    #[test]
    fn all_local_tue() {
        let s = toy_scenario(1, 1, 0);
        let alloc = SubframeAllocation::from_comm(vec![0.5], 0.5, 0.5);
        let p = PartitionTue::new(1.0, 0.0, 0.0).unwrap();
        let b = tue_delay(&s, &alloc, &p, 0, 0, 0).unwrap();
        // D = 5e5, C = 1000, f = 5e8
        assert!((b.t_total - 1.0).abs() < 1e-12);
        assert_eq!(b.t_up, 0.0);
        assert_eq!(b.t_edge, 0.0);
    }

    #[test]
    fn tue_preconditions() {
        let s = toy_scenario(1, 1, 0);
        let p = PartitionTue::new(0.5, 0.25, 0.25).unwrap();
        let no_uplink = SubframeAllocation::from_comm(vec![0.0], 0.5, 0.5);
        assert!(matches!(
            tue_delay(&s, &no_uplink, &p, 1, 0, 0),
            Err(Error::InfeasibleAllocation(_))
        ));
        let no_backhaul = SubframeAllocation::from_comm(vec![0.5], 0.0, 0.5);
        assert!(matches!(
            tue_delay(&s, &no_backhaul, &p, 1, 0, 0),
            Err(Error::InfeasibleAllocation(_))
        ));
        let ok = SubframeAllocation::from_comm(vec![0.5], 0.5, 0.5);
        assert!(matches!(tue_delay(&s, &ok, &p, 0, 0, 0), Err(Error::InfeasibleAllocation(_))));
        assert!(tue_delay(&s, &ok, &p, 1, 0, 0).is_ok());
    }

    #[test]
    fn sue_branches() {
        let s = toy_scenario(0, 0, 1);
        let alloc = SubframeAllocation::from_comm(vec![], 0.3, 0.4);
        let local = sue_delay(&s, &alloc, &PartitionSue::new(1.0, 0.0).unwrap(), 0, 0).unwrap();
        assert!((local.t_total - 1.0).abs() < 1e-12);
        let cloud = sue_delay(&s, &alloc, &PartitionSue::new(0.0, 1.0).unwrap(), 1, 0).unwrap();
        assert!((cloud.t_total - (cloud.t_up + cloud.t_trip)).abs() < 1e-15);
        assert_eq!(cloud.t_u, 0.0);
    }

    #[test]
    fn composition_identities() {
        let terms = TueTerms {
            data_bits: 4e5,
            local_s_per_bit: 2e-6,
            uplink_s_per_bit: 3e-7,
            edge_s_per_bit: 1e-6,
        };
        let cloud = CloudPath { backhaul_s_per_bit: 5e-7, trip_s: 0.2 };
        let b = TueDelayBreakdown::compute(&terms, &cloud, &PartitionTue::new(0.3, 0.5, 0.2).unwrap());
        assert_eq!(b.t_u, b.t_local);
        assert_eq!(b.t_b, b.t_up + b.t_edge);
        assert_eq!(b.t_c, b.t_up + b.t_bs_up + b.t_trip);
        assert_eq!(b.t_total, b.t_u.max(b.t_b).max(b.t_c));
        // kappa = 0 never looks at the cloud leg
        let slow = CloudPath { backhaul_s_per_bit: f64::INFINITY, trip_s: 1e9 };
        let p = PartitionTue::new(0.4, 0.6, 0.0).unwrap();
        let a = TueDelayBreakdown::compute(&terms, &cloud, &p);
        let z = TueDelayBreakdown::compute(&terms, &slow, &p);
        assert_eq!(a.t_total, z.t_total);
    }
}
