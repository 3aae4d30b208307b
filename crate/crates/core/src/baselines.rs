//! Comparison strategies and brute-force reference solvers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{mi_bits, radar_sinr_sue, radar_sinr_tue};
use crate::delay::{cloud_path, sue_terms, tue_terms, SueDelayBreakdown, TueDelayBreakdown, TueTerms};
use crate::error::{Error, Result};
use crate::model::{
    ensure_valid, EvaluationResult, NetworkScenario, PartitionSue, PartitionTue, SubframeAllocation,
};
use crate::optimizer::{evaluate, evaluate_with, PartitionPolicy, TAU_FLOOR};
use crate::partition::sue::partition_sues_with;
use crate::partition::tue::{first_pass_bs, second_pass, FirstPass};

pub const DEFAULT_GREEDY_STEP: f64 = 0.05;

/// Upper bound on evaluated grid points for [`exhaustive_search`].
pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 2_000_000_000;

const MAX_GREEDY_ROUNDS: usize = 100_000;

pub fn greedy_allocation(s: &NetworkScenario, eta: f64, step: f64) -> Result<SubframeAllocation> {
    greedy_allocation_with(s, eta, step, PartitionPolicy::Optimal)
}

/// Hill climbing from the all-communication allocation. Each round moves
/// `step` of frame time along the single coordinate (a BS split, or one of the
/// six transfers inside the satellite frame) with the largest utility gain.
pub fn greedy_allocation_with(
    s: &NetworkScenario,
    eta: f64,
    step: f64,
    policy: PartitionPolicy,
) -> Result<SubframeAllocation> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::invalid(format!("greedy step must lie in (0, 0.5], got {step}")));
    }
    // Work in whole steps so fractions stay exact lattice points.
    let m = grid_points(step)?;
    ensure_valid(s)?;
    let n = s.num_bs();
    let mut tau = vec![m; n];
    let mut sat = [m / 2, m - m / 2, 0];
    let build = |tau: &[usize], sat: &[usize; 3]| {
        let f = |i: usize| i as f64 / m as f64;
        SubframeAllocation {
            tau_ub: tau.iter().map(|&t| f(t)).collect(),
            theta_ub: tau.iter().map(|&t| f(m - t)).collect(),
            tau_b: f(sat[0]),
            tau_us: f(sat[1]),
            theta_us: f(sat[2]),
        }
    };
    let mut best = evaluate_with(s, &build(&tau, &sat), eta, policy)?.utility;

    for _ in 0..MAX_GREEDY_ROUNDS {
        let mut candidates: Vec<(Vec<usize>, [usize; 3])> = Vec::new();
        for i in 0..n {
            if tau[i] > 0 {
                let mut t = tau.clone();
                t[i] -= 1;
                candidates.push((t, sat));
            }
            if tau[i] < m {
                let mut t = tau.clone();
                t[i] += 1;
                candidates.push((t, sat));
            }
        }
        for from in 0..3 {
            for to in 0..3 {
                if from == to || sat[from] == 0 {
                    continue;
                }
                let mut next = sat;
                next[from] -= 1;
                next[to] += 1;
                candidates.push((tau.clone(), next));
            }
        }
        let scored = candidates
            .par_iter()
            .map(|(t, sa)| Ok(evaluate_with(s, &build(t, sa), eta, policy)?.utility))
            .collect::<Result<Vec<f64>>>()?;
        let mut pick = None;
        for (i, &u) in scored.iter().enumerate() {
            if u > best {
                best = u;
                pick = Some(i);
            }
        }
        match pick {
            Some(i) => (tau, sat) = candidates.swap_remove(i),
            None => break,
        }
    }
    Ok(build(&tau, &sat))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualSplit {
    pub tue_partitions: Vec<PartitionTue>,
    pub sue_partitions: Vec<PartitionSue>,
    pub tue_breakdowns: Vec<TueDelayBreakdown>,
    pub sue_breakdowns: Vec<SueDelayBreakdown>,
    pub cloud_count_tue: usize,
    pub cloud_count_sue: usize,
}

/// Equal shares over every tier, with every user offloading to the cloud.
pub fn equal_split_partitions(s: &NetworkScenario, alloc: &SubframeAllocation) -> Result<EqualSplit> {
    alloc.validate(s.num_bs())?;
    let third = 1.0 / 3.0;
    let pt = PartitionTue { alpha: third, beta: third, kappa: 1.0 - 2.0 * third };
    let ps = PartitionSue { alpha: 0.5, kappa: 0.5 };
    let (k_tue, k_sue) = (s.num_tues(), s.num_sues());
    let mut tue_breakdowns = Vec::with_capacity(k_tue);
    for (n, bs) in s.base_stations.iter().enumerate() {
        let cloud = cloud_path(s, n, k_tue, alloc.tau_b)?;
        for k in 0..bs.tues.len() {
            let terms = tue_terms(s, n, k, alloc.tau_ub[n])?;
            tue_breakdowns.push(TueDelayBreakdown::compute(&terms, &cloud, &pt));
        }
    }
    let sue_breakdowns = (0..k_sue)
        .map(|k| Ok(SueDelayBreakdown::compute(&sue_terms(s, k, k_sue, alloc.tau_us)?, &ps)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EqualSplit {
        tue_partitions: vec![pt; k_tue],
        sue_partitions: vec![ps; k_sue],
        tue_breakdowns,
        sue_breakdowns,
        cloud_count_tue: k_tue,
        cloud_count_sue: k_sue,
    })
}

fn grid_points(grid_step: f64) -> Result<usize> {
    let m = (1.0 / grid_step).round();
    if !(grid_step > 0.0 && grid_step <= 1.0) || (m * grid_step - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("grid step {grid_step} must divide 1 evenly")));
    }
    Ok(m as usize)
}

/// Number of allocations [`exhaustive_search`] visits.
pub fn exhaustive_grid_size(num_bs: usize, grid_step: f64) -> Result<u128> {
    let m = grid_points(grid_step)? as u128;
    let sat = (m + 1) * (m + 2) / 2;
    Ok((0..num_bs).fold(sat, |acc, _| acc.saturating_mul(m + 1)))
}

pub fn exhaustive_search(
    s: &NetworkScenario,
    eta: f64,
    grid_step: f64,
) -> Result<(SubframeAllocation, EvaluationResult)> {
    let mut out = exhaustive_search_multi(s, &[eta], grid_step, DEFAULT_EXHAUSTIVE_BUDGET)?;
    Ok(out.remove(0))
}

/// Grid argmax for several `η` at once; the grid is shared so the cost is
/// almost that of a single search.
///
/// The grid covers every BS fraction in `{0, g, …, 1}` and every satellite
/// split `(τ^b, τ^{u_s})` on the same lattice inside the simplex.
pub fn exhaustive_search_multi(
    s: &NetworkScenario,
    etas: &[f64],
    grid_step: f64,
    budget: u128,
) -> Result<Vec<(SubframeAllocation, EvaluationResult)>> {
    ensure_valid(s)?;
    if etas.is_empty() || etas.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::invalid("eta values must lie in [0,1]"));
    }
    let m = grid_points(grid_step)?;
    let needed = exhaustive_grid_size(s.num_bs(), grid_step)?;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let frac = |i: usize| i as f64 / m as f64;

    let tables = BsTables::build(s, m)?;
    let sue_sinr = (0..s.num_sues()).map(|k| radar_sinr_sue(s, k)).collect::<Result<Vec<_>>>()?;
    let sat_points: Vec<(usize, usize)> =
        (0..=m).flat_map(|i| (0..=m - i).map(move |j| (i, j))).collect();

    let per_sat = sat_points
        .par_iter()
        .map(|&(i, j)| {
            let tau_b = frac(i);
            let tau_us = frac(j);
            let theta_us = frac(m - i - j);
            let sue_delay = partition_sues_with(s, tau_us.max(TAU_FLOOR))?.total_delay();
            let sue_mi: f64 = sue_sinr
                .iter()
                .map(|&g| mi_bits(theta_us, s.radio.frame_sat_s, s.radio.bandwidth_sat_hz, g))
                .sum();
            let delays = tables.delays(s, tau_b.max(TAU_FLOOR))?;
            let mut search = LeafSearch::new(etas, s.num_bs(), tables.max_cloud);
            search.run(&tables, &delays, sue_mi, sue_delay);
            Ok((search, (i, j)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(etas.len());
    for (e, &eta) in etas.iter().enumerate() {
        let mut best: Option<(f64, Vec<usize>, (usize, usize))> = None;
        for (search, sat) in &per_sat {
            let cand = &search.best[e];
            if let Some(idx) = &cand.1 {
                if best.as_ref().is_none_or(|b| cand.0 > b.0) {
                    best = Some((cand.0, idx.clone(), *sat));
                }
            }
        }
        // Allocations whose pass two hits the fallback are scored exactly here.
        for (search, sat) in &per_sat {
            for idx in &search.fallbacks {
                let a = grid_alloc(idx, *sat, m);
                let u = evaluate(s, &a, eta)?.utility;
                let score = log_utility_of(u);
                if best.as_ref().is_none_or(|b| score > b.0) {
                    best = Some((score, idx.clone(), *sat));
                }
            }
        }
        let (_, idx, sat) = best.ok_or_else(|| Error::invalid("empty exhaustive grid"))?;
        let alloc = grid_alloc(&idx, sat, m);
        let result = evaluate(s, &alloc, eta)?;
        out.push((alloc, result));
    }
    Ok(out)
}

fn grid_alloc(idx: &[usize], (i, j): (usize, usize), m: usize) -> SubframeAllocation {
    let mf = m as f64;
    let tau_ub: Vec<f64> = idx.iter().map(|&x| x as f64 / mf).collect();
    SubframeAllocation {
        theta_ub: idx.iter().map(|&x| (m - x) as f64 / mf).collect(),
        tau_ub,
        tau_b: i as f64 / mf,
        tau_us: j as f64 / mf,
        theta_us: (m - i - j) as f64 / mf,
    }
}

fn log_utility_of(u: f64) -> f64 {
    if u > 0.0 {
        u.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Per-BS quantities that do not depend on the satellite frame.
struct BsTables {
    m: usize,
    first: Vec<Vec<Vec<FirstPass>>>,
    admitted: Vec<Vec<usize>>,
    mi: Vec<Vec<f64>>,
    max_cloud: usize,
}

/// `delay[n][x][K]` plus whether pass two fell back for any TUE.
struct BsDelays {
    delay: Vec<Vec<Vec<f64>>>,
    fallback: Vec<Vec<Vec<bool>>>,
}

impl BsTables {
    fn build(s: &NetworkScenario, m: usize) -> Result<Self> {
        let mut first = Vec::new();
        let mut admitted = Vec::new();
        let mut mi = Vec::new();
        for (n, bs) in s.base_stations.iter().enumerate() {
            let sinr = (0..bs.tues.len()).map(|k| radar_sinr_tue(s, n, k)).collect::<Result<Vec<_>>>()?;
            let mut f_n = Vec::with_capacity(m + 1);
            let mut a_n = Vec::with_capacity(m + 1);
            let mut mi_n = Vec::with_capacity(m + 1);
            for x in 0..=m {
                let tau = x as f64 / m as f64;
                let theta = (m - x) as f64 / m as f64;
                let fp = first_pass_bs(s, n, tau.max(TAU_FLOOR))?;
                a_n.push(fp.iter().filter(|f| f.admitted).count());
                f_n.push(fp);
                mi_n.push(
                    sinr.iter()
                        .map(|&g| mi_bits(theta, s.radio.frame_bs_s, s.radio.bandwidth_bs_hz, g))
                        .sum(),
                );
            }
            first.push(f_n);
            admitted.push(a_n);
            mi.push(mi_n);
        }
        let max_cloud = admitted.iter().map(|a| a.iter().copied().max().unwrap_or(0)).sum();
        Ok(BsTables { m, first, admitted, mi, max_cloud })
    }

    fn delays(&self, s: &NetworkScenario, tau_b: f64) -> Result<BsDelays> {
        let mut delay = Vec::with_capacity(self.first.len());
        let mut fallback = Vec::with_capacity(self.first.len());
        for (n, f_n) in self.first.iter().enumerate() {
            let mut d_n = Vec::with_capacity(self.m + 1);
            let mut fb_n = Vec::with_capacity(self.m + 1);
            for fp in f_n {
                let mut d = vec![0.0; self.max_cloud + 1];
                let mut fb = vec![false; self.max_cloud + 1];
                for cloud in 0..=self.max_cloud {
                    for f in fp {
                        if f.admitted && cloud == 0 {
                            // unreachable combination; never read
                            continue;
                        }
                        match second_pass(s, n, f, cloud, tau_b)? {
                            Ok((_, b)) => d[cloud] += b.t_total,
                            Err((_, b)) => {
                                d[cloud] += b.t_total;
                                fb[cloud] = true;
                            }
                        }
                    }
                }
                d_n.push(d);
                fb_n.push(fb);
            }
            delay.push(d_n);
            fallback.push(fb_n);
        }
        Ok(BsDelays { delay, fallback })
    }
}

/// Depth-first enumeration of BS fractions for one satellite grid point.
struct LeafSearch {
    etas: Vec<f64>,
    /// Best `(log-utility, BS grid indices)` per `η`.
    best: Vec<(f64, Option<Vec<usize>>)>,
    fallbacks: Vec<Vec<usize>>,
    idx: Vec<usize>,
    partial: Vec<Vec<f64>>,
    partial_fb: Vec<Vec<bool>>,
}

impl LeafSearch {
    fn new(etas: &[f64], num_bs: usize, max_cloud: usize) -> Self {
        LeafSearch {
            etas: etas.to_vec(),
            best: vec![(f64::NEG_INFINITY, None); etas.len()],
            fallbacks: Vec::new(),
            idx: vec![0; num_bs],
            partial: vec![vec![0.0; max_cloud + 1]; num_bs + 1],
            partial_fb: vec![vec![false; max_cloud + 1]; num_bs + 1],
        }
    }

    fn run(&mut self, t: &BsTables, d: &BsDelays, sue_mi: f64, sue_delay: f64) {
        self.descend(t, d, 0, sue_mi, 0, sue_delay);
    }

    fn descend(&mut self, t: &BsTables, d: &BsDelays, n: usize, mi: f64, cloud: usize, extra_delay: f64) {
        let num_bs = self.idx.len();
        if n == num_bs {
            let total_delay = self.partial[n][cloud] + extra_delay;
            if self.partial_fb[n][cloud] {
                self.fallbacks.push(self.idx.clone());
                return;
            }
            let ln_i = mi.ln();
            let ln_t = total_delay.ln();
            for (e, &eta) in self.etas.iter().enumerate() {
                let score = if eta > 0.0 { eta * ln_i } else { 0.0 } - (1.0 - eta) * ln_t;
                if score > self.best[e].0 {
                    self.best[e] = (score, Some(self.idx.clone()));
                }
            }
            return;
        }
        for x in 0..=t.m {
            let (lo, hi) = self.partial.split_at_mut(n + 1);
            let (prev, next) = (&lo[n], &mut hi[0]);
            let row = &d.delay[n][x];
            for ((o, p), r) in next.iter_mut().zip(prev).zip(row) {
                *o = p + r;
            }
            let (lo, hi) = self.partial_fb.split_at_mut(n + 1);
            let fb_row = &d.fallback[n][x];
            for ((o, p), r) in hi[0].iter_mut().zip(&lo[n]).zip(fb_row) {
                *o = *p || *r;
            }
            self.idx[n] = x;
            self.descend(t, d, n + 1, mi + t.mi[n][x], cloud + t.admitted[n][x], extra_delay);
        }
    }
}

/// Result of a brute-force partition search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPartitionTue {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub t_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPartitionSue {
    pub alpha: f64,
    pub kappa: f64,
    pub t_total: f64,
}

fn tue_max_delay(c: &TueTerms, backhaul: f64, trip: f64, alpha: f64, beta: f64, kappa: f64) -> f64 {
    let d = c.data_bits;
    let t_u = alpha * d * c.local_s_per_bit;
    let up = if alpha < 1.0 { (1.0 - alpha) * d * c.uplink_s_per_bit } else { 0.0 };
    let t_b = up + if beta > 0.0 { beta * d * c.edge_s_per_bit } else { 0.0 };
    if kappa > 0.0 {
        let t_c = up + kappa * d * backhaul + trip;
        t_u.max(t_b).max(t_c)
    } else {
        t_u.max(t_b)
    }
}

/// Minimizes the TUE completion delay over `α = i/steps`, `β = j/steps`,
/// `κ = 1 - α - β`. With `allow_cloud = false` only `κ = 0` is searched.
pub fn grid_partition_oracle_tue(
    coeffs: &TueTerms,
    backhaul_s_per_bit: f64,
    trip_s: f64,
    steps: usize,
    allow_cloud: bool,
) -> GridPartitionTue {
    let mut best = GridPartitionTue { alpha: 1.0, beta: 0.0, kappa: 0.0, t_total: f64::INFINITY };
    let h = 1.0 / steps as f64;
    for i in 0..=steps {
        let alpha = i as f64 * h;
        let j_range = if allow_cloud { 0..=steps - i } else { (steps - i)..=(steps - i) };
        for j in j_range {
            let beta = j as f64 * h;
            let kappa = (steps - i - j) as f64 * h;
            let t = tue_max_delay(coeffs, backhaul_s_per_bit, trip_s, alpha, beta, kappa);
            if t < best.t_total {
                best = GridPartitionTue { alpha, beta, kappa, t_total: t };
            }
        }
    }
    best
}

/// Minimizes `max(α v, κ u + trip)` (or `α v` when `κ = 0`) over `α = i/steps`.
/// `u` and `v` are whole-task uplink and local delays.
pub fn grid_partition_oracle_sue(u: f64, v: f64, trip_s: f64, steps: usize) -> GridPartitionSue {
    let mut best = GridPartitionSue { alpha: 1.0, kappa: 0.0, t_total: f64::INFINITY };
    for i in 0..=steps {
        let alpha = i as f64 / steps as f64;
        let kappa = (steps - i) as f64 / steps as f64;
        let t_u = alpha * v;
        let t = if kappa > 0.0 { t_u.max(kappa * u + trip_s) } else { t_u };
        if t < best.t_total {
            best = GridPartitionSue { alpha, kappa, t_total: t };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy_scenario;
    use crate::partition::tue::{solve_local_edge, solve_local_edge_cloud};
    use crate::delay::CloudPath;

    fn worked() -> TueTerms {
        TueTerms { data_bits: 5e5, local_s_per_bit: 2e-6, uplink_s_per_bit: 5e-7, edge_s_per_bit: 1e-6 }
    }

    #[test]
    fn tue_oracle_reproduces_worked_split() {
        let g = grid_partition_oracle_tue(&worked(), 0.0, 0.0, 100_000, false);
        assert!((g.alpha - 3.0 / 7.0).abs() < 2e-5);
        assert!((g.t_total - 3.0 / 7.0).abs() < 1e-4);
        let (p, _) = solve_local_edge(&worked(), 0.0);
        assert!((p.alpha - g.alpha).abs() < 2e-5);
    }

    #[test]
    fn tue_oracle_three_way() {
        let cloud = CloudPath { backhaul_s_per_bit: 1.0 / 2e7, trip_s: 0.2067 };
        let g = grid_partition_oracle_tue(&worked(), cloud.backhaul_s_per_bit, cloud.trip_s, 1000, true);
        let (_, b) = solve_local_edge_cloud(&worked(), &cloud).unwrap();
        assert!(b.t_total <= g.t_total + 1e-12);
        assert!(g.t_total - b.t_total < 5e-3);
    }

    #[test]
    fn sue_oracle_worked_numbers() {
        let g = grid_partition_oracle_sue(0.05, 1.0, 0.2067, 100_000);
        assert!((g.alpha - 0.2567 / 1.05).abs() < 2e-5);
        assert!((g.t_total - 0.2445).abs() < 1e-4);
    }

    #[test]
    fn grid_size_and_budget() {
        assert_eq!(exhaustive_grid_size(1, 0.5).unwrap(), 6 * 3);
        let s = toy_scenario(3, 1, 1);
        assert!(matches!(
            exhaustive_search_multi(&s, &[0.5], 0.01, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(exhaustive_grid_size(1, 0.3).is_err());
    }

    #[test]
    fn exhaustive_matches_brute_evaluate() {
        let s = toy_scenario(2, 2, 2);
        let step = 0.25;
        for eta in [0.0, 0.3, 0.8] {
            let (alloc, res) = exhaustive_search(&s, eta, step).unwrap();
            let mut best = f64::NEG_INFINITY;
            for a in 0..=4 {
                for b in 0..=4 {
                    for i in 0..=4 {
                        for j in 0..=4 - i {
                            let al = grid_alloc(&[a, b], (i, j), 4);
                            best = best.max(evaluate(&s, &al, eta).unwrap().utility);
                        }
                    }
                }
            }
            assert!((res.utility - best).abs() <= 1e-12 * best.abs(), "eta {eta}");
            alloc.validate(2).unwrap();
        }
    }

    #[test]
    fn greedy_corner_cases() {
        let s = toy_scenario(2, 2, 2);
        let a0 = greedy_allocation(&s, 0.0, 0.05).unwrap();
        assert_eq!(a0.theta_ub, vec![0.0, 0.0]);
        assert_eq!(a0.theta_us, 0.0);
        assert_eq!(evaluate(&s, &a0, 0.0).unwrap().total_mi_bits, 0.0);
        let a1 = greedy_allocation(&s, 1.0, 0.05).unwrap();
        assert!(a1.theta_ub.iter().all(|&t| (t - 1.0).abs() < 1e-12));
        assert!(greedy_allocation(&s, 0.5, 0.0).is_err());
    }

    #[test]
    fn exhaustive_dominates_greedy() {
        let s = toy_scenario(2, 2, 2);
        let g = greedy_allocation(&s, 0.5, 0.25).unwrap();
        let (_, ex) = exhaustive_search(&s, 0.5, 0.25).unwrap();
        assert!(ex.utility >= evaluate(&s, &g, 0.5).unwrap().utility);
    }

    #[test]
    fn equal_split_ratios() {
        let s = toy_scenario(2, 2, 3);
        let e = equal_split_partitions(&s, &SubframeAllocation::from_comm(vec![0.5, 0.5], 0.5, 0.5)).unwrap();
        assert_eq!((e.cloud_count_tue, e.cloud_count_sue), (4, 3));
        assert!(e.tue_partitions.iter().all(|p| (p.alpha + p.beta + p.kappa - 1.0).abs() < 1e-15));
        assert!(e.sue_partitions.iter().all(|p| p.alpha == 0.5));
    }
}
