use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{EvaluationResult, SubframeAllocation};

pub const BISECTION_MAX_ITERATIONS: usize = 40;
pub const BISECTION_REL_TOL: f64 = 0.01;

/// Which objective is pinned to a target value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedObjective {
    Delay,
    Mi,
}

impl FixedObjective {
    pub fn value(self, r: &EvaluationResult) -> f64 {
        match self {
            FixedObjective::Delay => r.total_delay_s,
            FixedObjective::Mi => r.total_mi_bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedObjectiveOutcome {
    pub objective: FixedObjective,
    pub target: f64,
    pub eta: f64,
    pub allocation: SubframeAllocation,
    pub result: EvaluationResult,
    /// Solver calls, endpoints included.
    pub iterations: usize,
    pub reachable: bool,
}

/// Searches `η ∈ [0, 1]` until the pinned objective lands within `rel_tol`
/// of `target`. Both objectives grow with `η`, so plain bisection applies;
/// targets outside the endpoint range are reported unreachable.
pub fn bisect_eta<F>(
    mut solve: F,
    objective: FixedObjective,
    target: f64,
    rel_tol: f64,
    max_iterations: usize,
) -> Result<FixedObjectiveOutcome>
where
    F: FnMut(f64) -> Result<(SubframeAllocation, EvaluationResult)>,
{
    let hit = |v: f64| (v - target).abs() <= rel_tol * target.abs();
    let mut calls = 0;
    let mut best: Option<(f64, f64, SubframeAllocation, EvaluationResult)> = None;
    let mut probe = |eta: f64, calls: &mut usize| -> Result<f64> {
        let (a, r) = solve(eta)?;
        *calls += 1;
        let v = objective.value(&r);
        let gap = (v - target).abs();
        if best.as_ref().is_none_or(|b| gap < (objective.value(&b.3) - target).abs()) {
            best = Some((eta, v, a, r));
        }
        Ok(v)
    };

    let finish = |best: Option<(f64, f64, SubframeAllocation, EvaluationResult)>, calls, reachable| {
        let (eta, _, allocation, result) = best.expect("at least one probe");
        Ok(FixedObjectiveOutcome { objective, target, eta, allocation, result, iterations: calls, reachable })
    };

    let v_lo = probe(0.0, &mut calls)?;
    if hit(v_lo) {
        return finish(best, calls, true);
    }
    let v_hi = probe(1.0, &mut calls)?;
    if hit(v_hi) {
        return finish(best, calls, true);
    }
    if target < v_lo.min(v_hi) || target > v_lo.max(v_hi) {
        return finish(best, calls, false);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..max_iterations {
        let mid = 0.5 * (lo + hi);
        let v = probe(mid, &mut calls)?;
        if hit(v) {
            return finish(best, calls, true);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    finish(best, calls, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake(eta: f64) -> Result<(SubframeAllocation, EvaluationResult)> {
        let r = EvaluationResult {
            eta,
            total_mi_bits: 100.0 * eta * eta,
            total_delay_s: 10.0 + 30.0 * eta,
            utility: 0.0,
            per_tue_mi: vec![],
            per_sue_mi: vec![],
            per_tue_delay: vec![],
            per_sue_delay: vec![],
            tue_partitions: vec![],
            sue_partitions: vec![],
            cloud_count_tue: 0,
            cloud_count_sue: 0,
        };
        Ok((SubframeAllocation::all_communication(0), r))
    }

    #[test]
    fn lands_within_tolerance() {
        let o = bisect_eta(fake, FixedObjective::Delay, 20.0, 0.01, 40).unwrap();
        assert!(o.reachable);
        assert!((o.result.total_delay_s - 20.0).abs() <= 0.2);
        assert!(o.iterations <= 42);
        let o = bisect_eta(fake, FixedObjective::Mi, 30.0, 0.01, 40).unwrap();
        assert!(o.reachable && (o.result.total_mi_bits - 30.0).abs() <= 0.3);
    }

    #[test]
    fn reports_unreachable() {
        let o = bisect_eta(fake, FixedObjective::Delay, 5.0, 0.01, 40).unwrap();
        assert!(!o.reachable);
        assert_eq!(o.iterations, 2);
        assert_eq!(o.eta, 0.0);
    }

    #[test]
    fn stops_after_max_iterations() {
        let o = bisect_eta(fake, FixedObjective::Delay, 20.0, 0.0, 3).unwrap();
        assert!(!o.reachable);
        assert_eq!(o.iterations, 5);
    }
}
