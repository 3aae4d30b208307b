//! Unconstrained box encoding of a subframe allocation.
//!
//! A position has `N + 2` coordinates in `[0, 1]`: one communication fraction
//! per BS, then `(y1, y2)` for the satellite frame. The satellite pair maps to
//! `(τ^b, τ^{u_s})` directly and is normalized onto the simplex edge when
//! `y1 + y2 > 1`; sensing takes whatever is left.

use crate::model::SubframeAllocation;

pub fn dimensions(num_bs: usize) -> usize {
    num_bs + 2
}

pub fn decode(x: &[f64]) -> SubframeAllocation {
    let n = x.len() - 2;
    let tau_ub: Vec<f64> = x[..n].iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let theta_ub = tau_ub.iter().map(|t| 1.0 - t).collect();
    let y1 = x[n].clamp(0.0, 1.0);
    let y2 = x[n + 1].clamp(0.0, 1.0);
    let (tau_b, tau_us, theta_us) = if y1 + y2 > 1.0 {
        let tau_b = y1 / (y1 + y2);
        (tau_b, 1.0 - tau_b, 0.0)
    } else {
        (y1, y2, (1.0 - y1 - y2).max(0.0))
    };
    SubframeAllocation { tau_ub, theta_ub, tau_b, tau_us, theta_us }
}

pub fn encode(alloc: &SubframeAllocation) -> Vec<f64> {
    let mut x = alloc.tau_ub.clone();
    x.push(alloc.tau_b);
    x.push(alloc.tau_us);
    x
}
