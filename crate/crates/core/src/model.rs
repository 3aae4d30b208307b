//! Domain types shared by every other module.
//!
//! All powers and gains are linear. Decibel values only appear in
//! [`crate::generator::GeneratorParams`] and are converted with [`db_to_linear`]
//! and [`dbm_to_watts`].

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for the simplex constraints on subframe allocations.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Tolerance used for the partition-ratio sum constraints.
pub const PARTITION_TOL: f64 = 1e-9;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// `Γ(x)`: 1 when `x > 0`, 0 when `x == 0`.
pub fn indicator(x: f64) -> Result<u32> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::invalid(format!("indicator argument must be >= 0, got {x}")));
    }
    Ok(u32::from(x > 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub bandwidth_bs_hz: f64,
    pub bandwidth_sat_hz: f64,
    pub frame_bs_s: f64,
    pub frame_sat_s: f64,
    pub noise_density_w_per_hz: f64,
    pub carrier_hz: f64,
    pub speed_of_light_m_per_s: f64,
    pub cloud_rtt_s: f64,
    /// Satellite to gateway path length.
    pub gateway_path_m: f64,
}

impl RadioParams {
    pub fn noise_bs_w(&self) -> f64 {
        self.bandwidth_bs_hz * self.noise_density_w_per_hz
    }

    pub fn noise_sat_w(&self) -> f64 {
        self.bandwidth_sat_hz * self.noise_density_w_per_hz
    }

    pub fn wavelength_m(&self) -> f64 {
        self.speed_of_light_m_per_s / self.carrier_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub data_bits: f64,
    pub workload_cycles_per_bit: f64,
}

impl Task {
    pub fn cycles(&self) -> f64 {
        self.data_bits * self.workload_cycles_per_bit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Satellite {
    pub orbit_altitude_m: f64,
    pub rx_antenna_gain: f64,
}

/// Propagation gain of the sensing path from another TUE (`from_id`) onto this TUE's target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossGain {
    pub from_id: u32,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tue {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_m: Option<[f64; 3]>,
    pub tx_power_w: f64,
    pub tx_antenna_gain: f64,
    pub local_cpu_hz: f64,
    pub task: Task,
    /// Channel gain TUE -> serving BS.
    pub comm_gain: f64,
    pub radar_gain_self: f64,
    #[serde(default)]
    pub radar_gain_cross: Vec<CrossGain>,
}

impl Tue {
    pub fn cross_gain_from(&self, from_id: u32) -> Option<f64> {
        self.radar_gain_cross.iter().find(|c| c.from_id == from_id).map(|c| c.gain)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_m: Option<[f64; 3]>,
    pub tx_power_w: f64,
    /// Used on the BS -> satellite backhaul.
    pub tx_antenna_gain: f64,
    /// Used on the TUE -> BS access link.
    pub rx_antenna_gain: f64,
    pub edge_cpu_hz: f64,
    pub sat_path_m: f64,
    /// Channel gain BS -> satellite.
    pub sat_comm_gain: f64,
    pub tues: Vec<Tue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sue {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_m: Option<[f64; 3]>,
    pub tx_power_w: f64,
    pub tx_antenna_gain: f64,
    pub local_cpu_hz: f64,
    pub task: Task,
    /// Channel gain SUE -> satellite.
    pub comm_gain: f64,
    pub radar_gain_self: f64,
    pub sat_path_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkScenario {
    pub rng_seed: u64,
    pub radio: RadioParams,
    pub satellite: Satellite,
    #[serde(default)]
    pub base_stations: Vec<BaseStation>,
    #[serde(default)]
    pub sues: Vec<Sue>,
}

impl NetworkScenario {
    pub fn num_bs(&self) -> usize {
        self.base_stations.len()
    }

    /// `K^B`
    pub fn num_tues(&self) -> usize {
        self.base_stations.iter().map(|b| b.tues.len()).sum()
    }

    /// `K^S`
    pub fn num_sues(&self) -> usize {
        self.sues.len()
    }

    pub fn tues(&self) -> impl Iterator<Item = (usize, usize, &Tue)> {
        self.base_stations
            .iter()
            .enumerate()
            .flat_map(|(n, b)| b.tues.iter().enumerate().map(move |(k, t)| (n, k, t)))
    }

    pub(crate) fn tue_at(&self, n: usize, k: usize) -> Result<(&BaseStation, &Tue)> {
        let bs = self
            .base_stations
            .get(n)
            .ok_or_else(|| Error::invalid(format!("BS index {n} out of range")))?;
        let tue = bs
            .tues
            .get(k)
            .ok_or_else(|| Error::invalid(format!("TUE index {k} out of range for BS {n}")))?;
        Ok((bs, tue))
    }

    pub(crate) fn sue_at(&self, k: usize) -> Result<&Sue> {
        self.sues
            .get(k)
            .ok_or_else(|| Error::invalid(format!("SUE index {k} out of range")))
    }
}

/// Time fractions of the BS frames and the satellite frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubframeAllocation {
    pub tau_ub: Vec<f64>,
    pub theta_ub: Vec<f64>,
    pub tau_b: f64,
    pub tau_us: f64,
    pub theta_us: f64,
}

impl SubframeAllocation {
    /// Builds an allocation from the communication fractions; sensing takes the rest.
    pub fn from_comm(tau_ub: Vec<f64>, tau_b: f64, tau_us: f64) -> Self {
        let theta_ub = tau_ub.iter().map(|t| 1.0 - t).collect();
        SubframeAllocation { tau_ub, theta_ub, tau_b, tau_us, theta_us: 1.0 - tau_b - tau_us }
    }

    /// Everything to communication, satellite frame split evenly between BSs and SUEs.
    pub fn all_communication(num_bs: usize) -> Self {
        SubframeAllocation::from_comm(vec![1.0; num_bs], 0.5, 0.5)
    }

    pub fn all_sensing(num_bs: usize) -> Self {
        SubframeAllocation {
            tau_ub: vec![0.0; num_bs],
            theta_ub: vec![1.0; num_bs],
            tau_b: 0.0,
            tau_us: 0.0,
            theta_us: 1.0,
        }
    }

    pub fn validate(&self, num_bs: usize) -> Result<()> {
        if self.tau_ub.len() != num_bs || self.theta_ub.len() != num_bs {
            return Err(Error::invalid(format!(
                "allocation has {} / {} BS entries, scenario has {num_bs} BSs",
                self.tau_ub.len(),
                self.theta_ub.len()
            )));
        }
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        for (n, (&t, &th)) in self.tau_ub.iter().zip(&self.theta_ub).enumerate() {
            if !in_unit(t) || !in_unit(th) || (t + th - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::invalid(format!(
                    "BS {n}: tau={t}, theta={th} violates tau + theta = 1"
                )));
            }
        }
        let sat = [self.tau_b, self.tau_us, self.theta_us];
        if !sat.iter().all(|&x| in_unit(x)) || (sat.iter().sum::<f64>() - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::invalid(format!(
                "satellite frame tau_b={}, tau_us={}, theta_us={} violates the simplex",
                self.tau_b, self.tau_us, self.theta_us
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionTue {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl PartitionTue {
    pub fn new(alpha: f64, beta: f64, kappa: f64) -> Result<Self> {
        let p = PartitionTue { alpha, beta, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.alpha, self.beta, self.kappa].iter().all(|x| (0.0..=1.0).contains(x))
            && (self.alpha + self.beta + self.kappa - 1.0).abs() <= PARTITION_TOL;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "TUE partition ({}, {}, {}) must lie in [0,1] and sum to 1",
                self.alpha, self.beta, self.kappa
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionSue {
    pub alpha: f64,
    pub kappa: f64,
}

impl PartitionSue {
    pub fn new(alpha: f64, kappa: f64) -> Result<Self> {
        let p = PartitionSue { alpha, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.alpha, self.kappa].iter().all(|x| (0.0..=1.0).contains(x))
            && (self.alpha + self.kappa - 1.0).abs() <= PARTITION_TOL;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "SUE partition ({}, {}) must lie in [0,1] and sum to 1",
                self.alpha, self.kappa
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub eta: f64,
    pub total_mi_bits: f64,
    pub total_delay_s: f64,
    pub utility: f64,
    pub per_tue_mi: Vec<f64>,
    pub per_sue_mi: Vec<f64>,
    pub per_tue_delay: Vec<f64>,
    pub per_sue_delay: Vec<f64>,
    pub tue_partitions: Vec<PartitionTue>,
    pub sue_partitions: Vec<PartitionSue>,
    pub cloud_count_tue: usize,
    pub cloud_count_sue: usize,
}

/// Checks every type invariant and returns one description per violation.
pub fn validate_scenario(s: &NetworkScenario) -> Vec<String> {
    let mut v = Vec::new();
    let r = &s.radio;
    for (name, val) in [
        ("radio.bandwidth_bs_hz", r.bandwidth_bs_hz),
        ("radio.bandwidth_sat_hz", r.bandwidth_sat_hz),
        ("radio.frame_bs_s", r.frame_bs_s),
        ("radio.frame_sat_s", r.frame_sat_s),
        ("radio.noise_density_w_per_hz", r.noise_density_w_per_hz),
        ("radio.carrier_hz", r.carrier_hz),
        ("radio.speed_of_light_m_per_s", r.speed_of_light_m_per_s),
        ("radio.cloud_rtt_s", r.cloud_rtt_s),
        ("radio.gateway_path_m", r.gateway_path_m),
    ] {
        if !(val > 0.0 && val.is_finite()) {
            v.push(format!("{name} must be > 0, got {val}"));
        }
    }
    let alt = s.satellite.orbit_altitude_m;
    if !(alt > 0.0) {
        v.push(format!("satellite.orbit_altitude_m must be > 0, got {alt}"));
    }
    if !(s.satellite.rx_antenna_gain >= 0.0) {
        v.push("satellite.rx_antenna_gain must be >= 0".into());
    }

    let mut bs_ids = HashSet::new();
    let mut user_ids = HashSet::new();
    for bs in &s.base_stations {
        let b = bs.id;
        if !bs_ids.insert(b) {
            v.push(format!("duplicate BS id {b}"));
        }
        if !(bs.edge_cpu_hz > 0.0) {
            v.push(format!("BS {b}: edge_cpu_hz must be > 0"));
        }
        if !(bs.sat_path_m >= alt) {
            v.push(format!("BS {b}: sat_path_m {} is below the orbit altitude {alt}", bs.sat_path_m));
        }
        if bs.tues.is_empty() {
            v.push(format!("BS {b}: needs at least one TUE"));
        }
        for (name, g) in [
            ("tx_power_w", bs.tx_power_w),
            ("tx_antenna_gain", bs.tx_antenna_gain),
            ("rx_antenna_gain", bs.rx_antenna_gain),
            ("sat_comm_gain", bs.sat_comm_gain),
        ] {
            if !(g >= 0.0) {
                v.push(format!("BS {b}: {name} must be >= 0"));
            }
        }
        for tue in &bs.tues {
            let u = tue.id;
            if !user_ids.insert(u) {
                v.push(format!("duplicate user id {u}"));
            }
            if !(tue.local_cpu_hz > 0.0) {
                v.push(format!("TUE {u}: local_cpu_hz must be > 0"));
            }
            for (name, g) in [
                ("tx_power_w", tue.tx_power_w),
                ("tx_antenna_gain", tue.tx_antenna_gain),
                ("comm_gain", tue.comm_gain),
                ("radar_gain_self", tue.radar_gain_self),
            ] {
                if !(g >= 0.0) {
                    v.push(format!("TUE {u}: {name} must be >= 0"));
                }
            }
            check_task(&mut v, &format!("TUE {u}"), &tue.task);
            for other in bs.tues.iter().filter(|o| o.id != u) {
                match tue.cross_gain_from(other.id) {
                    None => v.push(format!(
                        "TUE {u}: missing cross radar gain from TUE {} (BS {b})",
                        other.id
                    )),
                    Some(g) if !(g >= 0.0) => {
                        v.push(format!("TUE {u}: cross radar gain from TUE {} must be >= 0", other.id))
                    }
                    Some(_) => {}
                }
            }
            for c in &tue.radar_gain_cross {
                if c.from_id == u || !bs.tues.iter().any(|o| o.id == c.from_id) {
                    v.push(format!("TUE {u}: cross radar gain from {} is not another TUE of BS {b}", c.from_id));
                }
            }
        }
    }
    for sue in &s.sues {
        let u = sue.id;
        if !user_ids.insert(u) {
            v.push(format!("duplicate user id {u}"));
        }
        if !(sue.local_cpu_hz > 0.0) {
            v.push(format!("SUE {u}: local_cpu_hz must be > 0"));
        }
        for (name, g) in [
            ("tx_power_w", sue.tx_power_w),
            ("tx_antenna_gain", sue.tx_antenna_gain),
            ("comm_gain", sue.comm_gain),
            ("radar_gain_self", sue.radar_gain_self),
        ] {
            if !(g >= 0.0) {
                v.push(format!("SUE {u}: {name} must be >= 0"));
            }
        }
        if !(sue.sat_path_m >= alt) {
            v.push(format!("SUE {u}: sat_path_m {} is below the orbit altitude {alt}", sue.sat_path_m));
        }
        check_task(&mut v, &format!("SUE {u}"), &sue.task);
    }
    v
}

fn check_task(v: &mut Vec<String>, owner: &str, task: &Task) {
    if !(task.data_bits > 0.0 && task.data_bits.is_finite()) {
        v.push(format!("task of {owner}: data_bits must be > 0, got {}", task.data_bits));
    }
    if !(task.workload_cycles_per_bit > 0.0 && task.workload_cycles_per_bit.is_finite()) {
        v.push(format!(
            "task of {owner}: workload_cycles_per_bit must be > 0, got {}",
            task.workload_cycles_per_bit
        ));
    }
}

/// Returns `Err(InvalidScenario)` listing every violation, if any.
pub fn ensure_valid(s: &NetworkScenario) -> Result<()> {
    let v = validate_scenario(s);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidScenario(v))
    }
}
