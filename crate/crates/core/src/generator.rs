//! Random scenarios with the default simulation parameters.
//!
//! Decibel quantities are converted to linear units here and nowhere else.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{materialize_gains, LinkBudgetModel};
use crate::error::{Error, Result};
use crate::model::{
    db_to_linear, dbm_to_watts, ensure_valid, BaseStation, NetworkScenario, RadioParams, Satellite, Sue,
    Task, Tue,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorParams {
    pub num_bs: usize,
    pub tues_per_bs: usize,
    pub num_sues: usize,
    pub orbit_altitude_m: f64,
    pub cell_radius_m: f64,
    /// BSs sit on a line with this spacing; only TUE-BS distances matter.
    pub bs_spacing_m: f64,
    pub carrier_hz: f64,
    pub bandwidth_bs_hz: f64,
    pub bandwidth_sat_hz: f64,
    pub frame_bs_s: f64,
    pub frame_sat_s: f64,
    pub user_power_dbm: f64,
    pub bs_power_dbm: f64,
    pub noise_density_dbm_per_hz: f64,
    pub terrestrial_antenna_gain_db: f64,
    /// Used by every antenna on a satellite link: BS backhaul, SUE uplink and the satellite receiver.
    pub satellite_antenna_gain_db: f64,
    pub data_min_bits: f64,
    pub data_max_bits: f64,
    pub workload_cycles_per_bit: f64,
    pub user_cpu_hz: f64,
    pub edge_cpu_hz: f64,
    pub cloud_rtt_s: f64,
    pub speed_of_light_m_per_s: f64,
    pub radar_cross_section_m2: f64,
    pub target_range_min_m: f64,
    pub target_range_max_m: f64,
    pub radar_antenna_gain_db: f64,
    pub cross_radar_factor: f64,
    pub satellite_excess_loss_db: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            num_bs: 10,
            tues_per_bs: 5,
            num_sues: 30,
            orbit_altitude_m: 8.0e6,
            cell_radius_m: 500.0,
            bs_spacing_m: 2000.0,
            carrier_hz: 28e9,
            bandwidth_bs_hz: 20e6,
            bandwidth_sat_hz: 40e6,
            frame_bs_s: 0.01,
            frame_sat_s: 0.01,
            user_power_dbm: 30.0,
            bs_power_dbm: 40.0,
            noise_density_dbm_per_hz: -174.0,
            terrestrial_antenna_gain_db: 18.0,
            satellite_antenna_gain_db: 40.0,
            data_min_bits: 100e3,
            data_max_bits: 900e3,
            workload_cycles_per_bit: 1000.0,
            user_cpu_hz: 5e8,
            edge_cpu_hz: 5e9,
            cloud_rtt_s: 0.1,
            speed_of_light_m_per_s: 3e8,
            radar_cross_section_m2: 1.0,
            target_range_min_m: 100.0,
            target_range_max_m: 100.0,
            radar_antenna_gain_db: 18.0,
            cross_radar_factor: 0.1,
            satellite_excess_loss_db: 0.0,
        }
    }
}

impl GeneratorParams {
    /// The small network used for the exhaustive comparison.
    pub fn small() -> Self {
        GeneratorParams { num_bs: 5, num_sues: 10, ..Self::default() }
    }

    /// Recenters the task-size interval on `mean_bits`, keeping the default
    /// relative spread (`[0.2, 1.8] × mean`).
    pub fn with_mean_data_bits(mut self, mean_bits: f64) -> Self {
        self.data_min_bits = 0.2 * mean_bits;
        self.data_max_bits = 1.8 * mean_bits;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.num_bs == 0 && self.num_sues == 0 {
            v.push("scenario needs at least one BS or SUE".to_string());
        }
        if self.num_bs > 0 && self.tues_per_bs == 0 {
            v.push("tues_per_bs must be >= 1".to_string());
        }
        for (name, x) in [
            ("orbit_altitude_m", self.orbit_altitude_m),
            ("cell_radius_m", self.cell_radius_m),
            ("carrier_hz", self.carrier_hz),
            ("bandwidth_bs_hz", self.bandwidth_bs_hz),
            ("bandwidth_sat_hz", self.bandwidth_sat_hz),
            ("frame_bs_s", self.frame_bs_s),
            ("frame_sat_s", self.frame_sat_s),
            ("data_min_bits", self.data_min_bits),
            ("workload_cycles_per_bit", self.workload_cycles_per_bit),
            ("user_cpu_hz", self.user_cpu_hz),
            ("edge_cpu_hz", self.edge_cpu_hz),
            ("cloud_rtt_s", self.cloud_rtt_s),
            ("speed_of_light_m_per_s", self.speed_of_light_m_per_s),
            ("radar_cross_section_m2", self.radar_cross_section_m2),
            ("target_range_min_m", self.target_range_min_m),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                v.push(format!("{name} must be > 0, got {x}"));
            }
        }
        if !(self.data_max_bits >= self.data_min_bits) {
            v.push("data_max_bits must be >= data_min_bits".into());
        }
        if !(self.target_range_max_m >= self.target_range_min_m) {
            v.push("target_range_max_m must be >= target_range_min_m".into());
        }
        if !(self.cross_radar_factor >= 0.0) {
            v.push("cross_radar_factor must be >= 0".into());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(v))
        }
    }

    pub fn link_model(&self) -> LinkBudgetModel {
        LinkBudgetModel {
            frequency_hz: self.carrier_hz,
            radar_cross_section_m2: self.radar_cross_section_m2,
            target_range_min_m: self.target_range_min_m,
            target_range_max_m: self.target_range_max_m,
            radar_antenna_gain: db_to_linear(self.radar_antenna_gain_db),
            cross_radar_factor: self.cross_radar_factor,
            satellite_excess_loss_db: self.satellite_excess_loss_db,
            ..LinkBudgetModel::default()
        }
    }
}

fn draw_data(rng: &mut ChaCha8Rng, p: &GeneratorParams) -> f64 {
    if p.data_max_bits > p.data_min_bits {
        rng.random_range(p.data_min_bits..=p.data_max_bits)
    } else {
        p.data_min_bits
    }
}

/// Builds a scenario with gains materialized by the default channel model.
///
/// Every random draw happens in a fixed order that does not depend on the
/// orbit altitude, so altitude sweeps with one seed keep the same users.
pub fn generate_scenario(p: &GeneratorParams, seed: u64) -> Result<NetworkScenario> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let user_gain = db_to_linear(p.terrestrial_antenna_gain_db);
    let sat_gain = db_to_linear(p.satellite_antenna_gain_db);
    let user_power = dbm_to_watts(p.user_power_dbm);
    let task = |d: f64| Task { data_bits: d, workload_cycles_per_bit: p.workload_cycles_per_bit };
    let mut next_id = 0u32;

    let mut base_stations = Vec::with_capacity(p.num_bs);
    for n in 0..p.num_bs {
        let center = [n as f64 * p.bs_spacing_m, 0.0, 0.0];
        let mut tues = Vec::with_capacity(p.tues_per_bs);
        for _ in 0..p.tues_per_bs {
            // uniform in the disk
            let r = p.cell_radius_m * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            let data = draw_data(&mut rng, p);
            tues.push(Tue {
                id: next_id,
                position_m: Some([center[0] + r * phi.cos(), r * phi.sin(), 0.0]),
                tx_power_w: user_power,
                tx_antenna_gain: user_gain,
                local_cpu_hz: p.user_cpu_hz,
                task: task(data),
                comm_gain: 0.0,
                radar_gain_self: 0.0,
                radar_gain_cross: Vec::new(),
            });
            next_id += 1;
        }
        base_stations.push(BaseStation {
            id: n as u32,
            position_m: Some(center),
            tx_power_w: dbm_to_watts(p.bs_power_dbm),
            tx_antenna_gain: sat_gain,
            rx_antenna_gain: user_gain,
            edge_cpu_hz: p.edge_cpu_hz,
            sat_path_m: p.orbit_altitude_m,
            sat_comm_gain: 0.0,
            tues,
        });
    }
    let mut sues = Vec::with_capacity(p.num_sues);
    for _ in 0..p.num_sues {
        let data = draw_data(&mut rng, p);
        sues.push(Sue {
            id: next_id,
            position_m: None,
            tx_power_w: user_power,
            tx_antenna_gain: sat_gain,
            local_cpu_hz: p.user_cpu_hz,
            task: task(data),
            comm_gain: 0.0,
            radar_gain_self: 0.0,
            sat_path_m: p.orbit_altitude_m,
        });
        next_id += 1;
    }

    let bare = NetworkScenario {
        rng_seed: seed,
        radio: RadioParams {
            bandwidth_bs_hz: p.bandwidth_bs_hz,
            bandwidth_sat_hz: p.bandwidth_sat_hz,
            frame_bs_s: p.frame_bs_s,
            frame_sat_s: p.frame_sat_s,
            noise_density_w_per_hz: dbm_to_watts(p.noise_density_dbm_per_hz),
            carrier_hz: p.carrier_hz,
            speed_of_light_m_per_s: p.speed_of_light_m_per_s,
            cloud_rtt_s: p.cloud_rtt_s,
            gateway_path_m: p.orbit_altitude_m,
        },
        satellite: Satellite { orbit_altitude_m: p.orbit_altitude_m, rx_antenna_gain: sat_gain },
        base_stations,
        sues,
    };
    let s = materialize_gains(&bare, &p.link_model(), seed.wrapping_add(1))?;
    ensure_valid(&s)?;
    Ok(s)
}
