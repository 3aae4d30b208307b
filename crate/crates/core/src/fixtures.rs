//! Small hand-built scenarios with round numbers.
//!
//! Every task has `D = 5e5` bits, `C = 1000` cycles/bit and `f = 5e8` Hz, so a
//! fully local task takes exactly one second. All antenna and link gains are 1
//! and the noise density is chosen so that `B1 N0 = 1 W`.

use crate::model::{
    BaseStation, CrossGain, NetworkScenario, RadioParams, Satellite, Sue, Task, Tue,
};

pub const TOY_DATA_BITS: f64 = 5e5;

pub fn toy_radio() -> RadioParams {
    RadioParams {
        bandwidth_bs_hz: 20e6,
        bandwidth_sat_hz: 40e6,
        frame_bs_s: 0.01,
        frame_sat_s: 0.01,
        noise_density_w_per_hz: 1.0 / 20e6,
        carrier_hz: 28e9,
        speed_of_light_m_per_s: 3e8,
        cloud_rtt_s: 0.1,
        gateway_path_m: 8e6,
    }
}

fn toy_task() -> Task {
    Task { data_bits: TOY_DATA_BITS, workload_cycles_per_bit: 1000.0 }
}

/// `num_bs` BSs with `tues_per_bs` TUEs each, plus `num_sues` SUEs. Ids are
/// assigned sequentially: TUEs first, then SUEs.
pub fn toy_scenario(num_bs: usize, tues_per_bs: usize, num_sues: usize) -> NetworkScenario {
    let mut next_id = 0u32;
    let base_stations = (0..num_bs)
        .map(|n| {
            let ids: Vec<u32> = (0..tues_per_bs)
                .map(|_| {
                    next_id += 1;
                    next_id - 1
                })
                .collect();
            let tues = ids
                .iter()
                .map(|&id| Tue {
                    id,
                    position_m: Some([n as f64 * 1e4 + 100.0, 0.0, 0.0]),
                    tx_power_w: 1.0,
                    tx_antenna_gain: 1.0,
                    local_cpu_hz: 5e8,
                    task: toy_task(),
                    comm_gain: 1.0,
                    radar_gain_self: 1.0,
                    radar_gain_cross: ids
                        .iter()
                        .filter(|&&l| l != id)
                        .map(|&l| CrossGain { from_id: l, gain: 0.1 })
                        .collect(),
                })
                .collect();
            BaseStation {
                id: n as u32,
                position_m: Some([n as f64 * 1e4, 0.0, 0.0]),
                tx_power_w: 1.0,
                tx_antenna_gain: 1.0,
                rx_antenna_gain: 1.0,
                edge_cpu_hz: 5e9,
                sat_path_m: 8e6,
                sat_comm_gain: 1.0,
                tues,
            }
        })
        .collect();
    let sues = (0..num_sues)
        .map(|_| {
            next_id += 1;
            Sue {
                id: next_id - 1,
                position_m: None,
                tx_power_w: 1.0,
                tx_antenna_gain: 1.0,
                local_cpu_hz: 5e8,
                task: toy_task(),
                comm_gain: 1.0,
                radar_gain_self: 1.0,
                sat_path_m: 8e6,
            }
        })
        .collect();
    NetworkScenario {
        rng_seed: 0,
        radio: toy_radio(),
        satellite: Satellite { orbit_altitude_m: 8e6, rx_antenna_gain: 1.0 },
        base_stations,
        sues,
    }
}
