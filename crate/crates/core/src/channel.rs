//! Link gains, achievable rates, radar SINR and radar mutual information.
//!
//! Rates returned here are full-bandwidth rates; the TDMA share (`τ/K`) is
//! applied by the delay model.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{db_to_linear, CrossGain, NetworkScenario, SubframeAllocation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainModelKind {
    FreeSpace,
    FixedTable,
}

impl FromStr for GainModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free-space" => Ok(GainModelKind::FreeSpace),
            "fixed-table" => Ok(GainModelKind::FixedTable),
            other => Err(Error::UnknownModelKind(other.to_string())),
        }
    }
}

/// How link gains are produced from geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudgetModel {
    pub kind: GainModelKind,
    pub frequency_hz: f64,
    pub radar_cross_section_m2: f64,
    /// Sensing target ranges are drawn uniformly from this interval.
    pub target_range_min_m: f64,
    pub target_range_max_m: f64,
    /// Antenna gain used on both ends of the monostatic sensing path.
    pub radar_antenna_gain: f64,
    /// Cross radar gain as a fraction of the victim's self gain.
    pub cross_radar_factor: f64,
    pub satellite_excess_loss_db: f64,
    /// Only read when `kind == FixedTable`.
    #[serde(skip)]
    pub table: Option<GainTable>,
}

impl Default for LinkBudgetModel {
    fn default() -> Self {
        LinkBudgetModel {
            kind: GainModelKind::FreeSpace,
            frequency_hz: 28e9,
            radar_cross_section_m2: 1.0,
            target_range_min_m: 100.0,
            target_range_max_m: 100.0,
            radar_antenna_gain: db_to_linear(18.0),
            cross_radar_factor: 0.1,
            satellite_excess_loss_db: 0.0,
            table: None,
        }
    }
}

/// Friis power gain `(λ / 4πd)²` with isotropic antennas.
pub fn free_space_gain(distance_m: f64, wavelength_m: f64) -> f64 {
    let r = wavelength_m / (4.0 * PI * distance_m);
    r * r
}

/// Two-way radar equation `G² λ² σ / ((4π)³ d⁴)`.
pub fn radar_equation_gain(antenna_gain: f64, wavelength_m: f64, rcs_m2: f64, range_m: f64) -> f64 {
    antenna_gain * antenna_gain * wavelength_m * wavelength_m * rcs_m2
        / ((4.0 * PI).powi(3) * range_m.powi(4))
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Populates every `h` and `g` field of the scenario.
pub fn materialize_gains(
    scenario: &NetworkScenario,
    model: &LinkBudgetModel,
    seed: u64,
) -> Result<NetworkScenario> {
    if !(model.frequency_hz > 0.0) {
        return Err(Error::invalid("link model frequency_hz must be > 0"));
    }
    match model.kind {
        GainModelKind::FreeSpace => materialize_free_space(scenario, model, seed),
        GainModelKind::FixedTable => {
            let table = model
                .table
                .as_ref()
                .ok_or_else(|| Error::invalid("fixed-table model without a gain table"))?;
            let mut out = scenario.clone();
            table.apply(&mut out, true)?;
            Ok(out)
        }
    }
}

fn materialize_free_space(
    scenario: &NetworkScenario,
    model: &LinkBudgetModel,
    seed: u64,
) -> Result<NetworkScenario> {
    let mut out = scenario.clone();
    let lambda = scenario.radio.speed_of_light_m_per_s / model.frequency_hz;
    let sat_loss = db_to_linear(-model.satellite_excess_loss_db);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (model.target_range_min_m, model.target_range_max_m);
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::invalid("target range interval must satisfy 0 < min <= max"));
    }
    let mut draw_range = move || if hi > lo { rng.random_range(lo..hi) } else { lo };
    let radar = |range: f64| {
        radar_equation_gain(model.radar_antenna_gain, lambda, model.radar_cross_section_m2, range)
    };

    for bs in &mut out.base_stations {
        bs.sat_comm_gain = free_space_gain(bs.sat_path_m, lambda) * sat_loss;
        let bs_pos = bs
            .position_m
            .ok_or_else(|| Error::invalid(format!("BS {} has no position", bs.id)))?;
        for tue in &mut bs.tues {
            let pos = tue
                .position_m
                .ok_or_else(|| Error::invalid(format!("TUE {} has no position", tue.id)))?;
            tue.comm_gain = free_space_gain(distance(pos, bs_pos).max(1.0), lambda);
            tue.radar_gain_self = radar(draw_range());
        }
        let ids: Vec<u32> = bs.tues.iter().map(|t| t.id).collect();
        for tue in &mut bs.tues {
            let own = tue.id;
            let g = tue.radar_gain_self * model.cross_radar_factor;
            tue.radar_gain_cross = ids
                .iter()
                .filter(|&&l| l != own)
                .map(|&l| CrossGain { from_id: l, gain: g })
                .collect();
        }
    }
    for sue in &mut out.sues {
        sue.comm_gain = free_space_gain(sue.sat_path_m, lambda) * sat_loss;
        sue.radar_gain_self = radar(draw_range());
    }
    Ok(out)
}

/// `γ^{u_b,rad}_{n,k}`: intra-BS interference only.
pub fn radar_sinr_tue(s: &NetworkScenario, n: usize, k: usize) -> Result<f64> {
    let (bs, tue) = s.tue_at(n, k)?;
    let interference: f64 = bs
        .tues
        .iter()
        .filter(|l| l.id != tue.id)
        .map(|l| tue.cross_gain_from(l.id).unwrap_or(0.0) * l.tx_power_w)
        .sum();
    Ok(tue.radar_gain_self * tue.tx_power_w / (interference + s.radio.noise_bs_w()))
}

/// `γ^{u_s,rad}_k`: SUEs see no sensing interference.
pub fn radar_sinr_sue(s: &NetworkScenario, k: usize) -> Result<f64> {
    let sue = s.sue_at(k)?;
    Ok(sue.radar_gain_self * sue.tx_power_w / s.radio.noise_sat_w())
}

/// Radar MI in bits for one BS frame: `θ T1 B1 log2(1 + γ)`.
pub fn radar_mi_tue(s: &NetworkScenario, alloc: &SubframeAllocation, n: usize, k: usize) -> Result<f64> {
    let theta = *alloc
        .theta_ub
        .get(n)
        .ok_or_else(|| Error::invalid(format!("allocation has no BS {n}")))?;
    let sinr = radar_sinr_tue(s, n, k)?;
    Ok(mi_bits(theta, s.radio.frame_bs_s, s.radio.bandwidth_bs_hz, sinr))
}

pub fn radar_mi_sue(s: &NetworkScenario, alloc: &SubframeAllocation, k: usize) -> Result<f64> {
    let sinr = radar_sinr_sue(s, k)?;
    Ok(mi_bits(alloc.theta_us, s.radio.frame_sat_s, s.radio.bandwidth_sat_hz, sinr))
}

pub(crate) fn mi_bits(theta: f64, frame_s: f64, bandwidth_hz: f64, sinr: f64) -> f64 {
    theta * frame_s * bandwidth_hz * (1.0 + sinr).log2()
}

fn shannon(bandwidth_hz: f64, snr: f64) -> f64 {
    bandwidth_hz * (1.0 + snr).log2()
}

/// `R^{u_b}_{n,k}`
pub fn rate_tue(s: &NetworkScenario, n: usize, k: usize) -> Result<f64> {
    let (bs, tue) = s.tue_at(n, k)?;
    let snr = tue.tx_antenna_gain * bs.rx_antenna_gain * tue.comm_gain * tue.tx_power_w
        / s.radio.noise_bs_w();
    Ok(shannon(s.radio.bandwidth_bs_hz, snr))
}

/// `R^b_n`
pub fn rate_bs(s: &NetworkScenario, n: usize) -> Result<f64> {
    let bs = s
        .base_stations
        .get(n)
        .ok_or_else(|| Error::invalid(format!("BS index {n} out of range")))?;
    let snr = bs.tx_antenna_gain * s.satellite.rx_antenna_gain * bs.sat_comm_gain * bs.tx_power_w
        / s.radio.noise_sat_w();
    Ok(shannon(s.radio.bandwidth_sat_hz, snr))
}

/// `R^{u_s}_k`
pub fn rate_sue(s: &NetworkScenario, k: usize) -> Result<f64> {
    let sue = s.sue_at(k)?;
    let snr = sue.tx_antenna_gain * s.satellite.rx_antenna_gain * sue.comm_gain * sue.tx_power_w
        / s.radio.noise_sat_w();
    Ok(shannon(s.radio.bandwidth_sat_hz, snr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkType {
    TueBs,
    BsSat,
    SueSat,
    TueRadar,
    SueRadar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRecord {
    pub link_type: LinkType,
    pub from_id: u32,
    pub to_id: u32,
    pub gain_linear: f64,
}

/// Explicit per-link gains, read from or written to CSV
/// (`link_type,from_id,to_id,gain_linear`).
///
/// `to_id` is the BS id for `tue_bs`, 0 for `bs_sat`/`sue_sat`, and the
/// sensing TUE for `tue_radar` (self gains have `from_id == to_id`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GainTable {
    records: HashMap<(LinkType, u32, u32), f64>,
}

impl GainTable {
    pub fn insert(&mut self, link: LinkType, from: u32, to: u32, gain: f64) {
        self.records.insert((link, from, to), gain);
    }

    pub fn get(&self, link: LinkType, from: u32, to: u32) -> Option<f64> {
        self.records.get(&(link, from, to)).copied()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// One entry for every link in the scenario, all set to `gain`.
    pub fn uniform(s: &NetworkScenario, gain: f64) -> Self {
        let mut t = GainTable::from_scenario(s);
        for v in t.records.values_mut() {
            *v = gain;
        }
        t
    }

    pub fn from_scenario(s: &NetworkScenario) -> Self {
        let mut t = GainTable::default();
        for bs in &s.base_stations {
            t.insert(LinkType::BsSat, bs.id, 0, bs.sat_comm_gain);
            for tue in &bs.tues {
                t.insert(LinkType::TueBs, tue.id, bs.id, tue.comm_gain);
                t.insert(LinkType::TueRadar, tue.id, tue.id, tue.radar_gain_self);
                for c in &tue.radar_gain_cross {
                    t.insert(LinkType::TueRadar, c.from_id, tue.id, c.gain);
                }
            }
        }
        for sue in &s.sues {
            t.insert(LinkType::SueSat, sue.id, 0, sue.comm_gain);
            t.insert(LinkType::SueRadar, sue.id, sue.id, sue.radar_gain_self);
        }
        t
    }

    /// Writes table gains into the scenario. With `complete`, every link must be covered.
    pub fn apply(&self, s: &mut NetworkScenario, complete: bool) -> Result<()> {
        let pick = |link, from, to, slot: &mut f64| -> Result<()> {
            match self.get(link, from, to) {
                Some(g) => {
                    *slot = g;
                    Ok(())
                }
                None if complete => Err(Error::MissingGain(format!("{link:?} {from} -> {to}"))),
                None => Ok(()),
            }
        };
        for bs in &mut s.base_stations {
            pick(LinkType::BsSat, bs.id, 0, &mut bs.sat_comm_gain)?;
            let ids: Vec<u32> = bs.tues.iter().map(|t| t.id).collect();
            for tue in &mut bs.tues {
                pick(LinkType::TueBs, tue.id, bs.id, &mut tue.comm_gain)?;
                pick(LinkType::TueRadar, tue.id, tue.id, &mut tue.radar_gain_self)?;
                for &l in ids.iter().filter(|&&l| l != tue.id) {
                    let Some(g) = self.get(LinkType::TueRadar, l, tue.id) else {
                        if complete {
                            return Err(Error::MissingGain(format!("TueRadar {l} -> {}", tue.id)));
                        }
                        continue;
                    };
                    match tue.radar_gain_cross.iter_mut().find(|c| c.from_id == l) {
                        Some(c) => c.gain = g,
                        None => tue.radar_gain_cross.push(CrossGain { from_id: l, gain: g }),
                    }
                }
            }
        }
        for sue in &mut s.sues {
            pick(LinkType::SueSat, sue.id, 0, &mut sue.comm_gain)?;
            pick(LinkType::SueRadar, sue.id, sue.id, &mut sue.radar_gain_self)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut t = GainTable::default();
        for row in rdr.deserialize() {
            let r: GainRecord = row?;
            if !(r.gain_linear >= 0.0) {
                return Err(Error::Parse(format!("negative gain in record {r:?}")));
            }
            t.insert(r.link_type, r.from_id, r.to_id, r.gain_linear);
        }
        Ok(t)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut rows: Vec<GainRecord> = self
            .records
            .iter()
            .map(|(&(link_type, from_id, to_id), &gain_linear)| GainRecord {
                link_type,
                from_id,
                to_id,
                gain_linear,
            })
            .collect();
        rows.sort_by_key(|r| (r.link_type as u8, r.from_id, r.to_id));
        let mut w = csv::Writer::from_writer(writer);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        GainTable::read_csv(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(f)
    }
}
