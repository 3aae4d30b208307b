use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::encoding::{decode, dimensions};
use super::{evaluate_with, PartitionPolicy};
use crate::error::{Error, Result};
use crate::model::{ensure_valid, EvaluationResult, NetworkScenario, SubframeAllocation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub population: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub seed: u64,
    /// Velocity bound as a fraction of each coordinate's range.
    pub velocity_clamp: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            population: 50,
            max_iterations: 100,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            seed: 1,
            velocity_clamp: 0.5,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 1 || self.max_iterations < 1 {
            return Err(Error::invalid("PSO population and max_iterations must be >= 1"));
        }
        if !(self.inertia > 0.0 && self.inertia <= 1.0) {
            return Err(Error::invalid(format!("PSO inertia must lie in (0,1], got {}", self.inertia)));
        }
        if !(self.cognitive > 0.0 && self.social > 0.0) {
            return Err(Error::invalid("PSO learning factors must be > 0"));
        }
        if !(self.velocity_clamp > 0.0) {
            return Err(Error::invalid("PSO velocity_clamp must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub personal_best: Vec<f64>,
    pub personal_best_utility: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PsoTrace {
    /// Entry 0 is the best of the initial swarm, entry `i` the best after iteration `i`.
    pub gbest_utility: Vec<f64>,
    pub gbest_position: Vec<Vec<f64>>,
}

impl PsoTrace {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iteration", "gbest_utility"])?;
        for (i, u) in self.gbest_utility.iter().enumerate() {
            out.write_record([i.to_string(), u.to_string()])?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Index of the entry holding the reported best (the first occurrence of the maximum).
    pub fn argmax(&self) -> Option<usize> {
        let best = self.gbest_utility.last()?;
        self.gbest_utility.iter().position(|u| u == best)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoOutcome {
    pub allocation: SubframeAllocation,
    pub result: EvaluationResult,
    pub trace: PsoTrace,
    pub swarm: Vec<Particle>,
}

fn particle_rng(seed: u64, iteration: usize, particle: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64) << 32) | particle as u64);
    rng
}

// Higher is better; NaN never wins.
fn better(a: f64, b: f64) -> bool {
    a > b || (b.is_nan() && !a.is_nan())
}

pub fn pso_optimize(
    s: &NetworkScenario,
    eta: f64,
    config: &PsoConfig,
) -> Result<(SubframeAllocation, EvaluationResult, PsoTrace)> {
    let o = pso_optimize_with(s, eta, config, PartitionPolicy::Optimal)?;
    Ok((o.allocation, o.result, o.trace))
}

#[allow(clippy::needless_range_loop)]
pub fn pso_optimize_with(
    s: &NetworkScenario,
    eta: f64,
    config: &PsoConfig,
    policy: PartitionPolicy,
) -> Result<PsoOutcome> {
    ensure_valid(s)?;
    config.validate()?;
    let dims = dimensions(s.num_bs());
    let vmax = config.velocity_clamp;
    let fitness = |x: &[f64]| -> Result<f64> { Ok(evaluate_with(s, &decode(x), eta, policy)?.utility) };

    let mut swarm: Vec<Particle> = (0..config.population)
        .into_par_iter()
        .map(|l| {
            let mut rng = particle_rng(config.seed, 0, l);
            let position: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
            let velocity = (0..dims).map(|_| rng.random_range(-vmax..=vmax)).collect();
            let u = fitness(&position)?;
            Ok(Particle { personal_best: position.clone(), position, velocity, personal_best_utility: u })
        })
        .collect::<Result<_>>()?;

    let mut gbest = swarm[0].personal_best.clone();
    let mut gbest_u = swarm[0].personal_best_utility;
    for p in &swarm[1..] {
        if better(p.personal_best_utility, gbest_u) {
            gbest_u = p.personal_best_utility;
            gbest = p.personal_best.clone();
        }
    }
    let mut trace = PsoTrace { gbest_utility: vec![gbest_u], gbest_position: vec![gbest.clone()] };

    for iter in 1..=config.max_iterations {
        let g = &gbest;
        swarm.par_iter_mut().enumerate().try_for_each(|(l, p)| -> Result<()> {
            let mut rng = particle_rng(config.seed, iter, l);
            for d in 0..dims {
                let z1: f64 = rng.random();
                let z2: f64 = rng.random();
                let v = config.inertia * p.velocity[d]
                    + config.cognitive * z1 * (p.personal_best[d] - p.position[d])
                    + config.social * z2 * (g[d] - p.position[d]);
                p.velocity[d] = v.clamp(-vmax, vmax);
                // boundary repair: clamp onto the box, bounce the velocity back with a random damping
                let x = p.position[d] + p.velocity[d];
                if !(0.0..=1.0).contains(&x) {
                    p.velocity[d] *= -rng.random::<f64>();
                }
                p.position[d] = x.clamp(0.0, 1.0);
            }
            let u = fitness(&p.position)?;
            if better(u, p.personal_best_utility) {
                p.personal_best_utility = u;
                p.personal_best.clone_from(&p.position);
            }
            Ok(())
        })?;
        for p in &swarm {
            if better(p.personal_best_utility, gbest_u) {
                gbest_u = p.personal_best_utility;
                gbest.clone_from(&p.personal_best);
            }
        }
        trace.gbest_utility.push(gbest_u);
        trace.gbest_position.push(gbest.clone());
    }

    let allocation = decode(&gbest);
    let result = evaluate_with(s, &allocation, eta, policy)?;
    Ok(PsoOutcome { allocation, result, trace, swarm })
}
