//! Experiment drivers, result files and run manifests.

mod bisection;
mod export;
mod strategy;

pub use bisection::{
    bisect_eta, FixedObjective, FixedObjectiveOutcome, BISECTION_MAX_ITERATIONS, BISECTION_REL_TOL,
};
pub use export::{export_plot_data, read_plot_data, ExportSummary, PlotRow, PLOT_DATA_FILE, SUMMARY_FILE};
pub use strategy::{solve, SolverSettings, Strategy};

use std::fmt::Display;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::generator::{generate_scenario, GeneratorParams};
use crate::io::load_scenario;
use crate::model::{EvaluationResult, NetworkScenario, SubframeAllocation};
use crate::optimizer::pso_optimize_with;
use crate::optimizer::PartitionPolicy;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Convergence,
    Pareto,
    DataAmount,
    OrbitAltitude,
    #[default]
    SingleEval,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Pareto => "pareto",
            ExperimentKind::DataAmount => "data-amount",
            ExperimentKind::OrbitAltitude => "orbit-altitude",
            ExperimentKind::SingleEval => "single-eval",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ExperimentKind::Convergence,
            ExperimentKind::Pareto,
            ExperimentKind::DataAmount,
            ExperimentKind::OrbitAltitude,
            ExperimentKind::SingleEval,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::invalid(format!("unknown experiment kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Scenario file; when absent the scenario is generated from `generator` and `seed`.
    pub scenario: Option<PathBuf>,
    pub generator: GeneratorParams,
    pub seed: u64,
    pub etas: Vec<f64>,
    /// Convergence: BS counts. Data amount: mean task size in Kb. Orbit: altitude in km.
    pub sweep: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub output_dir: PathBuf,
    pub solver: SolverSettings,
    pub fixed_delay_s: f64,
    pub fixed_mi_bits: f64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::SingleEval,
            scenario: None,
            generator: GeneratorParams::default(),
            seed: 1,
            etas: vec![0.5],
            sweep: Vec::new(),
            strategies: vec![Strategy::Jsatps],
            output_dir: PathBuf::from("results"),
            solver: SolverSettings::default(),
            fixed_delay_s: 20.0,
            fixed_mi_bits: 6e7,
        }
    }
}

impl ExperimentSpec {
    pub fn pareto_etas() -> Vec<f64> {
        (0..=10).map(|i| i as f64 / 10.0).collect()
    }

    /// Sweep values used when `sweep` is empty.
    pub fn effective_sweep(&self) -> Vec<f64> {
        if !self.sweep.is_empty() {
            return self.sweep.clone();
        }
        match self.kind {
            ExperimentKind::DataAmount => vec![200.0, 300.0, 400.0, 500.0, 600.0],
            ExperimentKind::OrbitAltitude => vec![1000.0, 4000.0, 8000.0, 10000.0, 36000.0],
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.strategies.is_empty() {
            v.push("at least one strategy is required".to_string());
        }
        if self.output_dir.as_os_str().is_empty() {
            v.push("output_dir is required".to_string());
        }
        if self.etas.iter().any(|e| !(0.0..=1.0).contains(e)) {
            v.push("eta values must lie in [0,1]".to_string());
        }
        match self.kind {
            ExperimentKind::SingleEval | ExperimentKind::Convergence if self.etas.is_empty() => {
                v.push(format!("{} needs at least one eta", self.kind.name()));
            }
            ExperimentKind::Pareto => {
                if self.etas.len() < 2 {
                    v.push("pareto needs at least two eta values".to_string());
                }
                if self.etas.windows(2).any(|w| !(w[0] <= w[1])) {
                    v.push("pareto eta values must be sorted ascending".to_string());
                }
            }
            ExperimentKind::DataAmount | ExperimentKind::OrbitAltitude => {
                if self.scenario.is_some() {
                    v.push(format!("{} regenerates scenarios and needs generator parameters, not a scenario file", self.kind.name()));
                }
                if !(self.fixed_delay_s > 0.0 && self.fixed_mi_bits > 0.0) {
                    v.push("fixed_delay_s and fixed_mi_bits must be > 0".to_string());
                }
            }
            _ => {}
        }
        if self.effective_sweep().iter().any(|x| !(*x > 0.0)) {
            v.push("sweep values must be > 0".to_string());
        }
        if self.kind == ExperimentKind::Convergence
            && self.effective_sweep().iter().any(|x| x.fract() != 0.0)
        {
            v.push("convergence sweep values are BS counts and must be integers".to_string());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(v.join("; ")))
        }
    }

    fn base_scenario(&self) -> Result<(NetworkScenario, SolverSettings)> {
        let mut solver = self.solver.clone();
        let s = match &self.scenario {
            Some(path) => {
                let (s, pso) = load_scenario(path)?;
                if let Some(p) = pso {
                    solver.pso = p;
                }
                s
            }
            None => generate_scenario(&self.generator, self.seed)?,
        };
        Ok((s, solver))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub code_version: String,
    /// SHA-256 over the serialized spec (output directory excluded) and, when
    /// used, the scenario file bytes.
    pub config_hash: String,
    pub spec: ExperimentSpec,
    pub outputs: Vec<OutputFile>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn config_hash(spec: &ExperimentSpec) -> Result<String> {
    let mut h = Sha256::new();
    let spec = ExperimentSpec { output_dir: PathBuf::new(), ..spec.clone() };
    h.update(serde_json::to_vec(&spec)?);
    if let Some(p) = &spec.scenario {
        h.update(std::fs::read(p).map_err(|e| Error::io(p, e))?);
    }
    Ok(hex::encode(h.finalize()))
}

struct Table {
    name: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Table { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write(&self, dir: &Path) -> Result<OutputFile> {
        let path = dir.join(&self.name);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(&path, &bytes).map_err(|e| Error::io(&path, e))?;
        Ok(OutputFile { file: self.name.clone(), sha256: sha256_hex(&bytes) })
    }
}

fn s<T: Display>(x: T) -> String {
    x.to_string()
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn alloc_cols(a: &SubframeAllocation) -> Vec<String> {
    vec![s(mean(&a.tau_ub)), s(a.tau_b), s(a.tau_us), s(a.theta_us)]
}

fn result_cols(r: &EvaluationResult) -> Vec<String> {
    vec![s(r.total_mi_bits), s(r.total_delay_s), s(r.utility)]
}

/// Runs the experiment, writes its CSV files and `manifest.json` into
/// `spec.output_dir` and returns the manifest.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Manifest> {
    spec.validate()?;
    let tables = match spec.kind {
        ExperimentKind::SingleEval => run_single_eval(spec)?,
        ExperimentKind::Convergence => run_convergence(spec)?,
        ExperimentKind::Pareto => run_pareto(spec)?,
        ExperimentKind::DataAmount => run_fixed_objective(spec, "data_amount.csv", "mean_data_kb")?,
        ExperimentKind::OrbitAltitude => run_fixed_objective(spec, "orbit_altitude.csv", "altitude_km")?,
    };
    let dir = &spec.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let outputs = tables.iter().map(|t| t.write(dir)).collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        experiment: spec.kind.name().to_string(),
        seed: spec.seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash(spec)?,
        spec: spec.clone(),
        outputs,
    };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

fn run_single_eval(spec: &ExperimentSpec) -> Result<Vec<Table>> {
    let (scenario, solver) = spec.base_scenario()?;
    let jobs: Vec<(Strategy, f64)> =
        spec.strategies.iter().flat_map(|&st| spec.etas.iter().map(move |&e| (st, e))).collect();
    let results = jobs
        .par_iter()
        .map(|&(st, eta)| solve(st, &scenario, eta, &solver))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        "single_eval.csv",
        &[
            "strategy", "eta", "total_mi_bits", "total_delay_s", "utility", "tau_ub_mean", "tau_b",
            "tau_us", "theta_us", "cloud_count_tue", "cloud_count_sue",
        ],
    );
    for ((st, eta), (a, r)) in jobs.iter().zip(&results) {
        let mut row = vec![s(st), s(eta)];
        row.extend(result_cols(r));
        row.extend(alloc_cols(a));
        row.extend([s(r.cloud_count_tue), s(r.cloud_count_sue)]);
        t.push(row);
    }
    Ok(vec![t])
}

fn run_convergence(spec: &ExperimentSpec) -> Result<Vec<Table>> {
    let eta = spec.etas[0];
    let (scenarios, solver) = if spec.sweep.is_empty() {
        let (sc, solver) = spec.base_scenario()?;
        (vec![sc], solver)
    } else {
        let scenarios = spec
            .sweep
            .iter()
            .map(|&n| {
                let p = GeneratorParams { num_bs: n as usize, ..spec.generator.clone() };
                generate_scenario(&p, spec.seed)
            })
            .collect::<Result<Vec<_>>>()?;
        (scenarios, spec.solver.clone())
    };
    let outcomes = scenarios
        .par_iter()
        .map(|sc| pso_optimize_with(sc, eta, &solver.pso, PartitionPolicy::Optimal))
        .collect::<Result<Vec<_>>>()?;
    Ok(scenarios
        .iter()
        .zip(outcomes)
        .map(|(sc, o)| {
            let mut t = Table::new(format!("convergence_n{}.csv", sc.num_bs()), &["iteration", "gbest_utility"]);
            for (i, u) in o.trace.gbest_utility.iter().enumerate() {
                t.push(vec![s(i), s(u)]);
            }
            t
        })
        .collect())
}

fn run_pareto(spec: &ExperimentSpec) -> Result<Vec<Table>> {
    let (scenario, solver) = spec.base_scenario()?;
    spec.strategies
        .iter()
        .map(|&st| {
            let rows = spec
                .etas
                .par_iter()
                .map(|&eta| solve(st, &scenario, eta, &solver))
                .collect::<Result<Vec<_>>>()?;
            let mut t = Table::new(
                format!("pareto_{}.csv", st.name()),
                &["eta", "total_mi_bits", "total_delay_s", "utility", "tau_ub_mean", "tau_b", "tau_us", "theta_us"],
            );
            for (&eta, (a, r)) in spec.etas.iter().zip(&rows) {
                let mut row = vec![s(eta)];
                row.extend(result_cols(r));
                row.extend(alloc_cols(a));
                t.push(row);
            }
            Ok(t)
        })
        .collect()
}

/// Solves the fixed-objective problem for one strategy on one scenario.
pub fn fixed_objective(
    strategy: Strategy,
    scenario: &NetworkScenario,
    solver: &SolverSettings,
    objective: FixedObjective,
    target: f64,
) -> Result<FixedObjectiveOutcome> {
    bisect_eta(
        |eta| solve(strategy, scenario, eta, solver),
        objective,
        target,
        BISECTION_REL_TOL,
        BISECTION_MAX_ITERATIONS,
    )
}

/// Scenario for one sweep point of the data-amount or orbit study.
pub fn sweep_scenario(spec: &ExperimentSpec, x: f64) -> Result<NetworkScenario> {
    let p = match spec.kind {
        ExperimentKind::DataAmount => spec.generator.clone().with_mean_data_bits(x * 1e3),
        ExperimentKind::OrbitAltitude => GeneratorParams { orbit_altitude_m: x * 1e3, ..spec.generator.clone() },
        other => return Err(Error::invalid(format!("{} has no scenario sweep", other.name()))),
    };
    generate_scenario(&p, spec.seed)
}

fn run_fixed_objective(spec: &ExperimentSpec, file: &str, x_name: &'static str) -> Result<Vec<Table>> {
    let sweep = spec.effective_sweep();
    let scenarios = sweep.iter().map(|&x| sweep_scenario(spec, x)).collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for &st in &spec.strategies {
        for (i, &x) in sweep.iter().enumerate() {
            for (obj, target) in [(FixedObjective::Delay, spec.fixed_delay_s), (FixedObjective::Mi, spec.fixed_mi_bits)] {
                jobs.push((st, i, x, obj, target));
            }
        }
    }
    let outcomes = jobs
        .par_iter()
        .map(|&(st, i, _, obj, target)| fixed_objective(st, &scenarios[i], &spec.solver, obj, target))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        file,
        &[
            "strategy", x_name, "objective", "target", "eta", "total_mi_bits", "total_delay_s", "reachable",
            "iterations", "tau_ub_mean", "theta_ub_mean", "tau_b", "tau_us", "theta_us",
        ],
    );
    for ((st, _, x, obj, target), o) in jobs.iter().zip(&outcomes) {
        let objective = match obj {
            FixedObjective::Delay => "fixed-delay",
            FixedObjective::Mi => "fixed-mi",
        };
        let a = &o.allocation;
        t.push(vec![
            s(st),
            s(x),
            s(objective),
            s(target),
            s(o.eta),
            s(o.result.total_mi_bits),
            s(o.result.total_delay_s),
            s(o.reachable),
            s(o.iterations),
            s(mean(&a.tau_ub)),
            s(mean(&a.theta_ub)),
            s(a.tau_b),
            s(a.tau_us),
            s(a.theta_us),
        ]);
    }
    Ok(vec![t])
}
