use std::path::Path;

use iscc::experiment::{
    export_plot_data, fixed_objective, read_plot_data, run_experiment, solve, ExperimentKind, ExperimentSpec,
    FixedObjective, SolverSettings, Strategy, BISECTION_MAX_ITERATIONS, MANIFEST_FILE, PLOT_DATA_FILE,
};
use iscc::generator::{generate_scenario, GeneratorParams};
use iscc::optimizer::PsoConfig;
use iscc::Error;

fn quick_solver() -> SolverSettings {
    SolverSettings {
        pso: PsoConfig { population: 12, max_iterations: 25, ..PsoConfig::default() },
        ..SolverSettings::default()
    }
}

fn tiny_generator() -> GeneratorParams {
    GeneratorParams { num_bs: 3, tues_per_bs: 2, num_sues: 4, ..GeneratorParams::default() }
}

fn spec(kind: ExperimentKind, dir: &Path) -> ExperimentSpec {
    ExperimentSpec {
        kind,
        generator: tiny_generator(),
        solver: quick_solver(),
        output_dir: dir.to_path_buf(),
        ..ExperimentSpec::default()
    }
}

fn csv_rows(path: &Path) -> usize {
    csv::Reader::from_path(path).unwrap().records().count()
}

#[test]
fn pareto_export_has_one_row_per_eta_strategy_and_series() {
    let d = tempfile::tempdir().unwrap();
    let etas = vec![0.0, 0.3, 0.6, 1.0];
    let strategies = vec![Strategy::Jsatps, Strategy::GreedyOtps, Strategy::GreedyEqual];
    let s = ExperimentSpec { etas: etas.clone(), strategies: strategies.clone(), ..spec(ExperimentKind::Pareto, d.path()) };
    let m = run_experiment(&s).unwrap();
    assert_eq!(m.outputs.len(), strategies.len());
    for o in &m.outputs {
        assert_eq!(csv_rows(&d.path().join(&o.file)), etas.len());
    }
    assert!(d.path().join(MANIFEST_FILE).exists());

    let summary = export_plot_data(d.path()).unwrap();
    assert_eq!(summary.rows, etas.len() * strategies.len() * 3);
    let rows = read_plot_data(&d.path().join(PLOT_DATA_FILE)).unwrap();
    assert_eq!(rows.len(), summary.rows);
    assert_eq!(summary.experiments["pareto"].strategies.len(), strategies.len());
}

#[test]
fn convergence_writes_one_trace_per_network_scale() {
    let d = tempfile::tempdir().unwrap();
    let s = ExperimentSpec { sweep: vec![2.0, 4.0], ..spec(ExperimentKind::Convergence, d.path()) };
    let m = run_experiment(&s).unwrap();
    let files: Vec<_> = m.outputs.iter().map(|o| o.file.as_str()).collect();
    assert_eq!(files, ["convergence_n2.csv", "convergence_n4.csv"]);
    for f in files {
        assert_eq!(csv_rows(&d.path().join(f)), 26);
    }
    let summary = export_plot_data(d.path()).unwrap();
    assert_eq!(summary.rows, 52);
}

#[test]
fn orbit_sweep_reports_every_point_and_exports_reachable_ones() {
    let d = tempfile::tempdir().unwrap();
    let s = ExperimentSpec {
        sweep: vec![1000.0, 36000.0],
        fixed_delay_s: 1.0,
        fixed_mi_bits: 1e7,
        strategies: vec![Strategy::GreedyOtps],
        ..spec(ExperimentKind::OrbitAltitude, d.path())
    };
    run_experiment(&s).unwrap();
    let path = d.path().join("orbit_altitude.csv");
    let mut r = csv::Reader::from_path(&path).unwrap();
    let header = r.headers().unwrap().clone();
    for col in ["altitude_km", "objective", "reachable", "iterations", "tau_b", "tau_us", "theta_us"] {
        assert!(header.iter().any(|h| h == col), "missing {col}");
    }
    let reach = header.iter().position(|h| h == "reachable").unwrap();
    let iters = header.iter().position(|h| h == "iterations").unwrap();
    let recs: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    // two altitudes x two pinned objectives
    assert_eq!(recs.len(), 4);
    let reachable = recs.iter().filter(|x| &x[reach] == "true").count();
    for x in &recs {
        assert!(x[iters].parse::<usize>().unwrap() <= BISECTION_MAX_ITERATIONS + 2);
    }
    let summary = export_plot_data(d.path()).unwrap();
    let e = &summary.experiments.get("orbit-altitude");
    let fixed_delay_reached = recs.iter().filter(|x| &x[reach] == "true" && &x[2] == "fixed-delay").count();
    assert_eq!(e.map_or(0, |e| e.rows), reachable + 5 * fixed_delay_reached);
}

#[test]
fn data_amount_sweep_has_one_row_per_point_strategy_and_objective() {
    let d = tempfile::tempdir().unwrap();
    let s = ExperimentSpec {
        sweep: vec![200.0, 400.0, 600.0],
        strategies: vec![Strategy::GreedyOtps, Strategy::GreedyEqual],
        ..spec(ExperimentKind::DataAmount, d.path())
    };
    run_experiment(&s).unwrap();
    assert_eq!(csv_rows(&d.path().join("data_amount.csv")), 3 * 2 * 2);
}

#[test]
fn unreachable_targets_are_flagged() {
    let s = generate_scenario(&tiny_generator(), 1).unwrap();
    let o = fixed_objective(Strategy::GreedyOtps, &s, &quick_solver(), FixedObjective::Delay, 1e-6).unwrap();
    assert!(!o.reachable);
    assert_eq!(o.iterations, 2);
    let o = fixed_objective(Strategy::GreedyOtps, &s, &quick_solver(), FixedObjective::Mi, 1e30).unwrap();
    assert!(!o.reachable);
}

#[test]
fn exhaustive_on_the_default_network_exceeds_the_budget() {
    let s = generate_scenario(&GeneratorParams::default(), 1).unwrap();
    let err = solve(Strategy::Exhaustive, &s, 0.5, &SolverSettings::default()).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { .. }));
}

#[test]
fn greedy_equal_sends_every_user_to_the_cloud() {
    let s = generate_scenario(&tiny_generator(), 2).unwrap();
    let (_, r) = solve(Strategy::GreedyEqual, &s, 0.5, &quick_solver()).unwrap();
    assert_eq!(r.cloud_count_tue, s.num_tues());
    assert_eq!(r.cloud_count_sue, s.num_sues());
    for p in &r.tue_partitions {
        assert!((p.alpha - 1.0 / 3.0).abs() < 1e-12 && (p.kappa - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn invalid_specs_are_rejected_before_running() {
    let d = tempfile::tempdir().unwrap();
    let bad = [
        ExperimentSpec { etas: vec![0.5], ..spec(ExperimentKind::Pareto, d.path()) },
        ExperimentSpec { etas: vec![0.9, 0.1], ..spec(ExperimentKind::Pareto, d.path()) },
        ExperimentSpec { etas: vec![1.5], ..spec(ExperimentKind::SingleEval, d.path()) },
        ExperimentSpec { strategies: vec![], ..spec(ExperimentKind::SingleEval, d.path()) },
        ExperimentSpec { sweep: vec![2.5], ..spec(ExperimentKind::Convergence, d.path()) },
        ExperimentSpec { sweep: vec![-1.0], ..spec(ExperimentKind::OrbitAltitude, d.path()) },
    ];
    for s in bad {
        assert!(matches!(run_experiment(&s), Err(Error::InvalidInput(_))), "{s:?}");
    }
    assert!(std::fs::read_dir(d.path()).unwrap().next().is_none());
}
