use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use iscc::experiment::{export_plot_data, run_experiment, ExperimentKind, ExperimentSpec, Manifest, Strategy};
use iscc::generator::{generate_scenario, GeneratorParams};
use iscc::io::save_scenario;
use iscc::optimizer::PsoConfig;

const WORKERS_ENV: &str = "ISCC_WORKERS";

#[derive(Parser)]
#[command(name = "iscc", version, about = "Time-division ISCC simulation for satellite-terrestrial networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario file from the default parameters plus overrides.
    Generate(GenerateArgs),
    /// Run an experiment and write result CSVs plus a manifest.
    Run(RunArgs),
    /// Turn a result directory into plot_data.csv and summary.json.
    Export {
        /// Directory holding result CSVs.
        dir: PathBuf,
    },
}

#[derive(Args)]
struct GeneratorArgs {
    /// Start from the small exhaustive-comparison preset (N=5, K^S=10).
    #[arg(long)]
    small: bool,
    /// Generator override, e.g. `--set num_sues=10`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Append a `[pso]` section with the default optimizer settings.
    #[arg(long)]
    with_pso: bool,
    /// Output scenario file (TOML).
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec file (TOML or JSON).
    #[arg(long, conflicts_with = "from_manifest")]
    spec: Option<PathBuf>,
    /// Re-run the spec recorded in a manifest.json.
    #[arg(long)]
    from_manifest: Option<PathBuf>,
    #[arg(long)]
    kind: Option<ExperimentKind>,
    /// Scenario file; otherwise one is generated.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Comma-separated trade-off weights.
    #[arg(long, value_delimiter = ',')]
    eta: Vec<f64>,
    /// Comma-separated strategies: jsatps, greedy-otps, greedy-equal, exhaustive.
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<Strategy>,
    /// Comma-separated sweep values (BS counts, mean Kb or altitude km).
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
    #[command(flatten)]
    generator: GeneratorArgs,
}

fn generator_params(args: &GeneratorArgs, base: GeneratorParams) -> Result<GeneratorParams> {
    let base = if args.small { GeneratorParams::small() } else { base };
    if args.overrides.is_empty() {
        return Ok(base);
    }
    let mut table = toml::Table::try_from(&base)?;
    for o in &args.overrides {
        let (key, value) = o.split_once('=').with_context(|| format!("override `{o}` is not KEY=VALUE"))?;
        let key = key.trim();
        if !table.contains_key(key) {
            bail!("unknown generator parameter `{key}`");
        }
        let value: toml::Value = format!("v = {}", value.trim())
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .with_context(|| format!("cannot parse value in `{o}`"))?;
        // integers are accepted for float fields
        let value = match (&table[key], value) {
            (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
            (_, v) => v,
        };
        table.insert(key.to_string(), value);
    }
    let p: GeneratorParams = table.try_into()?;
    p.validate()?;
    Ok(p)
}

fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text)?
    } else {
        toml::from_str(&text)?
    };
    Ok(spec)
}

fn build_spec(args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = match (&args.spec, &args.from_manifest) {
        (Some(p), _) => load_spec(p)?,
        (None, Some(p)) => Manifest::load(p)?.spec,
        (None, None) => ExperimentSpec::default(),
    };
    if let Some(k) = args.kind {
        spec.kind = k;
        if k == ExperimentKind::Pareto && args.spec.is_none() && args.eta.is_empty() {
            spec.etas = ExperimentSpec::pareto_etas();
        }
    }
    if args.scenario.is_some() {
        spec.scenario = args.scenario.clone();
    }
    if !args.eta.is_empty() {
        spec.etas = args.eta.clone();
    }
    if !args.strategy.is_empty() {
        spec.strategies = args.strategy.clone();
    }
    if !args.sweep.is_empty() {
        spec.sweep = args.sweep.clone();
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(d) = &args.output_dir {
        spec.output_dir = d.clone();
    }
    spec.generator = generator_params(&args.generator, spec.generator.clone())?;
    Ok(spec)
}

fn init_workers() -> Result<()> {
    let Ok(v) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().with_context(|| format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))?;
    if n == 0 {
        bail!("{WORKERS_ENV} must be a positive integer");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn main() -> std::process::ExitCode {
    match run(Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let c = cause.to_string();
                if !msg.contains(&c) {
                    msg = format!("{msg}: {c}");
                }
            }
            eprintln!("error: {msg}");
            std::process::ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    init_workers()?;
    match cli.command {
        Command::Generate(args) => {
            let p = generator_params(&args.generator, GeneratorParams::default())?;
            let s = generate_scenario(&p, args.seed)?;
            let pso = args.with_pso.then(PsoConfig::default);
            save_scenario(&args.output, &s, pso.as_ref())?;
            println!(
                "wrote {} ({} BSs, {} TUEs, {} SUEs)",
                args.output.display(),
                s.num_bs(),
                s.num_tues(),
                s.num_sues()
            );
        }
        Command::Run(args) => {
            let spec = build_spec(&args)?;
            let m = run_experiment(&spec)?;
            for o in &m.outputs {
                println!("{}", spec.output_dir.join(&o.file).display());
            }
            println!("manifest {} (config {})", spec.output_dir.join(iscc::experiment::MANIFEST_FILE).display(), m.config_hash);
        }
        Command::Export { dir } => {
            let summary = export_plot_data(&dir)?;
            println!("{} rows from {} experiment(s)", summary.rows, summary.experiments.len());
        }
    }
    Ok(())
}
