use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PLOT_DATA_FILE: &str = "plot_data.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// One tidy observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub experiment: String,
    pub strategy: String,
    pub x: f64,
    pub series: String,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub rows: usize,
    pub strategies: Vec<String>,
    pub series: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExportSummary {
    pub rows: usize,
    pub experiments: BTreeMap<String, ExperimentSummary>,
}

type Record = BTreeMap<String, String>;

fn read_records(path: &Path) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(header.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        })
        .collect()
}

fn num(rec: &Record, key: &str) -> Result<f64> {
    rec.get(key)
        .ok_or_else(|| Error::Parse(format!("missing column `{key}`")))?
        .parse()
        .map_err(|e| Error::Parse(format!("column `{key}`: {e}")))
}

fn text<'a>(rec: &'a Record, key: &str) -> Result<&'a str> {
    rec.get(key).map(String::as_str).ok_or_else(|| Error::Parse(format!("missing column `{key}`")))
}

const RESULT_SERIES: [&str; 3] = ["total_mi_bits", "total_delay_s", "utility"];
const ALLOC_SERIES: [&str; 5] = ["tau_ub_mean", "theta_ub_mean", "tau_b", "tau_us", "theta_us"];

fn rows_for_file(name: &str, records: &[Record]) -> Result<Vec<PlotRow>> {
    let mut out = Vec::new();
    let mut push = |experiment: &str, strategy: &str, x: f64, series: &str, value: f64| {
        out.push(PlotRow {
            experiment: experiment.into(),
            strategy: strategy.into(),
            x,
            series: series.into(),
            value,
        })
    };
    if name == "single_eval.csv" {
        for r in records {
            for series in RESULT_SERIES {
                push("single-eval", text(r, "strategy")?, num(r, "eta")?, series, num(r, series)?);
            }
        }
    } else if let Some(strategy) = name.strip_prefix("pareto_").and_then(|n| n.strip_suffix(".csv")) {
        for r in records {
            for series in RESULT_SERIES {
                push("pareto", strategy, num(r, "eta")?, series, num(r, series)?);
            }
        }
    } else if let Some(scale) = name.strip_prefix("convergence_").and_then(|n| n.strip_suffix(".csv")) {
        let series = format!("gbest_utility_{scale}");
        for r in records {
            push("convergence", "jsatps", num(r, "iteration")?, &series, num(r, "gbest_utility")?);
        }
    } else if name == "data_amount.csv" || name == "orbit_altitude.csv" {
        let (experiment, x_col) = if name == "data_amount.csv" {
            ("data-amount", "mean_data_kb")
        } else {
            ("orbit-altitude", "altitude_km")
        };
        // Only points that met their target are on the frontier.
        for r in records.iter().filter(|r| r.get("reachable").map(String::as_str) == Some("true")) {
            let st = text(r, "strategy")?;
            let x = num(r, x_col)?;
            match text(r, "objective")? {
                "fixed-delay" => {
                    push(experiment, st, x, "mi_at_fixed_delay", num(r, "total_mi_bits")?);
                    if experiment == "orbit-altitude" {
                        for series in ALLOC_SERIES {
                            push(experiment, st, x, series, num(r, series)?);
                        }
                    }
                }
                "fixed-mi" => push(experiment, st, x, "delay_at_fixed_mi", num(r, "total_delay_s")?),
                other => return Err(Error::Parse(format!("unknown objective `{other}`"))),
            }
        }
    }
    Ok(out)
}

fn is_result_file(name: &str) -> bool {
    name == "single_eval.csv"
        || name == "data_amount.csv"
        || name == "orbit_altitude.csv"
        || (name.ends_with(".csv") && (name.starts_with("pareto_") || name.starts_with("convergence_")))
}

/// Converts every result CSV in `dir` into `plot_data.csv` (columns
/// `experiment,strategy,x,series,value`) plus `summary.json`.
pub fn export_plot_data(dir: &Path) -> Result<ExportSummary> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| is_result_file(n))
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(Error::EmptyResults(dir.to_path_buf()));
    }
    let mut rows = Vec::new();
    for n in &names {
        rows.extend(rows_for_file(n, &read_records(&dir.join(n))?)?);
    }

    let path = dir.join(PLOT_DATA_FILE);
    let mut w = csv::Writer::from_path(&path)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let mut summary = ExportSummary { rows: rows.len(), ..Default::default() };
    for r in &rows {
        let e = summary.experiments.entry(r.experiment.clone()).or_default();
        e.rows += 1;
        if !e.strategies.contains(&r.strategy) {
            e.strategies.push(r.strategy.clone());
        }
        if !e.series.contains(&r.series) {
            e.series.push(r.series.clone());
        }
    }
    let spath = dir.join(SUMMARY_FILE);
    std::fs::write(&spath, serde_json::to_string_pretty(&summary)?).map_err(|e| Error::io(&spath, e))?;
    Ok(summary)
}

/// Reads a `plot_data.csv` back.
pub fn read_plot_data(path: &Path) -> Result<Vec<PlotRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|x| x.map_err(Error::from)).collect()
}
