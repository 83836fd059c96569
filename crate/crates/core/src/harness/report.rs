use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::run::MetricsRow;
use crate::numeric::mean_std;
use crate::simulate::ScenarioName;

/// Metrics summarized per `(scenario, M, n)` cell.
pub const SUMMARY_METRICS: [&str; 7] = [
    "d_hamming",
    "d_l2",
    "err_bayes",
    "err_oes",
    "err_pi",
    "err_ermlr",
    "events_total",
];

const TIME_METRICS: [&str; 2] = ["wall_time_lasso", "wall_time_erm"];

fn metric(row: &MetricsRow, name: &str) -> Option<f64> {
    match name {
        "d_hamming" => row.d_hamming,
        "d_l2" => row.d_l2,
        "err_bayes" => row.err_bayes,
        "err_oes" => row.err_oes,
        "err_pi" => row.err_pi,
        "err_ermlr" => row.err_ermlr,
        "events_total" => row.events_total.map(|e| e as f64),
        "risk_init" => row.risk_init,
        "risk_final" => row.risk_final,
        "wall_time_lasso" => row.wall_time_lasso,
        "wall_time_erm" => row.wall_time_erm,
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub scenario: ScenarioName,
    pub dim: usize,
    pub n: usize,
    pub ok: usize,
    pub failed: usize,
    /// `(metric, mean, sample std)` over successful repetitions.
    pub stats: Vec<(String, f64, f64)>,
}

impl CellSummary {
    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.stats
            .iter()
            .find(|(m, _, _)| m == name)
            .map(|&(_, mean, std)| (mean, std))
    }
}

/// Groups rows by cell in order of first appearance.
pub fn summarize(rows: &[MetricsRow]) -> Vec<CellSummary> {
    let mut keys: Vec<(ScenarioName, usize, usize)> = Vec::new();
    for r in rows {
        let key = (r.scenario, r.dim, r.n);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(scenario, dim, n)| {
            let cell: Vec<&MetricsRow> = rows
                .iter()
                .filter(|r| r.scenario == scenario && r.dim == dim && r.n == n)
                .collect();
            let ok: Vec<&MetricsRow> = cell.iter().copied().filter(|r| r.is_ok()).collect();
            let stats = SUMMARY_METRICS
                .iter()
                .chain(TIME_METRICS.iter())
                .map(|&name| {
                    let values: Vec<f64> = ok.iter().filter_map(|r| metric(r, name)).collect();
                    let (mean, std) = mean_std(&values);
                    (name.to_string(), mean, std)
                })
                .collect();
            CellSummary {
                scenario,
                dim,
                n,
                ok: ok.len(),
                failed: cell.len() - ok.len(),
                stats,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct Series {
    scenario: ScenarioName,
    #[serde(rename = "M")]
    dim: usize,
    metric: String,
    mean: Vec<f64>,
    std: Vec<f64>,
}

#[derive(Serialize)]
struct PlotData {
    n: Vec<usize>,
    std_divisor: &'static str,
    series: Vec<Series>,
}

fn plot_data(cells: &[CellSummary]) -> PlotData {
    let mut ns: Vec<usize> = cells.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut groups: Vec<(ScenarioName, usize)> = Vec::new();
    for c in cells {
        if !groups.contains(&(c.scenario, c.dim)) {
            groups.push((c.scenario, c.dim));
        }
    }
    let names = ["err_bayes", "err_oes", "err_pi", "err_ermlr", "wall_time_lasso", "wall_time_erm"];
    let mut series = Vec::new();
    for &(scenario, dim) in &groups {
        for name in names {
            let (mean, std) = ns
                .iter()
                .map(|&n| {
                    cells
                        .iter()
                        .find(|c| c.scenario == scenario && c.dim == dim && c.n == n)
                        .and_then(|c| c.get(name))
                        .unwrap_or((f64::NAN, f64::NAN))
                })
                .unzip();
            series.push(Series {
                scenario,
                dim,
                metric: name.to_string(),
                mean,
                std,
            });
        }
    }
    PlotData {
        n: ns,
        std_divisor: "n-1",
        series,
    }
}

fn fmt_cell(mean: f64, std: f64, digits: usize) -> String {
    if mean.is_nan() {
        "-".to_string()
    } else {
        format!("{mean:.digits$} ({std:.digits$})")
    }
}

fn tables(cells: &[CellSummary]) -> String {
    let mut out = String::from(
        "Mean (standard deviation, n-1 divisor) over successful repetitions.\n\n",
    );
    out.push_str("| scenario | M | n | reps | failed | d_H | d_l2 | Bayes | OES | PI | ERMLR | events | lasso s | erm s |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n");
    for c in cells {
        let g = |name: &str| c.get(name).unwrap_or((f64::NAN, f64::NAN));
        let cols: Vec<String> = vec![
            fmt_cell(g("d_hamming").0, g("d_hamming").1, 2),
            fmt_cell(g("d_l2").0, g("d_l2").1, 2),
            fmt_cell(g("err_bayes").0, g("err_bayes").1, 3),
            fmt_cell(g("err_oes").0, g("err_oes").1, 3),
            fmt_cell(g("err_pi").0, g("err_pi").1, 3),
            fmt_cell(g("err_ermlr").0, g("err_ermlr").1, 3),
            fmt_cell(g("events_total").0 / c.n as f64, g("events_total").1 / c.n as f64, 1),
            fmt_cell(g("wall_time_lasso").0, g("wall_time_lasso").1, 2),
            fmt_cell(g("wall_time_erm").0, g("wall_time_erm").1, 2),
        ];
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            c.scenario.label(),
            c.dim,
            c.n,
            c.ok,
            c.failed,
            cols.join(" | ")
        ));
    }
    out
}

/// Writes `metrics.csv`, `timings.csv`, `summary.csv`, `plotdata.json` and
/// `tables.md` into `dir`.
///
/// `metrics.csv` holds only seed-determined values; wall times go to
/// `timings.csv`.
pub fn emit_report(rows: &[MetricsRow], dir: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    fs::create_dir_all(dir)?;

    let mut w = csv::Writer::from_path(dir.join("metrics.csv"))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("timings.csv"))?;
    w.write_record(["scenario", "M", "n", "repetition", "wall_time_lasso", "wall_time_erm"])?;
    for r in rows {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            r.scenario.label().to_string(),
            r.dim.to_string(),
            r.n.to_string(),
            r.repetition.to_string(),
            opt(r.wall_time_lasso),
            opt(r.wall_time_erm),
        ])?;
    }
    w.flush()?;

    let cells = summarize(rows);
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    let mut header = vec!["scenario".to_string(), "M".into(), "n".into(), "reps_ok".into(), "reps_failed".into()];
    for (name, _, _) in &cells[0].stats {
        header.push(format!("mean_{name}"));
        header.push(format!("std_{name}"));
    }
    w.write_record(&header)?;
    for c in &cells {
        let mut record = vec![
            c.scenario.label().to_string(),
            c.dim.to_string(),
            c.n.to_string(),
            c.ok.to_string(),
            c.failed.to_string(),
        ];
        for &(_, mean, std) in &c.stats {
            record.push(mean.to_string());
            record.push(std.to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()?;

    fs::write(dir.join("plotdata.json"), serde_json::to_string_pretty(&plot_data(&cells))?)?;
    fs::write(dir.join("tables.md"), tables(&cells))?;
    Ok(())
}
