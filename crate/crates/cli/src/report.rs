//! JSON, CSV and plain-text renderings of experiment and sweep results.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::experiment::{ExperimentResult, HarnessError, MethodSummary, Stat, SweepResult, Timings};

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const SUMMARY_TXT: &str = "summary.txt";
pub const TIMINGS_FILE: &str = "timings.json";

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn experiment_from_json(text: &str) -> Result<ExperimentResult, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::Data(format!("experiment report: {e}")))
}

pub fn sweep_from_json(text: &str) -> Result<SweepResult, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::Data(format!("sweep report: {e}")))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn push_stats(w: &mut csv::Writer<Vec<u8>>, lead: &str, summary: &MethodSummary) {
    for (metric, s) in summary.stats() {
        w.write_record([
            lead,
            metric,
            &opt(s.mean),
            &opt(s.std),
            &s.n_folds.to_string(),
            &s.excluded_folds.to_string(),
        ])
        .expect("in-memory write");
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// One row per method and metric; undefined statistics are empty cells.
pub fn experiment_csv(result: &ExperimentResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "metric", "mean", "std", "n_folds", "excluded_folds"]).expect("in-memory write");
    for m in &result.methods {
        push_stats(&mut w, m.method.name(), &m.summary);
    }
    finish(w)
}

/// One row per point and metric; the baseline is listed with an empty α.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "metric", "mean", "std", "n_folds", "excluded_folds"]).expect("in-memory write");
    push_stats(&mut w, "", &result.baseline.summary);
    for p in &result.points {
        push_stats(&mut w, &p.alpha.to_string(), &p.fairttts.summary);
    }
    finish(w)
}

fn cell(s: &Stat) -> String {
    match (s.mean, s.std) {
        (Some(m), Some(sd)) => format!("{m:.4} ± {sd:.4}"),
        (Some(m), None) => format!("{m:.4}"),
        _ => "n/a".into(),
    }
}

fn table(title: &str, lead: &str, rows: &[(String, &MethodSummary)]) -> String {
    let mut grid = vec![std::iter::once(lead.to_string()).chain(MethodSummary::METRICS.map(String::from)).collect::<Vec<_>>()];
    for (label, summary) in rows {
        grid.push(std::iter::once(label.clone()).chain(summary.stats().iter().map(|(_, s)| cell(s))).collect());
    }
    let widths: Vec<usize> =
        (0..grid[0].len()).map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = format!("{title}\n");
    for (i, row) in grid.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(v, &w)| format!("{v}{}", " ".repeat(w - v.chars().count())))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&rule.join("  "));
            out.push('\n');
        }
    }
    out
}

/// Fixed-width table of `mean ± std` per method and metric.
pub fn experiment_table(result: &ExperimentResult) -> String {
    let rows: Vec<(String, &MethodSummary)> =
        result.methods.iter().map(|m| (m.method.name().to_string(), &m.summary)).collect();
    let title = format!(
        "{} ({} rows, protected {:?}, {} folds)",
        result.dataset.name, result.dataset.n_rows, result.dataset.protected_column, result.settings.k_folds
    );
    table(&title, "method", &rows)
}

pub fn sweep_table(result: &SweepResult) -> String {
    let mut rows = vec![("baseline".to_string(), &result.baseline.summary)];
    rows.extend(result.points.iter().map(|p| (format!("alpha={}", p.alpha), &p.fairttts.summary)));
    let title = format!("{} alpha sweep ({} folds)", result.dataset.name, result.settings.k_folds);
    table(&title, "model", &rows)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, HarnessError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| HarnessError::Data(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::Data(format!("cannot create {}: {e}", dir.display())))
}

/// Write `report.json`, `summary.csv`, `summary.txt` and `timings.json`.
pub fn write_experiment(dir: &Path, result: &ExperimentResult, timings: &Timings) -> Result<Vec<PathBuf>, HarnessError> {
    ensure_dir(dir)?;
    Ok(vec![
        write(dir, REPORT_FILE, &to_json(result))?,
        write(dir, SUMMARY_CSV, &experiment_csv(result))?,
        write(dir, SUMMARY_TXT, &experiment_table(result))?,
        write(dir, TIMINGS_FILE, &to_json(timings))?,
    ])
}

pub fn write_sweep(dir: &Path, result: &SweepResult, timings: &Timings) -> Result<Vec<PathBuf>, HarnessError> {
    ensure_dir(dir)?;
    Ok(vec![
        write(dir, REPORT_FILE, &to_json(result))?,
        write(dir, SUMMARY_CSV, &sweep_csv(result))?,
        write(dir, SUMMARY_TXT, &sweep_table(result))?,
        write(dir, TIMINGS_FILE, &to_json(timings))?,
    ])
}
