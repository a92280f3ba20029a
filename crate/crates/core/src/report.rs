//! Serialization of run reports: JSON or CSV, plus a plain-text summary table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::suite::RunReport;
use crate::Error;

pub fn to_json(report: &RunReport) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// One row per (claim, point).
pub fn to_csv(report: &RunReport) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "suite", "claim", "asserted", "pass", "tolerance", "point", "z", "margin",
    ])?;
    for e in &report.per_suite {
        for (k, p) in e.points.iter().enumerate() {
            let z = p
                .z
                .iter()
                .map(|c| format!("{:?}{:+?}i", c.re, c.im))
                .collect::<Vec<_>>()
                .join(" ");
            w.write_record([
                e.suite.name().to_string(),
                e.claim.clone(),
                e.asserted.to_string(),
                e.pass.to_string(),
                format!("{:?}", e.tolerance),
                k.to_string(),
                z,
                format!("{:?}", p.margin),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render(report: &RunReport, format: Format) -> Result<String, Error> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}

/// Human-readable table of every claim.
pub fn summary_text(report: &RunReport) -> String {
    let s = &report.summary;
    let mut out = String::new();
    let _ = writeln!(out, "entry: {} ({})", s.entry, s.description);
    let _ = writeln!(
        out,
        "n = {}, complete = {}, points accepted = {}, rejected = {}, seed = {}",
        s.n, s.complete, s.accepted_points, s.rejected_points, report.config_echo.seed
    );
    let _ = writeln!(out, "alpha = {:.6}, siegel sign = {}", s.alpha, s.siegel_sign);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<22} {:<34} {:>6} {:>14} {:>10}  status",
        "suite", "claim", "points", "min margin", "tolerance"
    );
    for e in &report.per_suite {
        let status = match (e.asserted, e.pass) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, true) => "info (ok)",
            (false, false) => "info (violated)",
        };
        let _ = writeln!(
            out,
            "{:<22} {:<34} {:>6} {:>14.6e} {:>10.1e}  {}",
            e.suite.name(),
            e.claim,
            e.points.len(),
            e.min_margin,
            e.tolerance,
            status
        );
    }
    if !s.statistics.is_empty() {
        let _ = writeln!(out);
        for (k, v) in &s.statistics {
            let _ = writeln!(out, "{k} = {v:.6e}");
        }
    }
    let _ = writeln!(out);
    if s.all_pass {
        let _ = writeln!(out, "result: all {} asserted checks pass", s.asserted_checks);
    } else {
        let _ = writeln!(out, "result: FAILED {}", s.failed_checks.join(", "));
    }
    out
}

/// Writes `report.json` or `report.csv` and `summary.txt` into `dir`.
pub fn write_reports(report: &RunReport, dir: &Path, format: Format) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(dir)?;
    let name = match format {
        Format::Json => "report.json",
        Format::Csv => "report.csv",
    };
    let report_path = dir.join(name);
    std::fs::write(&report_path, render(report, format)?)?;
    let summary_path = dir.join("summary.txt");
    std::fs::write(&summary_path, summary_text(report))?;
    Ok(vec![report_path, summary_path])
}
