use std::fmt::Write as _;

use serde::Serialize;
use statmode_core::replicate::Report;
use statmode_core::{CournotResult, Error, Param, Result, TestResult};

use crate::args::Format;

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Data(format!("json encoding: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Two-column `key  value` block.
pub fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

/// 3 significant digits, the precision historical sources print.
pub fn p3(p: f64) -> String {
    format!("{p:.2e}")
}

pub fn test_rows(r: &TestResult) -> Vec<(&'static str, String)> {
    vec![
        ("method", r.method.label().to_string()),
        ("statistic", r.statistic.to_string()),
        ("p_value", p3(r.p_value)),
        ("log_p", r.log_p.ln().to_string()),
        ("tail", r.tail.to_string()),
    ]
}

fn param_text(p: &Param) -> String {
    match p {
        Param::Count(v) => v.to_string(),
        Param::Int(v) => v.to_string(),
        Param::Real(v) => v.to_string(),
        Param::Reals(v) => v.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
        Param::Text(v) => v.clone(),
    }
}

pub fn test_result(r: &TestResult, format: Format) -> Result<String> {
    match format {
        Format::Json => json(r),
        Format::Human => {
            let mut rows = test_rows(r);
            let params: Vec<String> = r
                .params
                .iter()
                .map(|(k, v)| format!("{k}={}", param_text(v)))
                .collect();
            rows.push(("params", params.join(" ")));
            Ok(table(&rows))
        }
    }
}

pub fn cournot(r: &CournotResult, format: Format) -> Result<String> {
    match format {
        Format::Json => json(r),
        Format::Human => Ok(table(&[
            ("deviation", r.deviation.to_string()),
            ("P", format!("{:.4}", r.p)),
            ("Pi", format!("{:.4}", r.pi)),
            ("normalization", r.normalization.to_string()),
        ])),
    }
}

pub fn replicate(report: &Report, format: Format) -> Result<String> {
    if format == Format::Json {
        return json(report);
    }
    let mut out = String::new();
    let lw = report.checks.iter().map(|c| c.label.chars().count()).max().unwrap_or(0);
    let pw = report.checks.iter().map(|c| c.published.chars().count()).max().unwrap_or(0);
    let _ = writeln!(out, "{:<4}  {:<lw$}  {:<pw$}  computed", "", "check", "published");
    for c in &report.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{verdict:<4}  {:<lw$}  {:<pw$}  {}", c.label, c.published, c.computed);
        if let Some(note) = &c.note {
            let _ = writeln!(out, "{:<4}  {:<lw$}  {note}", "", "");
        }
    }
    let _ = writeln!(out, "\nP(X = 0; N = 85, K = 17, n)");
    for row in &report.maritime_scan {
        let mark = if row.matches { "  <- rounds to 0.0043" } else { "" };
        let _ = writeln!(out, "  n = {:>2}  {:.6}{mark}", row.draws, row.probability);
    }
    let passed = report.checks.iter().filter(|c| c.pass).count();
    let _ = writeln!(out, "\n{passed}/{} checks passed", report.checks.len());
    Ok(out)
}
