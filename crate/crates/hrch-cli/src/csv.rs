//! CSV emission: full-precision scientific notation (shortest round-trip
//! formatting, so parsing the file back reproduces the stored doubles
//! bit-exactly), LF line endings, UTF-8.

use std::fmt::Write as _;

use hrch_core::diagnostics::{DiagnosticsRecord, VchRecord};
use hrch_core::experiments::SweepResult;
use hrch_core::galerkin::Trajectory;
use hrch_core::vch::VchTrajectory;

fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v:e}");
    }
    out.push('\n');
}

/// Trajectory CSV: one header row naming every diagnostics field, one row
/// per time step.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    out.push_str(&DiagnosticsRecord::CSV_COLUMNS.join(","));
    out.push('\n');
    for rec in &traj.records {
        push_row(&mut out, &rec.csv_values());
    }
    out
}

/// Limit-system trajectory CSV from precomputed records.
pub fn vch_csv(_traj: &VchTrajectory, records: &[VchRecord]) -> String {
    let mut out = String::new();
    out.push_str(&VchRecord::CSV_COLUMNS.join(","));
    out.push('\n');
    for rec in records {
        push_row(&mut out, &rec.csv_values());
    }
    out
}

/// Sweep CSV: parameter column plus metric columns, one row per sweep point,
/// and a trailing comment line with the primary fitted power law.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(result.param_name);
    for c in &result.columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for row in &result.rows {
        let mut values = Vec::with_capacity(1 + row.values.len());
        values.push(row.param);
        values.extend_from_slice(&row.values);
        push_row(&mut out, &values);
    }
    if let Some(fit) = result.fits.iter().find_map(|f| f.fit.as_ref()) {
        let _ = writeln!(out, "# fitted p={:e}, K={:e}", fit.exponent, fit.constant);
    } else {
        out.push_str("# fitted p=nan, K=nan (degenerate fit)\n");
    }
    out
}

/// Parses a CSV produced by this module back into numeric rows (comment
/// lines are skipped). Used by the round-trip checks.
pub fn parse_csv(text: &str) -> Option<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines.next()?.split(',').map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            row.push(field.parse::<f64>().ok()?);
        }
        rows.push(row);
    }
    Some((header, rows))
}
