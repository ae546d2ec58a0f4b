//! Trace, diagnostics and metrics files.

use std::fs;
use std::io::Write;
use std::path::Path;

use mfapc_core::sim::DiagnosticsReport;
use mfapc_core::{Metrics, SimTrace};
use serde::Serialize;

use crate::error::{CliError, Result};

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn write_csv(path: &Path, header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(CliError::output(path))?;
    w.write_record(&header).map_err(CliError::output(path))?;
    for row in rows {
        w.write_record(&row).map_err(CliError::output(path))?;
    }
    w.flush().map_err(CliError::io(path))
}

/// `k,y,y_star,e,u,du,phi_1..phi_L,sigma_A,lemma1_bound,reset_flag`.
pub fn write_trace(path: &Path, trace: &SimTrace) -> Result<()> {
    let order = trace.order();
    let mut header: Vec<String> = ["k", "y", "y_star", "e", "u", "du"].map(String::from).to_vec();
    header.extend((1..=order).map(|i| format!("phi_{i}")));
    header.extend(["sigma_A", "lemma1_bound", "reset_flag"].map(String::from));
    let rows = trace.records.iter().map(|r| {
        let mut row = vec![r.k.to_string(), num(r.y), num(r.y_star), num(r.e), num(r.u), num(r.du)];
        row.extend(r.phi.iter().copied().map(num));
        row.extend([opt(r.sigma_a), opt(r.lemma1_bound), u8::from(r.reset).to_string()]);
        row
    });
    write_csv(path, header, rows)
}

/// Per-step stability diagnostics of the adaptive controllers.
pub fn write_diagnostics(path: &Path, trace: &SimTrace) -> Result<()> {
    let header = ["k", "sigma_A", "lemma1_bound", "lemma1_holds", "phi_norm", "reset_flag"].map(String::from).to_vec();
    let rows = trace.records.iter().map(|r| {
        let holds = match (r.lemma1_bound, r.sigma_a) {
            (Some(b), Some(s)) => u8::from(b >= 1.0 || s < 1.0).to_string(),
            _ => String::new(),
        };
        let phi_norm = if r.phi.is_empty() { String::new() } else { num(r.phi.iter().map(|p| p * p).sum::<f64>().sqrt()) };
        vec![r.k.to_string(), opt(r.sigma_a), opt(r.lemma1_bound), holds, phi_norm, u8::from(r.reset).to_string()]
    });
    write_csv(path, header, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettlingEntry {
    pub switch_step: usize,
    pub settling_steps: Option<usize>,
}

/// Summary written to `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub name: String,
    pub controller: String,
    pub status: &'static str,
    pub steps: usize,
    pub e_itae: Option<f64>,
    pub itae: Option<f64>,
    pub rmse: Option<f64>,
    pub max_abs_error: Option<f64>,
    pub settling: Vec<SettlingEntry>,
    pub max_spectral_radius: Option<f64>,
    pub max_lemma1_bound: Option<f64>,
    pub lemma1_inconsistencies: usize,
    pub resets: usize,
    pub pg_clamp_events: usize,
    pub pg_bound_violations: usize,
    pub max_window_norm: f64,
}

impl MetricsSummary {
    pub fn new(
        name: &str,
        controller: &str,
        trace: &SimTrace,
        metrics: Option<&Metrics>,
        diagnostics: &DiagnosticsReport,
    ) -> Self {
        Self {
            name: name.to_string(),
            controller: controller.to_string(),
            status: if metrics.is_some() { "ok" } else { "diverged" },
            steps: trace.len(),
            e_itae: metrics.map(|m| m.e_itae),
            itae: metrics.map(|m| m.itae),
            rmse: metrics.map(|m| m.rmse),
            max_abs_error: metrics.map(|m| m.max_abs_error),
            settling: metrics
                .map(|m| {
                    m.settling
                        .iter()
                        .map(|s| SettlingEntry { switch_step: s.switch_step, settling_steps: s.settling_steps })
                        .collect()
                })
                .unwrap_or_default(),
            max_spectral_radius: diagnostics.max_spectral_radius(),
            max_lemma1_bound: diagnostics.max_lemma1_bound(),
            lemma1_inconsistencies: diagnostics.lemma1_inconsistencies(),
            resets: trace.records.iter().filter(|r| r.reset).count(),
            pg_clamp_events: diagnostics.pg_clamp_events,
            pg_bound_violations: diagnostics.pg_bound_violations,
            max_window_norm: diagnostics.max_window_norm,
        }
    }
}

pub fn write_metrics(path: &Path, summary: &MetricsSummary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary).map_err(CliError::output(path))?;
    text.push('\n');
    let mut f = fs::File::create(path).map_err(CliError::io(path))?;
    f.write_all(text.as_bytes()).map_err(CliError::io(path))
}

/// Writes a table of summaries, one row per run.
pub fn write_summary_table(path: &Path, key: &str, rows: &[(String, MetricsSummary)]) -> Result<()> {
    let header = [key, "controller", "status", "steps", "e_itae", "itae", "rmse", "max_abs_error", "max_sigma_A", "max_lemma1_bound", "resets"]
        .map(String::from)
        .to_vec();
    let body = rows.iter().map(|(label, s)| {
        vec![
            label.clone(),
            s.controller.clone(),
            s.status.to_string(),
            s.steps.to_string(),
            opt(s.e_itae),
            opt(s.itae),
            opt(s.rmse),
            opt(s.max_abs_error),
            opt(s.max_spectral_radius),
            opt(s.max_lemma1_bound),
            s.resets.to_string(),
        ]
    });
    write_csv(path, header, body)
}

/// Unicode block sparkline of `values`, resampled to `width` columns.
pub fn sparkline(values: &[f64], width: usize) -> String {
    const BARS: [char; 8] = ['▁', '▂', '▃', '▄', '▅', '▆', '▇', '█'];
    if values.is_empty() || width == 0 {
        return String::new();
    }
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let cols = width.min(values.len());
    (0..cols)
        .map(|c| {
            let start = c * values.len() / cols;
            let end = ((c + 1) * values.len() / cols).max(start + 1);
            let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
            let level = if hi > lo { ((mean - lo) / (hi - lo) * 7.0).round() as usize } else { 3 };
            BARS[level.min(7)]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparkline_spans_range() {
        let s = sparkline(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0], 8);
        assert_eq!(s, "▁▂▃▄▅▆▇█");
        assert_eq!(sparkline(&[2.0; 5], 3).chars().count(), 3);
        assert_eq!(sparkline(&[], 10), "");
    }
}
