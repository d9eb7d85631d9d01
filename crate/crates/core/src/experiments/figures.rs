//! Named figure builds: each id maps to a deterministic set of numeric
//! tables plus a scalar summary, renderable as JSON or CSV.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::temporal::detuning_for_overlap_sq;
use crate::{Error, Result};

use super::presets::{figure_plan, FigurePlan, PACKET_DURATION_NS};
use super::runner::{run, run_bell_pair};
use super::{ReportBody, RunReport};

pub const FIGURE_IDS: [&str; 6] = ["1d", "1e", "2b", "2c", "3ab", "3e"];

#[derive(Debug, Clone, Serialize)]
pub struct FigureTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureTable {
    fn new(name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        FigureTable {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    /// One `# table` comment line, the column header, then the rows.
    pub fn to_csv_block(&self) -> String {
        let mut out = format!("# table {}\n", self.name);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureReport {
    pub id: String,
    pub seed: u64,
    pub tables: Vec<FigureTable>,
    pub summary: BTreeMap<String, f64>,
}

impl FigureReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    /// Comment header with the summary, then one CSV block per table.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# figure {} seed {}\n", self.id, self.seed);
        for (key, value) in &self.summary {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        for table in &self.tables {
            out.push_str(&table.to_csv_block());
        }
        out
    }
}

/// Numeric tables plus scalar summary for a finished run, same shapes the
/// figure builds use. Lets callers render any report as CSV.
pub fn report_tables(report: &RunReport) -> (Vec<FigureTable>, BTreeMap<String, f64>) {
    let mut tables = Vec::new();
    let mut summary = BTreeMap::new();
    let clicks: usize = report.logs.iter().map(|l| l.clicks).sum();
    summary.insert("clicks".to_string(), clicks as f64);
    render_body(&report.body, &mut tables, &mut summary);
    (tables, summary)
}

pub fn run_figure(id: &str, seed: u64) -> Result<FigureReport> {
    let plan = figure_plan(id, seed)?;
    let mut tables = Vec::new();
    let mut summary = BTreeMap::new();
    match plan {
        FigurePlan::Single(cfg) => {
            let out = run(&cfg)?;
            let (t, s) = report_tables(&out.report);
            tables = t;
            summary = s;
        }
        FigurePlan::OverlapSweep { base, overlaps_sq } => {
            let mut rows = Vec::with_capacity(overlaps_sq.len());
            for &target in &overlaps_sq {
                let mut cfg = base.clone();
                cfg.routing.relative_detuning_rad_per_ns =
                    detuning_for_overlap_sq(target, PACKET_DURATION_NS)?;
                let out = run(&cfg)?;
                match out.report.body {
                    ReportBody::Interference { visibility, pairs, .. } => {
                        rows.push(vec![target, visibility, pairs as f64]);
                    }
                    _ => return Err(Error::argument("sweep base must be an interference run")),
                }
            }
            summary.insert("points".to_string(), rows.len() as f64);
            tables.push(FigureTable::new(
                "visibility_vs_overlap",
                &["overlap_sq", "visibility", "pairs"],
                rows,
            ));
        }
        FigurePlan::BellPair { zz, xx } => {
            let (report, _logs) = run_bell_pair(&zz, &xx)?;
            summary.insert("zz".to_string(), report.zz_value);
            summary.insert("xx".to_string(), report.xx_value);
            summary.insert("bound".to_string(), report.bound.bound);
            summary.insert(
                "certifies".to_string(),
                if report.bound.certifies_entanglement() { 1.0 } else { 0.0 },
            );
            summary.insert("fidelity_estimate".to_string(), report.fidelity_estimate);
            summary.insert("spread".to_string(), report.spread);
            summary
                .insert("empty_windows".to_string(), report.delay_curve.empty_centers.len() as f64);
            let mut corr = Vec::new();
            for (tag, rep) in [(0.0, &report.zz), (1.0, &report.xx)] {
                if let ReportBody::Correlations { expectation, pairs, .. } = rep.body {
                    corr.push(vec![tag, expectation, pairs as f64]);
                }
            }
            tables.push(FigureTable::new(
                "correlations",
                &["setting", "expectation", "pairs"],
                corr,
            ));
            tables.push(delay_table("fidelity_vs_delay", "bound", &report.delay_curve));
        }
    }
    Ok(FigureReport { id: id.to_string(), seed, tables, summary })
}

fn delay_table(name: &str, value_column: &str, curve: &crate::analysis::DelayCurve) -> FigureTable {
    let rows = curve
        .points
        .iter()
        .map(|p| vec![p.center_ns, p.value, p.pairs as f64, if p.flagged { 1.0 } else { 0.0 }])
        .collect();
    FigureTable::new(name, &["center_ns", value_column, "pairs", "flagged"], rows)
}

fn render_body(
    body: &ReportBody,
    tables: &mut Vec<FigureTable>,
    summary: &mut BTreeMap<String, f64>,
) {
    match body {
        ReportBody::Correlation { g2_zero, normalization, curve } => {
            summary.insert("g2_zero".to_string(), *g2_zero);
            summary.insert("normalization".to_string(), *normalization);
            let rows = curve.iter().map(|&(lag, v)| vec![lag, v]).collect();
            tables.push(FigureTable::new("g2", &["lag_ns", "g2"], rows));
        }
        ReportBody::Interference {
            visibility,
            pairs,
            coincidences,
            reference_coincidences,
            dip,
            reference_dip,
        } => {
            summary.insert("visibility".to_string(), *visibility);
            summary.insert("pairs".to_string(), *pairs as f64);
            summary.insert("coincidences".to_string(), *coincidences as f64);
            summary.insert("reference_coincidences".to_string(), *reference_coincidences as f64);
            let mut merged: BTreeMap<i64, [f64; 2]> = BTreeMap::new();
            for (col, hist) in [(0usize, dip), (1usize, reference_dip)] {
                for &(lag, count) in hist {
                    merged.entry((lag * 1000.0).round() as i64).or_default()[col] = count as f64;
                }
            }
            let rows = merged
                .into_iter()
                .map(|(lag_mns, cols)| vec![lag_mns as f64 / 1000.0, cols[0], cols[1]])
                .collect();
            tables.push(FigureTable::new(
                "dip",
                &["lag_ns", "coincidences", "reference_coincidences"],
                rows,
            ));
        }
        ReportBody::TruthTable {
            similarity,
            row_pairs,
            probabilities,
            raw_counts,
            background,
            delay_curve,
        } => {
            summary.insert("similarity".to_string(), *similarity);
            summary.insert("pairs".to_string(), row_pairs.iter().sum::<u64>() as f64);
            summary.insert("empty_windows".to_string(), delay_curve.empty_centers.len() as f64);
            let mut rows = Vec::with_capacity(16);
            for input in 0..4 {
                for outcome in 0..4 {
                    let cell = input * 4 + outcome;
                    rows.push(vec![
                        input as f64,
                        outcome as f64,
                        probabilities[cell],
                        raw_counts[cell],
                        background[cell],
                    ]);
                }
            }
            tables.push(FigureTable::new(
                "truth_table",
                &["input", "outcome", "probability", "raw", "background"],
                rows,
            ));
            tables.push(delay_table("similarity_vs_delay", "similarity", delay_curve));
        }
        ReportBody::Correlations { expectation, counts, pairs, .. } => {
            summary.insert("expectation".to_string(), *expectation);
            summary.insert("pairs".to_string(), *pairs as f64);
            let rows =
                counts.iter().enumerate().map(|(i, &c)| vec![i as f64, c]).collect();
            tables.push(FigureTable::new("counts", &["outcome", "count"], rows));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering_is_stable_and_parseable() {
        let report = FigureReport {
            id: "1d".into(),
            seed: 5,
            tables: vec![FigureTable::new(
                "g2",
                &["lag_ns", "g2"],
                vec![vec![-1000.0, 1.02], vec![0.0, 0.11]],
            )],
            summary: [("g2_zero".to_string(), 0.11)].into_iter().collect(),
        };
        let csv = report.to_csv();
        assert_eq!(
            csv,
            "# figure 1d seed 5\n# g2_zero = 0.11\n# table g2\nlag_ns,g2\n-1000,1.02\n0,0.11\n"
        );
        assert_eq!(csv, report.to_csv());
    }

    #[test]
    fn figure_report_runs_end_to_end_on_a_short_build() {
        let mut plan = figure_plan("1d", 8).unwrap();
        if let FigurePlan::Single(cfg) = &mut plan {
            cfg.duration_ns = 2e9;
            let out = run(cfg).unwrap();
            assert!(matches!(out.report.body, ReportBody::Correlation { .. }));
        } else {
            panic!("1d is a single run");
        }
    }
}
