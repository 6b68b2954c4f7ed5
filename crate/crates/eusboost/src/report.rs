//! Rendering of comparison reports: aligned plain text for humans and CSV
//! for machine consumption. Human tables print percentages with 2 decimals;
//! CSV carries the raw [0, 1] values.

use std::fmt::Write;

use crate::evaluation::{ComparisonReport, PairwiseCell};
use crate::learners::LearnerKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

fn percent(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{:.2}", v * 100.0),
        None => "n/a".to_string(),
    }
}

fn cell(c: &Option<PairwiseCell>) -> String {
    match c {
        Some(c) => format!("{} ({:.4})", if c.eub_at_least { "+" } else { "-" }, c.p_value),
        None => "n/a".to_string(),
    }
}

fn header(report: &ComparisonReport) -> String {
    let learner = match report.learner.kind {
        LearnerKind::Stump => "decision stump".to_string(),
        LearnerKind::Tree => format!("depth-{} decision tree", report.learner.max_depth),
    };
    format!(
        "Base learner: weighted {learner}.\n\
         AUC is the single-point formula (1 + TPR - FPR) / 2 at the ensemble operating point.\n\
         Protocol: stratified {}-fold cross-validation x {} repeat(s), folds paired across methods.\n",
        report.k, report.repeats
    )
}

pub fn render(report: &ComparisonReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(report),
        ReportFormat::Csv => render_csv(report),
    }
}

pub fn render_text(report: &ComparisonReport) -> String {
    let mut out = header(report);
    out.push('\n');
    writeln!(out, "{:<6} | {:>6} | {:>6} | {:>6}", "Method", "SEN", "GM", "AUC").unwrap();
    for result in &report.overall {
        writeln!(
            out,
            "{:<6} | {:>6} | {:>6} | {:>6}",
            result.tag.to_string(),
            percent(result.mean_sen()),
            percent(result.mean_gm()),
            percent(result.mean_auc()),
        )
        .unwrap();
    }
    if !report.pairwise.is_empty() {
        out.push('\n');
        writeln!(
            out,
            "{:<12} | {:>13} | {:>13} | {:>13}",
            "Hypothesis", "p-value (SEN)", "p-value (GM)", "p-value (AUC)"
        )
        .unwrap();
        for row in &report.pairwise {
            writeln!(
                out,
                "{:<12} | {:>13} | {:>13} | {:>13}",
                format!("EUB vs. {}", row.vs),
                cell(&row.sen),
                cell(&row.gm),
                cell(&row.auc),
            )
            .unwrap();
        }
    }
    let warnings: usize = report.overall.iter().map(|r| r.warnings).sum();
    if warnings > 0 {
        writeln!(out, "\nwarning: {warnings} undefined fold metric(s) excluded from means").unwrap();
    }
    out
}

fn csv_value(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v}"),
        None => "n/a".to_string(),
    }
}

pub fn render_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("table,method,sen,gm,auc\n");
    for result in &report.overall {
        writeln!(
            out,
            "overall,{},{},{},{}",
            result.tag,
            csv_value(result.mean_sen()),
            csv_value(result.mean_gm()),
            csv_value(result.mean_auc()),
        )
        .unwrap();
    }
    for row in &report.pairwise {
        let fmt = |c: &Option<PairwiseCell>| match c {
            Some(c) => format!("{},{}", if c.eub_at_least { "+" } else { "-" }, c.p_value),
            None => "n/a,n/a".to_string(),
        };
        writeln!(
            out,
            "pairwise,EUB vs. {},{},{},{}",
            row.vs,
            fmt(&row.sen),
            fmt(&row.gm),
            fmt(&row.auc),
        )
        .unwrap();
    }
    out
}
