//! Report rendering: JSON for machines, Markdown for humans, CSV per
//! table plus the role-score figure data.

use std::fmt::Write;

use super::{AnalysisReport, CorrelationOutcome, GroupComparison, RoleTopScores, Section};

fn fmt_p(p: f64) -> String {
    if p >= 1e-3 {
        format!("{p:.4}")
    } else {
        format!("{p:.2e}")
    }
}

fn fmt_mean(x: f64) -> String {
    format!("{x:.2}")
}

pub fn render_json(report: &AnalysisReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serializes");
    out.push('\n');
    out
}

pub fn render_markdown(report: &AnalysisReport) -> String {
    let mut out = String::new();
    writeln!(out, "# Course Analysis: {}\n", report.course_id).unwrap();

    out.push_str("## Course Statistics\n\n");
    out.push_str("| Statistic | Value |\n| --- | --- |\n");
    writeln!(
        out,
        "| Participation Rate | {:.1}% |",
        report.participation_rate * 100.0
    )
    .unwrap();
    match report.average_grade {
        Some(g) => writeln!(out, "| Average Grade | {} |", fmt_mean(g)).unwrap(),
        None => out.push_str("| Average Grade | n/a |\n"),
    }
    out.push('\n');

    out.push_str("## Active vs. Non-active Grade Comparison\n\n");
    match &report.group_comparison {
        Section::Available { value } => {
            out.push_str("| Group | N | Mean Grade |\n| --- | --- | --- |\n");
            writeln!(
                out,
                "| Active | {} | {} |",
                value.n_active,
                fmt_mean(value.mean_active)
            )
            .unwrap();
            writeln!(
                out,
                "| Non-active | {} | {} |",
                value.n_non_active,
                fmt_mean(value.mean_non_active)
            )
            .unwrap();
            writeln!(out, "\nT-test p-value: {}", fmt_p(value.ttest.p_value)).unwrap();
        }
        Section::Unavailable { reason } => {
            writeln!(out, "_Unavailable: {reason}_").unwrap();
        }
    }
    out.push('\n');

    out.push_str("## Metric-Grade Correlations\n\n");
    match &report.correlations {
        Section::Available { value } => {
            out.push_str("| Metric | Correlation | p-value | Significant |\n");
            out.push_str("| --- | --- | --- | --- |\n");
            for row in value {
                match &row.outcome {
                    CorrelationOutcome::Defined {
                        result,
                        significant,
                    } => writeln!(
                        out,
                        "| {} | {:.2} | {} | {} |",
                        row.metric_name.label(),
                        result.rho,
                        fmt_p(result.p_value),
                        if *significant { "yes" } else { "no" },
                    )
                    .unwrap(),
                    CorrelationOutcome::Undefined { .. } => writeln!(
                        out,
                        "| {} | undefined | undefined | - |",
                        row.metric_name.label()
                    )
                    .unwrap(),
                }
            }
        }
        Section::Unavailable { reason } => {
            writeln!(out, "_Unavailable: {reason}_").unwrap();
        }
    }
    out.push('\n');

    out.push_str("## Top Help-Providing Score by Role\n\n");
    match &report.role_top_scores {
        Section::Available { value } => {
            out.push_str("| Role | User | Normalized Score |\n| --- | --- | --- |\n");
            for (role, entry) in &value.per_role {
                writeln!(
                    out,
                    "| {} | {} | {:.3} |",
                    role, entry.user, entry.normalized_score
                )
                .unwrap();
            }
        }
        Section::Unavailable { reason } => {
            writeln!(out, "_Unavailable: {reason}_").unwrap();
        }
    }

    if let Some(convergence) = report.hits_convergence {
        writeln!(
            out,
            "\nHITS iterations: {}{}",
            convergence.iterations,
            if convergence.warning {
                " (did not converge)"
            } else {
                ""
            }
        )
        .unwrap();
    }
    out
}

pub fn render_group_comparison_csv(comparison: &GroupComparison) -> String {
    let mut out = String::from("n_active,mean_active,n_non_active,mean_non_active,t_statistic,p_value\n");
    writeln!(
        out,
        "{},{},{},{},{:.4},{}",
        comparison.n_active,
        fmt_mean(comparison.mean_active),
        comparison.n_non_active,
        fmt_mean(comparison.mean_non_active),
        comparison.ttest.t_statistic,
        fmt_p(comparison.ttest.p_value),
    )
    .unwrap();
    out
}

pub fn render_correlations_csv(rows: &[super::CorrelationRow]) -> String {
    let mut out = String::from("metric,correlation,p_value,significant\n");
    for row in rows {
        match &row.outcome {
            CorrelationOutcome::Defined {
                result,
                significant,
            } => writeln!(
                out,
                "{},{:.2},{},{}",
                row.metric_name,
                result.rho,
                fmt_p(result.p_value),
                significant
            )
            .unwrap(),
            CorrelationOutcome::Undefined { .. } => {
                writeln!(out, "{},NA,NA,NA", row.metric_name).unwrap()
            }
        }
    }
    out
}

/// Figure data: `role,user_id,normalized_score`.
pub fn render_role_top_scores_csv(scores: &RoleTopScores) -> String {
    let mut out = String::from("role,user_id,normalized_score\n");
    for (role, entry) in &scores.per_role {
        writeln!(out, "{},{},{:.3}", role, entry.user, entry.normalized_score).unwrap();
    }
    out
}
