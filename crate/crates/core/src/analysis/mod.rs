//! The full study for one course: active/non-active grade comparison,
//! metric-grade correlations on the active-student graph, and role-wise
//! top help-providing scores.

mod report;

pub use report::{
    render_correlations_csv, render_group_comparison_csv, render_json, render_markdown,
    render_role_top_scores_csv,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_graph, active_partition, BuildOptions};
use crate::metrics::{compute_metric_table, HitsConfig, HitsError, MetricName, MetricTable};
use crate::model::{Course, Role, UserId};
use crate::stats::{
    spearman, welch_ttest, CorrelationResult, SpearmanConfig, StatsError, TTestResult,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("insufficient group size: {group} group has {got} graded students, need at least 2")]
    InsufficientGroupSize { group: &'static str, got: usize },
    #[error("insufficient sample: {got} active graded students, need at least 3")]
    InsufficientSample { got: usize },
    #[error("no interactions: the graph has no edges")]
    NoInteractions,
    #[error(transparent)]
    Hits(#[from] HitsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Knobs shared by the three studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub hits: HitsConfig,
    pub spearman: SpearmanConfig,
    /// p-value at or below which a correlation row is marked significant.
    pub significance_level: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            hits: HitsConfig::default(),
            spearman: SpearmanConfig::default(),
            significance_level: 0.05,
        }
    }
}

/// Grade comparison between forum contributors and non-contributors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub mean_active: f64,
    pub mean_non_active: f64,
    pub ttest: TTestResult,
    pub n_active: usize,
    pub n_non_active: usize,
    /// Students with forum activity status but no grade, excluded from
    /// both groups.
    pub n_ungraded: usize,
}

/// Outcome of one metric-grade correlation; a constant metric column makes
/// the correlation undefined without aborting the study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CorrelationOutcome {
    Defined {
        result: CorrelationResult,
        significant: bool,
    },
    Undefined {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric_name: MetricName,
    pub outcome: CorrelationOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleTopEntry {
    pub user: UserId,
    /// Raw hub score divided by the global maximum; the top provider
    /// reads 1.0.
    pub normalized_score: f64,
    /// The underlying L2-normalized hub score.
    pub raw_score: f64,
}

/// Highest help-providing score per role.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleTopScores {
    pub per_role: BTreeMap<Role, RoleTopEntry>,
}

/// A report section that may be unavailable without failing the others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    Available { value: T },
    Unavailable { reason: String },
}

impl<T> Section<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Section::Available { value } => Some(value),
            Section::Unavailable { .. } => None,
        }
    }

    fn from_result(result: Result<T, AnalysisError>) -> Self {
        match result {
            Ok(value) => Section::Available { value },
            Err(e) => Section::Unavailable {
                reason: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitsConvergence {
    pub iterations: usize,
    pub warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub course_id: String,
    pub group_comparison: Section<GroupComparison>,
    pub correlations: Section<Vec<CorrelationRow>>,
    pub role_top_scores: Section<RoleTopScores>,
    /// Fraction of students who authored at least one post.
    pub participation_rate: f64,
    pub average_grade: Option<f64>,
    pub hits_convergence: Option<HitsConvergence>,
}

/// Compare the grades of active and non-active students with Welch's
/// t-test. Ungraded students are excluded from both groups.
pub fn run_group_comparison(course: &Course) -> Result<GroupComparison, AnalysisError> {
    let (active, non_active) = active_partition(course);
    let graded = |set: &std::collections::BTreeSet<UserId>| -> Vec<f64> {
        set.iter().filter_map(|u| course.gradebook.get(u)).collect()
    };
    let active_grades = graded(&active);
    let non_active_grades = graded(&non_active);
    let n_ungraded =
        active.len() + non_active.len() - active_grades.len() - non_active_grades.len();
    if n_ungraded > 0 {
        log::info!("group comparison: excluded {n_ungraded} ungraded students");
    }
    if active_grades.len() < 2 {
        return Err(AnalysisError::InsufficientGroupSize {
            group: "active",
            got: active_grades.len(),
        });
    }
    if non_active_grades.len() < 2 {
        return Err(AnalysisError::InsufficientGroupSize {
            group: "non-active",
            got: non_active_grades.len(),
        });
    }
    let ttest = welch_ttest(&active_grades, &non_active_grades)?;
    Ok(GroupComparison {
        mean_active: ttest.mean_a,
        mean_non_active: ttest.mean_b,
        ttest,
        n_active: active_grades.len(),
        n_non_active: non_active_grades.len(),
        n_ungraded,
    })
}

/// Graph used for the metric studies: active students only, staff kept,
/// anonymous users dropped.
fn study_graph(course: &Course) -> crate::graph::SocialGraph {
    build_graph(
        course,
        BuildOptions {
            restrict_to_active_students: true,
            ..BuildOptions::default()
        },
    )
}

/// Correlate each of the five metrics with grades over active graded
/// students. Staff shape the metrics but are excluded from the sample.
pub fn run_correlation_study(
    course: &Course,
    config: &AnalysisConfig,
) -> Result<Vec<CorrelationRow>, AnalysisError> {
    let table = compute_metric_table(&study_graph(course), &config.hits)?;
    correlation_rows(course, &table, config)
}

fn correlation_rows(
    course: &Course,
    table: &MetricTable,
    config: &AnalysisConfig,
) -> Result<Vec<CorrelationRow>, AnalysisError> {
    let sample: Vec<(&UserId, f64)> = table
        .rows
        .keys()
        .filter(|u| table.roles[*u].is_student_like())
        .filter_map(|u| course.gradebook.get(u).map(|g| (u, g)))
        .collect();
    if sample.len() < 3 {
        return Err(AnalysisError::InsufficientSample { got: sample.len() });
    }
    let grades: Vec<f64> = sample.iter().map(|(_, g)| *g).collect();

    let rows = MetricName::ALL
        .iter()
        .map(|&metric_name| {
            let values: Vec<f64> = sample
                .iter()
                .map(|(u, _)| metric_name.of(&table.rows[*u]))
                .collect();
            let outcome = match spearman(&values, &grades, &config.spearman) {
                Ok(result) => CorrelationOutcome::Defined {
                    significant: result.p_value <= config.significance_level,
                    result,
                },
                Err(StatsError::ConstantInput) => CorrelationOutcome::Undefined {
                    reason: "undefined correlation: constant metric or grade vector".into(),
                },
                Err(e) => CorrelationOutcome::Undefined {
                    reason: e.to_string(),
                },
            };
            CorrelationRow {
                metric_name,
                outcome,
            }
        })
        .collect();
    Ok(rows)
}

/// Maximum help-providing score per role, normalized by the global
/// maximum so the top provider reads 1.0.
pub fn run_role_report(
    course: &Course,
    config: &AnalysisConfig,
) -> Result<RoleTopScores, AnalysisError> {
    let graph = study_graph(course);
    let table = compute_metric_table(&graph, &config.hits)?;
    role_top_scores(&table)
}

fn role_top_scores(table: &MetricTable) -> Result<RoleTopScores, AnalysisError> {
    if table.rows.is_empty() || table.rows.values().all(|r| r.help_providing == 0.0 && r.help_receiving == 0.0) {
        return Err(AnalysisError::NoInteractions);
    }
    let mut per_role: BTreeMap<Role, RoleTopEntry> = BTreeMap::new();
    for (user, row) in &table.rows {
        let role = table.roles[user];
        let entry = per_role.entry(role).or_insert_with(|| RoleTopEntry {
            user: user.clone(),
            normalized_score: 0.0,
            raw_score: row.help_providing,
        });
        if row.help_providing > entry.raw_score {
            entry.user = user.clone();
            entry.raw_score = row.help_providing;
        }
    }
    let global_max = per_role
        .values()
        .map(|e| e.raw_score)
        .fold(0.0f64, f64::max);
    if global_max == 0.0 {
        return Err(AnalysisError::NoInteractions);
    }
    for entry in per_role.values_mut() {
        entry.normalized_score = entry.raw_score / global_max;
    }
    Ok(RoleTopScores { per_role })
}

/// Compose the three studies plus course-level statistics. Sections
/// degrade independently.
pub fn run_full_analysis(course: &Course, config: &AnalysisConfig) -> AnalysisReport {
    let (active, non_active) = active_partition(course);
    let n_students = active.len() + non_active.len();
    let participation_rate = if n_students == 0 {
        0.0
    } else {
        active.len() as f64 / n_students as f64
    };
    let average_grade = if course.gradebook.is_empty() {
        None
    } else {
        Some(
            course.gradebook.entries.values().sum::<f64>() / course.gradebook.len() as f64,
        )
    };

    let group_comparison = Section::from_result(run_group_comparison(course));

    // Build the study graph and metric table once, share across sections.
    let table_result = compute_metric_table(&study_graph(course), &config.hits);
    let (correlations, roles, hits_convergence) = match table_result {
        Ok(table) => {
            let convergence = HitsConvergence {
                iterations: table.hits_iterations,
                warning: !table.hits_converged,
            };
            (
                Section::from_result(correlation_rows(course, &table, config)),
                Section::from_result(role_top_scores(&table)),
                Some(convergence),
            )
        }
        Err(e) => {
            let reason = e.to_string();
            (
                Section::Unavailable {
                    reason: reason.clone(),
                },
                Section::Unavailable { reason },
                None,
            )
        }
    };

    AnalysisReport {
        course_id: course.course_id.clone(),
        group_comparison,
        correlations,
        role_top_scores: roles,
        participation_rate,
        average_grade,
        hits_convergence,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Gradebook, Post, Thread};

    fn post(thread: &str, i: usize, author: &str) -> Post {
        Post {
            post_id: format!("{thread}-p{i}"),
            thread_id: thread.into(),
            author: UserId::from(author),
            timestamp: i as i64,
            position: i,
        }
    }

    fn thread(id: &str, authors: &[&str]) -> Thread {
        Thread {
            thread_id: id.into(),
            posts: authors
                .iter()
                .enumerate()
                .map(|(i, a)| post(id, i, a))
                .collect(),
        }
    }

    fn course(
        users: &[(&str, Role)],
        grades: &[(&str, f64)],
        threads: Vec<Thread>,
    ) -> Course {
        Course {
            course_id: "c".into(),
            users: users.iter().map(|(u, r)| (UserId::from(*u), *r)).collect(),
            threads,
            gradebook: Gradebook {
                entries: grades
                    .iter()
                    .map(|(u, g)| (UserId::from(*u), *g))
                    .collect(),
            },
        }
    }

    #[test]
    fn all_students_active_is_an_error() {
        let c = course(
            &[("a", Role::Student), ("b", Role::Student)],
            &[("a", 90.0), ("b", 80.0)],
            vec![thread("t", &["a", "b"])],
        );
        assert!(matches!(
            run_group_comparison(&c),
            Err(AnalysisError::InsufficientGroupSize { group: "non-active", .. })
        ));
    }

    #[test]
    fn equal_group_means_give_p_one() {
        let c = course(
            &[
                ("a", Role::Student),
                ("b", Role::Student),
                ("c", Role::Student),
                ("d", Role::Student),
            ],
            &[("a", 90.0), ("b", 90.0), ("c", 90.0), ("d", 90.0)],
            vec![thread("t", &["a", "b"])],
        );
        let g = run_group_comparison(&c).unwrap();
        assert_eq!(g.mean_active, 90.0);
        assert_eq!(g.mean_non_active, 90.0);
        assert_eq!(g.ttest.p_value, 1.0);
    }

    #[test]
    fn out_degree_correlation_hits_one_on_chain() {
        // One chain thread a, b, c: out-degrees 0, 1, 2; grades increase
        // the same way.
        let c = course(
            &[
                ("a", Role::Student),
                ("b", Role::Student),
                ("c", Role::Student),
            ],
            &[("a", 70.0), ("b", 80.0), ("c", 90.0)],
            vec![thread("t", &["a", "b", "c"])],
        );
        let rows = run_correlation_study(&c, &AnalysisConfig::default()).unwrap();
        assert_eq!(rows.len(), 5);
        let out_row = &rows[1];
        assert_eq!(out_row.metric_name, MetricName::OutDegree);
        match &out_row.outcome {
            CorrelationOutcome::Defined { result, .. } => {
                assert!((result.rho - 1.0).abs() < 1e-12)
            }
            other => panic!("expected defined outcome, got {other:?}"),
        }
    }

    #[test]
    fn two_active_students_insufficient() {
        let c = course(
            &[("a", Role::Student), ("b", Role::Student)],
            &[("a", 70.0), ("b", 80.0)],
            vec![thread("t", &["a", "b"])],
        );
        assert!(matches!(
            run_correlation_study(&c, &AnalysisConfig::default()),
            Err(AnalysisError::InsufficientSample { got: 2 })
        ));
    }

    #[test]
    fn constant_metric_marks_row_undefined() {
        // Star replies to one target: betweenness is zero everywhere.
        let c = course(
            &[
                ("a", Role::Student),
                ("b", Role::Student),
                ("c", Role::Student),
                ("d", Role::Student),
            ],
            &[("a", 70.0), ("b", 80.0), ("c", 90.0), ("d", 60.0)],
            vec![
                thread("t1", &["a", "b"]),
                thread("t2", &["a", "c"]),
                thread("t3", &["a", "d"]),
            ],
        );
        let rows = run_correlation_study(&c, &AnalysisConfig::default()).unwrap();
        let bc_row = &rows[2];
        assert_eq!(bc_row.metric_name, MetricName::Betweenness);
        assert!(matches!(
            bc_row.outcome,
            CorrelationOutcome::Undefined { .. }
        ));
    }

    #[test]
    fn instructor_dominates_role_report() {
        let c = course(
            &[
                ("s1", Role::Student),
                ("s2", Role::Student),
                ("inst", Role::Instructor),
            ],
            &[],
            vec![
                thread("t1", &["s1", "inst"]),
                thread("t2", &["s2", "inst"]),
            ],
        );
        let r = run_role_report(&c, &AnalysisConfig::default()).unwrap();
        let inst = &r.per_role[&Role::Instructor];
        assert_eq!(inst.normalized_score, 1.0);
        assert_eq!(r.per_role[&Role::Student].normalized_score, 0.0);
    }

    #[test]
    fn zero_edge_graph_has_no_role_report() {
        let c = course(
            &[("a", Role::Student)],
            &[],
            vec![thread("t", &["a"])],
        );
        assert!(matches!(
            run_role_report(&c, &AnalysisConfig::default()),
            Err(AnalysisError::NoInteractions)
        ));
    }

    #[test]
    fn full_analysis_degrades_without_grades() {
        let c = course(
            &[
                ("a", Role::Student),
                ("b", Role::Student),
                ("c", Role::Student),
            ],
            &[],
            vec![thread("t", &["a", "b", "c"])],
        );
        let report = run_full_analysis(&c, &AnalysisConfig::default());
        assert!(report.group_comparison.value().is_none());
        assert!(report.correlations.value().is_none());
        assert!(report.role_top_scores.value().is_some());
        assert_eq!(report.average_grade, None);
        assert!((report.participation_rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn participation_rate_counts_active_over_students() {
        let c = course(
            &[
                ("a", Role::Student),
                ("b", Role::Student),
                ("c", Role::Student),
                ("d", Role::Student),
                ("ta", Role::Ta),
            ],
            &[],
            vec![thread("t", &["a", "b", "ta"])],
        );
        let report = run_full_analysis(&c, &AnalysisConfig::default());
        assert!((report.participation_rate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn report_serialization_round_trips() {
        let c = course(
            &[
                ("a", Role::Student),
                ("b", Role::Student),
                ("c", Role::Student),
                ("d", Role::Student),
            ],
            &[("a", 70.0), ("b", 80.0), ("c", 90.0), ("d", 60.0)],
            vec![thread("t", &["a", "b", "c"])],
        );
        let report = run_full_analysis(&c, &AnalysisConfig::default());
        let json = serde_json::to_string(&report).unwrap();
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}
