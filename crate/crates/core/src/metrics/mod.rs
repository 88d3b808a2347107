//! The five per-node social metrics: weighted in/out degree, betweenness
//! centrality, and HITS hub ("help providing") / authority ("help
//! receiving") scores.

mod betweenness;
mod hits;

pub use betweenness::betweenness;
pub use hits::{hits, HitsConfig, HitsError, HitsResult};

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::graph::SocialGraph;
use crate::model::{Role, UserId};

/// One node's metric vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    /// Total weight of incoming edges: reply instances received.
    pub in_degree: u64,
    /// Total weight of outgoing edges: reply instances given.
    pub out_degree: u64,
    pub betweenness: f64,
    /// Hub score.
    pub help_providing: f64,
    /// Authority score.
    pub help_receiving: f64,
}

/// Per-node metrics for a whole graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub rows: BTreeMap<UserId, MetricRow>,
    pub roles: BTreeMap<UserId, Role>,
    pub hits_iterations: usize,
    pub hits_converged: bool,
}

impl MetricTable {
    pub fn get(&self, user: &UserId) -> Option<&MetricRow> {
        self.rows.get(user)
    }

    /// Pull one named metric as a column, in row (user id) order.
    pub fn column(&self, metric: MetricName) -> Vec<f64> {
        self.rows.values().map(|r| metric.of(r)).collect()
    }
}

/// Names of the five metrics, in fixed report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    InDegree,
    OutDegree,
    Betweenness,
    HelpProviding,
    HelpReceiving,
}

impl MetricName {
    pub const ALL: [MetricName; 5] = [
        MetricName::InDegree,
        MetricName::OutDegree,
        MetricName::Betweenness,
        MetricName::HelpProviding,
        MetricName::HelpReceiving,
    ];

    pub fn of(self, row: &MetricRow) -> f64 {
        match self {
            MetricName::InDegree => row.in_degree as f64,
            MetricName::OutDegree => row.out_degree as f64,
            MetricName::Betweenness => row.betweenness,
            MetricName::HelpProviding => row.help_providing,
            MetricName::HelpReceiving => row.help_receiving,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::InDegree => "in_degree",
            MetricName::OutDegree => "out_degree",
            MetricName::Betweenness => "betweenness",
            MetricName::HelpProviding => "help_providing",
            MetricName::HelpReceiving => "help_receiving",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MetricName::InDegree => "In Degree",
            MetricName::OutDegree => "Out Degree",
            MetricName::Betweenness => "Betweenness Centrality",
            MetricName::HelpProviding => "Help Providing Score",
            MetricName::HelpReceiving => "Help Receiving Score",
        }
    }
}

impl std::fmt::Display for MetricName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Weighted (in, out) degree per node.
pub fn degrees(graph: &SocialGraph) -> BTreeMap<UserId, (u64, u64)> {
    let mut map: BTreeMap<UserId, (u64, u64)> = graph
        .nodes
        .keys()
        .map(|u| (u.clone(), (0, 0)))
        .collect();
    for ((source, target), weight) in &graph.edges {
        map.get_mut(target).unwrap().0 += weight;
        map.get_mut(source).unwrap().1 += weight;
    }
    map
}

/// Diagnostic: number of distinct partners per node (unweighted in, out
/// degree). Not part of the report pipeline.
pub fn distinct_partner_degrees(graph: &SocialGraph) -> BTreeMap<UserId, (u64, u64)> {
    let mut map: BTreeMap<UserId, (u64, u64)> = graph
        .nodes
        .keys()
        .map(|u| (u.clone(), (0, 0)))
        .collect();
    for (source, target) in graph.edges.keys() {
        map.get_mut(target).unwrap().0 += 1;
        map.get_mut(source).unwrap().1 += 1;
    }
    map
}

/// One row per node combining degrees, betweenness, and HITS.
pub fn compute_metric_table(
    graph: &SocialGraph,
    config: &HitsConfig,
) -> Result<MetricTable, HitsError> {
    let degree_map = degrees(graph);
    let bc = betweenness(graph);
    let hits_result = hits(graph, config)?;

    let rows = graph
        .nodes
        .keys()
        .map(|user| {
            let (in_degree, out_degree) = degree_map[user];
            (
                user.clone(),
                MetricRow {
                    in_degree,
                    out_degree,
                    betweenness: bc[user],
                    help_providing: hits_result.hub[user],
                    help_receiving: hits_result.authority[user],
                },
            )
        })
        .collect();

    Ok(MetricTable {
        rows,
        roles: graph.nodes.clone(),
        hits_iterations: hits_result.iterations,
        hits_converged: hits_result.converged,
    })
}

/// Round to 6 significant digits and print the shortest representation.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap();
    format!("{rounded}")
}

/// Metric table as CSV: `user_id,role,in_degree,out_degree,betweenness,help_providing,help_receiving`.
pub fn metric_table_to_csv(table: &MetricTable) -> String {
    let mut out =
        String::from("user_id,role,in_degree,out_degree,betweenness,help_providing,help_receiving\n");
    for (user, row) in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            user,
            table.roles[user],
            row.in_degree,
            row.out_degree,
            format_sig6(row.betweenness),
            format_sig6(row.help_providing),
            format_sig6(row.help_receiving),
        )
        .unwrap();
    }
    out
}
