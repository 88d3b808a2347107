//! HITS hub/authority scoring by power iteration.
//!
//! Hubs point to good authorities; authorities are pointed to by good hubs.
//! Each iteration computes `a <- W^T h`, then `h <- W a`, L2-normalizing
//! both. Uniform positive initialization converges to the principal
//! non-negative eigenvector pair for a non-negative adjacency matrix.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::SocialGraph;
use crate::model::UserId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitsConfig {
    /// L2 change between iterations below which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Use edge weights in the adjacency matrix; binary otherwise.
    pub use_weights: bool,
}

impl Default for HitsConfig {
    fn default() -> Self {
        HitsConfig {
            tolerance: 1e-12,
            max_iterations: 1000,
            use_weights: true,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HitsError {
    #[error("invalid HITS config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitsResult {
    /// Hub scores, the "help providing" vector.
    pub hub: BTreeMap<UserId, f64>,
    /// Authority scores, the "help receiving" vector.
    pub authority: BTreeMap<UserId, f64>,
    pub iterations: usize,
    /// False when max_iterations was hit before the tolerance; the best
    /// iterate is still returned.
    pub converged: bool,
}

fn l2_normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn hits(graph: &SocialGraph, config: &HitsConfig) -> Result<HitsResult, HitsError> {
    if config.tolerance <= 0.0 {
        return Err(HitsError::InvalidConfig("tolerance must be positive".into()));
    }
    if config.max_iterations == 0 {
        return Err(HitsError::InvalidConfig(
            "max_iterations must be at least 1".into(),
        ));
    }

    let ids: Vec<&UserId> = graph.nodes.keys().collect();
    let n = ids.len();
    let index: BTreeMap<&UserId, usize> = ids.iter().enumerate().map(|(i, u)| (*u, i)).collect();

    if graph.edges.is_empty() {
        let zeros: BTreeMap<UserId, f64> =
            ids.iter().map(|u| ((*u).clone(), 0.0)).collect();
        return Ok(HitsResult {
            hub: zeros.clone(),
            authority: zeros,
            iterations: 0,
            converged: true,
        });
    }

    let edges: Vec<(usize, usize, f64)> = graph
        .edges
        .iter()
        .map(|((s, t), w)| {
            let weight = if config.use_weights { *w as f64 } else { 1.0 };
            (index[s], index[t], weight)
        })
        .collect();

    let init = 1.0 / (n as f64).sqrt();
    let mut hub = vec![init; n];
    let mut authority = vec![init; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        iterations += 1;
        let mut new_authority = vec![0.0; n];
        for &(s, t, w) in &edges {
            new_authority[t] += w * hub[s];
        }
        l2_normalize(&mut new_authority);
        let mut new_hub = vec![0.0; n];
        for &(s, t, w) in &edges {
            new_hub[s] += w * new_authority[t];
        }
        l2_normalize(&mut new_hub);

        let change = l2_distance(&new_hub, &hub).max(l2_distance(&new_authority, &authority));
        hub = new_hub;
        authority = new_authority;
        if change < config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(HitsResult {
        hub: ids.iter().map(|u| (*u).clone()).zip(hub).collect(),
        authority: ids
            .iter()
            .map(|u| (*u).clone())
            .zip(authority)
            .collect(),
        iterations,
        converged,
    })
}
