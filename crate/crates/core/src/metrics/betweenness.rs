//! Brandes' betweenness centrality for directed, unweighted graphs.
//!
//! Edge weights are ignored for shortest paths: reply counts are
//! similarities, not distances. Scores are unnormalized; pairs with no
//! connecting path contribute zero.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use crate::graph::SocialGraph;
use crate::model::UserId;

pub fn betweenness(graph: &SocialGraph) -> BTreeMap<UserId, f64> {
    let ids: Vec<&UserId> = graph.nodes.keys().collect();
    let n = ids.len();
    let index: BTreeMap<&UserId, usize> = ids.iter().enumerate().map(|(i, u)| (*u, i)).collect();

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (source, target) in graph.edges.keys() {
        adjacency[index[source]].push(index[target]);
    }

    let mut scores = vec![0.0f64; n];
    for s in 0..n {
        // BFS phase: shortest-path counts sigma and predecessor lists.
        let mut stack = Vec::with_capacity(n);
        let mut predecessors: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adjacency[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    predecessors[w].push(v);
                }
            }
        }
        // Accumulation phase, in reverse BFS order.
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &predecessors[w] {
                delta[v] += (sigma[v] / sigma[w]) * (1.0 + delta[w]);
            }
            if w != s {
                scores[w] += delta[w];
            }
        }
    }

    ids.into_iter()
        .cloned()
        .zip(scores)
        .collect()
}
