//! Brute-force cross-check oracles for the graph metrics and graph builder.
//!
//! Everything here recomputes a result by a route independent of the main
//! implementations: explicit shortest-path enumeration instead of Brandes'
//! accumulation, dense matrix products instead of edge-list updates, and a
//! naive event-group-filter pass instead of [`crate::graph::build_graph`].
//! Deliberately slow; only usable on small graphs.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{BuildOptions, CountMode, SocialGraph};
use crate::metrics::{self, HitsConfig};
use crate::model::{Course, Role, UserId};

/// Betweenness by exhaustive enumeration of every shortest directed path.
pub fn betweenness_exhaustive(graph: &SocialGraph) -> BTreeMap<UserId, f64> {
    let ids: Vec<&UserId> = graph.nodes.keys().collect();
    let n = ids.len();
    let index: BTreeMap<&UserId, usize> = ids.iter().enumerate().map(|(i, u)| (*u, i)).collect();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (source, target) in graph.edges.keys() {
        adjacency[index[source]].push(index[target]);
    }

    let mut scores = vec![0.0f64; n];
    for s in 0..n {
        let dist = bfs_distances(&adjacency, s, n);
        for t in 0..n {
            if t == s || dist[t] < 0 {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            enumerate_shortest_paths(&adjacency, &dist, s, t, &mut vec![s], &mut paths);
            let sigma = paths.len() as f64;
            let mut through = vec![0usize; n];
            for path in &paths {
                for &w in &path[1..path.len() - 1] {
                    through[w] += 1;
                }
            }
            for w in 0..n {
                if w != s && w != t && through[w] > 0 {
                    scores[w] += through[w] as f64 / sigma;
                }
            }
        }
    }

    ids.into_iter().cloned().zip(scores).collect()
}

fn bfs_distances(adjacency: &[Vec<usize>], s: usize, n: usize) -> Vec<i64> {
    let mut dist = vec![-1i64; n];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if dist[w] < 0 {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

// Walks only edges that advance the BFS distance from s, so every complete
// walk reaching t is a shortest path.
fn enumerate_shortest_paths(
    adjacency: &[Vec<usize>],
    dist: &[i64],
    current: usize,
    t: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current == t {
        out.push(path.clone());
        return;
    }
    for &w in &adjacency[current] {
        if dist[w] == dist[current] + 1 && dist[w] <= dist[t] {
            path.push(w);
            enumerate_shortest_paths(adjacency, dist, w, t, path, out);
            path.pop();
        }
    }
}

/// HITS by dense-matrix power iteration.
pub fn hits_dense(
    graph: &SocialGraph,
    config: &HitsConfig,
) -> (BTreeMap<UserId, f64>, BTreeMap<UserId, f64>) {
    let ids: Vec<&UserId> = graph.nodes.keys().collect();
    let n = ids.len();
    let index: BTreeMap<&UserId, usize> = ids.iter().enumerate().map(|(i, u)| (*u, i)).collect();

    let zeros = |v: Vec<f64>| -> BTreeMap<UserId, f64> {
        ids.iter().map(|u| (*u).clone()).zip(v).collect()
    };
    if graph.edges.is_empty() {
        return (zeros(vec![0.0; n]), zeros(vec![0.0; n]));
    }

    let mut w = vec![vec![0.0f64; n]; n];
    for ((s, t), weight) in &graph.edges {
        w[index[s]][index[t]] = if config.use_weights { *weight as f64 } else { 1.0 };
    }

    let normalize = |v: &mut Vec<f64>| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
    };

    let mut hub = vec![1.0 / (n as f64).sqrt(); n];
    let mut authority = hub.clone();
    for _ in 0..config.max_iterations {
        let mut next_authority = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                next_authority[j] += w[i][j] * hub[i];
            }
        }
        normalize(&mut next_authority);
        let mut next_hub = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                next_hub[i] += w[i][j] * next_authority[j];
            }
        }
        normalize(&mut next_hub);

        let change = next_hub
            .iter()
            .zip(&hub)
            .chain(next_authority.iter().zip(&authority))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        hub = next_hub;
        authority = next_authority;
        if change < config.tolerance {
            break;
        }
    }

    (zeros(hub), zeros(authority))
}

/// Degrees by per-node scans over the whole edge list.
pub fn degrees_naive(graph: &SocialGraph) -> BTreeMap<UserId, (u64, u64)> {
    graph
        .nodes
        .keys()
        .map(|user| {
            let incoming = graph
                .edges
                .iter()
                .filter(|((_, t), _)| t == user)
                .map(|(_, w)| *w)
                .sum();
            let outgoing = graph
                .edges
                .iter()
                .filter(|((s, _), _)| s == user)
                .map(|(_, w)| *w)
                .sum();
            (user.clone(), (incoming, outgoing))
        })
        .collect()
}

/// Graph construction the slow way: enumerate raw events post by post,
/// then group and filter.
pub fn build_graph_naive(course: &Course, options: BuildOptions) -> SocialGraph {
    let mut authored: BTreeMap<&UserId, usize> = BTreeMap::new();
    for post in course.posts() {
        *authored.entry(&post.author).or_insert(0) += 1;
    }

    let keep = |user: &UserId| -> bool {
        match course.role(user) {
            None => false,
            Some(Role::Unknown) => !options.drop_unknown,
            Some(Role::Ta) | Some(Role::Instructor) => options.include_staff,
            Some(Role::Student) | Some(Role::PeerTutor) => {
                !options.restrict_to_active_students || authored.contains_key(user)
            }
        }
    };

    let mut graph = SocialGraph::default();
    for (user, role) in &course.users {
        if keep(user) {
            graph.nodes.insert(user.clone(), *role);
        }
    }

    for thread in &course.threads {
        for post in &thread.posts {
            if post.position == 0 {
                continue;
            }
            let prior = &thread.posts[..post.position];
            let mut targets: Vec<UserId> = prior.iter().map(|p| p.author.clone()).collect();
            if options.count_mode == CountMode::DistinctParticipants {
                targets.sort();
                targets.dedup();
            }
            for target in targets {
                if target != post.author && keep(&post.author) && keep(&target) {
                    *graph
                        .edges
                        .entry((post.author.clone(), target))
                        .or_insert(0) += 1;
                }
            }
        }
    }
    graph
}

/// A reproducible random weighted digraph for oracle trials.
pub fn random_graph(seed: u64, max_nodes: usize, edge_probability: f64) -> SocialGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_nodes.max(2));
    let mut graph = SocialGraph::default();
    let ids: Vec<UserId> = (0..n).map(|i| UserId::new(format!("u{i:02}"))).collect();
    for id in &ids {
        graph.nodes.insert(id.clone(), Role::Student);
    }
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.gen_bool(edge_probability) {
                let weight = rng.gen_range(1..=5);
                graph.edges.insert((ids[s].clone(), ids[t].clone()), weight);
            }
        }
    }
    graph
}

#[derive(Debug, Error)]
#[error("oracle mismatch: metric {metric}, graph seed {seed}, node {node}: got {got}, expected {expected}")]
pub struct OracleMismatch {
    pub metric: &'static str,
    pub seed: u64,
    pub node: UserId,
    pub got: f64,
    pub expected: f64,
}

/// Run betweenness, HITS, and degree cross-checks on `trials` random
/// graphs. Returns the number of graphs checked.
pub fn run_metric_checks(
    max_nodes: usize,
    trials: usize,
    seed: u64,
) -> Result<usize, OracleMismatch> {
    let hits_config = HitsConfig::default();
    for trial in 0..trials {
        let graph_seed = seed.wrapping_add(trial as u64);
        let graph = random_graph(graph_seed, max_nodes, 0.3);

        let fast = metrics::betweenness(&graph);
        let slow = betweenness_exhaustive(&graph);
        for (node, expected) in &slow {
            let got = fast[node];
            if (got - expected).abs() > 1e-9 {
                return Err(OracleMismatch {
                    metric: "betweenness",
                    seed: graph_seed,
                    node: node.clone(),
                    got,
                    expected: *expected,
                });
            }
        }

        let fast = metrics::hits(&graph, &hits_config).expect("valid config");
        let (hub, authority) = hits_dense(&graph, &hits_config);
        for (label, fast_map, slow_map) in [
            ("hits_hub", &fast.hub, &hub),
            ("hits_authority", &fast.authority, &authority),
        ] {
            for (node, expected) in slow_map {
                let got = fast_map[node];
                if (got - expected).abs() > 1e-8 {
                    return Err(OracleMismatch {
                        metric: label,
                        seed: graph_seed,
                        node: node.clone(),
                        got,
                        expected: *expected,
                    });
                }
            }
        }

        let fast = metrics::degrees(&graph);
        for (node, (in_expected, out_expected)) in degrees_naive(&graph) {
            let (in_got, out_got) = fast[&node];
            if in_got != in_expected || out_got != out_expected {
                return Err(OracleMismatch {
                    metric: "degrees",
                    seed: graph_seed,
                    node,
                    got: in_got as f64,
                    expected: in_expected as f64,
                });
            }
        }
    }
    Ok(trials)
}

#[derive(Debug, Error)]
#[error("graph construction mismatch: course seed {seed}, options {options:?}")]
pub struct BuilderMismatch {
    pub seed: u64,
    pub options: BuildOptions,
}

/// Cross-check [`crate::graph::build_graph`] against the naive
/// event-group-filter pass on random synthetic courses, across every
/// option combination. Returns the number of courses checked.
pub fn run_builder_checks(trials: usize, seed: u64) -> Result<usize, Box<BuilderMismatch>> {
    for trial in 0..trials {
        let course_seed = seed.wrapping_add(trial as u64).wrapping_mul(0x9e37);
        let course = crate::synth::generate_course(&crate::synth::SynthParams {
            seed: course_seed,
            n_students: 15,
            n_staff: 2,
            n_peer_tutors: 2,
            n_threads: 8,
            mean_posts_per_thread: 3.0,
            activity_grade_coupling: 0.3,
            inactive_fraction: 0.2,
            staff_answer_share: 0.4,
        })
        .expect("synth params valid");
        for drop_unknown in [false, true] {
            for restrict in [false, true] {
                for staff in [false, true] {
                    for mode in [CountMode::DistinctParticipants, CountMode::PriorPosts] {
                        let options = BuildOptions {
                            drop_unknown,
                            restrict_to_active_students: restrict,
                            include_staff: staff,
                            count_mode: mode,
                        };
                        let fast = crate::graph::build_graph(&course, options);
                        let slow = build_graph_naive(&course, options);
                        if fast != slow {
                            return Err(Box::new(BuilderMismatch {
                                seed: course_seed,
                                options,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(trials)
}
