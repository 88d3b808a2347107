//! Property tests for the spec-level invariants: deterministic ingestion,
//! event-conserving aggregation, metric identities, and statistic
//! symmetries.

use std::collections::BTreeMap;

use proptest::prelude::*;

use replynet_core::graph::{
    active_partition, build_graph, extract_reply_events, BuildOptions, SocialGraph,
};
use replynet_core::metrics::{betweenness, compute_metric_table, degrees, hits, HitsConfig};
use replynet_core::model::{parse_course, Course, Gradebook, Post, Role, Thread, UserId};
use replynet_core::oracle;
use replynet_core::stats::{
    rank_average_ties, spearman, t_tail_two_sided, welch_ttest, SpearmanConfig,
};

// ---------------------------------------------------------------------------
// Course generators

fn arb_course() -> impl Strategy<Value = Course> {
    // 2..6 students, 0..2 staff, up to 5 threads of up to 6 posts.
    (
        2usize..6,
        0usize..3,
        prop::collection::vec(prop::collection::vec(0usize..8, 1..6), 0..5),
    )
        .prop_map(|(n_students, n_staff, threads_spec)| {
            let mut users: BTreeMap<UserId, Role> = BTreeMap::new();
            let mut ids = Vec::new();
            for i in 0..n_students {
                let id = UserId::new(format!("s{i}"));
                users.insert(id.clone(), Role::Student);
                ids.push(id);
            }
            for i in 0..n_staff {
                let id = UserId::new(format!("ta{i}"));
                users.insert(id.clone(), Role::Ta);
                ids.push(id);
            }
            let threads = threads_spec
                .into_iter()
                .enumerate()
                .map(|(t, authors)| {
                    let thread_id = format!("t{t}");
                    let posts = authors
                        .into_iter()
                        .enumerate()
                        .map(|(j, a)| Post {
                            post_id: format!("{thread_id}-p{j}"),
                            thread_id: thread_id.clone(),
                            author: ids[a % ids.len()].clone(),
                            timestamp: (t * 100 + j) as i64,
                            position: j,
                        })
                        .collect();
                    Thread { thread_id, posts }
                })
                .collect();
            Course {
                course_id: "prop".into(),
                users,
                threads,
                gradebook: Gradebook::default(),
            }
        })
}

proptest! {
    // -----------------------------------------------------------------------
    // forum-model

    #[test]
    fn post_order_is_independent_of_record_order(
        mut timestamps in prop::collection::vec(0i64..50, 2..8),
        perm_seed in 0usize..100,
    ) {
        timestamps.sort_unstable();
        let make_doc = |order: &[usize]| {
            let posts: Vec<String> = order
                .iter()
                .map(|&i| {
                    format!(
                        r#"{{"post_id":"p{i}","author":"u{}","timestamp":{}}}"#,
                        i % 2,
                        timestamps[i]
                    )
                })
                .collect();
            format!(
                r#"{{"threads":[{{"thread_id":"t","posts":[{}]}}]}}"#,
                posts.join(",")
            )
        };
        let n = timestamps.len();
        let natural: Vec<usize> = (0..n).collect();
        let mut shuffled = natural.clone();
        shuffled.rotate_left(perm_seed % n);
        if perm_seed % 2 == 0 {
            shuffled.reverse();
        }
        let roster = "user_id,role\nu0,student\nu1,student\n";
        let grades = "user_id,grade\n";
        let parse = |doc: &str| {
            parse_course("c", doc.as_bytes(), roster.as_bytes(), grades.as_bytes()).unwrap()
        };
        let a = parse(&make_doc(&natural));
        let b = parse(&make_doc(&shuffled));
        prop_assert_eq!(a, b);
    }

    // -----------------------------------------------------------------------
    // graph-builder

    #[test]
    fn aggregation_conserves_event_count(course in arb_course()) {
        let graph = build_graph(&course, BuildOptions::default());
        let events: usize = course
            .threads
            .iter()
            .flat_map(extract_reply_events)
            .filter(|e| graph.nodes.contains_key(&e.source) && graph.nodes.contains_key(&e.target))
            .count();
        prop_assert_eq!(graph.total_weight() as usize, events);
    }

    #[test]
    fn build_graph_is_thread_order_invariant(course in arb_course(), rot in 0usize..5) {
        let baseline = build_graph(&course, BuildOptions::default());
        let mut shuffled = course.clone();
        if !shuffled.threads.is_empty() {
            let k = rot % shuffled.threads.len();
            shuffled.threads.rotate_left(k);
        }
        prop_assert_eq!(baseline, build_graph(&shuffled, BuildOptions::default()));
    }

    #[test]
    fn no_self_loops(course in arb_course()) {
        let graph = build_graph(&course, BuildOptions::default());
        prop_assert!(graph.edges.keys().all(|(s, t)| s != t));
    }

    #[test]
    fn active_restriction_keeps_only_posting_students(course in arb_course()) {
        let graph = build_graph(
            &course,
            BuildOptions { restrict_to_active_students: true, ..BuildOptions::default() },
        );
        let (active, _) = active_partition(&course);
        for (user, role) in &graph.nodes {
            if role.is_student_like() {
                prop_assert!(active.contains(user));
            }
        }
    }

}

// ---------------------------------------------------------------------------
// metrics-engine: the oracle comparisons and full HITS runs are slow in debug
// builds, so this block runs fewer cases.

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn degree_totals_match_edge_weight(seed in 0u64..500) {
        let graph = oracle::random_graph(seed, 12, 0.3);
        let d = degrees(&graph);
        let total_in: u64 = d.values().map(|(i, _)| i).sum();
        let total_out: u64 = d.values().map(|(_, o)| o).sum();
        prop_assert_eq!(total_in, graph.total_weight());
        prop_assert_eq!(total_out, graph.total_weight());
    }

    #[test]
    fn betweenness_matches_exhaustive_oracle(seed in 0u64..300) {
        let graph = oracle::random_graph(seed, 12, 0.3);
        let fast = betweenness(&graph);
        let slow = oracle::betweenness_exhaustive(&graph);
        for (node, expected) in &slow {
            prop_assert!((fast[node] - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn hits_fixed_point_residual_is_small(seed in 0u64..200) {
        let config = HitsConfig::default();
        let graph = oracle::random_graph(seed, 30, 0.1);
        let result = hits(&graph, &config).unwrap();
        if graph.edges.is_empty() || !result.converged {
            return Ok(());
        }
        // One more half-step must barely move either vector.
        let (hub_residual, authority_residual) = hits_residuals(&graph, &config, &result);
        prop_assert!(authority_residual < 10.0 * config.tolerance, "a residual {authority_residual}");
        prop_assert!(hub_residual < 10.0 * config.tolerance, "h residual {hub_residual}");
        // Non-negative unit vectors.
        let norm: f64 = result.hub.values().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-9);
        prop_assert!(result.hub.values().all(|&v| v >= 0.0));
        prop_assert!(result.authority.values().all(|&v| v >= 0.0));
    }

    #[test]
    fn weight_scaling_preserves_hits_and_scales_degrees(seed in 0u64..100, factor in 2u64..6) {
        let graph = oracle::random_graph(seed, 15, 0.25);
        if graph.edges.is_empty() {
            return Ok(());
        }
        let mut scaled = graph.clone();
        for w in scaled.edges.values_mut() {
            *w *= factor;
        }
        let config = HitsConfig::default();
        let base = hits(&graph, &config).unwrap();
        let scaled_result = hits(&scaled, &config).unwrap();
        for (node, v) in &base.hub {
            prop_assert!((scaled_result.hub[node] - v).abs() < 1e-8);
        }
        let base_degrees = degrees(&graph);
        for (node, (i, o)) in degrees(&scaled) {
            let (bi, bo) = base_degrees[&node];
            prop_assert_eq!(i, bi * factor);
            prop_assert_eq!(o, bo * factor);
        }
    }

    #[test]
    fn relabeling_permutes_all_metrics(seed in 0u64..100) {
        let graph = oracle::random_graph(seed, 10, 0.3);
        let relabel = |u: &UserId| UserId::new(format!("z-{u}"));
        let mut mapped = SocialGraph::default();
        for (u, r) in &graph.nodes {
            mapped.nodes.insert(relabel(u), *r);
        }
        for ((s, t), w) in &graph.edges {
            mapped.edges.insert((relabel(s), relabel(t)), *w);
        }
        let config = HitsConfig::default();
        let base = compute_metric_table(&graph, &config).unwrap();
        let renamed = compute_metric_table(&mapped, &config).unwrap();
        for (user, row) in &base.rows {
            let other = &renamed.rows[&relabel(user)];
            prop_assert_eq!(row.in_degree, other.in_degree);
            prop_assert_eq!(row.out_degree, other.out_degree);
            prop_assert!((row.betweenness - other.betweenness).abs() < 1e-12);
            prop_assert!((row.help_providing - other.help_providing).abs() < 1e-12);
            prop_assert!((row.help_receiving - other.help_receiving).abs() < 1e-12);
        }
    }
}

// ---------------------------------------------------------------------------
// stats

proptest! {
    #[test]
    fn ranks_sum_to_n_times_n_plus_one_half(values in prop::collection::vec(-100i32..100, 1..40)) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        let ranks = rank_average_ties(&values).unwrap();
        let n = values.len() as f64;
        prop_assert!((ranks.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn spearman_invariant_under_monotone_transform(
        xs in prop::collection::vec(-6.0f64..6.0, 4..25),
        ys in prop::collection::vec(-6.0f64..6.0, 4..25),
    ) {
        let n = xs.len().min(ys.len());
        let (xs, ys) = (&xs[..n], &ys[..n]);
        // Small n routes through the permutation p-value; keep rounds modest
        // so the 256-case run stays fast.
        let config = SpearmanConfig { permutation_rounds: 500, ..SpearmanConfig::default() };
        let base = match spearman(xs, ys, &config) {
            Ok(r) => r,
            Err(_) => return Ok(()),
        };
        let transformed: Vec<f64> = xs.iter().map(|v| v.exp()).collect();
        let mapped = spearman(&transformed, ys, &config).unwrap();
        prop_assert_eq!(base.rho.to_bits(), mapped.rho.to_bits());
        prop_assert_eq!(base.p_value.to_bits(), mapped.p_value.to_bits());
    }

    #[test]
    fn spearman_is_symmetric(
        xs in prop::collection::vec(-6.0f64..6.0, 4..20),
        ys in prop::collection::vec(-6.0f64..6.0, 4..20),
    ) {
        let n = xs.len().min(ys.len());
        let (xs, ys) = (&xs[..n], &ys[..n]);
        let config = SpearmanConfig { permutation_threshold: 0, ..SpearmanConfig::default() };
        if let (Ok(a), Ok(b)) = (spearman(xs, ys, &config), spearman(ys, xs, &config)) {
            prop_assert!((a.rho - b.rho).abs() < 1e-12);
            prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
        }
    }

    #[test]
    fn welch_swap_negates_t_keeps_p(
        a in prop::collection::vec(-50.0f64..50.0, 2..15),
        b in prop::collection::vec(-50.0f64..50.0, 2..15),
    ) {
        if let (Ok(ab), Ok(ba)) = (welch_ttest(&a, &b), welch_ttest(&b, &a)) {
            prop_assert!((ab.t_statistic + ba.t_statistic).abs() < 1e-9);
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        }
    }

    #[test]
    fn t_tail_bounded_and_shrinking(t in 0.0f64..20.0, df in 0.5f64..200.0) {
        let p = t_tail_two_sided(t, df).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let further = t_tail_two_sided(t + 1.0, df).unwrap();
        prop_assert!(further <= p + 1e-15);
    }
}

fn hits_residuals(
    graph: &SocialGraph,
    config: &HitsConfig,
    result: &replynet_core::metrics::HitsResult,
) -> (f64, f64) {
    let ids: Vec<&UserId> = graph.nodes.keys().collect();
    let index: BTreeMap<&UserId, usize> = ids.iter().enumerate().map(|(i, u)| (*u, i)).collect();
    let n = ids.len();
    let h: Vec<f64> = ids.iter().map(|u| result.hub[*u]).collect();
    let a: Vec<f64> = ids.iter().map(|u| result.authority[*u]).collect();

    let mut next_a = vec![0.0; n];
    let mut next_h = vec![0.0; n];
    for ((s, t), w) in &graph.edges {
        let w = if config.use_weights { *w as f64 } else { 1.0 };
        next_a[index[t]] += w * h[index[s]];
    }
    normalize(&mut next_a);
    for ((s, t), w) in &graph.edges {
        let w = if config.use_weights { *w as f64 } else { 1.0 };
        next_h[index[s]] += w * next_a[index[t]];
    }
    normalize(&mut next_h);

    let dist = |x: &[f64], y: &[f64]| {
        x.iter()
            .zip(y)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt()
    };
    (dist(&next_h, &h), dist(&next_a, &a))
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}
