//! Deterministic synthetic-course generator.
//!
//! Stands in for real course data: post counts follow a heavy-tailed
//! distribution, a configurable fraction of students never posts, and
//! grades are rank-coupled to activity so a planted activity-grade
//! correlation can be recovered end to end.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Course, Gradebook, Post, Role, Thread, UserId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub seed: u64,
    pub n_students: usize,
    pub n_staff: usize,
    pub n_peer_tutors: usize,
    pub n_threads: usize,
    pub mean_posts_per_thread: f64,
    /// Target Spearman correlation between post count and grade.
    pub activity_grade_coupling: f64,
    /// Fraction of students who author zero posts.
    pub inactive_fraction: f64,
    /// Probability a reply is authored by staff.
    pub staff_answer_share: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            seed: 0,
            n_students: 200,
            n_staff: 3,
            n_peer_tutors: 5,
            n_threads: 200,
            mean_posts_per_thread: 8.0,
            activity_grade_coupling: 0.4,
            inactive_fraction: 0.3,
            staff_answer_share: 0.25,
        }
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("unsatisfiable parameters: {0}")]
    Unsatisfiable(String),
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |msg: &str| Err(SynthError::InvalidParams(msg.to_owned()));
        if self.n_students == 0 {
            return fail("n_students must be positive");
        }
        if self.n_staff == 0 {
            return fail("n_staff must be positive");
        }
        if self.n_peer_tutors > self.n_students {
            return fail("n_peer_tutors must not exceed n_students");
        }
        if self.n_threads == 0 {
            return fail("n_threads must be positive");
        }
        if self.mean_posts_per_thread <= 0.0 {
            return fail("mean_posts_per_thread must be positive");
        }
        if !(-1.0..=1.0).contains(&self.activity_grade_coupling) {
            return fail("activity_grade_coupling must be in [-1, 1]");
        }
        if !(0.0..1.0).contains(&self.inactive_fraction) {
            return fail("inactive_fraction must be in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.staff_answer_share) {
            return fail("staff_answer_share must be in [0, 1]");
        }
        Ok(())
    }
}

pub fn generate_course(params: &SynthParams) -> Result<Course, SynthError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let n = params.n_students;
    let student_ids: Vec<UserId> = (1..=n)
        .map(|i| UserId::new(format!("s{i:04}")))
        .collect();
    let staff_ids: Vec<UserId> = (1..=params.n_staff)
        .map(|i| UserId::new(format!("staff{i:02}")))
        .collect();

    let n_inactive = (params.inactive_fraction * n as f64).ceil() as usize;
    let n_active = n - n_inactive;
    if n_active == 0 {
        return Err(SynthError::Unsatisfiable(
            "no active students left to start threads".into(),
        ));
    }

    let mut shuffled: Vec<usize> = (0..n).collect();
    shuffled.shuffle(&mut rng);
    let active_indices: Vec<usize> = {
        let mut v = shuffled[..n_active].to_vec();
        v.sort_unstable();
        v
    };
    let mut is_active = vec![false; n];
    for &i in &active_indices {
        is_active[i] = true;
    }

    // Heavy-tailed activity: Pareto-like weights for active students.
    let weights: Vec<f64> = active_indices
        .iter()
        .map(|_| {
            let u: f64 = rng.gen_range(1e-6..1.0);
            (1.0 - u).powf(-1.0 / 2.0)
        })
        .collect();
    let starter_dist = WeightedIndex::new(&weights)
        .map_err(|e| SynthError::Unsatisfiable(e.to_string()))?;

    let extra_mean = (params.mean_posts_per_thread - 1.0).max(0.0);
    let poisson = if extra_mean > 0.0 {
        Some(Poisson::new(extra_mean).map_err(|e| SynthError::InvalidParams(e.to_string()))?)
    } else {
        None
    };

    let mut timestamp = 1_000_000i64;
    let mut threads = Vec::with_capacity(params.n_threads);
    for k in 1..=params.n_threads {
        let thread_id = format!("t{k:04}");
        let starter = &student_ids[active_indices[starter_dist.sample(&mut rng)]];
        let mut authors = vec![starter.clone()];
        let n_replies = poisson
            .map(|p| p.sample(&mut rng) as usize)
            .unwrap_or(0);
        for _ in 0..n_replies {
            let author = if rng.gen_bool(params.staff_answer_share) {
                staff_ids[rng.gen_range(0..staff_ids.len())].clone()
            } else {
                student_ids[active_indices[starter_dist.sample(&mut rng)]].clone()
            };
            authors.push(author);
        }
        let posts = authors
            .into_iter()
            .enumerate()
            .map(|(j, author)| {
                timestamp += 1;
                Post {
                    post_id: format!("{thread_id}-p{j:03}"),
                    thread_id: thread_id.clone(),
                    author,
                    timestamp,
                    position: j,
                }
            })
            .collect();
        threads.push(Thread { thread_id, posts });
    }

    // Every active student must author at least one post; give the silent
    // ones a reply in a random thread.
    let mut post_counts = vec![0usize; n];
    for thread in &threads {
        for post in &thread.posts {
            if let Some(i) = student_index(&post.author) {
                post_counts[i] += 1;
            }
        }
    }
    for &i in &active_indices {
        if post_counts[i] == 0 {
            let t = rng.gen_range(0..threads.len());
            let thread = &mut threads[t];
            timestamp += 1;
            let position = thread.posts.len();
            thread.posts.push(Post {
                post_id: format!("{}-p{position:03}", thread.thread_id),
                thread_id: thread.thread_id.clone(),
                author: student_ids[i].clone(),
                timestamp,
                position,
            });
            post_counts[i] = 1;
        }
    }

    // Grades: a Gaussian-copula rank blend of activity and noise. The
    // Pearson level rho'' = 2 sin(pi c / 6) yields Spearman c for
    // bivariate normal latents.
    let c = params.activity_grade_coupling;
    let rho = (2.0 * (std::f64::consts::PI * c / 6.0).sin()).clamp(-1.0, 1.0);
    let normal = Normal::new(0.0, 1.0).unwrap();

    // Normal scores via order statistics: the k-th smallest draw goes to
    // the student with the k-th smallest (post count, jitter) pair.
    let mut activity_order: Vec<usize> = (0..n).collect();
    let jitter: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    activity_order.sort_by(|&a, &b| {
        (post_counts[a], jitter[a])
            .partial_cmp(&(post_counts[b], jitter[b]))
            .unwrap()
    });
    let mut scores: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
    scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut activity_score = vec![0.0; n];
    for (k, &student) in activity_order.iter().enumerate() {
        activity_score[student] = scores[k];
    }

    let latent: Vec<f64> = (0..n)
        .map(|i| rho * activity_score[i] + (1.0 - rho * rho).sqrt() * normal.sample(&mut rng))
        .collect();
    let mut latent_order: Vec<usize> = (0..n).collect();
    latent_order.sort_by(|&a, &b| latent[a].partial_cmp(&latent[b]).unwrap());
    let mut grades = vec![0.0; n];
    for (k, &student) in latent_order.iter().enumerate() {
        grades[student] = 40.0 + 60.0 * (k as f64 + 0.5) / n as f64;
    }

    // Peer tutors: the most active students, matching how tutors are
    // recruited from strong contributors.
    let mut by_activity: Vec<usize> = (0..n).collect();
    by_activity.sort_by(|&a, &b| (post_counts[b], a).cmp(&(post_counts[a], b)));
    let tutor_set: std::collections::BTreeSet<usize> =
        by_activity[..params.n_peer_tutors].iter().copied().collect();

    let mut users = std::collections::BTreeMap::new();
    for (i, id) in student_ids.iter().enumerate() {
        let role = if tutor_set.contains(&i) {
            Role::PeerTutor
        } else {
            Role::Student
        };
        users.insert(id.clone(), role);
    }
    for (i, id) in staff_ids.iter().enumerate() {
        let role = if i == 0 { Role::Instructor } else { Role::Ta };
        users.insert(id.clone(), role);
    }

    let gradebook = Gradebook {
        entries: student_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), (grades[i] * 100.0).round() / 100.0))
            .collect(),
    };

    Ok(Course {
        course_id: format!("synth-{}", params.seed),
        users,
        threads,
        gradebook,
    })
}

fn student_index(user: &UserId) -> Option<usize> {
    user.as_str()
        .strip_prefix('s')
        .and_then(|d| d.parse::<usize>().ok())
        .map(|i| i - 1)
}
