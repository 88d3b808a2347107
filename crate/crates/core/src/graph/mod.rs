//! Reply-event extraction and social-graph construction.
//!
//! Any user posting on a thread is treated as replying to everyone who
//! participated before them in that thread. Events aggregate into one
//! weighted edge per ordered user pair.

mod export;

pub use export::{to_dot, to_graphml};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{Course, Role, Thread, UserId};

/// One directed interaction instance: `source` replied in a thread after
/// `target` had posted there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplyEvent {
    pub source: UserId,
    pub target: UserId,
    pub thread_id: String,
    /// The replying post.
    pub post_id: String,
}

/// How many events a replying post generates when a prior user posted
/// multiple times in the thread.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// One event per distinct prior participant (default).
    #[default]
    DistinctParticipants,
    /// One event per prior post.
    PriorPosts,
}

/// Node-filtering and counting options for [`build_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Drop anonymous (Unknown-role) users.
    pub drop_unknown: bool,
    /// Keep only students who authored at least one post (staff unaffected).
    pub restrict_to_active_students: bool,
    /// Keep TA and instructor nodes.
    pub include_staff: bool,
    pub count_mode: CountMode,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            drop_unknown: true,
            restrict_to_active_students: false,
            include_staff: true,
            count_mode: CountMode::default(),
        }
    }
}

/// Directed graph with integer-weighted aggregated reply edges.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocialGraph {
    pub nodes: BTreeMap<UserId, Role>,
    pub edges: BTreeMap<(UserId, UserId), u64>,
}

impl SocialGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn weight(&self, source: &UserId, target: &UserId) -> u64 {
        self.edges
            .get(&(source.clone(), target.clone()))
            .copied()
            .unwrap_or(0)
    }
}

/// Extract reply events from one thread using the default counting mode.
pub fn extract_reply_events(thread: &Thread) -> Vec<ReplyEvent> {
    extract_reply_events_with(thread, CountMode::DistinctParticipants)
}

/// Extract reply events from one thread.
///
/// For each post at position `i >= 1`, emits events from its author to the
/// prior participants of the thread, never to the author themself. Output
/// order is deterministic: by replying post position, then target user id.
pub fn extract_reply_events_with(thread: &Thread, mode: CountMode) -> Vec<ReplyEvent> {
    let mut events = Vec::new();
    for (i, post) in thread.posts.iter().enumerate().skip(1) {
        let prior = &thread.posts[..i];
        let mut targets: Vec<&UserId> = match mode {
            CountMode::DistinctParticipants => prior
                .iter()
                .map(|p| &p.author)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            CountMode::PriorPosts => {
                let mut t: Vec<&UserId> = prior.iter().map(|p| &p.author).collect();
                t.sort();
                t
            }
        };
        targets.retain(|t| **t != post.author);
        events.extend(targets.into_iter().map(|target| ReplyEvent {
            source: post.author.clone(),
            target: target.clone(),
            thread_id: thread.thread_id.clone(),
            post_id: post.post_id.clone(),
        }));
    }
    events
}

/// Build the weighted social graph for a course.
///
/// Nodes are the course users surviving the option filters; isolated
/// survivors stay in the graph with degree zero. Edges aggregate reply
/// events whose endpoints both survive.
pub fn build_graph(course: &Course, options: BuildOptions) -> SocialGraph {
    let active = if options.restrict_to_active_students {
        Some(active_partition(course).0)
    } else {
        None
    };

    let nodes: BTreeMap<UserId, Role> = course
        .users
        .iter()
        .filter(|(user, role)| match role {
            Role::Unknown => !options.drop_unknown,
            Role::Ta | Role::Instructor => options.include_staff,
            Role::Student | Role::PeerTutor => active
                .as_ref()
                .map(|set| set.contains(*user))
                .unwrap_or(true),
        })
        .map(|(user, role)| (user.clone(), *role))
        .collect();

    let mut edges: BTreeMap<(UserId, UserId), u64> = BTreeMap::new();
    for thread in &course.threads {
        for event in extract_reply_events_with(thread, options.count_mode) {
            if nodes.contains_key(&event.source) && nodes.contains_key(&event.target) {
                *edges.entry((event.source, event.target)).or_insert(0) += 1;
            }
        }
    }

    SocialGraph { nodes, edges }
}

/// Split the graded population (students and peer tutors) into forum
/// contributors and non-contributors. Staff and Unknown users appear in
/// neither set.
pub fn active_partition(course: &Course) -> (BTreeSet<UserId>, BTreeSet<UserId>) {
    let authors: BTreeSet<&UserId> = course.posts().map(|p| &p.author).collect();
    let mut active = BTreeSet::new();
    let mut non_active = BTreeSet::new();
    for (user, role) in &course.users {
        if role.is_student_like() {
            if authors.contains(user) {
                active.insert(user.clone());
            } else {
                non_active.insert(user.clone());
            }
        }
    }
    (active, non_active)
}
