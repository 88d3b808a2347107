//! Domain types for courses, users, threads, posts, and grades.
//!
//! A [`Course`] is immutable after construction and safe to share read-only
//! across threads. Ingestion ([`parse_course`]) normalizes post order and
//! rejects any input that would violate the type invariants, so downstream
//! code can assume a valid course.

mod io;
mod validate;

pub use io::{parse_course, serialize_grades, serialize_roster, serialize_threads};
pub use validate::{validate_course, Issue};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Opaque user identifier, unique within a course.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub String);

impl UserId {
    pub fn new(value: impl Into<String>) -> Self {
        UserId(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UserId {
    fn from(value: &str) -> Self {
        UserId(value.to_owned())
    }
}

/// Course role of a participant. `Unknown` holds anonymous posters, which are
/// kept through ingestion and filtered downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Student,
    PeerTutor,
    Ta,
    Instructor,
    Unknown,
}

impl Role {
    /// Students and peer tutors are the graded population.
    pub fn is_student_like(self) -> bool {
        matches!(self, Role::Student | Role::PeerTutor)
    }

    /// TAs and instructors.
    pub fn is_staff(self) -> bool {
        matches!(self, Role::Ta | Role::Instructor)
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s.to_ascii_lowercase().as_str() {
            "student" => Some(Role::Student),
            "peer_tutor" => Some(Role::PeerTutor),
            "ta" => Some(Role::Ta),
            "instructor" => Some(Role::Instructor),
            "unknown" => Some(Role::Unknown),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Student => "student",
            Role::PeerTutor => "peer_tutor",
            Role::Ta => "ta",
            Role::Instructor => "instructor",
            Role::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single forum post within a thread.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub post_id: String,
    pub thread_id: String,
    pub author: UserId,
    /// UTC seconds since epoch.
    pub timestamp: i64,
    /// 0-based index within the thread's (timestamp, post_id) order.
    pub position: usize,
}

/// An ordered discussion thread. `posts[0]` is the thread starter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thread {
    pub thread_id: String,
    pub posts: Vec<Post>,
}

impl Thread {
    pub fn starter(&self) -> &Post {
        &self.posts[0]
    }
}

/// Final grades, keyed by user. Only students and peer tutors carry grades.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Gradebook {
    pub entries: BTreeMap<UserId, f64>,
}

impl Gradebook {
    pub fn get(&self, user: &UserId) -> Option<f64> {
        self.entries.get(user).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One ingested course: roster, threads, and gradebook.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Course {
    pub course_id: String,
    pub users: BTreeMap<UserId, Role>,
    pub threads: Vec<Thread>,
    pub gradebook: Gradebook,
}

impl Course {
    pub fn role(&self, user: &UserId) -> Option<Role> {
        self.users.get(user).copied()
    }

    /// All posts across all threads, in thread order.
    pub fn posts(&self) -> impl Iterator<Item = &Post> {
        self.threads.iter().flat_map(|t| t.posts.iter())
    }

    /// Users with Role Student or PeerTutor.
    pub fn students(&self) -> impl Iterator<Item = &UserId> {
        self.users
            .iter()
            .filter(|(_, role)| role.is_student_like())
            .map(|(id, _)| id)
    }
}
