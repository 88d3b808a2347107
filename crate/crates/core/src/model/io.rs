//! Ingestion and serialization of the external file formats.
//!
//! Threads arrive as JSON, roster and grades as RFC 4180 CSV. Parsing
//! normalizes each thread to (timestamp, post_id) order, assigns positions,
//! and rejects anything `validate_course` would flag, so a successfully
//! parsed course always validates clean.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::validate::validate_course;
use super::{Course, Gradebook, Post, Role, Thread, UserId};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("threads document: {0}")]
    ThreadsJson(#[from] serde_json::Error),
    #[error("{document} record {record}: {message}")]
    Csv {
        document: &'static str,
        record: usize,
        message: String,
    },
    #[error("thread {thread_id}: {message}")]
    Structural { thread_id: String, message: String },
    #[error("duplicate post_id {post_id} (thread {thread_id})")]
    DuplicatePost { post_id: String, thread_id: String },
    #[error("duplicate thread_id {0}")]
    DuplicateThread(String),
    #[error("roster record {record}: unknown role {role:?}")]
    UnknownRole { record: usize, role: String },
    #[error("duplicate roster entry for user {0}")]
    DuplicateRosterEntry(UserId),
    #[error("duplicate grade entry for user {0}")]
    DuplicateGradeEntry(UserId),
    #[error("grade out of range: user {user} has grade {grade} (expected 0..=100)")]
    GradeOutOfRange { user: UserId, grade: f64 },
    #[error("course failed validation: {0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

// Wire schema for the threads document.
#[derive(Serialize, Deserialize)]
struct ThreadsDoc {
    threads: Vec<ThreadRec>,
}

#[derive(Serialize, Deserialize)]
struct ThreadRec {
    thread_id: String,
    posts: Vec<PostRec>,
}

#[derive(Serialize, Deserialize)]
struct PostRec {
    post_id: String,
    author: String,
    timestamp: i64,
}

/// Parse and cross-validate the three course documents.
///
/// Post authors absent from the roster are added as `Unknown` users so that
/// anonymous activity survives ingestion and can be filtered downstream.
pub fn parse_course(
    course_id: &str,
    threads_document: impl Read,
    roster_document: impl Read,
    grades_document: impl Read,
) -> Result<Course, ParseError> {
    let doc: ThreadsDoc = serde_json::from_reader(threads_document)?;

    let mut users = parse_roster(roster_document)?;

    let mut seen_threads = BTreeSet::new();
    let mut seen_posts: BTreeMap<String, String> = BTreeMap::new();
    let mut threads = Vec::with_capacity(doc.threads.len());
    for rec in doc.threads {
        if !seen_threads.insert(rec.thread_id.clone()) {
            return Err(ParseError::DuplicateThread(rec.thread_id));
        }
        if rec.posts.is_empty() {
            return Err(ParseError::Structural {
                thread_id: rec.thread_id,
                message: "thread has no posts".into(),
            });
        }
        let mut posts: Vec<Post> = rec
            .posts
            .into_iter()
            .map(|p| Post {
                post_id: p.post_id,
                thread_id: rec.thread_id.clone(),
                author: UserId(p.author),
                timestamp: p.timestamp,
                position: 0,
            })
            .collect();
        // Deterministic thread order: timestamp with post_id tiebreak.
        posts.sort_by(|a, b| {
            (a.timestamp, a.post_id.as_str()).cmp(&(b.timestamp, b.post_id.as_str()))
        });
        for (i, post) in posts.iter_mut().enumerate() {
            post.position = i;
            if let Some(other) = seen_posts.insert(post.post_id.clone(), rec.thread_id.clone()) {
                let _ = other;
                return Err(ParseError::DuplicatePost {
                    post_id: post.post_id.clone(),
                    thread_id: rec.thread_id.clone(),
                });
            }
            users.entry(post.author.clone()).or_insert(Role::Unknown);
        }
        threads.push(Thread {
            thread_id: rec.thread_id,
            posts,
        });
    }

    let gradebook = parse_grades(grades_document)?;

    let course = Course {
        course_id: course_id.to_owned(),
        users,
        threads,
        gradebook,
    };

    let issues = validate_course(&course);
    if let Some(first) = issues.first() {
        return Err(ParseError::Invalid(first.to_string()));
    }
    Ok(course)
}

fn parse_roster(reader: impl Read) -> Result<BTreeMap<UserId, Role>, ParseError> {
    let mut users = BTreeMap::new();
    let mut csv_reader = csv::Reader::from_reader(reader);
    for (idx, row) in csv_reader.records().enumerate() {
        let record = idx + 1;
        let row = row.map_err(|e| ParseError::Csv {
            document: "roster",
            record,
            message: e.to_string(),
        })?;
        let (user_field, role_field) = match (row.get(0), row.get(1)) {
            (Some(u), Some(r)) if !u.is_empty() => (u, r),
            _ => {
                return Err(ParseError::Csv {
                    document: "roster",
                    record,
                    message: "expected user_id,role".into(),
                })
            }
        };
        let role = Role::parse(role_field).ok_or_else(|| ParseError::UnknownRole {
            record,
            role: role_field.to_owned(),
        })?;
        let user = UserId::new(user_field);
        if users.insert(user.clone(), role).is_some() {
            return Err(ParseError::DuplicateRosterEntry(user));
        }
    }
    Ok(users)
}

fn parse_grades(reader: impl Read) -> Result<Gradebook, ParseError> {
    let mut entries = BTreeMap::new();
    let mut csv_reader = csv::Reader::from_reader(reader);
    for (idx, row) in csv_reader.records().enumerate() {
        let record = idx + 1;
        let row = row.map_err(|e| ParseError::Csv {
            document: "grades",
            record,
            message: e.to_string(),
        })?;
        let (user_field, grade_field) = match (row.get(0), row.get(1)) {
            (Some(u), Some(g)) if !u.is_empty() => (u, g),
            _ => {
                return Err(ParseError::Csv {
                    document: "grades",
                    record,
                    message: "expected user_id,grade".into(),
                })
            }
        };
        let grade: f64 = grade_field.parse().map_err(|_| ParseError::Csv {
            document: "grades",
            record,
            message: format!("not a decimal grade: {grade_field:?}"),
        })?;
        let user = UserId::new(user_field);
        if !(0.0..=100.0).contains(&grade) {
            return Err(ParseError::GradeOutOfRange { user, grade });
        }
        if entries.insert(user.clone(), grade).is_some() {
            return Err(ParseError::DuplicateGradeEntry(user));
        }
    }
    Ok(Gradebook { entries })
}

/// Render the threads document. Output is deterministic: threads in stored
/// order, posts in position order.
pub fn serialize_threads(course: &Course) -> String {
    let doc = ThreadsDoc {
        threads: course
            .threads
            .iter()
            .map(|t| ThreadRec {
                thread_id: t.thread_id.clone(),
                posts: t
                    .posts
                    .iter()
                    .map(|p| PostRec {
                        post_id: p.post_id.clone(),
                        author: p.author.0.clone(),
                        timestamp: p.timestamp,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("threads doc serializes");
    out.push('\n');
    out
}

/// Render the roster CSV, sorted by user id.
pub fn serialize_roster(course: &Course) -> String {
    let mut out = String::from("user_id,role\n");
    for (user, role) in &course.users {
        out.push_str(&format!("{user},{role}\n"));
    }
    out
}

/// Render the grades CSV, sorted by user id.
pub fn serialize_grades(course: &Course) -> String {
    let mut out = String::from("user_id,grade\n");
    for (user, grade) in &course.gradebook.entries {
        out.push_str(&format!("{user},{grade}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_docs() -> (&'static str, &'static str, &'static str) {
        let threads = r#"{"threads":[{"thread_id":"t1","posts":[
            {"post_id":"p1","author":"alice","timestamp":100},
            {"post_id":"p2","author":"bob","timestamp":200}
        ]}]}"#;
        let roster = "user_id,role\nalice,student\nbob,student\n";
        let grades = "user_id,grade\nalice,90\nbob,85.5\n";
        (threads, roster, grades)
    }

    #[test]
    fn minimal_course_parses() {
        let (t, r, g) = minimal_docs();
        let course = parse_course("c1", t.as_bytes(), r.as_bytes(), g.as_bytes()).unwrap();
        assert_eq!(course.users.len(), 2);
        assert_eq!(course.threads.len(), 1);
        assert_eq!(course.gradebook.len(), 2);
        assert_eq!(course.threads[0].posts[0].position, 0);
        assert_eq!(course.threads[0].posts[1].position, 1);
    }

    #[test]
    fn grade_out_of_range_rejected() {
        let (t, r, _) = minimal_docs();
        let g = "user_id,grade\nalice,104.5\n";
        let err = parse_course("c1", t.as_bytes(), r.as_bytes(), g.as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::GradeOutOfRange { .. }), "{err}");
    }

    #[test]
    fn equal_timestamps_break_ties_by_post_id() {
        let threads = r#"{"threads":[{"thread_id":"t1","posts":[
            {"post_id":"pB","author":"alice","timestamp":100},
            {"post_id":"pA","author":"bob","timestamp":100}
        ]}]}"#;
        let roster = "user_id,role\nalice,student\nbob,student\n";
        let grades = "user_id,grade\n";
        let parse = || {
            parse_course(
                "c1",
                threads.as_bytes(),
                roster.as_bytes(),
                grades.as_bytes(),
            )
            .unwrap()
        };
        let course = parse();
        assert_eq!(course.threads[0].posts[0].post_id, "pA");
        assert_eq!(
            serialize_threads(&course),
            serialize_threads(&parse()),
            "re-parse must be byte-stable"
        );
    }

    #[test]
    fn unrostered_author_becomes_unknown() {
        let (t, _, _) = minimal_docs();
        let roster = "user_id,role\nalice,student\n";
        let grades = "user_id,grade\n";
        let course = parse_course("c1", t.as_bytes(), roster.as_bytes(), grades.as_bytes()).unwrap();
        assert_eq!(course.role(&UserId::from("bob")), Some(Role::Unknown));
    }

    #[test]
    fn duplicate_post_id_rejected() {
        let threads = r#"{"threads":[{"thread_id":"t1","posts":[
            {"post_id":"p1","author":"alice","timestamp":100},
            {"post_id":"p1","author":"bob","timestamp":200}
        ]}]}"#;
        let roster = "user_id,role\nalice,student\nbob,student\n";
        let err = parse_course(
            "c1",
            threads.as_bytes(),
            roster.as_bytes(),
            "user_id,grade\n".as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::DuplicatePost { .. }));
    }

    #[test]
    fn grade_for_staff_rejected() {
        let (t, _, _) = minimal_docs();
        let roster = "user_id,role\nalice,student\nbob,ta\n";
        let grades = "user_id,grade\nbob,95\n";
        let err =
            parse_course("c1", t.as_bytes(), roster.as_bytes(), grades.as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::Invalid(_)), "{err}");
    }

    #[test]
    fn serialize_parse_round_trip_is_fixed_point() {
        let (t, r, g) = minimal_docs();
        let course = parse_course("c1", t.as_bytes(), r.as_bytes(), g.as_bytes()).unwrap();
        let reparsed = parse_course(
            "c1",
            serialize_threads(&course).as_bytes(),
            serialize_roster(&course).as_bytes(),
            serialize_grades(&course).as_bytes(),
        )
        .unwrap();
        assert_eq!(course, reparsed);
    }
}
