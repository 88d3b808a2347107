//! Course invariant checks. Total: never errors, reports every violation.

use std::collections::BTreeSet;
use std::fmt;

use super::Course;

/// One invariant violation, naming the rule and the offending record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub invariant: &'static str,
    pub locus: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.invariant, self.locus)
    }
}

/// Returns an empty list iff all `Course` invariants hold.
pub fn validate_course(course: &Course) -> Vec<Issue> {
    let mut issues = Vec::new();
    let mut seen_posts = BTreeSet::new();

    for thread in &course.threads {
        if thread.posts.is_empty() {
            issues.push(Issue {
                invariant: "thread has at least one post",
                locus: format!("thread {}", thread.thread_id),
            });
            continue;
        }
        for (i, post) in thread.posts.iter().enumerate() {
            if post.thread_id != thread.thread_id {
                issues.push(Issue {
                    invariant: "post thread_id matches its thread",
                    locus: format!("post {} in thread {}", post.post_id, thread.thread_id),
                });
            }
            if post.position != i {
                issues.push(Issue {
                    invariant: "non-contiguous positions",
                    locus: format!(
                        "thread {}: post {} at index {i} has position {}",
                        thread.thread_id, post.post_id, post.position
                    ),
                });
            }
            if !seen_posts.insert(post.post_id.clone()) {
                issues.push(Issue {
                    invariant: "post_id unique within course",
                    locus: format!("post {}", post.post_id),
                });
            }
            if !course.users.contains_key(&post.author) {
                issues.push(Issue {
                    invariant: "post author appears in users",
                    locus: format!("post {} by {}", post.post_id, post.author),
                });
            }
        }
        let sorted = thread.posts.windows(2).all(|w| {
            (w[0].timestamp, w[0].post_id.as_str()) <= (w[1].timestamp, w[1].post_id.as_str())
        });
        if !sorted {
            issues.push(Issue {
                invariant: "posts ordered by (timestamp, post_id)",
                locus: format!("thread {}", thread.thread_id),
            });
        }
    }

    for (user, grade) in &course.gradebook.entries {
        match course.role(user) {
            None => issues.push(Issue {
                invariant: "gradebook key appears in users",
                locus: format!("user {user}"),
            }),
            Some(role) if !role.is_student_like() => issues.push(Issue {
                invariant: "grade assigned to non-student",
                locus: format!("user {user} has role {role}"),
            }),
            Some(_) => {}
        }
        if !(0.0..=100.0).contains(grade) {
            issues.push(Issue {
                invariant: "grade out of range",
                locus: format!("user {user}: {grade}"),
            });
        }
    }

    issues
}
