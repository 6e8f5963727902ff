//! Audits: one auditor's answers against a framework.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::framework::{FrameworkDefinition, ScoringMode};
use crate::tag::QuestionTag;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameworkRef {
    pub id: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Audit {
    pub framework: FrameworkRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ScoringMode>,
    /// Free-form metadata: organization, system, auditor, date, ...
    #[serde(default)]
    pub subject: BTreeMap<String, String>,
    pub answers: BTreeMap<QuestionTag, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<QuestionTag, String>,
}

#[derive(Debug, Error)]
pub enum AuditLoadError {
    #[error("cannot read audit file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed audit document: {0}")]
    Parse(#[from] serde_json::Error),
}

/// One reason an audit cannot be scored against a framework.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationError {
    FrameworkMismatch {
        expected_id: String,
        expected_version: String,
        found_id: String,
        found_version: String,
    },
    MissingAnswer {
        question: QuestionTag,
    },
    UnknownQuestion {
        question: QuestionTag,
    },
    UnknownOption {
        question: QuestionTag,
        answer: String,
    },
}

impl ValidationError {
    /// The question this error is about, if any.
    pub fn question(&self) -> Option<QuestionTag> {
        match self {
            ValidationError::FrameworkMismatch { .. } => None,
            ValidationError::MissingAnswer { question }
            | ValidationError::UnknownQuestion { question }
            | ValidationError::UnknownOption { question, .. } => Some(*question),
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::FrameworkMismatch {
                expected_id,
                expected_version,
                found_id,
                found_version,
            } => write!(
                f,
                "audit targets framework {found_id} {found_version}, expected {expected_id} {expected_version}"
            ),
            ValidationError::MissingAnswer { question } => write!(f, "{question}: missing answer"),
            ValidationError::UnknownQuestion { question } => {
                write!(f, "{question}: not a question of this framework")
            }
            ValidationError::UnknownOption { question, answer } => {
                write!(f, "{question}: {answer:?} is not an option")
            }
        }
    }
}

impl Audit {
    pub fn from_json(text: &str) -> Result<Self, AuditLoadError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AuditLoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| AuditLoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("audit serializes");
        out.push('\n');
        out
    }

    /// An empty draft for `fw`.
    pub fn draft(fw: &FrameworkDefinition) -> Self {
        Audit {
            framework: FrameworkRef {
                id: fw.id.clone(),
                version: fw.version.clone(),
            },
            mode: None,
            subject: BTreeMap::new(),
            answers: BTreeMap::new(),
            notes: BTreeMap::new(),
        }
    }

    /// A copy of this audit with one answer replaced.
    pub fn with_answer(&self, question: QuestionTag, answer: impl Into<String>) -> Self {
        let mut next = self.clone();
        next.answers.insert(question, answer.into());
        next
    }

    pub fn mode_or(&self, fw: &FrameworkDefinition) -> ScoringMode {
        self.mode.unwrap_or(fw.default_mode)
    }
}

/// Lists every reason `audit` cannot be scored against `fw`; empty when valid.
pub fn validate_audit(fw: &FrameworkDefinition, audit: &Audit) -> Vec<ValidationError> {
    let mut errors = Vec::new();
    if audit.framework.id != fw.id || audit.framework.version != fw.version {
        errors.push(ValidationError::FrameworkMismatch {
            expected_id: fw.id.clone(),
            expected_version: fw.version.clone(),
            found_id: audit.framework.id.clone(),
            found_version: audit.framework.version.clone(),
        });
    }
    for q in &fw.questions {
        match audit.answers.get(&q.tag) {
            None => errors.push(ValidationError::MissingAnswer { question: q.tag }),
            Some(answer) if q.option(answer).is_none() => errors.push(ValidationError::UnknownOption {
                question: q.tag,
                answer: answer.clone(),
            }),
            Some(_) => {}
        }
    }
    for tag in audit.answers.keys() {
        if fw.question(*tag).is_none() {
            errors.push(ValidationError::UnknownQuestion { question: *tag });
        }
    }
    errors
}
