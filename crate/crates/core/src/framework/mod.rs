//! Declarative scoring frameworks: questions, weights, formulas, principles
//! and the theory-support matrix.

mod builtin;
mod lint;
mod matrix;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::{builtin_ers_v1, ERS_V1_ID, ERS_V1_VERSION, THEORIES};
pub use lint::{lint_framework, LintFinding, LintKind, Severity};
pub use matrix::{
    support_level, LookupError, MatrixRow, Principle, PrincipleCode, PrincipleCodeError, PrincipleFamily, SupportLevel,
    TheorySupportMatrix,
};

use crate::formula::FormulaExpr;
use crate::tag::{DimensionSymbol, QuestionTag};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoringMode {
    /// Every reference evaluates to the chosen option's numeric value.
    #[default]
    Literal,
    /// `gate(Q)` references evaluate to 1 if the answer is the question's
    /// gate answer and 0 otherwise.
    Gated,
}

impl ScoringMode {
    pub const ALL: [ScoringMode; 2] = [ScoringMode::Literal, ScoringMode::Gated];

    pub fn as_str(self) -> &'static str {
        match self {
            ScoringMode::Literal => "literal",
            ScoringMode::Gated => "gated",
        }
    }
}

impl fmt::Display for ScoringMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoringMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(ScoringMode::Literal),
            "gated" => Ok(ScoringMode::Gated),
            other => Err(format!("unknown scoring mode {other:?} (expected literal or gated)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerOption {
    pub key: String,
    /// Risk contribution when this answer is chosen.
    pub value: Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Taken from the framework's published source.
    Published,
    /// Chosen by the framework maintainers.
    Curated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub tag: QuestionTag,
    pub text: String,
    pub options: Vec<AnswerOption>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_answer: Option<String>,
    #[serde(default)]
    pub principle_codes: Vec<PrincipleCode>,
    pub provenance: Provenance,
}

impl Question {
    pub fn option(&self, key: &str) -> Option<&AnswerOption> {
        self.options.iter().find(|o| o.key == key)
    }

    pub fn option_index(&self, key: &str) -> Option<usize> {
        self.options.iter().position(|o| o.key == key)
    }

    pub fn max_value(&self) -> Weight {
        self.options.iter().map(|o| o.value).max().unwrap_or(Weight::ZERO)
    }

    /// Whether `key` opens this question's gate.
    pub fn opens_gate(&self, key: &str) -> bool {
        self.gate_answer.as_deref() == Some(key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub id: String,
    /// Questions tagged `Q<index>.n` belong to this dimension.
    pub index: u32,
    pub label: String,
    pub symbol: DimensionSymbol,
    pub formula: FormulaExpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMethod {
    /// `total * target_max / max_possible_total`.
    #[default]
    MaxRatio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub target_max: Weight,
    #[serde(default)]
    pub method: NormalizationMethod,
}

impl Default for NormalizationSpec {
    fn default() -> Self {
        NormalizationSpec {
            target_max: Weight::from_scaled(10 * crate::weight::SCALE),
            method: NormalizationMethod::MaxRatio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameworkDefinition {
    pub id: String,
    pub version: String,
    pub default_mode: ScoringMode,
    pub questions: Vec<Question>,
    pub dimensions: Vec<Dimension>,
    pub total_formula: FormulaExpr,
    #[serde(default)]
    pub normalization: NormalizationSpec,
    pub principles: Vec<Principle>,
    pub theory_matrix: TheorySupportMatrix,
}

#[derive(Debug, Error)]
pub enum FrameworkError {
    #[error("cannot read framework file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed framework definition: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("framework {id} failed lint with {} error(s): {}", .findings.len(), summarize(.findings))]
    Lint { id: String, findings: Vec<LintFinding> },
}

fn summarize(findings: &[LintFinding]) -> String {
    findings.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ")
}

impl FrameworkDefinition {
    /// Parses a framework document and rejects it if any lint error is found.
    pub fn from_json(text: &str) -> Result<Self, FrameworkError> {
        let fw: FrameworkDefinition = serde_json::from_str(text)?;
        fw.checked()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FrameworkError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FrameworkError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Returns `self` if lint reports no errors (warnings are allowed).
    pub fn checked(self) -> Result<Self, FrameworkError> {
        let errors: Vec<_> = lint_framework(&self)
            .into_iter()
            .filter(|f| f.severity == Severity::Error)
            .collect();
        if errors.is_empty() {
            Ok(self)
        } else {
            Err(FrameworkError::Lint {
                id: self.id.clone(),
                findings: errors,
            })
        }
    }

    pub fn to_json_pretty(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("framework serializes");
        out.push('\n');
        out
    }

    pub fn question(&self, tag: QuestionTag) -> Option<&Question> {
        self.questions.iter().find(|q| q.tag == tag)
    }

    pub fn dimension(&self, symbol: DimensionSymbol) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.symbol == symbol)
    }

    /// The formula actually evaluated for `dimension` under `mode`: in literal
    /// mode every `gate(Q)` reads the numeric value of Q.
    pub fn effective_formula(&self, dimension: &Dimension, mode: ScoringMode) -> FormulaExpr {
        match mode {
            ScoringMode::Literal => dimension.formula.literalized(),
            ScoringMode::Gated => dimension.formula.clone(),
        }
    }

    /// Dimensions whose formula references `tag`.
    pub fn dimensions_touching(&self, tag: QuestionTag) -> Vec<DimensionSymbol> {
        self.dimensions
            .iter()
            .filter(|d| d.formula.question_tags().contains(&tag))
            .map(|d| d.symbol)
            .collect()
    }
}
