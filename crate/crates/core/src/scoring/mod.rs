//! Scoring audits against frameworks.

mod extrema;
mod whatif;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use extrema::{
    dimension_extrema, max_possible_total, Assignment, DimensionExtrema, ExtremaError, MaxPath, MaxTotal,
    MAX_EXHAUSTIVE_COMBINATIONS, MAX_EXHAUSTIVE_QUESTIONS,
};
pub use whatif::WhatIfDelta;

use crate::audit::{validate_audit, Audit, FrameworkRef, ValidationError};
use crate::formula::{evaluate, EvalError, Reference, ValueEnv};
use crate::framework::{FrameworkDefinition, FrameworkError, ScoringMode};
use crate::tag::{DimensionSymbol, QuestionTag};
use crate::weight::{ArithmeticError, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("{0}")]
    Framework(String),
    #[error("audit is invalid: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ValidationError>),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Extrema(#[from] ExtremaError),
    #[error("cannot normalize: maximum possible total is zero")]
    DegenerateMaximum,
    #[error("normalization failed: {0}")]
    Normalize(ArithmeticError),
}

/// One question's part in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contribution {
    pub question: QuestionTag,
    pub answer: String,
    pub value: Weight,
    /// 0/1 indicator, present in gated mode for questions used as gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<u8>,
    pub dimensions: Vec<DimensionSymbol>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub framework: FrameworkRef,
    pub mode: ScoringMode,
    pub subject: BTreeMap<String, String>,
    pub dimension_scores: IndexMap<DimensionSymbol, Weight>,
    pub total: Weight,
    pub normalized: Weight,
    pub target_max: Weight,
    pub max_possible_total: Weight,
    pub contributions: Vec<Contribution>,
}

impl ScoreReport {
    pub fn dimension(&self, symbol: &str) -> Option<Weight> {
        let sym: DimensionSymbol = symbol.parse().ok()?;
        self.dimension_scores.get(&sym).copied()
    }

    pub fn contribution(&self, question: QuestionTag) -> Option<&Contribution> {
        self.contributions.iter().find(|c| c.question == question)
    }
}

/// `total * target_max / max_total`, rounded half-up to the millionth grid.
pub fn normalize(total: Weight, target_max: Weight, max_total: Weight) -> Result<Weight, ScoreError> {
    if max_total.is_zero() {
        return Err(ScoreError::DegenerateMaximum);
    }
    total
        .mul_div_round(target_max, max_total)
        .map_err(ScoreError::Normalize)
}

/// A validated framework plus lazily computed per-mode maxima.
///
/// The framework is immutable once wrapped, so an `Engine` can be shared
/// across threads and scored against concurrently.
#[derive(Debug)]
pub struct Engine {
    framework: FrameworkDefinition,
    max_total: [OnceLock<Result<MaxTotal, ExtremaError>>; 2],
}

fn mode_slot(mode: ScoringMode) -> usize {
    match mode {
        ScoringMode::Literal => 0,
        ScoringMode::Gated => 1,
    }
}

impl Engine {
    pub fn new(framework: FrameworkDefinition) -> Result<Self, FrameworkError> {
        Ok(Engine {
            framework: framework.checked()?,
            max_total: [OnceLock::new(), OnceLock::new()],
        })
    }

    pub fn framework(&self) -> &FrameworkDefinition {
        &self.framework
    }

    pub fn max_possible_total(&self, mode: ScoringMode) -> Result<&MaxTotal, ExtremaError> {
        self.max_total[mode_slot(mode)]
            .get_or_init(|| max_possible_total(&self.framework, mode))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn dimension_extrema(&self, mode: ScoringMode) -> Result<Vec<DimensionExtrema>, ExtremaError> {
        self.framework
            .dimensions
            .iter()
            .map(|d| dimension_extrema(&self.framework, d, mode))
            .collect()
    }

    pub fn validate(&self, audit: &Audit) -> Vec<ValidationError> {
        validate_audit(&self.framework, audit)
    }

    pub fn normalize(&self, total: Weight, mode: ScoringMode) -> Result<Weight, ScoreError> {
        let max = self.max_possible_total(mode)?;
        normalize(total, self.framework.normalization.target_max, max.value)
    }

    /// Scores in the audit's own mode, or the framework default.
    pub fn score(&self, audit: &Audit) -> Result<ScoreReport, ScoreError> {
        self.score_in_mode(audit, audit.mode_or(&self.framework))
    }

    pub fn score_in_mode(&self, audit: &Audit, mode: ScoringMode) -> Result<ScoreReport, ScoreError> {
        let errors = self.validate(audit);
        if !errors.is_empty() {
            return Err(ScoreError::Invalid(errors));
        }
        let fw = &self.framework;

        let mut env = ValueEnv::new();
        let mut chosen = Vec::with_capacity(fw.questions.len());
        for q in &fw.questions {
            let answer = &audit.answers[&q.tag];
            let option = q.option(answer).expect("validated");
            env.score_values.insert(q.tag, option.value);
            if mode == ScoringMode::Gated && q.gate_answer.is_some() {
                env.gate_values.insert(q.tag, q.opens_gate(answer));
            }
            chosen.push((q, answer.clone(), option.value));
        }

        let mut dimension_scores = IndexMap::with_capacity(fw.dimensions.len());
        let mut gated_questions = Vec::new();
        for d in &fw.dimensions {
            let formula = fw.effective_formula(d, mode);
            for r in formula.references() {
                if let Reference::Gate(tag) = r {
                    gated_questions.push(tag);
                }
            }
            let value = evaluate(&formula, &env)?;
            env.dim_values.insert(d.symbol, value);
            dimension_scores.insert(d.symbol, value);
        }
        let total = evaluate(&fw.total_formula, &env)?;
        let max = self.max_possible_total(mode)?.value;
        let normalized = normalize(total, fw.normalization.target_max, max)?;

        let contributions = chosen
            .into_iter()
            .map(|(q, answer, value)| Contribution {
                question: q.tag,
                gate: gated_questions
                    .contains(&q.tag)
                    .then(|| u8::from(env.gate_values[&q.tag])),
                answer,
                value,
                dimensions: fw.dimensions_touching(q.tag),
            })
            .collect();

        Ok(ScoreReport {
            framework: FrameworkRef {
                id: fw.id.clone(),
                version: fw.version.clone(),
            },
            mode,
            subject: audit.subject.clone(),
            dimension_scores,
            total,
            normalized,
            target_max: fw.normalization.target_max,
            max_possible_total: max,
            contributions,
        })
    }

    /// Scores `audit` with `question` answered `new_answer` instead, and
    /// reports the differences. `audit` itself is left untouched.
    pub fn what_if(
        &self,
        audit: &Audit,
        question: QuestionTag,
        new_answer: &str,
        mode: Option<ScoringMode>,
    ) -> Result<WhatIfDelta, ScoreError> {
        let mode = mode.unwrap_or_else(|| audit.mode_or(&self.framework));
        let mut errors = self.validate(audit);
        match self.framework.question(question) {
            None => errors.push(ValidationError::UnknownQuestion { question }),
            Some(q) if q.option(new_answer).is_none() => errors.push(ValidationError::UnknownOption {
                question,
                answer: new_answer.to_string(),
            }),
            Some(_) => {}
        }
        if !errors.is_empty() {
            errors.dedup();
            return Err(ScoreError::Invalid(errors));
        }
        let base = self.score_in_mode(audit, mode)?;
        let variant = self.score_in_mode(&audit.with_answer(question, new_answer), mode)?;
        Ok(WhatIfDelta::between(
            question,
            audit.answers[&question].clone(),
            new_answer.to_string(),
            base,
            variant,
        ))
    }
}

/// One-shot scoring. Prefer [`Engine`] when scoring repeatedly, since it
/// caches the maximum total used for normalization.
pub fn score_audit(fw: &FrameworkDefinition, audit: &Audit) -> Result<ScoreReport, ScoreError> {
    Engine::new(fw.clone())
        .map_err(|e| ScoreError::Framework(e.to_string()))?
        .score(audit)
}
