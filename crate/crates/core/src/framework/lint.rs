//! Structural checks over a framework definition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::FrameworkDefinition;
use crate::formula::Reference;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LintKind {
    DuplicateTag,
    UnknownDimensionIndex,
    NoOptions,
    DuplicateOption,
    UnknownGateAnswer,
    GateWithoutAnswer,
    UnresolvedQuestion,
    UnresolvedDimension,
    UnscoredQuestion,
    MixedReferences,
    MalformedFormula,
    DuplicateSymbol,
    DuplicateDimensionIndex,
    UnresolvedPrinciple,
    DuplicatePrinciple,
    MatrixNotTotal,
    BadNormalization,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintFinding {
    pub severity: Severity,
    pub kind: LintKind,
    /// Where the problem is, e.g. `questions[Q1.6]` or `dimensions[S].formula`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for LintFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {} at {}", self.message, self.location)
    }
}

struct Findings(Vec<LintFinding>);

impl Findings {
    fn push(&mut self, severity: Severity, kind: LintKind, location: String, message: impl Into<String>) {
        self.0.push(LintFinding {
            severity,
            kind,
            location,
            message: message.into(),
        });
    }

    fn error(&mut self, kind: LintKind, location: String, message: impl Into<String>) {
        self.push(Severity::Error, kind, location, message);
    }
}

/// Returns every problem found; an empty list means the framework is sound.
pub fn lint_framework(fw: &FrameworkDefinition) -> Vec<LintFinding> {
    let mut out = Findings(Vec::new());

    let dimension_indices: BTreeSet<u32> = fw.dimensions.iter().map(|d| d.index).collect();
    let principle_codes: BTreeSet<_> = fw.principles.iter().map(|p| p.code).collect();

    // questions
    let mut seen_tags = BTreeSet::new();
    for q in &fw.questions {
        let loc = format!("questions[{}]", q.tag);
        if !seen_tags.insert(q.tag) {
            out.error(LintKind::DuplicateTag, loc.clone(), "duplicate question tag");
        }
        if !dimension_indices.contains(&q.tag.dimension_index) {
            out.error(
                LintKind::UnknownDimensionIndex,
                loc.clone(),
                format!("no dimension declares index {}", q.tag.dimension_index),
            );
        }
        if q.options.is_empty() {
            out.error(LintKind::NoOptions, loc.clone(), "question has no options");
        }
        let mut keys = BTreeSet::new();
        for o in &q.options {
            if !keys.insert(o.key.as_str()) {
                out.error(
                    LintKind::DuplicateOption,
                    format!("{loc}.options[{}]", o.key),
                    "duplicate option key",
                );
            }
        }
        if let Some(gate) = &q.gate_answer {
            if q.option(gate).is_none() {
                out.error(
                    LintKind::UnknownGateAnswer,
                    format!("{loc}.gate_answer"),
                    format!("gate answer {gate:?} is not an option"),
                );
            }
        }
        for code in &q.principle_codes {
            if !principle_codes.contains(code) {
                out.error(
                    LintKind::UnresolvedPrinciple,
                    format!("{loc}.principle_codes"),
                    format!("unresolved principle code {code}"),
                );
            }
        }
    }

    // dimensions
    let mut symbols = BTreeSet::new();
    let mut indices = BTreeSet::new();
    let mut scored = BTreeSet::new();
    for d in &fw.dimensions {
        let loc = format!("dimensions[{}]", d.symbol);
        if !symbols.insert(d.symbol) {
            out.error(LintKind::DuplicateSymbol, loc.clone(), "duplicate dimension symbol");
        }
        if !indices.insert(d.index) {
            out.error(
                LintKind::DuplicateDimensionIndex,
                loc.clone(),
                "duplicate dimension index",
            );
        }
        let floc = format!("{loc}.formula");
        if !d.formula.is_well_formed() {
            out.error(
                LintKind::MalformedFormula,
                floc.clone(),
                "sum or product with fewer than two terms",
            );
        }
        for r in d.formula.references() {
            match r {
                Reference::Score(tag) | Reference::Gate(tag) => match fw.question(tag) {
                    None => out.error(
                        LintKind::UnresolvedQuestion,
                        floc.clone(),
                        format!("unresolved question reference {tag}"),
                    ),
                    Some(q) => {
                        scored.insert(tag);
                        if matches!(r, Reference::Gate(_)) && q.gate_answer.is_none() {
                            out.error(
                                LintKind::GateWithoutAnswer,
                                floc.clone(),
                                format!("gate({tag}) but {tag} declares no gate_answer"),
                            );
                        }
                    }
                },
                Reference::Dim(sym) => out.error(
                    LintKind::MixedReferences,
                    floc.clone(),
                    format!("dimension formula references dimension {sym}"),
                ),
            }
        }
    }
    for q in &fw.questions {
        if !scored.contains(&q.tag) {
            out.push(
                Severity::Warning,
                LintKind::UnscoredQuestion,
                format!("questions[{}]", q.tag),
                "question never scored",
            );
        }
    }

    // total formula
    if !fw.total_formula.is_well_formed() {
        out.error(
            LintKind::MalformedFormula,
            "total_formula".into(),
            "sum or product with fewer than two terms",
        );
    }
    for r in fw.total_formula.references() {
        match r {
            Reference::Dim(sym) if !symbols.contains(&sym) => out.error(
                LintKind::UnresolvedDimension,
                "total_formula".into(),
                format!("unresolved dimension reference {sym}"),
            ),
            Reference::Dim(_) => {}
            other => out.error(
                LintKind::MixedReferences,
                "total_formula".into(),
                format!("total formula may only reference dimensions, found {other}"),
            ),
        }
    }

    // principles and matrix
    let mut seen_codes = BTreeSet::new();
    for p in &fw.principles {
        if !seen_codes.insert(p.code) {
            out.error(
                LintKind::DuplicatePrinciple,
                format!("principles[{}]", p.code),
                "duplicate principle code",
            );
        }
    }
    let matrix = &fw.theory_matrix;
    let width = matrix.theories.len();
    if width == 0 {
        out.error(
            LintKind::MatrixNotTotal,
            "theory_matrix.theories".into(),
            "no theories declared",
        );
    }
    let mut row_counts: BTreeMap<_, usize> = BTreeMap::new();
    for row in &matrix.rows {
        *row_counts.entry(row.principle).or_default() += 1;
        let loc = format!("theory_matrix.rows[{}]", row.principle);
        if !principle_codes.contains(&row.principle) {
            out.error(LintKind::MatrixNotTotal, loc.clone(), "row for undeclared principle");
        }
        if row.levels.len() != width {
            out.error(
                LintKind::MatrixNotTotal,
                loc,
                format!("row has {} levels, expected {width}", row.levels.len()),
            );
        }
    }
    for code in &principle_codes {
        match row_counts.get(code) {
            None => out.error(
                LintKind::MatrixNotTotal,
                format!("theory_matrix.rows[{code}]"),
                "principle has no matrix row",
            ),
            Some(n) if *n > 1 => out.error(
                LintKind::MatrixNotTotal,
                format!("theory_matrix.rows[{code}]"),
                "principle has more than one matrix row",
            ),
            _ => {}
        }
    }

    if fw.normalization.target_max.is_zero() {
        out.error(
            LintKind::BadNormalization,
            "normalization.target_max".into(),
            "target_max must be positive",
        );
    }

    out.0
}
