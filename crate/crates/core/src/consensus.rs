//! Multi-theory consensus over the principle × theory support matrix, and
//! tracing of risky answers back to principles.
//!
//! The consensus score of a principle is
//! `Σ w(level) · count(level) / (w(D) · number_of_theories)`, which lies in
//! `[0, 1]` whenever `w(D) ≥ w(C) ≥ w(I) ≥ w(N) ≥ 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit::Audit;
use crate::framework::{FrameworkDefinition, LookupError, PrincipleCode, SupportLevel, TheorySupportMatrix};
use crate::scoring::ScoreReport;
use crate::tag::QuestionTag;
use crate::weight::{Weight, SCALE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsensusError {
    #[error(transparent)]
    Lookup(#[from] LookupError),
    #[error("invalid consensus weights: {0}")]
    InvalidWeights(String),
    #[error("report does not belong to this audit: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsensusWeights {
    #[serde(rename = "D")]
    pub direct: Weight,
    #[serde(rename = "C")]
    pub conditional: Weight,
    #[serde(rename = "I")]
    pub indirect: Weight,
    #[serde(rename = "N")]
    pub neutral: Weight,
}

impl Default for ConsensusWeights {
    fn default() -> Self {
        ConsensusWeights {
            direct: Weight::ONE,
            conditional: Weight::from_scaled(SCALE / 2),
            indirect: Weight::from_scaled(SCALE / 4),
            neutral: Weight::ZERO,
        }
    }
}

impl ConsensusWeights {
    pub fn new(direct: Weight, conditional: Weight, indirect: Weight, neutral: Weight) -> Result<Self, ConsensusError> {
        ConsensusWeights {
            direct,
            conditional,
            indirect,
            neutral,
        }
        .validated()
    }

    /// Checks `w(D) ≥ w(C) ≥ w(I) ≥ w(N)` and `w(D) > 0`.
    pub fn validated(self) -> Result<Self, ConsensusError> {
        if self.direct.is_zero() {
            return Err(ConsensusError::InvalidWeights("w(D) must be positive".into()));
        }
        if !(self.direct >= self.conditional && self.conditional >= self.indirect && self.indirect >= self.neutral) {
            return Err(ConsensusError::InvalidWeights(
                "weights must satisfy D >= C >= I >= N".into(),
            ));
        }
        Ok(self)
    }

    pub fn weight(&self, level: SupportLevel) -> Weight {
        match level {
            SupportLevel::D => self.direct,
            SupportLevel::C => self.conditional,
            SupportLevel::I => self.indirect,
            SupportLevel::N => self.neutral,
        }
    }

    fn set(&mut self, level: SupportLevel, value: Weight) {
        match level {
            SupportLevel::D => self.direct = value,
            SupportLevel::C => self.conditional = value,
            SupportLevel::I => self.indirect = value,
            SupportLevel::N => self.neutral = value,
        }
    }
}

impl fmt::Display for ConsensusWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "D={},C={},I={},N={}",
            self.direct, self.conditional, self.indirect, self.neutral
        )
    }
}

/// Parses `D=1,C=0.5,I=0.25,N=0`. Levels left out keep their defaults.
impl FromStr for ConsensusWeights {
    type Err = ConsensusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut weights = ConsensusWeights::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (level, value) = part
                .split_once('=')
                .ok_or_else(|| ConsensusError::InvalidWeights(format!("expected LEVEL=VALUE, got {part:?}")))?;
            let level: SupportLevel = level.trim().parse().map_err(ConsensusError::InvalidWeights)?;
            let value: Weight = value
                .trim()
                .parse()
                .map_err(|e: crate::weight::ParseWeightError| ConsensusError::InvalidWeights(e.to_string()))?;
            weights.set(level, value);
        }
        weights.validated()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipleConsensus {
    pub code: PrincipleCode,
    pub counts: BTreeMap<SupportLevel, u32>,
    /// In `[0, 1]`, rounded half-up to the millionth grid.
    pub weighted_score: Weight,
}

impl PrincipleConsensus {
    pub fn count(&self, level: SupportLevel) -> u32 {
        self.counts.get(&level).copied().unwrap_or(0)
    }
}

fn weighted_score(counts: &BTreeMap<SupportLevel, u32>, weights: &ConsensusWeights, theories: usize) -> Weight {
    let numerator: u128 = counts
        .iter()
        .map(|(level, n)| u128::from(weights.weight(*level).scaled()) * u128::from(*n))
        .sum();
    let denominator = u128::from(weights.direct.scaled()) * theories as u128;
    if denominator == 0 {
        return Weight::ZERO;
    }
    let scaled = (numerator * u128::from(SCALE) + denominator / 2) / denominator;
    Weight::from_scaled(scaled as u64)
}

pub fn consensus(
    matrix: &TheorySupportMatrix,
    weights: &ConsensusWeights,
    principle: PrincipleCode,
) -> Result<PrincipleConsensus, ConsensusError> {
    let row = matrix.row(principle)?;
    let mut counts: BTreeMap<SupportLevel, u32> = SupportLevel::ALL.iter().map(|l| (*l, 0)).collect();
    for level in &row.levels {
        *counts.entry(*level).or_default() += 1;
    }
    let weighted_score = weighted_score(&counts, weights, matrix.theories.len());
    Ok(PrincipleConsensus {
        code: principle,
        counts,
        weighted_score,
    })
}

/// Every principle in the matrix, highest consensus first; ties keep code
/// order (H before K before S, then by number).
pub fn rank_principles(matrix: &TheorySupportMatrix, weights: &ConsensusWeights) -> Vec<PrincipleConsensus> {
    let mut ranked: Vec<PrincipleConsensus> = matrix
        .rows
        .iter()
        .map(|r| consensus(matrix, weights, r.principle).expect("row exists"))
        .collect();
    ranked.sort_by(|a, b| b.weighted_score.cmp(&a.weighted_score).then(a.code.cmp(&b.code)));
    ranked
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub question: QuestionTag,
    pub answer: String,
    pub value: Weight,
    pub principles: Vec<PrincipleConsensus>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditTrace {
    pub weights: ConsensusWeights,
    pub entries: Vec<TraceEntry>,
}

impl AuditTrace {
    pub fn entry(&self, question: QuestionTag) -> Option<&TraceEntry> {
        self.entries.iter().find(|e| e.question == question)
    }
}

/// Lists each question with a strictly positive contribution, with the
/// consensus record of every principle it is mapped to.
pub fn trace_audit(
    fw: &FrameworkDefinition,
    audit: &Audit,
    report: &ScoreReport,
    weights: &ConsensusWeights,
) -> Result<AuditTrace, ConsensusError> {
    if report.framework.id != fw.id || report.framework.version != fw.version {
        return Err(ConsensusError::Mismatch(format!(
            "report is for {} {}, framework is {} {}",
            report.framework.id, report.framework.version, fw.id, fw.version
        )));
    }
    if report.contributions.len() != audit.answers.len() {
        return Err(ConsensusError::Mismatch(format!(
            "report has {} contributions, audit has {} answers",
            report.contributions.len(),
            audit.answers.len()
        )));
    }
    let mut entries = Vec::new();
    for c in &report.contributions {
        match audit.answers.get(&c.question) {
            Some(answer) if *answer == c.answer => {}
            _ => {
                return Err(ConsensusError::Mismatch(format!(
                    "{} answered differently in report and audit",
                    c.question
                )))
            }
        }
        if c.value.is_zero() {
            continue;
        }
        let question = fw
            .question(c.question)
            .ok_or_else(|| ConsensusError::Mismatch(format!("{} is not in the framework", c.question)))?;
        let principles = question
            .principle_codes
            .iter()
            .map(|code| consensus(&fw.theory_matrix, weights, *code))
            .collect::<Result<_, _>>()?;
        entries.push(TraceEntry {
            question: c.question,
            answer: c.answer.clone(),
            value: c.value,
            principles,
        });
    }
    Ok(AuditTrace {
        weights: *weights,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{builtin_ers_v1, MatrixRow, ScoringMode};
    use crate::samples;
    use crate::scoring::Engine;
    use proptest::prelude::*;

    fn code(s: &str) -> PrincipleCode {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    fn matrix() -> TheorySupportMatrix {
        builtin_ers_v1(ScoringMode::Literal).theory_matrix
    }

    #[test]
    fn h1_default_weights() {
        let c = consensus(&matrix(), &ConsensusWeights::default(), code("H1")).unwrap();
        assert_eq!(
            [SupportLevel::D, SupportLevel::C, SupportLevel::I, SupportLevel::N].map(|l| c.count(l)),
            [7, 2, 1, 0]
        );
        assert_eq!(c.weighted_score, w("0.825"));
    }

    #[test]
    fn s2_default_weights() {
        let c = consensus(&matrix(), &ConsensusWeights::default(), code("S2")).unwrap();
        assert_eq!(
            [SupportLevel::D, SupportLevel::C, SupportLevel::I, SupportLevel::N].map(|l| c.count(l)),
            [5, 4, 0, 1]
        );
        assert_eq!(c.weighted_score, w("0.7"));
    }

    #[test]
    fn direct_only_weights_count_d() {
        let weights = ConsensusWeights::new(Weight::ONE, Weight::ZERO, Weight::ZERO, Weight::ZERO).unwrap();
        let m = matrix();
        for row in &m.rows {
            let c = consensus(&m, &weights, row.principle).unwrap();
            let d = u64::from(c.count(SupportLevel::D));
            assert_eq!(c.weighted_score, Weight::from_scaled(d * SCALE / 10));
        }
    }

    #[test]
    fn unknown_principle() {
        assert!(matches!(
            consensus(&matrix(), &ConsensusWeights::default(), code("S15")),
            Err(ConsensusError::Lookup(LookupError::UnknownPrinciple(_)))
        ));
    }

    #[test]
    fn weight_strings() {
        let parsed: ConsensusWeights = "D=1,C=0.5,I=0.25,N=0".parse().unwrap();
        assert_eq!(parsed, ConsensusWeights::default());
        assert_eq!(parsed.to_string(), "D=1,C=0.5,I=0.25,N=0");
        assert_eq!("C=0.75".parse::<ConsensusWeights>().unwrap().conditional, w("0.75"));
        assert!("D=0".parse::<ConsensusWeights>().is_err());
        assert!("C=2".parse::<ConsensusWeights>().is_err());
        assert!("X=1".parse::<ConsensusWeights>().is_err());
        assert!("D".parse::<ConsensusWeights>().is_err());
    }

    #[test]
    fn ranking_is_a_permutation() {
        let ranked = rank_principles(&matrix(), &ConsensusWeights::default());
        assert_eq!(ranked.len(), 27);
        let mut codes: Vec<_> = ranked.iter().map(|c| c.code).collect();
        codes.sort();
        let expected: Vec<_> = matrix().rows.iter().map(|r| r.principle).collect();
        assert_eq!(codes, expected);
        assert!(ranked.windows(2).all(|p| p[0].weighted_score >= p[1].weighted_score));
    }

    #[test]
    fn uniform_matrix_ranks_in_code_order() {
        let mut m = matrix();
        for row in &mut m.rows {
            row.levels.iter_mut().for_each(|l| *l = SupportLevel::D);
        }
        let ranked = rank_principles(&m, &ConsensusWeights::default());
        assert!(ranked.iter().all(|c| c.weighted_score == Weight::ONE));
        let codes: Vec<_> = ranked.iter().map(|c| c.code).collect();
        let expected: Vec<_> = m.rows.iter().map(|r: &MatrixRow| r.principle).collect();
        assert_eq!(codes, expected);
    }

    #[test]
    fn top_principle_matches_recount() {
        // recount straight from the level strings, independent of `consensus`
        let m = matrix();
        let mut best: Option<(u64, PrincipleCode)> = None;
        for row in &m.rows {
            let score: u64 = row
                .levels
                .iter()
                .map(|l| match l {
                    SupportLevel::D => 100,
                    SupportLevel::C => 50,
                    SupportLevel::I => 25,
                    SupportLevel::N => 0,
                })
                .sum();
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, row.principle));
            }
        }
        let ranked = rank_principles(&m, &ConsensusWeights::default());
        let (score, top) = best.unwrap();
        assert_eq!(ranked[0].code, top);
        assert_eq!(ranked[0].weighted_score.scaled(), score * SCALE / 1000);
    }

    #[test]
    fn beta_trace_lists_k1_for_q12() {
        let fw = builtin_ers_v1(ScoringMode::Literal);
        let audit = samples::beta_ltd();
        let report = Engine::new(fw.clone()).unwrap().score(&audit).unwrap();
        let trace = trace_audit(&fw, &audit, &report, &ConsensusWeights::default()).unwrap();
        let entry = trace.entry(QuestionTag::new(1, 2)).unwrap();
        assert_eq!(entry.value, w("0.5"));
        assert_eq!(entry.principles[0].code, code("K1"));
        assert_eq!(
            entry.principles[0],
            consensus(&fw.theory_matrix, &ConsensusWeights::default(), code("K1")).unwrap()
        );
    }

    #[test]
    fn trace_lists_exactly_positive_contributions() {
        let fw = builtin_ers_v1(ScoringMode::Literal);
        let engine = Engine::new(fw.clone()).unwrap();
        for audit in [samples::alpha_ltd(), samples::beta_ltd()] {
            let report = engine.score(&audit).unwrap();
            let trace = trace_audit(&fw, &audit, &report, &ConsensusWeights::default()).unwrap();
            for c in &report.contributions {
                assert_eq!(trace.entry(c.question).is_some(), !c.value.is_zero(), "{}", c.question);
            }
        }
        let alpha = samples::alpha_ltd();
        let report = engine.score(&alpha).unwrap();
        let trace = trace_audit(&fw, &alpha, &report, &ConsensusWeights::default()).unwrap();
        assert!(trace.entry(QuestionTag::new(2, 1)).is_none());
    }

    #[test]
    fn all_minimum_audit_has_empty_trace() {
        let fw = builtin_ers_v1(ScoringMode::Literal);
        let mut audit = Audit::draft(&fw);
        for q in &fw.questions {
            audit
                .answers
                .insert(q.tag, q.options.iter().min_by_key(|o| o.value).unwrap().key.clone());
        }
        let report = Engine::new(fw.clone()).unwrap().score(&audit).unwrap();
        let trace = trace_audit(&fw, &audit, &report, &ConsensusWeights::default()).unwrap();
        assert!(trace.entries.is_empty());
    }

    #[test]
    fn mismatched_report_is_rejected() {
        let fw = builtin_ers_v1(ScoringMode::Literal);
        let engine = Engine::new(fw.clone()).unwrap();
        let report = engine.score(&samples::alpha_ltd()).unwrap();
        assert!(matches!(
            trace_audit(&fw, &samples::beta_ltd(), &report, &ConsensusWeights::default()),
            Err(ConsensusError::Mismatch(_))
        ));
    }

    fn arb_weights() -> impl Strategy<Value = ConsensusWeights> {
        prop::collection::vec(0u64..=2_000_000, 4).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            let direct = v[0].max(1);
            ConsensusWeights {
                direct: Weight::from_scaled(direct),
                conditional: Weight::from_scaled(v[1]),
                indirect: Weight::from_scaled(v[2]),
                neutral: Weight::from_scaled(v[3]),
            }
        })
    }

    proptest! {
        #[test]
        fn counts_sum_to_theories_and_score_in_unit_interval(weights in arb_weights()) {
            let m = matrix();
            for row in &m.rows {
                let c = consensus(&m, &weights, row.principle).unwrap();
                prop_assert_eq!(c.counts.values().sum::<u32>() as usize, m.theories.len());
                prop_assert!(c.weighted_score <= Weight::ONE);
            }
        }

        #[test]
        fn score_nondecreasing_in_lower_levels(weights in arb_weights(), bump in 0u64..1_000_000, which in 0usize..3) {
            let m = matrix();
            let mut raised = weights;
            match which {
                0 => raised.conditional = Weight::from_scaled((raised.conditional.scaled() + bump).min(raised.direct.scaled())),
                1 => raised.indirect = Weight::from_scaled((raised.indirect.scaled() + bump).min(raised.conditional.scaled())),
                _ => raised.neutral = Weight::from_scaled((raised.neutral.scaled() + bump).min(raised.indirect.scaled())),
            }
            for row in &m.rows {
                let before = consensus(&m, &weights, row.principle).unwrap().weighted_score;
                let after = consensus(&m, &raised, row.principle).unwrap().weighted_score;
                prop_assert!(after >= before);
            }
        }

        #[test]
        fn score_is_scale_invariant(weights in arb_weights(), factor in 1u64..50) {
            let m = matrix();
            let scaled = ConsensusWeights {
                direct: Weight::from_scaled(weights.direct.scaled() * factor),
                conditional: Weight::from_scaled(weights.conditional.scaled() * factor),
                indirect: Weight::from_scaled(weights.indirect.scaled() * factor),
                neutral: Weight::from_scaled(weights.neutral.scaled() * factor),
            };
            for row in &m.rows {
                prop_assert_eq!(
                    consensus(&m, &weights, row.principle).unwrap().weighted_score,
                    consensus(&m, &scaled, row.principle).unwrap().weighted_score
                );
            }
        }
    }
}
