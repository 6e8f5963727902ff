//! Machine (JSON) and human (plain text) renderings of score reports.
//!
//! The machine form is what both the CLI and the HTTP service emit, so the
//! two stay byte-identical for the same input.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::audit::Audit;
use crate::consensus::{trace_audit, AuditTrace, ConsensusError, ConsensusWeights};
use crate::framework::{FrameworkDefinition, ScoringMode};
use crate::samples::{published_for, PublishedScores};
use crate::scoring::{Engine, ScoreError, ScoreReport};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineDocument {
    pub report: ScoreReport,
    pub trace: AuditTrace,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Consensus(#[from] ConsensusError),
}

/// Scores `audit` (in `mode`, else the audit's or framework's mode) and
/// traces it.
pub fn build_document(
    engine: &Engine,
    audit: &Audit,
    mode: Option<ScoringMode>,
    weights: &ConsensusWeights,
) -> Result<MachineDocument, ReportError> {
    let mode = mode.unwrap_or_else(|| audit.mode_or(engine.framework()));
    let report = engine.score_in_mode(audit, mode)?;
    let trace = trace_audit(engine.framework(), audit, &report, weights)?;
    Ok(MachineDocument { report, trace })
}

/// Pretty JSON with a trailing newline.
pub fn render_machine<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types always serialize");
    out.push('\n');
    out
}

const GAUGE_WIDTH: u64 = 20;

fn gauge(value: Weight, max: Weight) -> String {
    let filled = if max.is_zero() {
        0
    } else {
        (u128::from(value.scaled()) * u128::from(GAUGE_WIDTH) / u128::from(max.scaled())).min(GAUGE_WIDTH.into())
            as usize
    };
    format!("[{}{}]", "#".repeat(filled), "-".repeat(GAUGE_WIDTH as usize - filled))
}

/// Plain-text report. With one report it describes that mode; with several
/// (one per mode) the dimension table gets one column per mode.
pub fn render_human(fw: &FrameworkDefinition, audit: &Audit, reports: &[ScoreReport], trace: &AuditTrace) -> String {
    let mut out = String::new();
    let Some(first) = reports.first() else {
        return out;
    };
    let _ = writeln!(out, "Ethical risk report — {} {}", fw.id, fw.version);
    if !audit.subject.is_empty() {
        let subject: Vec<String> = audit.subject.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        let _ = writeln!(out, "{}", subject.join(", "));
    }
    out.push('\n');

    let label_width = fw
        .dimensions
        .iter()
        .map(|d| d.label.len())
        .max()
        .unwrap_or(0)
        .max("Dimension".len());
    let _ = write!(out, "  {:<label_width$}    ", "Dimension");
    for r in reports {
        let _ = write!(out, "{:>12}", r.mode.as_str());
    }
    out.push('\n');
    for d in &fw.dimensions {
        let _ = write!(out, "  {:<label_width$}  {} ", d.label, d.symbol);
        for r in reports {
            let _ = write!(out, "{:>12}", r.dimension_scores[&d.symbol].to_string());
        }
        out.push('\n');
    }
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "ERS total: {} ({} mode)", r.total, r.mode.as_str());
        let _ = writeln!(
            out,
            "  normalized {} / {} {}  (maximum possible total {})",
            r.normalized,
            r.target_max,
            gauge(r.normalized, r.target_max),
            r.max_possible_total
        );
    }

    out.push_str("\nRisk-raising answers:\n");
    let raising: Vec<_> = first.contributions.iter().filter(|c| !c.value.is_zero()).collect();
    if raising.is_empty() {
        out.push_str("  none\n");
    }
    for c in raising {
        let dims: Vec<String> = c.dimensions.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(
            out,
            "  {:<6} {:<4} {:>8}  [{}]",
            c.question.to_string(),
            c.answer,
            c.value.to_string(),
            dims.join(",")
        );
    }

    if !trace.entries.is_empty() {
        let _ = writeln!(out, "\nPrinciples behind them (weights {}):", trace.weights);
        for e in &trace.entries {
            let principles: Vec<String> = e
                .principles
                .iter()
                .map(|p| format!("{} {}", p.code, p.weighted_score))
                .collect();
            let _ = writeln!(out, "  {:<6} {}", e.question.to_string(), principles.join(", "));
        }
    }

    if let Some(published) = published_for(audit) {
        for r in reports {
            if let Some(notice) = discrepancy_notice(published, r) {
                out.push('\n');
                out.push_str(&notice);
            }
        }
    }
    out
}

/// Describes where `report` departs from the published reference values
/// for a shipped example, or `None` if it matches them everywhere.
pub fn discrepancy_notice(published: &PublishedScores, report: &ScoreReport) -> Option<String> {
    let mut diffs = Vec::new();
    for (sym, value) in &report.dimension_scores {
        if let Some(expected) = published.dimension(*sym) {
            if expected != *value {
                diffs.push(format!("{sym}: published {expected}, computed {value}"));
            }
        }
    }
    if published.total() != report.total {
        diffs.push(format!(
            "total: published {}, computed {}",
            published.total(),
            report.total
        ));
    }
    if diffs.is_empty() {
        return None;
    }
    let mut notice = format!(
        "Note: {} matches a shipped example whose published reference values differ from the {}-mode result:\n",
        published.name,
        report.mode.as_str()
    );
    for d in diffs {
        let _ = writeln!(notice, "  {d}");
    }
    Some(notice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::builtin_ers_v1;
    use crate::samples;

    fn engine() -> Engine {
        Engine::new(builtin_ers_v1(ScoringMode::Literal)).unwrap()
    }

    #[test]
    fn machine_document_shape() {
        let doc = build_document(&engine(), &samples::beta_ltd(), None, &ConsensusWeights::default()).unwrap();
        let text = render_machine(&doc);
        assert!(text.ends_with("}\n"));
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["report"]["total"], "5.4");
        assert_eq!(value["report"]["normalized"], "8.665998");
        assert_eq!(value["report"]["dimension_scores"]["S"], "1.5");
        assert_eq!(value["trace"]["weights"]["C"], "0.5");
        let back: MachineDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn human_single_mode() {
        let e = engine();
        let audit = samples::beta_ltd();
        let doc = build_document(&e, &audit, Some(ScoringMode::Literal), &ConsensusWeights::default()).unwrap();
        let text = render_human(e.framework(), &audit, &[doc.report], &doc.trace);
        assert!(text.contains("ERS total: 5.4 (literal mode)"), "{text}");
        assert!(text.contains("normalized 8.665998 / 10"));
        assert!(text.contains("Q1.2"));
        assert!(text.contains("K1 "));
        assert!(text.contains("published reference values"));
        assert!(text.contains("H: published 3, computed 0"));
        assert!(text.contains("total: published 8.4, computed 5.4"));
    }

    #[test]
    fn human_both_modes_side_by_side() {
        let e = engine();
        let audit = samples::beta_ltd();
        let weights = ConsensusWeights::default();
        let reports: Vec<_> = ScoringMode::ALL
            .iter()
            .map(|m| e.score_in_mode(&audit, *m).unwrap())
            .collect();
        let trace = trace_audit(e.framework(), &audit, &reports[0], &weights).unwrap();
        let text = render_human(e.framework(), &audit, &reports, &trace);
        assert!(text.contains("ERS total: 5.4 (literal mode)"));
        assert!(text.contains("ERS total: 6.9 (gated mode)"));
        let header = text.lines().find(|l| l.trim_start().starts_with("Dimension")).unwrap();
        assert!(header.contains("literal") && header.contains("gated"));
    }

    #[test]
    fn no_notice_for_other_audits() {
        let e = engine();
        let audit = samples::beta_ltd().with_answer(crate::tag::QuestionTag::new(2, 1), "yes");
        let doc = build_document(&e, &audit, None, &ConsensusWeights::default()).unwrap();
        let text = render_human(e.framework(), &audit, &[doc.report], &doc.trace);
        assert!(!text.contains("published"));
    }

    #[test]
    fn gauge_bounds() {
        assert_eq!(gauge(Weight::ZERO, Weight::ONE), format!("[{}]", "-".repeat(20)));
        assert_eq!(gauge(Weight::ONE, Weight::ONE), format!("[{}]", "#".repeat(20)));
    }
}
