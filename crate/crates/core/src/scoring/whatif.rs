use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::ScoreReport;
use crate::tag::{DimensionSymbol, QuestionTag};
use crate::weight::Delta;

/// The effect of changing one answer, computed by re-scoring from scratch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIfDelta {
    pub question: QuestionTag,
    pub old_answer: String,
    pub new_answer: String,
    pub dimension_deltas: IndexMap<DimensionSymbol, Delta>,
    pub total_delta: Delta,
    pub normalized_delta: Delta,
    pub base: ScoreReport,
    pub variant: ScoreReport,
}

impl WhatIfDelta {
    pub(crate) fn between(
        question: QuestionTag,
        old_answer: String,
        new_answer: String,
        base: ScoreReport,
        variant: ScoreReport,
    ) -> Self {
        let dimension_deltas = base
            .dimension_scores
            .iter()
            .map(|(sym, before)| {
                let after = variant.dimension_scores[sym];
                (*sym, before.delta_to(after))
            })
            .collect();
        WhatIfDelta {
            question,
            old_answer,
            new_answer,
            dimension_deltas,
            total_delta: base.total.delta_to(variant.total),
            normalized_delta: base.normalized.delta_to(variant.normalized),
            base,
            variant,
        }
    }

    pub fn dimension_delta(&self, symbol: &str) -> Option<Delta> {
        let sym: DimensionSymbol = symbol.parse().ok()?;
        self.dimension_deltas.get(&sym).copied()
    }
}
