use std::collections::BTreeMap;

use thiserror::Error;

use super::{FormulaExpr, Reference};
use crate::tag::{DimensionSymbol, QuestionTag};
use crate::weight::{ArithmeticError, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value bound for {0}")]
    Unbound(Reference),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// Bindings for formula evaluation. Gate values are 0/1 indicators.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValueEnv {
    pub score_values: BTreeMap<QuestionTag, Weight>,
    pub gate_values: BTreeMap<QuestionTag, bool>,
    pub dim_values: BTreeMap<DimensionSymbol, Weight>,
}

impl ValueEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, reference: Reference) -> Option<Weight> {
        match reference {
            Reference::Score(tag) => self.score_values.get(&tag).copied(),
            Reference::Gate(tag) => self
                .gate_values
                .get(&tag)
                .map(|&open| if open { Weight::ONE } else { Weight::ZERO }),
            Reference::Dim(sym) => self.dim_values.get(&sym).copied(),
        }
    }
}

pub fn evaluate(expr: &FormulaExpr, env: &ValueEnv) -> Result<Weight, EvalError> {
    let bound = |r: Reference| env.lookup(r).ok_or(EvalError::Unbound(r));
    match expr {
        FormulaExpr::Sum(children) => children
            .iter()
            .try_fold(Weight::ZERO, |acc, c| Ok(acc.checked_add(evaluate(c, env)?)?)),
        FormulaExpr::Product(children) => children
            .iter()
            .try_fold(Weight::ONE, |acc, c| Ok(acc.checked_mul(evaluate(c, env)?)?)),
        FormulaExpr::ScoreRef(tag) => bound(Reference::Score(*tag)),
        FormulaExpr::GateRef(tag) => bound(Reference::Gate(*tag)),
        FormulaExpr::DimRef(sym) => bound(Reference::Dim(*sym)),
        FormulaExpr::Const(w) => Ok(*w),
    }
}
