//! The arithmetic formula language in which dimension and total formulas are
//! written.
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := 'score(' TAG ')' | 'gate(' TAG ')' | SYMBOL | NUMBER | '(' expr ')'
//! ```
//!
//! There is no subtraction or division, so every formula is nondecreasing in
//! each of its bindings.

mod eval;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

pub use eval::{evaluate, EvalError, ValueEnv};
pub use parser::{parse_formula, ParseError};

use crate::tag::{DimensionSymbol, QuestionTag};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FormulaExpr {
    Sum(Vec<FormulaExpr>),
    Product(Vec<FormulaExpr>),
    ScoreRef(QuestionTag),
    GateRef(QuestionTag),
    DimRef(DimensionSymbol),
    Const(Weight),
}

/// A leaf reference that must be bound at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Reference {
    Score(QuestionTag),
    Gate(QuestionTag),
    Dim(DimensionSymbol),
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Score(tag) => write!(f, "score({tag})"),
            Reference::Gate(tag) => write!(f, "gate({tag})"),
            Reference::Dim(sym) => write!(f, "{sym}"),
        }
    }
}

impl FormulaExpr {
    /// Every Sum and Product has at least two children.
    pub fn is_well_formed(&self) -> bool {
        match self {
            FormulaExpr::Sum(children) | FormulaExpr::Product(children) => {
                children.len() >= 2 && children.iter().all(FormulaExpr::is_well_formed)
            }
            _ => true,
        }
    }

    pub fn references(&self) -> BTreeSet<Reference> {
        let mut out = BTreeSet::new();
        self.collect_references(&mut out);
        out
    }

    fn collect_references(&self, out: &mut BTreeSet<Reference>) {
        match self {
            FormulaExpr::Sum(children) | FormulaExpr::Product(children) => {
                for child in children {
                    child.collect_references(out);
                }
            }
            FormulaExpr::ScoreRef(tag) => {
                out.insert(Reference::Score(*tag));
            }
            FormulaExpr::GateRef(tag) => {
                out.insert(Reference::Gate(*tag));
            }
            FormulaExpr::DimRef(sym) => {
                out.insert(Reference::Dim(*sym));
            }
            FormulaExpr::Const(_) => {}
        }
    }

    /// Questions referenced through either `score(..)` or `gate(..)`.
    pub fn question_tags(&self) -> BTreeSet<QuestionTag> {
        self.references()
            .into_iter()
            .filter_map(|r| match r {
                Reference::Score(tag) | Reference::Gate(tag) => Some(tag),
                Reference::Dim(_) => None,
            })
            .collect()
    }

    pub fn dimension_symbols(&self) -> BTreeSet<DimensionSymbol> {
        self.references()
            .into_iter()
            .filter_map(|r| match r {
                Reference::Dim(sym) => Some(sym),
                _ => None,
            })
            .collect()
    }

    /// The same tree with every `gate(Q)` replaced by `score(Q)`.
    pub fn literalized(&self) -> FormulaExpr {
        match self {
            FormulaExpr::Sum(children) => FormulaExpr::Sum(children.iter().map(FormulaExpr::literalized).collect()),
            FormulaExpr::Product(children) => {
                FormulaExpr::Product(children.iter().map(FormulaExpr::literalized).collect())
            }
            FormulaExpr::GateRef(tag) => FormulaExpr::ScoreRef(*tag),
            other => other.clone(),
        }
    }

    pub fn has_gates(&self) -> bool {
        self.references().iter().any(|r| matches!(r, Reference::Gate(_)))
    }

    /// Removes every occurrence of `score(tag)`, collapsing sums and products
    /// that are left with a single child. Returns `None` if nothing remains.
    pub fn without_score_ref(&self, tag: QuestionTag) -> Option<FormulaExpr> {
        match self {
            FormulaExpr::ScoreRef(t) if *t == tag => None,
            FormulaExpr::Sum(children) | FormulaExpr::Product(children) => {
                let mut kept: Vec<_> = children.iter().filter_map(|c| c.without_score_ref(tag)).collect();
                match kept.len() {
                    0 => None,
                    1 => kept.pop(),
                    _ => Some(match self {
                        FormulaExpr::Sum(_) => FormulaExpr::Sum(kept),
                        _ => FormulaExpr::Product(kept),
                    }),
                }
            }
            other => Some(other.clone()),
        }
    }
}

/// Renders the canonical form: single spaces around operators and only the
/// parentheses needed to preserve the tree.
pub fn print_formula(expr: &FormulaExpr) -> String {
    expr.to_string()
}

impl fmt::Display for FormulaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaExpr::Sum(children) => {
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    if matches!(child, FormulaExpr::Sum(_)) {
                        write!(f, "({child})")?;
                    } else {
                        write!(f, "{child}")?;
                    }
                }
                Ok(())
            }
            FormulaExpr::Product(children) => {
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    if matches!(child, FormulaExpr::Sum(_) | FormulaExpr::Product(_)) {
                        write!(f, "({child})")?;
                    } else {
                        write!(f, "{child}")?;
                    }
                }
                Ok(())
            }
            FormulaExpr::ScoreRef(tag) => write!(f, "score({tag})"),
            FormulaExpr::GateRef(tag) => write!(f, "gate({tag})"),
            FormulaExpr::DimRef(sym) => write!(f, "{sym}"),
            FormulaExpr::Const(w) => write!(f, "{w}"),
        }
    }
}

impl FromStr for FormulaExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl Serialize for FormulaExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FormulaExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_formula(&s).map_err(de::Error::custom)
    }
}
