//! Exhaustive extrema over answer assignments.
//!
//! Each dimension formula is compiled once against the questions it
//! references, then tabulated over every combination of their options. The
//! maximum total either combines per-dimension maxima (when no two dimensions
//! share a question) or sweeps the union of all referenced questions, reusing
//! the per-dimension tables.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{EvalError, FormulaExpr, Reference};
use crate::framework::{Dimension, FrameworkDefinition, Question, ScoringMode};
use crate::tag::{DimensionSymbol, QuestionTag};
use crate::weight::{ArithmeticError, Weight};

/// Largest number of questions a single dimension may reference.
pub const MAX_EXHAUSTIVE_QUESTIONS: usize = 20;
/// Largest number of assignments enumerated by one sweep (2^24).
pub const MAX_EXHAUSTIVE_COMBINATIONS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtremaError {
    #[error(
        "{scope} references {questions} questions ({combinations} combinations): too large for exhaustive extrema"
    )]
    TooLarge {
        scope: String,
        questions: usize,
        combinations: u128,
    },
    #[error("{scope}: {source}")]
    Eval {
        scope: String,
        #[source]
        source: EvalError,
    },
}

/// A concrete answer for each question, keyed by tag.
pub type Assignment = BTreeMap<QuestionTag, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionExtrema {
    pub symbol: DimensionSymbol,
    pub min: Weight,
    pub max: Weight,
    /// Lexicographically smallest assignment (by tag, then option order)
    /// reaching `max`.
    pub argmax: Assignment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxPath {
    /// Dimensions share no questions; per-dimension maxima combine directly.
    PerDimension,
    /// Some question feeds several dimensions; the union was swept.
    Union,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxTotal {
    pub value: Weight,
    pub path: MaxPath,
    /// A full audit answer set reaching `value`.
    pub witness: Assignment,
}

#[derive(Debug, Clone)]
enum Node {
    Sum(Vec<Node>),
    Product(Vec<Node>),
    Slot(usize),
    Const(Weight),
}

impl Node {
    fn eval(&self, slots: &[Weight]) -> Result<Weight, ArithmeticError> {
        match self {
            Node::Sum(children) => {
                let mut acc = Weight::ZERO;
                for c in children {
                    acc = acc.checked_add(c.eval(slots)?)?;
                }
                Ok(acc)
            }
            Node::Product(children) => {
                let mut acc = Weight::ONE;
                for c in children {
                    acc = acc.checked_mul(c.eval(slots)?)?;
                }
                Ok(acc)
            }
            Node::Slot(i) => Ok(slots[*i]),
            Node::Const(w) => Ok(*w),
        }
    }
}

fn compile(expr: &FormulaExpr, slot_of: &dyn Fn(Reference) -> Option<usize>) -> Result<Node, EvalError> {
    Ok(match expr {
        FormulaExpr::Sum(c) => Node::Sum(c.iter().map(|e| compile(e, slot_of)).collect::<Result<_, _>>()?),
        FormulaExpr::Product(c) => Node::Product(c.iter().map(|e| compile(e, slot_of)).collect::<Result<_, _>>()?),
        FormulaExpr::ScoreRef(t) => {
            Node::Slot(slot_of(Reference::Score(*t)).ok_or(EvalError::Unbound(Reference::Score(*t)))?)
        }
        FormulaExpr::GateRef(t) => {
            Node::Slot(slot_of(Reference::Gate(*t)).ok_or(EvalError::Unbound(Reference::Gate(*t)))?)
        }
        FormulaExpr::DimRef(s) => {
            Node::Slot(slot_of(Reference::Dim(*s)).ok_or(EvalError::Unbound(Reference::Dim(*s)))?)
        }
        FormulaExpr::Const(w) => Node::Const(*w),
    })
}

/// Every value of one dimension formula, indexed by the mixed-radix encoding
/// of its questions' option indices (first tag most significant).
struct DimensionTable {
    questions: Vec<QuestionTag>,
    radices: Vec<usize>,
    values: Vec<Weight>,
}

fn combinations(radices: &[usize]) -> u128 {
    radices.iter().map(|&r| r as u128).product()
}

fn decode(mut index: usize, radices: &[usize], digits: &mut [usize]) {
    for i in (0..radices.len()).rev() {
        digits[i] = index % radices[i];
        index /= radices[i];
    }
}

fn question(fw: &FrameworkDefinition, tag: QuestionTag) -> &Question {
    fw.question(tag).expect("framework passed lint")
}

fn gate_value(q: &Question, option: usize) -> Weight {
    if q.opens_gate(&q.options[option].key) {
        Weight::ONE
    } else {
        Weight::ZERO
    }
}

fn tabulate(fw: &FrameworkDefinition, dim: &Dimension, mode: ScoringMode) -> Result<DimensionTable, ExtremaError> {
    let scope = format!("dimension {}", dim.symbol);
    let formula = fw.effective_formula(dim, mode);
    let questions: Vec<QuestionTag> = formula.question_tags().into_iter().collect();
    let radices: Vec<usize> = questions.iter().map(|t| question(fw, *t).options.len()).collect();
    let combos = combinations(&radices);
    if questions.len() > MAX_EXHAUSTIVE_QUESTIONS || combos > u128::from(MAX_EXHAUSTIVE_COMBINATIONS) {
        return Err(ExtremaError::TooLarge {
            scope,
            questions: questions.len(),
            combinations: combos,
        });
    }
    // slot 2i holds the score value of question i, slot 2i+1 its gate value
    let slot_of = |r: Reference| match r {
        Reference::Score(t) => questions.iter().position(|q| *q == t).map(|i| 2 * i),
        Reference::Gate(t) => questions.iter().position(|q| *q == t).map(|i| 2 * i + 1),
        Reference::Dim(_) => None,
    };
    let node = compile(&formula, &slot_of).map_err(|source| ExtremaError::Eval {
        scope: scope.clone(),
        source,
    })?;
    let qs: Vec<&Question> = questions.iter().map(|t| question(fw, *t)).collect();
    let mut digits = vec![0; questions.len()];
    let mut slots = vec![Weight::ZERO; 2 * questions.len()];
    let mut values = Vec::with_capacity(combos as usize);
    for index in 0..combos as usize {
        decode(index, &radices, &mut digits);
        for (i, q) in qs.iter().enumerate() {
            slots[2 * i] = q.options[digits[i]].value;
            slots[2 * i + 1] = gate_value(q, digits[i]);
        }
        let v = node.eval(&slots).map_err(|e| ExtremaError::Eval {
            scope: scope.clone(),
            source: e.into(),
        })?;
        values.push(v);
    }
    Ok(DimensionTable {
        questions,
        radices,
        values,
    })
}

fn assignment(fw: &FrameworkDefinition, questions: &[QuestionTag], digits: &[usize]) -> Assignment {
    questions
        .iter()
        .zip(digits)
        .map(|(t, &d)| (*t, question(fw, *t).options[d].key.clone()))
        .collect()
}

/// Exact (min, max) of one dimension with a witness for the max.
pub fn dimension_extrema(
    fw: &FrameworkDefinition,
    dim: &Dimension,
    mode: ScoringMode,
) -> Result<DimensionExtrema, ExtremaError> {
    let table = tabulate(fw, dim, mode)?;
    let (mut min, mut max, mut argmax) = (table.values[0], table.values[0], 0);
    for (i, &v) in table.values.iter().enumerate() {
        min = min.min(v);
        if v > max {
            max = v;
            argmax = i;
        }
    }
    let mut digits = vec![0; table.questions.len()];
    decode(argmax, &table.radices, &mut digits);
    Ok(DimensionExtrema {
        symbol: dim.symbol,
        min,
        max,
        argmax: assignment(fw, &table.questions, &digits),
    })
}

fn complete_witness(fw: &FrameworkDefinition, mut partial: Assignment) -> Assignment {
    for q in &fw.questions {
        partial.entry(q.tag).or_insert_with(|| q.options[0].key.clone());
    }
    partial
}

fn compile_total(fw: &FrameworkDefinition) -> Result<Node, ExtremaError> {
    let symbols: Vec<DimensionSymbol> = fw.dimensions.iter().map(|d| d.symbol).collect();
    let slot_of = |r: Reference| match r {
        Reference::Dim(s) => symbols.iter().position(|x| *x == s),
        _ => None,
    };
    compile(&fw.total_formula, &slot_of).map_err(|source| ExtremaError::Eval {
        scope: "total formula".into(),
        source,
    })
}

/// Largest reachable total under `mode`.
pub fn max_possible_total(fw: &FrameworkDefinition, mode: ScoringMode) -> Result<MaxTotal, ExtremaError> {
    let total = compile_total(fw)?;
    let mut seen = BTreeSet::new();
    let mut shared = false;
    for d in &fw.dimensions {
        for t in fw.effective_formula(d, mode).question_tags() {
            shared |= !seen.insert(t);
        }
    }
    if !shared {
        let mut maxima = Vec::with_capacity(fw.dimensions.len());
        let mut witness = Assignment::new();
        for d in &fw.dimensions {
            let ext = dimension_extrema(fw, d, mode)?;
            maxima.push(ext.max);
            witness.extend(ext.argmax);
        }
        let value = total.eval(&maxima).map_err(|e| ExtremaError::Eval {
            scope: "total formula".into(),
            source: e.into(),
        })?;
        return Ok(MaxTotal {
            value,
            path: MaxPath::PerDimension,
            witness: complete_witness(fw, witness),
        });
    }

    let union: Vec<QuestionTag> = seen.into_iter().collect();
    let radices: Vec<usize> = union.iter().map(|t| question(fw, *t).options.len()).collect();
    let combos = combinations(&radices);
    if combos > u128::from(MAX_EXHAUSTIVE_COMBINATIONS) {
        return Err(ExtremaError::TooLarge {
            scope: "union of dimension questions".into(),
            questions: union.len(),
            combinations: combos,
        });
    }
    let tables = fw
        .dimensions
        .iter()
        .map(|d| tabulate(fw, d, mode))
        .collect::<Result<Vec<_>, _>>()?;
    // For each union position: (dimension, stride in that dimension's table).
    let mut touches: Vec<Vec<(usize, usize)>> = vec![Vec::new(); union.len()];
    for (di, table) in tables.iter().enumerate() {
        let mut stride = 1;
        for (qi, tag) in table.questions.iter().enumerate().rev() {
            let pos = union.iter().position(|u| u == tag).expect("tag in union");
            touches[pos].push((di, stride));
            stride *= table.radices[qi];
        }
    }

    // Odometer over the union, last question fastest, keeping each
    // dimension's table index in step with the digits.
    let mut digits = vec![0usize; union.len()];
    let mut local = vec![0usize; tables.len()];
    let mut dims = vec![Weight::ZERO; tables.len()];
    let mut best: Option<(Weight, Vec<usize>)> = None;
    loop {
        for (di, table) in tables.iter().enumerate() {
            dims[di] = table.values[local[di]];
        }
        let v = total.eval(&dims).map_err(|e| ExtremaError::Eval {
            scope: "total formula".into(),
            source: e.into(),
        })?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, digits.clone()));
        }
        let mut pos = union.len();
        loop {
            if pos == 0 {
                let (value, digits) = best.expect("at least one assignment");
                return Ok(MaxTotal {
                    value,
                    path: MaxPath::Union,
                    witness: complete_witness(fw, assignment(fw, &union, &digits)),
                });
            }
            pos -= 1;
            if digits[pos] + 1 < radices[pos] {
                digits[pos] += 1;
                for &(di, stride) in &touches[pos] {
                    local[di] += stride;
                }
                break;
            }
            for &(di, stride) in &touches[pos] {
                local[di] -= digits[pos] * stride;
            }
            digits[pos] = 0;
        }
    }
}
