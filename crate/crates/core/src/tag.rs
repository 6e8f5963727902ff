//! Identifiers shared by frameworks, formulas and audits.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("question tag {0:?} must look like Q<dimension>.<order>")]
    Malformed(String),
    #[error("question tag {0:?} has a zero or zero-padded component")]
    OutOfRange(String),
    #[error("dimension symbol {0:?} must be a single uppercase letter")]
    BadSymbol(String),
}

/// A question's state-variable label, rendered `Q<dimension>.<order>`.
///
/// Ordering is numeric: `Q1.2 < Q1.10 < Q2.1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuestionTag {
    pub dimension_index: u32,
    pub order: u32,
}

impl QuestionTag {
    pub const fn new(dimension_index: u32, order: u32) -> Self {
        QuestionTag { dimension_index, order }
    }
}

impl fmt::Display for QuestionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}.{}", self.dimension_index, self.order)
    }
}

fn positive_component(part: &str, whole: &str) -> Result<u32, TagError> {
    if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(TagError::Malformed(whole.to_string()));
    }
    if part.starts_with('0') {
        return Err(TagError::OutOfRange(whole.to_string()));
    }
    part.parse().map_err(|_| TagError::OutOfRange(whole.to_string()))
}

impl FromStr for QuestionTag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.strip_prefix('Q').ok_or_else(|| TagError::Malformed(s.to_string()))?;
        let (dim, order) = body.split_once('.').ok_or_else(|| TagError::Malformed(s.to_string()))?;
        Ok(QuestionTag {
            dimension_index: positive_component(dim, s)?,
            order: positive_component(order, s)?,
        })
    }
}

impl Serialize for QuestionTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuestionTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Single-letter name of a dimension (`S`, `H`, `T`, `R` in ERS v1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DimensionSymbol(char);

impl DimensionSymbol {
    pub fn new(c: char) -> Result<Self, TagError> {
        if c.is_ascii_uppercase() {
            Ok(DimensionSymbol(c))
        } else {
            Err(TagError::BadSymbol(c.to_string()))
        }
    }

    pub fn as_char(self) -> char {
        self.0
    }
}

impl fmt::Display for DimensionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for DimensionSymbol {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => DimensionSymbol::new(c),
            _ => Err(TagError::BadSymbol(s.to_string())),
        }
    }
}

impl Serialize for DimensionSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DimensionSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_renders() {
        let tag: QuestionTag = "Q3.5".parse().unwrap();
        assert_eq!(tag, QuestionTag::new(3, 5));
        assert_eq!(tag.to_string(), "Q3.5");
    }

    #[test]
    fn rejects_zero_components() {
        assert!(matches!("Q0.1".parse::<QuestionTag>(), Err(TagError::OutOfRange(_))));
        assert!(matches!("Q1.0".parse::<QuestionTag>(), Err(TagError::OutOfRange(_))));
        assert!(matches!("Q01.1".parse::<QuestionTag>(), Err(TagError::OutOfRange(_))));
        assert!(matches!("Q1".parse::<QuestionTag>(), Err(TagError::Malformed(_))));
        assert!(matches!("q1.1".parse::<QuestionTag>(), Err(TagError::Malformed(_))));
    }

    #[test]
    fn orders_numerically() {
        let a: QuestionTag = "Q1.2".parse().unwrap();
        let b: QuestionTag = "Q1.10".parse().unwrap();
        let c: QuestionTag = "Q2.1".parse().unwrap();
        assert!(a < b && b < c);
    }

    #[test]
    fn symbols() {
        assert!("S".parse::<DimensionSymbol>().is_ok());
        assert!("s".parse::<DimensionSymbol>().is_err());
        assert!("ST".parse::<DimensionSymbol>().is_err());
    }
}
