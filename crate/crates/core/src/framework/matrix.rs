//! Principle codes, support levels and the principle × theory support grid.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrincipleFamily {
    /// Harm mitigation.
    H,
    /// Data ownership.
    K,
    /// Subject rights.
    S,
}

impl PrincipleFamily {
    fn letter(self) -> char {
        match self {
            PrincipleFamily::H => 'H',
            PrincipleFamily::K => 'K',
            PrincipleFamily::S => 'S',
        }
    }
}

/// `H1`..`H10`, `K1`..`K3`, `S1`..`S14` in the built-in catalog. Orders by
/// family (H, K, S) then number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrincipleCode {
    pub family: PrincipleFamily,
    pub number: u32,
}

impl PrincipleCode {
    pub const fn new(family: PrincipleFamily, number: u32) -> Self {
        PrincipleCode { family, number }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid principle code {0:?}")]
pub struct PrincipleCodeError(pub String);

impl fmt::Display for PrincipleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.number)
    }
}

impl FromStr for PrincipleCode {
    type Err = PrincipleCodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PrincipleCodeError(s.to_string());
        let mut chars = s.chars();
        let family = match chars.next() {
            Some('H') => PrincipleFamily::H,
            Some('K') => PrincipleFamily::K,
            Some('S') => PrincipleFamily::S,
            _ => return Err(err()),
        };
        let digits = chars.as_str();
        if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let number = digits.parse().map_err(|_| err())?;
        Ok(PrincipleCode { family, number })
    }
}

impl Serialize for PrincipleCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PrincipleCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principle {
    pub code: PrincipleCode,
    pub statement: String,
}

/// A theory's stance toward a principle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SupportLevel {
    /// Direct support.
    D,
    /// Conditional support.
    C,
    /// Indirect support.
    I,
    /// Neutral.
    N,
}

impl SupportLevel {
    pub const ALL: [SupportLevel; 4] = [SupportLevel::D, SupportLevel::C, SupportLevel::I, SupportLevel::N];

    pub fn description(self) -> &'static str {
        match self {
            SupportLevel::D => "direct",
            SupportLevel::C => "conditional",
            SupportLevel::I => "indirect",
            SupportLevel::N => "neutral",
        }
    }
}

impl fmt::Display for SupportLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SupportLevel::D => "D",
            SupportLevel::C => "C",
            SupportLevel::I => "I",
            SupportLevel::N => "N",
        };
        f.write_str(s)
    }
}

impl FromStr for SupportLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "D" => Ok(SupportLevel::D),
            "C" => Ok(SupportLevel::C),
            "I" => Ok(SupportLevel::I),
            "N" => Ok(SupportLevel::N),
            other => Err(format!("unknown support level {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub principle: PrincipleCode,
    /// One level per theory, in the matrix's theory order.
    pub levels: Vec<SupportLevel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("unknown principle {0}")]
    UnknownPrinciple(PrincipleCode),
    #[error("unknown theory {0:?}")]
    UnknownTheory(String),
    #[error("matrix row for {0} is incomplete")]
    IncompleteRow(PrincipleCode),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheorySupportMatrix {
    pub theories: Vec<String>,
    pub rows: Vec<MatrixRow>,
}

impl TheorySupportMatrix {
    pub fn row(&self, principle: PrincipleCode) -> Result<&MatrixRow, LookupError> {
        self.rows
            .iter()
            .find(|r| r.principle == principle)
            .ok_or(LookupError::UnknownPrinciple(principle))
    }

    pub fn theory_index(&self, theory: &str) -> Result<usize, LookupError> {
        self.theories
            .iter()
            .position(|t| t == theory)
            .ok_or_else(|| LookupError::UnknownTheory(theory.to_string()))
    }

    pub fn support_level(&self, principle: PrincipleCode, theory: &str) -> Result<SupportLevel, LookupError> {
        let row = self.row(principle)?;
        let idx = self.theory_index(theory)?;
        row.levels
            .get(idx)
            .copied()
            .ok_or(LookupError::IncompleteRow(principle))
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(|r| r.levels.len()).sum()
    }
}

/// Free-function form of [`TheorySupportMatrix::support_level`].
pub fn support_level(
    matrix: &TheorySupportMatrix,
    principle: PrincipleCode,
    theory: &str,
) -> Result<SupportLevel, LookupError> {
    matrix.support_level(principle, theory)
}
