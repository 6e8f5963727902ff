//! Exact fixed-point decimals with six fractional digits.
//!
//! Every weight, dimension score and total is a [`Weight`]: a non-negative
//! count of millionths. Sums and products are checked for overflow, and a
//! product that would need more than six fractional digits is an error rather
//! than a silent rounding. Signed differences between two weights (what-if
//! deltas) are [`Delta`]s.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of fractional decimal digits carried by [`Weight`] and [`Delta`].
pub const FRACTION_DIGITS: u32 = 6;
/// Scaled units per whole number.
pub const SCALE: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("fixed-point overflow")]
    Overflow,
    #[error("product is not representable with {FRACTION_DIGITS} fractional digits")]
    Inexact,
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid decimal {input:?}: {reason}")]
pub struct ParseWeightError {
    pub input: String,
    pub reason: &'static str,
}

/// A non-negative fixed-point decimal stored as millionths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(u64);

impl Weight {
    pub const ZERO: Weight = Weight(0);
    pub const ONE: Weight = Weight(SCALE);

    pub const fn from_scaled(scaled: u64) -> Self {
        Weight(scaled)
    }

    pub const fn scaled(self) -> u64 {
        self.0
    }

    pub fn from_int(value: u64) -> Result<Self, ArithmeticError> {
        value.checked_mul(SCALE).map(Weight).ok_or(ArithmeticError::Overflow)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn checked_add(self, rhs: Weight) -> Result<Weight, ArithmeticError> {
        self.0.checked_add(rhs.0).map(Weight).ok_or(ArithmeticError::Overflow)
    }

    /// Exact product. Fails if the result needs more than six fractional digits.
    pub fn checked_mul(self, rhs: Weight) -> Result<Weight, ArithmeticError> {
        let wide = u128::from(self.0) * u128::from(rhs.0);
        let scale = u128::from(SCALE);
        if wide % scale != 0 {
            return Err(ArithmeticError::Inexact);
        }
        u64::try_from(wide / scale)
            .map(Weight)
            .map_err(|_| ArithmeticError::Overflow)
    }

    /// `self * numerator / denominator`, rounded half-up to the millionth grid.
    pub fn mul_div_round(self, numerator: Weight, denominator: Weight) -> Result<Weight, ArithmeticError> {
        if denominator.is_zero() {
            return Err(ArithmeticError::DivisionByZero);
        }
        // (a/S)(b/S)/(c/S) = ab/(cS), so the scaled result is ab/c.
        let num = u128::from(self.0) * u128::from(numerator.0);
        let den = u128::from(denominator.0);
        let rounded = (num + den / 2) / den;
        u64::try_from(rounded)
            .map(Weight)
            .map_err(|_| ArithmeticError::Overflow)
    }

    pub fn delta_to(self, other: Weight) -> Delta {
        let diff = i128::from(other.0) - i128::from(self.0);
        // saturates only for weights beyond i64::MAX millionths
        Delta(i64::try_from(diff).unwrap_or(if diff < 0 { i64::MIN } else { i64::MAX }))
    }
}

/// Signed difference between two weights, in millionths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Delta(i64);

impl Delta {
    pub const ZERO: Delta = Delta(0);

    pub const fn from_scaled(scaled: i64) -> Self {
        Delta(scaled)
    }

    pub const fn scaled(self) -> i64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

fn write_scaled(f: &mut fmt::Formatter<'_>, negative: bool, magnitude: u64) -> fmt::Result {
    let whole = magnitude / SCALE;
    let frac = magnitude % SCALE;
    if negative && magnitude != 0 {
        f.write_str("-")?;
    }
    if frac == 0 {
        write!(f, "{whole}")
    } else {
        let digits = format!("{frac:06}");
        write!(f, "{whole}.{}", digits.trim_end_matches('0'))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_scaled(f, false, self.0)
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_scaled(f, self.0 < 0, self.0.unsigned_abs())
    }
}

fn parse_unsigned(input: &str) -> Result<u64, ParseWeightError> {
    let err = |reason| ParseWeightError {
        input: input.to_string(),
        reason,
    };
    let (whole, frac) = match input.split_once('.') {
        Some((w, f)) => (w, Some(f)),
        None => (input, None),
    };
    if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("expected digits before the decimal point"));
    }
    let mut scaled = whole
        .parse::<u64>()
        .ok()
        .and_then(|w| w.checked_mul(SCALE))
        .ok_or_else(|| err("out of range"))?;
    if let Some(frac) = frac {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("expected digits after the decimal point"));
        }
        if frac.len() > FRACTION_DIGITS as usize {
            return Err(err("more than 6 fractional digits"));
        }
        let padded = format!("{frac:0<6}");
        let frac_scaled: u64 = padded.parse().map_err(|_| err("out of range"))?;
        scaled = scaled.checked_add(frac_scaled).ok_or_else(|| err("out of range"))?;
    }
    Ok(scaled)
}

impl FromStr for Weight {
    type Err = ParseWeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_unsigned(s).map(Weight)
    }
}

impl FromStr for Delta {
    type Err = ParseWeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let magnitude = parse_unsigned(body)?;
        let value = i64::try_from(magnitude).map_err(|_| ParseWeightError {
            input: s.to_string(),
            reason: "out of range",
        })?;
        Ok(Delta(if negative { -value } else { value }))
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Delta {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    #[test]
    fn table_weights_are_exact() {
        for (text, scaled) in [
            ("0.1", 100_000),
            ("0.15", 150_000),
            ("0.2", 200_000),
            ("0.25", 250_000),
            ("0.5", 500_000),
            ("0.8", 800_000),
            ("1", 1_000_000),
            ("2", 2_000_000),
        ] {
            let parsed = w(text);
            assert_eq!(parsed.scaled(), scaled);
            assert_eq!(parsed.to_string(), text);
        }
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", ".5", "1.", "-1", "1.2345678", "1.2.3", "abc", "1e3", " 1"] {
            assert!(bad.parse::<Weight>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn product_of_three_table_values_is_exact() {
        let p = w("1.5").checked_mul(w("0.15")).unwrap();
        let p = p.checked_mul(w("1.25")).unwrap();
        assert_eq!(p.to_string(), "0.28125");
    }

    #[test]
    fn inexact_and_overflow_are_errors() {
        assert_eq!(w("0.0001").checked_mul(w("0.0001")), Err(ArithmeticError::Inexact));
        assert_eq!(
            Weight::from_scaled(u64::MAX).checked_add(Weight::ONE),
            Err(ArithmeticError::Overflow)
        );
    }

    #[test]
    fn mul_div_rounds_half_up() {
        // 5.4 * 10 / 6.23125 = 8.66599799...
        let n = w("5.4").mul_div_round(w("10"), w("6.23125")).unwrap();
        assert_eq!(n.to_string(), "8.665998");
        // 1 * 1 / 8 = 0.125 exactly; 0.0000005 rounds up
        assert_eq!(
            Weight::from_scaled(1)
                .mul_div_round(Weight::from_scaled(500_000), Weight::ONE)
                .unwrap()
                .scaled(),
            1
        );
        assert!(w("1").mul_div_round(w("1"), Weight::ZERO).is_err());
    }

    #[test]
    fn delta_formatting() {
        assert_eq!(w("1.5").delta_to(w("1")).to_string(), "-0.5");
        assert_eq!(w("1").delta_to(w("3")).to_string(), "2");
        assert_eq!(Delta::ZERO.to_string(), "0");
        assert_eq!("-0.25".parse::<Delta>().unwrap().scaled(), -250_000);
    }

    #[test]
    fn serializes_as_decimal_strings() {
        let json = serde_json::to_string(&w("0.25")).unwrap();
        assert_eq!(json, "\"0.25\"");
        assert!(serde_json::from_str::<Weight>("0.25").is_err());
    }

    proptest! {
        #[test]
        fn display_parse_is_lossless(scaled in 0u64..=u64::MAX / 2) {
            let weight = Weight::from_scaled(scaled);
            prop_assert_eq!(weight.to_string().parse::<Weight>().unwrap(), weight);
        }

        #[test]
        fn delta_display_parse_is_lossless(scaled in -(i64::MAX / 2)..=i64::MAX / 2) {
            let delta = Delta::from_scaled(scaled);
            prop_assert_eq!(delta.to_string().parse::<Delta>().unwrap(), delta);
        }
    }
}
