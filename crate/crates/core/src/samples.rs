//! The two worked-example audits shipped with ERS v1, and the reference
//! scores published alongside them.

use crate::audit::Audit;
use crate::tag::DimensionSymbol;
use crate::weight::Weight;

pub const ALPHA_LTD_JSON: &str = include_str!("../data/audits/alpha_ltd.json");
pub const BETA_LTD_JSON: &str = include_str!("../data/audits/beta_ltd.json");

pub const SAMPLE_NAMES: [&str; 2] = ["alpha_ltd", "beta_ltd"];

pub fn alpha_ltd() -> Audit {
    Audit::from_json(ALPHA_LTD_JSON).expect("shipped audit parses")
}

pub fn beta_ltd() -> Audit {
    Audit::from_json(BETA_LTD_JSON).expect("shipped audit parses")
}

/// Looks up a shipped example by name (`alpha_ltd`, `beta_ltd`).
pub fn by_name(name: &str) -> Option<Audit> {
    match name {
        "alpha_ltd" => Some(alpha_ltd()),
        "beta_ltd" => Some(beta_ltd()),
        _ => None,
    }
}

/// Published per-dimension and total scores for one shipped example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublishedScores {
    pub name: &'static str,
    pub dimensions: [(char, &'static str); 4],
    pub total: &'static str,
}

impl PublishedScores {
    pub fn dimension(&self, symbol: DimensionSymbol) -> Option<Weight> {
        self.dimensions
            .iter()
            .find(|(c, _)| *c == symbol.as_char())
            .map(|(_, v)| v.parse().expect("published value"))
    }

    pub fn total(&self) -> Weight {
        self.total.parse().expect("published value")
    }
}

pub const PUBLISHED: [PublishedScores; 2] = [
    PublishedScores {
        name: "alpha_ltd",
        dimensions: [('S', "0.25"), ('H', "0.25"), ('T', "0"), ('R', "0.9")],
        total: "1.4",
    },
    PublishedScores {
        name: "beta_ltd",
        dimensions: [('S', "1.5"), ('H', "3"), ('T', "3"), ('R', "0.9")],
        total: "8.4",
    },
];

/// If `audit` answers exactly like a shipped example against ERS v1, returns
/// that example's published scores.
pub fn published_for(audit: &Audit) -> Option<&'static PublishedScores> {
    if audit.framework.id != crate::framework::ERS_V1_ID {
        return None;
    }
    PUBLISHED.iter().find(|p| {
        by_name(p.name)
            .map(|sample| sample.answers == audit.answers)
            .unwrap_or(false)
    })
}
