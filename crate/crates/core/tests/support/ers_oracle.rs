//! Hand-transcribed ERS v1 formulas, shared by the oracle tests here and
//! the acceptance suite of the CLI crate.
//!
//! Nothing here goes through the formula parser or evaluator: option values
//! are written out again as integer millionths and each dimension is spelled
//! out as plain arithmetic over exact integers.
#![allow(dead_code)]

use ers_core::{builtin_ers_v1, Audit, QuestionTag, ScoringMode};

pub const N: usize = 23;

/// (tag, yes value, no value) in millionths, in tag order.
pub const TABLE: [((u32, u32), u64, u64); N] = [
    ((1, 1), 1_000_000, 0),
    ((1, 2), 0, 500_000),
    ((1, 3), 0, 250_000),
    ((1, 4), 0, 250_000),
    ((1, 5), 0, 250_000),
    ((1, 6), 0, 250_000),
    ((2, 1), 0, 2_000_000),
    ((2, 2), 0, 1_000_000),
    ((2, 3), 0, 100_000),
    ((2, 4), 0, 150_000),
    ((3, 1), 500_000, 0),
    ((3, 2), 1_000_000, 0),
    ((3, 3), 500_000, 0),
    ((3, 4), 200_000, 0),
    ((3, 5), 800_000, 0),
    ((3, 6), 250_000, 0),
    ((3, 7), 500_000, 0),
    ((3, 8), 250_000, 0),
    ((4, 1), 0, 150_000),
    ((4, 2), 0, 200_000),
    ((4, 3), 0, 100_000),
    ((4, 4), 0, 150_000),
    ((4, 5), 0, 150_000),
];

pub const M: u128 = 1_000_000;

/// Dimension scores (S, H, T, R) and total, in millionths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expected {
    pub s: u64,
    pub h: u64,
    pub t: u64,
    pub r: u64,
    pub total: u64,
}

/// `yes[i]` is true when question `i` of `TABLE` is answered yes.
pub fn oracle(yes: &[bool; N], gated: bool) -> Expected {
    let v = |i: usize| -> u128 {
        let (_, y, n) = TABLE[i];
        u128::from(if yes[i] { y } else { n })
    };
    // index of each tag in TABLE
    let q = |d: u32, o: u32| TABLE.iter().position(|(t, _, _)| *t == (d, o)).unwrap();
    // Gate questions open on "yes"; literally they contribute their value.
    let g = |i: usize| -> u128 {
        if gated {
            if yes[i] {
                M
            } else {
                0
            }
        } else {
            v(i)
        }
    };

    // everything below is kept at scale M^3 so products of three are exact
    let s = g(q(1, 1)) * (v(q(1, 2)) + v(q(1, 3)) + v(q(1, 4)) + v(q(1, 5)) + v(q(1, 6))) * M;
    let human = v(q(3, 2)) + v(q(3, 3));
    let h = human * g(q(4, 1)) * (v(q(3, 4)) + v(q(3, 5)) + v(q(3, 6)))
        + v(q(3, 1)) * g(q(4, 2)) * (v(q(3, 7)) + v(q(3, 8)));
    let t = (v(q(2, 1)) + v(q(2, 2)) + v(q(2, 3)) + v(q(2, 4))) * M * M;
    let r = human * (v(q(4, 1)) + v(q(4, 2)) + v(q(4, 3)) + v(q(4, 4)) + v(q(4, 5))) * M;

    let down = |x: u128| -> u64 {
        assert_eq!(x % (M * M), 0, "ERS v1 values are exact at six digits");
        (x / (M * M)) as u64
    };
    let (s, h, t, r) = (down(s), down(h), down(t), down(r));
    Expected {
        s,
        h,
        t,
        r,
        total: s + h + t + r,
    }
}

pub fn normalized(total: u64, max: u64) -> u64 {
    let num = u128::from(total) * 10 * M;
    ((num + u128::from(max) / 2) / u128::from(max)) as u64
}

pub fn audit_for(yes: &[bool; N]) -> Audit {
    let fw = builtin_ers_v1(ScoringMode::Literal);
    let mut audit = Audit::draft(&fw);
    for (i, ((d, o), _, _)) in TABLE.iter().enumerate() {
        audit
            .answers
            .insert(QuestionTag::new(*d, *o), if yes[i] { "yes" } else { "no" }.to_string());
    }
    audit
}

pub fn bits(code: u32) -> [bool; N] {
    // first question is the most significant bit; 0 means "yes"
    std::array::from_fn(|i| code >> (N - 1 - i) & 1 == 0)
}

/// Result of evaluating every one of the 2^23 audits.
pub struct Sweep {
    pub max_total: u64,
    /// First audit code (see [`bits`]) reaching `max_total`.
    pub witness: u32,
    /// Per-dimension (min, max), in S, H, T, R order.
    pub dims: [(u64, u64); 4],
}

pub fn sweep(gated: bool) -> Sweep {
    let mut out = Sweep {
        max_total: 0,
        witness: 0,
        dims: [(u64::MAX, 0); 4],
    };
    for code in 0..1u32 << N {
        let e = oracle(&bits(code), gated);
        if e.total > out.max_total {
            out.max_total = e.total;
            out.witness = code;
        }
        for (slot, v) in out.dims.iter_mut().zip([e.s, e.h, e.t, e.r]) {
            slot.0 = slot.0.min(v);
            slot.1 = slot.1.max(v);
        }
    }
    out
}
