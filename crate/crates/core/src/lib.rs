//! Framework-driven ethical risk scoring.
//!
//! A [`framework::FrameworkDefinition`] bundles questions, option weights,
//! dimension formulas, a principle catalog and a theory-support matrix. The
//! [`scoring::Engine`] turns an auditor's [`audit::Audit`] into an exact
//! [`scoring::ScoreReport`]; [`consensus`] traces risky answers back to the
//! principles and theories behind them.

pub mod audit;
pub mod consensus;
pub mod formula;
pub mod framework;
pub mod report;
pub mod samples;
pub mod scoring;
pub mod tag;
pub mod weight;

pub use audit::{validate_audit, Audit, ValidationError};
pub use consensus::{consensus, rank_principles, trace_audit, AuditTrace, ConsensusWeights, PrincipleConsensus};
pub use formula::{evaluate, parse_formula, print_formula, FormulaExpr, ParseError, ValueEnv};
pub use framework::{builtin_ers_v1, lint_framework, FrameworkDefinition, ScoringMode};
pub use report::{build_document, render_human, render_machine, MachineDocument};
pub use scoring::{score_audit, Engine, ScoreError, ScoreReport, WhatIfDelta};
pub use tag::{DimensionSymbol, QuestionTag};
pub use weight::{Delta, Weight};
