//! Command-line front end and HTTP service for the `ers-core` scoring engine.

pub mod cli;
pub mod config;
pub mod registry;
pub mod service;
