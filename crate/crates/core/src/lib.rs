//! Exact classification and extraction for generalized Santha-Vazirani sources.

pub mod classifier;
pub mod corpus;
pub mod error;
pub mod extractors;
pub mod linalg;
pub mod model;
pub mod rational;
pub mod oracle;
pub mod cli;
