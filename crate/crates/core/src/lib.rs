//! Statistical replication toolkit for early nineteenth-century inference.
//!
//! The crate gathers the tests used by the first statisticians who tried to
//! *prove* something with numbers (Arbuthnot's sign argument, Laplace's
//! posterior tail for a proportion, Cournot's deviation probability,
//! d'Angeville's quintile séries checked with Fisher's exact test) together
//! with the modern machinery needed to recompute their p-values, and a small
//! pipeline measuring how often a word appears in a dated newspaper archive.
//!
//! * [`specfun`]: log-space special functions (log-gamma, incomplete beta,
//!   hypergeometric tails, Student and normal tails).
//! * [`exact`]: exact rational hypergeometric probabilities.
//! * [`inference`]: the historical tests, each returning a [`TestResult`].
//! * [`series`]: departmental tables, ranks, séries and Bigeon's methods.
//! * [`corpus`]: archive ingestion, annual document-frequency series,
//!   period comparison, correlation, co-occurrence and SVG charts.
//! * [`replicate`]: the built-in table of reproduced historical values.

pub mod corpus;
pub mod error;
pub mod exact;
pub mod inference;
pub mod replicate;
pub mod series;
pub mod specfun;

pub use error::{Error, Result};
pub use inference::{CournotResult, Method, Param, Params, Tail, TestResult};
pub use series::{DeptTable, Direction, RankAssignment, Serie};
pub use specfun::LogProb;
