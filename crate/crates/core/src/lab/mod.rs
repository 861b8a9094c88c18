//! Empirical verification of the harmonic-analysis estimates and of the
//! a priori bounds along solver trajectories.
//!
//! Inequalities with unspecified constants are checked as boundedness: each
//! check reports the ratio of the two sides over an ensemble, and the
//! supremum is the empirical constant. Exact identities are checked to
//! round-off.

pub mod dynamics;
pub mod estimates;
pub mod functionals;
pub mod identities;
pub mod operators;
pub mod report;
pub mod suite;

pub use functionals::{ct_norm, lsigma_norm, FunctionalKind, TimeFunctional};
pub use report::{CheckError, CheckReport};
pub use suite::{parse_suite, run_check, CheckSpec, Suite, CHECK_IDS};
