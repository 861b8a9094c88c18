//! LANS-α dynamics: stress, nonlinearity, semigroup and Duhamel operators,
//! Picard iteration and the production time stepper.

pub mod admissibility;
pub mod config;
pub mod existence;
pub mod picard;
pub mod semigroup;
pub mod stepper;
pub mod stress;
pub mod trajectory;

pub use admissibility::{check_admissible, Admissible};
pub use config::{BesovIndices, InitialCondition, SolverConfig};
pub use existence::{estimate_existence_time, ExistenceRow, ExistenceSearch};
pub use picard::{picard_solve, PicardReport};
pub use semigroup::{duhamel_apply, semigroup_apply, DuhamelOperator};
pub use stepper::{solve_ivp, BLOW_UP_THRESHOLD};
pub use stress::{nonlinearity_v, reynolds_stress};
pub use trajectory::{NormRecord, NormRecorder, Trajectory};
