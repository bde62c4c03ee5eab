//! Simulation of a three-observer prepare-and-measure protocol in which a
//! middle observer (Charlie) weakly measures Alice's qubit before Bob
//! measures it projectively.
//!
//! The crate computes exact outcome statistics from the two-qubit
//! evolution, evaluates the random-access-code witness `W1` and the
//! determinant witness `W2` for both observer pairs, certifies min-entropy
//! from witness values, and searches settings and couplings numerically.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod explore;
pub mod lab;
pub mod oracle;
pub mod qubit_algebra;
pub mod randomness;
pub mod scenario;
pub mod weak_channel;
pub mod witness;

pub use error::{Error, Result};
pub use qubit_algebra::{Bloch3, Density2, Density4, UnitBloch3};
pub use scenario::{build_table, ProbTable, Scenario, ScenarioKind};
pub use weak_channel::{CharlieAxis, WeakCoupling};
pub use witness::{ClosedForm, Pair, WitnessKind, WitnessValue};
