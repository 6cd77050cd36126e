//! Online first-order approximations of offline linear programs, an exact
//! bounded-variable simplex, and a sifting loop seeded by the online pass.
//!
//! All instances share the form `max ⟨c,x⟩ s.t. Ax ≤ b, 0 ≤ x ≤ u`.

pub mod error;
pub mod instances_io;
pub mod lp_model;
pub mod online_core;
pub mod rng;
pub mod sifting;
pub mod simplex_solver;

pub use error::{Error, Result};
pub use instances_io::{MkpParams, MpsModel, ResultRecord};
pub use lp_model::{Column, InstanceStats, LpInstance, Metrics};
pub use online_core::{Method, OnlineSolution, RunConfig, StartPoint, StepsizeMode};
pub use sifting::{SiftConfig, SiftResult, SiftStatus};
pub use simplex_solver::{Basis, SimplexResult, SimplexStatus, VarId};
