//! Exact statistics of occupation numbers for `N` distinguishable oscillators
//! sharing `M` indistinguishable energy quanta, with large-`N` limits, Monte
//! Carlo cross-checks and numerical verification of the supporting identities.

pub mod combinatorics;
pub mod distributions;
pub mod enumeration;
pub mod error;
pub mod exec;
pub mod figures;
pub mod fluctuation;
pub mod format;
pub mod identities;
pub mod moments;
pub mod monte_carlo;
pub mod system;

pub use combinatorics::ExactRational;
pub use error::{Error, Result};
pub use exec::Execution;
pub use system::{OccupationVector, SystemParams};
