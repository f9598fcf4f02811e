//! Decide and certify compatibility, divisibility and (anti-/self-)
//! degradability of finite-dimensional quantum channels.
//!
//! Channels are stored as unnormalized Choi operators (`Tr J = dim_in`) with
//! the input factor first. Every decision procedure reduces to a PSD/affine
//! feasibility problem in Choi coordinates, solved by [`feasibility::solve`];
//! every positive answer comes with a witness channel that is re-verified
//! through [`channel`] operations only.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod feasibility;
pub mod format;
pub mod matrix;
pub mod random;

pub use channel::{Channel, KrausSet, StinespringIsometry};
pub use error::{Error, Result};
pub use feasibility::{FeasibilityReport, FeasibilityStatus, SolverConfig};
pub use matrix::{ComplexMatrix, SubsystemDims, C64};
