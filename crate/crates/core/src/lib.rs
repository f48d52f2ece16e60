//! Catalytic mitigation of heat and entropy dissipation in information
//! erasure with finite environments.
//!
//! - [`qstate`]: distributions, energy ladders, joint states and the
//!   finite-bath Landauer equality.
//! - [`majorization`]: majorization tests and passive energies.
//! - [`catalyst`]: correlation witnesses, equal-transfer catalysts and the
//!   system-controlled permutation that consumes correlations.
//! - [`optimal_erasure`]: the block-sorting maximum-erasure permutation,
//!   its periodicity conditions and minimum-heat targets.
//! - [`jc_sim`]: qubit erasure by a thermal oscillator under the
//!   Jaynes-Cummings coupling.
//! - [`oracle`]: brute-force and sampling references.
//! - [`cli`]: the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalyst;
pub mod cli;
pub mod error;
pub mod jc_sim;
pub mod majorization;
pub mod optimal_erasure;
pub mod oracle;
pub mod qstate;

pub use error::{Error, Result};
pub use qstate::{EnergyLadder, JointState, ProbDist};
