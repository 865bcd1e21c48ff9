//! Geometric quantum discord of two-qubit states, local dephasing channels,
//! and the conditions under which the discord of an X state freezes.
//!
//! Modules, bottom up:
//!
//! * [`numerics`]: Jacobi eigensolver and singular values for tiny matrices.
//! * [`qstate`]: dense, X-structured and Bloch representations.
//! * [`gmqd`]: three closed-form evaluators plus a brute-force oracle.
//! * [`channels`]: Markovian phase damping and colored (non-Markovian) noise.
//! * [`freezing`]: freezing predicates, plateau endpoints, interval detection
//!   and region scans.
//! * [`sampling`]: seeded random states.

pub mod channels;
pub mod error;
pub mod freezing;
pub mod gmqd;
pub mod numerics;
pub mod qstate;
pub mod sampling;

pub use error::{Error, Result};
