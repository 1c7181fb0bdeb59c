//! Simulator for a two-mode optomechanical cavity filled with three-level
//! atoms: closed-form Kerr and cross-Kerr coefficients, the quasimode
//! Hamiltonians, and Lindblad / quantum-trajectory dynamics used to study
//! nondemolition readout and synchronization of photon and phonon numbers.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which every experiment uses.
//!
//! Unit convention: angular frequencies in krad/s and times in ms.
//! Configuration files and CSV outputs express frequencies in multiples of
//! `pi * krad/s` (see [`UNIT_CONVENTION`]).

pub mod dynamics;
pub mod effective;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod model;
pub mod scalar;
pub mod units;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

/// Unit string written into every output header.
pub const UNIT_CONVENTION: &str = "angular, pi*krad/s";

pub type C64 = Cx<f64>;
pub type Operator = hilbert::OperatorMatrix<f64>;
pub type Density = hilbert::DenseMatrix<f64>;
pub type State = hilbert::QuantumState<f64>;
