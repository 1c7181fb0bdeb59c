//! Truncated Fock-space algebra: mode spaces, sparse operators, dense density
//! matrices, product states and expectation values.

mod dense;
mod operator;
pub mod ops;
mod space;
mod state;

pub use dense::DenseMatrix;
pub use operator::{linear_combination, OperatorMatrix};
pub use ops::{identity, lowering, number, quadrature, raising, transition};
pub use space::ModeSpace;
pub use state::{expectation, expectation_real, product_state, ModeState, QuantumState, StateData};
