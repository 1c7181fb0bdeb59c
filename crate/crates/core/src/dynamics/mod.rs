//! Time evolution: Lindblad master equation, closed-system evolution,
//! quantum trajectories, steady-state detection and the numerical check of
//! atom elimination.
//!
//! The static diagonal of the Hamiltonian is propagated exactly and the rest
//! by an integrating-factor RK4 (or Dormand-Prince 5(4)). Density matrices
//! are dense; every operator acts as a sparse-times-dense product.

mod adiabatic;
mod generator;
mod integrate;
mod master;
mod series;
mod spec;
mod trajectories;

pub use adiabatic::{
    adiabatic_elimination_check, single_atom_beat_period, AdiabaticOptions, AdiabaticReport,
    MAX_FIELD_DIM,
};
pub use master::{evolve_master, evolve_unitary};
pub use series::{
    steady_state_detect, steady_state_detect_with_floor, TimeSeries, DEFAULT_ABS_FLOOR,
};
pub use spec::{
    EvolutionSpec, Integrator, Observable, TimeGrid, DENSITY_BOUND_FLOOR, DENSITY_STEP_SAFETY,
    STEP_SAFETY, UNITARY_STEP_SAFETY,
};
pub use trajectories::evolve_trajectories;

#[cfg(test)]
mod tests;
