//! Hamiltonians and jump operators on explicit mode spaces.
//!
//! The simulated model lives in the quasimode basis `(c1, c2, b)`; the bare
//! cavity modes are `a1 = c1 cos(theta) + c2 sin(theta)` and
//! `a2 = c1 sin(theta) - c2 cos(theta)`. The single-atom model on
//! `(a1-field, a2-field, atom)` exists only to validate atom elimination.

mod builders;
mod displaced;
mod jumps;
mod time_dependent;

pub use builders::{
    bare_modes, hamiltonian_beat, hamiltonian_effective, hamiltonian_interaction, jump_operators,
    quasimode_drives, single_atom_model, CAVITY1, CAVITY2, LEVEL_A, LEVEL_B, LEVEL_C, PHONON_DOWN,
    PHONON_UP,
};
pub use displaced::{classical_fields, hamiltonian_displaced, quasimode_loss};
pub use jumps::JumpSet;
pub use time_dependent::{Envelope, ModulatedTerm, OscillatingTerm, TimeDependentHamiltonian};

#[cfg(test)]
mod tests;
