//! Closed-form coefficients of the effective description: atom-induced mode
//! shifts and coupling, the quasimode rotation, Kerr and cross-Kerr strengths,
//! and the regime-validity diagnostics.

mod coefficients;
mod params;
mod sweep;
mod validity;

pub use coefficients::{
    beat_coefficients, kerr_coefficients, kerr_coefficients_with_guard, mixing_angle,
    quasimode_transform, BeatCoefficients, DerivedCoefficients, Quasimodes, COEFFICIENT_NAMES,
    DEFAULT_GUARD_FRACTION,
};
pub use params::{SystemParams, PARAM_NAMES};
pub use sweep::{
    axis_in_file_units, coefficients_in_file_units, params_comment, sweep, write_sweep_csv,
    SweepAxis, SweepRow,
};
pub use validity::{validity_report, Inequality, Relation, ValidityReport, ValidityThresholds};
