//! Conversions between internal units (krad/s, ms), the file convention
//! (multiples of pi krad/s) and laboratory quantities.

use crate::scalar::Real;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Multiples of pi krad/s to krad/s.
pub fn from_pi_units<T: Real>(x: T) -> T {
    x * T::PI()
}

/// krad/s to multiples of pi krad/s, rounded to 15 significant digits so
/// that values entered in pi units print back unchanged.
pub fn to_pi_units<T: Real>(x: T) -> f64 {
    tidy(x.to_f64_lossy() / std::f64::consts::PI)
}

/// Rounds to 15 significant digits.
pub fn tidy(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Linear frequency in kHz to angular frequency in multiples of pi krad/s.
pub fn khz_linear_to_pi_units(f: f64) -> f64 {
    2.0 * f
}

pub fn pi_units_to_khz_linear(x: f64) -> f64 {
    0.5 * x
}

/// Bose occupation of a mode at `omega` (krad/s) and temperature (K).
pub fn thermal_occupation(omega_krad: f64, temperature_k: f64) -> f64 {
    if temperature_k <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega_krad * 1e3 / (K_B * temperature_k);
    1.0 / x.exp_m1()
}

/// Temperature (K) at which a mode at `omega` (krad/s) has occupation `n_th`.
pub fn temperature_for_occupation(omega_krad: f64, n_th: f64) -> f64 {
    if n_th <= 0.0 {
        return 0.0;
    }
    HBAR * omega_krad * 1e3 / (K_B * (1.0 / n_th).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pi_round_trip() {
        for x in [20.0, 22.0, 250.0, 349.0, 0.749, -0.504, 1e-3] {
            assert_eq!(to_pi_units(from_pi_units(x)), x);
        }
    }

    #[test]
    fn linear_frequency() {
        assert_eq!(khz_linear_to_pi_units(400.0), 800.0);
        assert_eq!(pi_units_to_khz_linear(800.0), 400.0);
    }

    #[test]
    fn thermal_round_trip() {
        let w = 800.0 * PI;
        let n = thermal_occupation(w, 42e-6);
        assert!((n - 1.72).abs() < 0.01, "{n}");
        assert!((temperature_for_occupation(w, n) - 42e-6).abs() < 1e-15);
        // High temperature: n ~ kT / (hbar omega).
        let n = thermal_occupation(w, 1.0);
        assert!((n - K_B / (HBAR * w * 1e3)).abs() / n < 1e-4);
    }
}
