use super::params::SystemParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Atom-induced frequency shifts and beam-splitter coupling of the two
/// cavity modes, `H = -nu1 n1 - nu2 n2 + lambda (a1^dagger a2 + h.c.)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatCoefficients<T> {
    pub nu1: T,
    pub nu2: T,
    pub lambda: T,
    pub delta_tilde: T,
}

/// Quasimode rotation `a1 = c1 cos(theta) + c2 sin(theta)`,
/// `a2 = c1 sin(theta) - c2 cos(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quasimodes<T> {
    /// Mixing angle in `[0, pi/2)`.
    pub theta: T,
    pub omega_c1: T,
    pub omega_c2: T,
    /// `omega_c2 - omega_c1`.
    pub omega_f: T,
    /// Leftover `c1^dagger c2` coefficient; zero up to rounding.
    pub residual: T,
}

/// Every closed-form quantity of the effective description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients<T> {
    pub nu1: T,
    pub nu2: T,
    pub lambda: T,
    pub delta_tilde: T,
    pub theta: T,
    pub omega_c1: T,
    pub omega_c2: T,
    pub omega_f: T,
    pub v: T,
    pub u1: T,
    pub u2: T,
    pub s: T,
    /// Cross-Kerr strength, `v + u2 - u1`.
    pub eta1: T,
    /// Photon-phonon cross-Kerr strength, `u2 - u1`.
    pub eta2: T,
}

/// Column names of [`DerivedCoefficients`], in [`DerivedCoefficients::values`] order.
pub const COEFFICIENT_NAMES: [&str; 14] = [
    "nu1",
    "nu2",
    "lambda",
    "Delta_tilde",
    "theta",
    "omega_c1",
    "omega_c2",
    "omega_f",
    "v",
    "u1",
    "u2",
    "s",
    "eta1",
    "eta2",
];

impl<T: Real> DerivedCoefficients<T> {
    pub fn values(&self) -> [T; 14] {
        [
            self.nu1,
            self.nu2,
            self.lambda,
            self.delta_tilde,
            self.theta,
            self.omega_c1,
            self.omega_c2,
            self.omega_f,
            self.v,
            self.u1,
            self.u2,
            self.s,
            self.eta1,
            self.eta2,
        ]
    }

    pub fn beat(&self) -> BeatCoefficients<T> {
        BeatCoefficients {
            nu1: self.nu1,
            nu2: self.nu2,
            lambda: self.lambda,
            delta_tilde: self.delta_tilde,
        }
    }

    pub fn quasimodes(&self) -> Quasimodes<T> {
        Quasimodes {
            theta: self.theta,
            omega_c1: self.omega_c1,
            omega_c2: self.omega_c2,
            omega_f: self.omega_f,
            residual: T::zero(),
        }
    }
}

pub fn beat_coefficients<T: Real>(p: &SystemParams<T>) -> Result<BeatCoefficients<T>> {
    let delta_tilde = p.delta * (p.big_delta + p.delta) - p.rabi * p.rabi;
    let scale = (p.delta * p.delta)
        .abs()
        .max((p.delta * p.big_delta).abs())
        .max(p.rabi * p.rabi);
    if delta_tilde == T::zero() || delta_tilde.abs() <= T::EPS * scale {
        return Err(Error::SingularDetuning(delta_tilde.to_f64_lossy()));
    }
    let two_n = T::lit(2.0) * p.atoms_real();
    Ok(BeatCoefficients {
        nu1: two_n * p.g1 * p.g1 * p.delta / delta_tilde,
        nu2: two_n * p.g2 * p.g2 * (p.delta + p.big_delta) / delta_tilde,
        lambda: two_n * p.g1 * p.g2 * p.rabi / delta_tilde,
        delta_tilde,
    })
}

/// Mixing angle `0.5 * atan2(2 lambda, nu2 - nu1)` folded into `[0, pi/2)`.
pub fn mixing_angle<T: Real>(nu1: T, nu2: T, lambda: T) -> Result<T> {
    if lambda == T::zero() && nu1 == nu2 {
        return Err(Error::UndefinedRotation);
    }
    let half_pi = T::FRAC_PI_2();
    let mut theta = T::lit(0.5) * (T::lit(2.0) * lambda).atan2(nu2 - nu1);
    if theta < T::zero() {
        theta += half_pi;
    }
    if theta >= half_pi {
        theta -= half_pi;
    }
    Ok(theta)
}

pub fn quasimode_transform<T: Real>(nu1: T, nu2: T, lambda: T) -> Result<Quasimodes<T>> {
    let theta = mixing_angle(nu1, nu2, lambda)?;
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (T::lit(2.0) * theta).sin_cos();
    let omega_c1 = nu1 * c * c + nu2 * s * s - lambda * s2;
    let omega_c2 = nu1 * s * s + nu2 * c * c + lambda * s2;
    Ok(Quasimodes {
        theta,
        omega_c1,
        omega_c2,
        omega_f: omega_c2 - omega_c1,
        residual: (nu2 - nu1) * s * c - lambda * c2,
    })
}

/// Default half-width of the resonance guard band, as a fraction of `omega_m`.
pub const DEFAULT_GUARD_FRACTION: f64 = 1e-6;

pub fn kerr_coefficients<T: Real>(p: &SystemParams<T>) -> Result<DerivedCoefficients<T>> {
    kerr_coefficients_with_guard(p, T::lit(DEFAULT_GUARD_FRACTION))
}

/// As [`kerr_coefficients`], rejecting any denominator within
/// `guard_fraction * omega_m` of zero (`omega_m^2 - d^2` is compared against
/// `guard_fraction * omega_m^2`).
pub fn kerr_coefficients_with_guard<T: Real>(
    p: &SystemParams<T>,
    guard_fraction: T,
) -> Result<DerivedCoefficients<T>> {
    p.validate()?;
    let beat = beat_coefficients(p)?;
    let q = quasimode_transform(beat.nu1, beat.nu2, beat.lambda)?;
    let (wm, d, wf) = (p.omega_m, p.d, q.omega_f);
    let band = guard_fraction * wm;

    let check = |name: &'static str, value: T, band: T| -> Result<T> {
        if value == T::zero() || value.abs() < band {
            Err(Error::ResonanceSingularity {
                denominator: name,
                value: value.to_f64_lossy(),
            })
        } else {
            Ok(value)
        }
    };
    let wm = check("omega_m", wm, band)?;
    let m2d2 = check("omega_m^2-d^2", wm * wm - d * d, band * wm)?;
    let a = check("omega_f+d-omega_m", wf + d - wm, band)?;
    let b = check("omega_f-d-omega_m", wf - d - wm, band)?;
    let c = check("omega_f+d+omega_m", wf + d + wm, band)?;
    let e = check("omega_f-d+omega_m", wf - d + wm, band)?;

    let (sn, cs) = q.theta.sin_cos();
    let s4 = sn.powi(4);
    let c4 = cs.powi(4);
    let sin2 = (T::lit(2.0) * q.theta).sin();
    let sin2_sq = sin2 * sin2;
    let g2 = p.g_om * p.g_om;
    let two = T::lit(2.0);

    let v = (wm * sin2_sq / m2d2 - two / wm) * g2;
    let u1 = g2 * s4 / a + g2 * c4 / b;
    let u2 = -g2 * s4 / c - g2 * c4 / e;
    let s = -(T::one() / wm + wm * sin2_sq / (two * m2d2)) * g2;

    Ok(DerivedCoefficients {
        nu1: beat.nu1,
        nu2: beat.nu2,
        lambda: beat.lambda,
        delta_tilde: beat.delta_tilde,
        theta: q.theta,
        omega_c1: q.omega_c1,
        omega_c2: q.omega_c2,
        omega_f: q.omega_f,
        v,
        u1,
        u2,
        s,
        eta1: v + u2 - u1,
        eta2: u2 - u1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn reference() -> SystemParams<f64> {
        SystemParams::reference()
    }

    // Frozen from an independent high-precision evaluation of the closed forms.
    #[test]
    fn reference_values() {
        let dc = kerr_coefficients(&reference()).unwrap();
        let tol = 1e-9;
        assert_relative_eq!(dc.delta_tilde / (PI * PI), 124600.0, max_relative = tol);
        assert_relative_eq!(dc.nu1 / PI, 561.7977528089888, max_relative = tol);
        assert_relative_eq!(dc.nu2 / PI, 1359.5505617977528, max_relative = tol);
        assert_relative_eq!(dc.lambda / PI, 49.438202247191015, max_relative = tol);
        assert_relative_eq!(dc.theta, 0.0616573865039738, max_relative = tol);
        assert_relative_eq!(dc.eta1 / PI, 0.7491398807705218, max_relative = tol);
        assert_relative_eq!(dc.eta2 / PI, 1.7410707555422622, max_relative = tol);
        assert_relative_eq!(dc.s / PI, -0.5040345626141298, max_relative = tol);
        assert_relative_eq!(
            (2.0 * dc.theta).tan(),
            17600.0 / 142000.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn f32_tracks_f64() {
        let p64 = reference();
        let p32 = SystemParams::<f32>::reference();
        let a = kerr_coefficients(&p64).unwrap().values();
        let b = kerr_coefficients(&p32).unwrap().values();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_relative_eq!(*x, *y as f64, max_relative = 1e-3);
        }
    }

    #[test]
    fn singular_detuning() {
        let mut p = reference();
        // delta (Delta + delta) = Omega^2
        p.delta = 10.0;
        p.big_delta = 0.0;
        p.rabi = 10.0;
        assert!(matches!(
            beat_coefficients(&p),
            Err(Error::SingularDetuning(_))
        ));
    }

    #[test]
    fn zero_rabi_zero_lambda() {
        let mut p = reference();
        p.rabi = 0.0;
        let b = beat_coefficients(&p).unwrap();
        assert_eq!(b.lambda, 0.0);
    }

    #[test]
    fn trivial_rotations() {
        let q = quasimode_transform(1.0, 3.0, 0.0).unwrap();
        assert_eq!(q.theta, 0.0);
        assert_eq!((q.omega_c1, q.omega_c2), (1.0, 3.0));
        let q = quasimode_transform(2.0, 2.0, 0.5).unwrap();
        assert_relative_eq!(q.theta, PI / 4.0, max_relative = 1e-15);
        assert_relative_eq!(q.omega_f, 1.0, max_relative = 1e-14);
        assert!(matches!(
            quasimode_transform(2.0, 2.0, 0.0),
            Err(Error::UndefinedRotation)
        ));
        let q = quasimode_transform(3.0, 1.0, 0.0).unwrap();
        assert!(q.theta >= 0.0 && q.theta < PI / 2.0);
    }

    #[test]
    fn no_coupling_no_kerr() {
        let mut p = reference();
        p.g_om = 0.0;
        let dc = kerr_coefficients(&p).unwrap();
        for x in [dc.v, dc.u1, dc.u2, dc.s, dc.eta1, dc.eta2] {
            assert_eq!(x, 0.0);
        }
    }

    #[test]
    fn untilted_limit() {
        let mut p = reference();
        p.rabi = 0.0;
        let dc = kerr_coefficients(&p).unwrap();
        assert_eq!(dc.theta, 0.0);
        let (g2, wm, wf, d) = (p.g_om * p.g_om, p.omega_m, dc.omega_f, p.d);
        assert_relative_eq!(dc.s, -g2 / wm, max_relative = 1e-14);
        assert_relative_eq!(dc.v, -2.0 * g2 / wm, max_relative = 1e-14);
        assert_relative_eq!(dc.u1, g2 / (wf - d - wm), max_relative = 1e-14);
        assert_relative_eq!(dc.u2, -g2 / (wf - d + wm), max_relative = 1e-14);
    }

    #[test]
    fn resonance_is_named() {
        let mut p = reference();
        let dc = kerr_coefficients(&p).unwrap();
        p.d = p.omega_m - dc.omega_f;
        match kerr_coefficients(&p) {
            Err(Error::ResonanceSingularity { denominator, .. }) => {
                assert_eq!(denominator, "omega_f+d-omega_m")
            }
            other => panic!("unexpected {other:?}"),
        }
        let mut p = reference();
        p.d = p.omega_m;
        assert!(matches!(
            kerr_coefficients(&p),
            Err(Error::ResonanceSingularity {
                denominator: "omega_m^2-d^2",
                ..
            })
        ));
    }

    #[test]
    fn monotone_in_atoms() {
        let mut last = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for n in (200..=400).step_by(10) {
            let dc = kerr_coefficients(&reference().with_atoms(n)).unwrap();
            assert!(dc.eta1 > last.0 && dc.eta2 > last.1);
            last = (dc.eta1, dc.eta2);
        }
    }

    fn params() -> impl Strategy<Value = SystemParams<f64>> {
        (
            1.0..100.0f64,
            1.0..100.0f64,
            0.0..100.0f64,
            100.0..1000.0f64,
            100.0..1000.0f64,
            1u32..1000,
            0.0..50.0f64,
        )
            .prop_map(|(g1, g2, rabi, delta, big_delta, atoms, g)| SystemParams {
                g1,
                g2,
                rabi,
                delta,
                big_delta,
                atoms,
                g_om: g,
                ..SystemParams::reference()
            })
    }

    proptest! {
        #[test]
        fn linear_in_atoms(p in params(), c in 1u32..5) {
            let a = beat_coefficients(&p).unwrap();
            let b = beat_coefficients(&p.with_atoms(p.atoms * c)).unwrap();
            let c = c as f64;
            prop_assert!((b.nu1 - c * a.nu1).abs() <= 1e-12 * b.nu1.abs());
            prop_assert!((b.nu2 - c * a.nu2).abs() <= 1e-12 * b.nu2.abs());
            prop_assert!((b.lambda - c * a.lambda).abs() <= 1e-12 * b.lambda.abs().max(1e-300));
        }

        #[test]
        fn angle_independent_of_atoms(p in params(), c in 2u32..5) {
            let a = beat_coefficients(&p).unwrap();
            let b = beat_coefficients(&p.with_atoms(p.atoms * c)).unwrap();
            let ta = mixing_angle(a.nu1, a.nu2, a.lambda).unwrap();
            let tb = mixing_angle(b.nu1, b.nu2, b.lambda).unwrap();
            prop_assert!((ta - tb).abs() <= 1e-12);
        }

        #[test]
        fn rotation_diagonalizes(nu1 in -1e3..1e3f64, nu2 in -1e3..1e3f64, lambda in -1e3..1e3f64) {
            prop_assume!(lambda.abs() > 1e-6 || (nu1 - nu2).abs() > 1e-6);
            let q = quasimode_transform(nu1, nu2, lambda).unwrap();
            let scale = nu1.abs().max(nu2.abs()).max(lambda.abs());
            prop_assert!(q.residual.abs() < 1e-10 * scale);
            prop_assert!(q.theta >= 0.0 && q.theta < std::f64::consts::FRAC_PI_2);
            // Eigenvalues of [[nu1, -lambda], [-lambda, nu2]].
            let mean = 0.5 * (nu1 + nu2);
            let rad = (0.25 * (nu1 - nu2).powi(2) + lambda * lambda).sqrt();
            let mut got = [q.omega_c1, q.omega_c2];
            got.sort_by(f64::total_cmp);
            prop_assert!((got[0] - (mean - rad)).abs() <= 1e-12 * scale.max(1.0) * 4.0);
            prop_assert!((got[1] - (mean + rad)).abs() <= 1e-12 * scale.max(1.0) * 4.0);
        }

        #[test]
        fn kerr_identities(p in params()) {
            if let Ok(dc) = kerr_coefficients(&p) {
                let scale = dc.v.abs() + dc.u1.abs() + dc.u2.abs();
                prop_assert!((dc.eta1 - dc.eta2 - dc.v).abs() <= 1e-12 * scale);
                prop_assert_eq!(dc.eta2, dc.u2 - dc.u1);
                prop_assert_eq!(dc.omega_f, dc.omega_c2 - dc.omega_c1);
            }
        }
    }
}
