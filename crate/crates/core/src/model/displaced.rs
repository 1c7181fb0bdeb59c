//! Time-dependent displaced frame for strongly driven, damped runs.
//!
//! Writing `c_j = alpha_j(t) + d_j`, with `alpha` the classical solution of
//! `d alpha/dt = (i Omega - K) alpha - i e`, `alpha(0) = 0`, removes every term
//! linear in the fluctuations `d_j`: the drive, the free rotation of `alpha`
//! and the jump shift `D[A + beta] = D[A] + [beta* A - beta A^dagger, .] / 2`
//! cancel exactly. Jump operators stay undisplaced. The initial state is
//! unchanged because `alpha(0) = 0`.

use super::builders::{hamiltonian_interaction, quasimode_drives};
use super::time_dependent::{Envelope, TimeDependentHamiltonian};
use crate::effective::{DerivedCoefficients, SystemParams};
use crate::error::{Error, Result};
use crate::hilbert::{lowering, ModeSpace};
use crate::scalar::{re, Cx, Real};

/// Quasimode loss matrix `K = R diag(kappa1, kappa2) R`, `R = [[c, s], [s, -c]]`.
pub fn quasimode_loss<T: Real>(p: &SystemParams<T>, theta: T) -> [[T; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let k11 = p.kappa1 * c * c + p.kappa2 * s * s;
    let k22 = p.kappa1 * s * s + p.kappa2 * c * c;
    let k12 = (p.kappa1 - p.kappa2) * c * s;
    [[k11, k12], [k12, k22]]
}

/// `alpha(t)` for both quasimodes as sums of complex exponentials.
pub fn classical_fields<T: Real>(
    p: &SystemParams<T>,
    dc: &DerivedCoefficients<T>,
) -> Result<[Envelope<T>; 2]> {
    let (e1, e2) = quasimode_drives(p, dc.theta);
    if e1 == T::zero() && e2 == T::zero() {
        return Ok([Envelope::zero(), Envelope::zero()]);
    }
    let k = quasimode_loss(p, dc.theta);
    let i = Cx::new(T::zero(), T::one());
    let a = [
        [i * dc.omega_c1 - re(k[0][0]), re(-k[0][1])],
        [re(-k[1][0]), i * dc.omega_c2 - re(k[1][1])],
    ];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = a.iter().flatten().fold(T::one(), |m, z| m.max(z.norm()));
    if det.norm() <= T::lit(1e-12) * scale * scale {
        return Err(Error::InvalidParameter {
            name: "kappa1",
            reason: "the driven quasimodes have no steady state (undamped zero frequency)".into(),
        });
    }
    // alpha_ss = i A^{-1} e
    let (e1, e2) = (re(e1), re(e2));
    let v = [
        i * (a[1][1] * e1 - a[0][1] * e2) / det,
        i * (a[0][0] * e2 - a[1][0] * e1) / det,
    ];
    let mu = (a[0][0] + a[1][1]) * T::lit(0.5);
    let q = (mu * mu - det).sqrt();
    if q.norm() <= T::lit(1e-9) * scale {
        return Err(Error::InvalidParameter {
            name: "kappa1",
            reason: "degenerate quasimode relaxation rates; the displaced frame is undefined"
                .into(),
        });
    }
    // e^{At} v = (v + w)/2 e^{(mu+q)t} + (v - w)/2 e^{(mu-q)t},  w = (A - mu) v / q
    let w = [
        ((a[0][0] - mu) * v[0] + a[0][1] * v[1]) / q,
        (a[1][0] * v[0] + (a[1][1] - mu) * v[1]) / q,
    ];
    let half = T::lit(0.5);
    let field = |j: usize| Envelope {
        terms: vec![
            (v[j], Cx::new(T::zero(), T::zero())),
            (-(v[j] + w[j]) * half, mu + q),
            (-(v[j] - w[j]) * half, mu - q),
        ],
    };
    Ok([field(0), field(1)])
}

/// Hamiltonian of the fluctuations `d_j` in the frame displaced by
/// [`classical_fields`], together with those fields. Use it with the
/// unchanged jump operators.
pub fn hamiltonian_displaced<T: Real>(
    space: &ModeSpace,
    p: &SystemParams<T>,
    dc: &DerivedCoefficients<T>,
) -> Result<(TimeDependentHamiltonian<T>, [Envelope<T>; 2])> {
    let alpha = classical_fields(p, dc)?;
    let mut undriven = *p;
    undriven.eps1 = T::zero();
    undriven.eps2 = T::zero();
    let mut h = hamiltonian_interaction(space, &undriven, dc)?;
    if alpha.iter().all(Envelope::is_zero) {
        return Ok((h, alpha));
    }
    let (s, c) = dc.theta.sin_cos();
    let g = re(p.g_om);
    let beat = Cx::new(T::zero(), -p.d);
    let beta1 = alpha[0].scale(re(c)).plus(&alpha[1].scale(re(s)));
    let beta2 = alpha[0].scale(re(s)).plus(&alpha[1].scale(re(-c)));
    let b = lowering(space, 2)?;
    let xb = &b + &b.adjoint();

    // G (alpha_j d_j^dagger + h.c.) X_b from the number part, plus the
    // beat pieces G (beta2 e^{-idt} a1^dagger + beta1* e^{-idt} a2 + h.c.) X_b
    // regrouped onto d_j^dagger X_b.
    let up = beta2.shifted(beat);
    let down = beta1.shifted(-beat);
    let f1 = alpha[0]
        .plus(&up.scale(re(c)))
        .plus(&down.scale(re(s)))
        .scale(g);
    let f2 = alpha[1]
        .plus(&up.scale(re(s)))
        .plus(&down.scale(re(-c)))
        .scale(g);
    for (mode, f) in [(0, f1), (1, f2)] {
        let raise = lowering(space, mode)?.adjoint();
        h.add_modulated(&raise * &xb, f);
    }
    // G (|alpha1|^2 + |alpha2|^2) X_b + G (beta1* beta2 e^{-idt} + h.c.) X_b,
    // written as f X_b + h.c. with the number part halved.
    let numbers = alpha[0]
        .times(&alpha[0].conj())
        .plus(&alpha[1].times(&alpha[1].conj()));
    let fx = numbers
        .scale(re(T::lit(0.5)))
        .plus(&beta1.conj().times(&beta2).shifted(beat))
        .scale(g);
    h.add_modulated(xb, fx);
    Ok((h, alpha))
}
