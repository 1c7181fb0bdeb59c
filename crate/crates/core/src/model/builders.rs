use super::jumps::JumpSet;
use super::time_dependent::TimeDependentHamiltonian;
use crate::effective::{
    beat_coefficients, mixing_angle, BeatCoefficients, DerivedCoefficients, SystemParams,
};
use crate::error::{Error, Result};
use crate::hilbert::{linear_combination, lowering, number, ModeSpace, OperatorMatrix};
use crate::scalar::{re, Real};

pub const CAVITY1: &str = "cavity1";
pub const CAVITY2: &str = "cavity2";
pub const PHONON_DOWN: &str = "phonon-down";
pub const PHONON_UP: &str = "phonon-up";

/// Atom levels on the third mode of an atom-field space.
pub const LEVEL_A: usize = 0;
pub const LEVEL_B: usize = 1;
pub const LEVEL_C: usize = 2;

fn ensure_modes(space: &ModeSpace, expected: usize) -> Result<()> {
    if space.n_modes() != expected {
        return Err(Error::WrongModeCount {
            expected,
            found: space.n_modes(),
        });
    }
    Ok(())
}

/// Bare cavity modes `(a1, a2)` written on the quasimode space `(c1, c2, b)`.
pub fn bare_modes<T: Real>(
    space: &ModeSpace,
    theta: T,
) -> Result<(OperatorMatrix<T>, OperatorMatrix<T>)> {
    ensure_modes(space, 3)?;
    let c1 = lowering(space, 0)?;
    let c2 = lowering(space, 1)?;
    let (s, c) = theta.sin_cos();
    let a1 = linear_combination(space, &[(re(c), &c1), (re(s), &c2)]);
    let a2 = linear_combination(space, &[(re(s), &c1), (re(-c), &c2)]);
    Ok((a1, a2))
}

/// Drive amplitudes on `(c1 + c1^dagger)` and `(c2 + c2^dagger)`.
pub fn quasimode_drives<T: Real>(p: &SystemParams<T>, theta: T) -> (T, T) {
    let (s, c) = theta.sin_cos();
    (p.eps1 * c + p.eps2 * s, p.eps1 * s - p.eps2 * c)
}

fn check_theta<T: Real>(p: &SystemParams<T>, dc: &DerivedCoefficients<T>) -> Result<()> {
    let b = beat_coefficients(p)?;
    let theta = mixing_angle(b.nu1, b.nu2, b.lambda)?;
    if (theta - dc.theta).abs() > T::lit(1e-12) {
        return Err(Error::ThetaInconsistent {
            stored: dc.theta.to_f64_lossy(),
            recomputed: theta.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Interaction-picture Hamiltonian on `(c1, c2, b)`: quasimode energies,
/// mechanics, radiation pressure (static number part plus the
/// `G (a1^dagger a2 e^{-i d t} + h.c.)(b + b^dagger)` beat) and drives.
pub fn hamiltonian_interaction<T: Real>(
    space: &ModeSpace,
    p: &SystemParams<T>,
    dc: &DerivedCoefficients<T>,
) -> Result<TimeDependentHamiltonian<T>> {
    ensure_modes(space, 3)?;
    check_theta(p, dc)?;
    let n1 = number(space, 0)?;
    let n2 = number(space, 1)?;
    let nb = number(space, 2)?;
    let c1 = lowering(space, 0)?;
    let c2 = lowering(space, 1)?;
    let b = lowering(space, 2)?;
    let xb = &b + &b.adjoint();
    let x1 = &c1 + &c1.adjoint();
    let x2 = &c2 + &c2.adjoint();
    let (a1, a2) = bare_modes(space, dc.theta)?;

    let mut h = TimeDependentHamiltonian::new(space);
    h.add_static(n1.clone(), -dc.omega_c1);
    h.add_static(n2.clone(), -dc.omega_c2);
    h.add_static(nb, p.omega_m);
    h.add_static(&(&n1 + &n2) * &xb, p.g_om);
    let (e1, e2) = quasimode_drives(p, dc.theta);
    if e1 != T::zero() {
        h.add_static(x1, e1);
    }
    if e2 != T::zero() {
        h.add_static(x2, e2);
    }
    let beat = &(&a1.adjoint() * &a2) * &xb;
    h.add_rotating_pair(&beat, p.g_om, p.d);
    Ok(h)
}

/// `eta1 n1 n2 + eta2 (n1 - n2) nb + s (n1^2 + n2^2) + u1 n1 + u2 n2`,
/// diagonal in the Fock basis.
pub fn hamiltonian_effective<T: Real>(
    space: &ModeSpace,
    dc: &DerivedCoefficients<T>,
) -> Result<OperatorMatrix<T>> {
    ensure_modes(space, 3)?;
    let diag: Vec<T> = (0..space.total_dim())
        .map(|i| {
            let occ = space.occupations(i);
            let [n1, n2, nb] = [0, 1, 2].map(|m| T::from_usize_lossy(occ[m]));
            dc.eta1 * n1 * n2
                + dc.eta2 * (n1 - n2) * nb
                + dc.s * (n1 * n1 + n2 * n2)
                + dc.u1 * n1
                + dc.u2 * n2
        })
        .collect();
    Ok(OperatorMatrix::diagonal(space, &diag))
}

/// Loss of both bare cavity modes and thermal mechanical damping, written in
/// the quasimode basis.
pub fn jump_operators<T: Real>(
    space: &ModeSpace,
    p: &SystemParams<T>,
    dc: &DerivedCoefficients<T>,
) -> Result<JumpSet<T>> {
    ensure_modes(space, 3)?;
    let (a1, a2) = bare_modes(space, dc.theta)?;
    let b = lowering(space, 2)?;
    let two = T::lit(2.0);
    Ok(JumpSet::new()
        .with(CAVITY1, a1.scale_real((two * p.kappa1).sqrt()))
        .with(CAVITY2, a2.scale_real((two * p.kappa2).sqrt()))
        .with(
            PHONON_DOWN,
            b.scale_real((two * p.gamma_m * (p.n_th + T::one())).sqrt()),
        )
        .with(
            PHONON_UP,
            b.adjoint().scale_real((two * p.gamma_m * p.n_th).sqrt()),
        ))
}

fn atom_projector<T: Real>(space: &ModeSpace, i: usize, j: usize) -> Result<OperatorMatrix<T>> {
    crate::hilbert::transition(space, 2, i, j)
}

/// One three-level atom coupled to the two bare fields on
/// `(a1-field, a2-field, atom)`, atom levels ordered `(a, b, c)`:
/// `Delta s_cc - delta s_aa + (g1 a1 s_ca + g2 a2 s_ba + Omega s_cb + h.c.)`.
pub fn single_atom_model<T: Real>(
    space: &ModeSpace,
    p: &SystemParams<T>,
) -> Result<OperatorMatrix<T>> {
    ensure_modes(space, 3)?;
    if space.dims()[2] != 3 {
        return Err(Error::AtomDimension(space.dims()[2]));
    }
    let a1 = lowering(space, 0)?;
    let a2 = lowering(space, 1)?;
    let s_cc = atom_projector(space, LEVEL_C, LEVEL_C)?;
    let s_aa = atom_projector(space, LEVEL_A, LEVEL_A)?;
    let s_ca = atom_projector(space, LEVEL_C, LEVEL_A)?;
    let s_ba = atom_projector(space, LEVEL_B, LEVEL_A)?;
    let s_cb = atom_projector(space, LEVEL_C, LEVEL_B)?;
    let coupling = linear_combination(
        space,
        &[
            (re(p.g1), &(&a1 * &s_ca)),
            (re(p.g2), &(&a2 * &s_ba)),
            (re(p.rabi), &s_cb),
        ],
    );
    Ok(linear_combination(
        space,
        &[
            (re(p.big_delta), &s_cc),
            (re(-p.delta), &s_aa),
            (re(T::one()), &coupling),
            (re(T::one()), &coupling.adjoint()),
        ],
    ))
}

/// Atom-eliminated field Hamiltonian `-nu1 n1 - nu2 n2 + lambda (a1^dagger a2 + h.c.)`
/// on modes 0 and 1 of `space` (identity on any further mode).
pub fn hamiltonian_beat<T: Real>(
    space: &ModeSpace,
    beat: &BeatCoefficients<T>,
) -> Result<OperatorMatrix<T>> {
    let a1 = lowering(space, 0)?;
    let a2 = lowering(space, 1)?;
    let hop = &a1.adjoint() * &a2;
    Ok(linear_combination(
        space,
        &[
            (re(-beat.nu1), &number(space, 0)?),
            (re(-beat.nu2), &number(space, 1)?),
            (re(beat.lambda), &hop),
            (re(beat.lambda), &hop.adjoint()),
        ],
    ))
}
