use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::effective::{kerr_coefficients, SystemParams};
use crate::hilbert::{
    linear_combination, lowering, number, DenseMatrix, ModeSpace, OperatorMatrix,
};
use crate::scalar::Cx;
use crate::Error;

type P = SystemParams<f64>;

fn space() -> ModeSpace {
    ModeSpace::quasimodes(3, 3, 3).unwrap()
}

fn re(x: f64) -> Cx<f64> {
    Cx::new(x, 0.0)
}

#[test]
fn hermitian_at_random_times() {
    let mut p = P::reference();
    p.eps1 = 3.0;
    p.eps2 = 1.0;
    let dc = kerr_coefficients(&p).unwrap();
    let h = hamiltonian_interaction(&space(), &p, &dc).unwrap();
    assert!(h.max_hermiticity_residual() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let t: f64 = rng.random_range(-10.0..10.0);
        assert!(h.evaluate(t).hermiticity_residual() < 1e-12);
    }
}

#[test]
fn evaluation_at_zero_uses_cosine_terms() {
    let p = P::reference();
    let dc = kerr_coefficients(&p).unwrap();
    let h = hamiltonian_interaction(&space(), &p, &dc).unwrap();
    let mut expected = h.static_part();
    for o in &h.oscillating_terms {
        if o.phase == 0.0 {
            expected = &expected + &o.op.scale_real(o.amplitude);
        }
    }
    assert!((&h.evaluate(0.0) - &expected).max_abs() < 1e-9);
}

#[test]
fn untilted_beat_and_drives() {
    let mut p = P::reference();
    p.rabi = 0.0;
    p.eps1 = 2.0;
    p.eps2 = 5.0;
    let dc = kerr_coefficients(&p).unwrap();
    assert_eq!(dc.theta, 0.0);
    let sp = space();
    let h = hamiltonian_interaction(&sp, &p, &dc).unwrap();
    let c1 = lowering::<f64>(&sp, 0).unwrap();
    let c2 = lowering::<f64>(&sp, 1).unwrap();
    let b = lowering::<f64>(&sp, 2).unwrap();
    let xb = &b + &b.adjoint();
    let hop = &(&c1.adjoint() * &c2) * &xb;
    let g = p.g_om;
    for t in [0.0, 0.3e-3, 1.7e-3] {
        let phase = Cx::new(0.0, -p.d * t).exp();
        // a2 = -c2 at theta = 0, so the beat enters with a minus sign.
        let expected = linear_combination(
            &sp,
            &[(-phase * g, &hop), (-phase.conj() * g, &hop.adjoint())],
        );
        let mut osc = OperatorMatrix::zeros(&sp);
        for o in &h.oscillating_terms {
            osc = &osc + &o.op.scale_real(o.coefficient(t));
        }
        assert!((&osc - &expected).max_abs() < 1e-12);
    }
    let (e1, e2) = quasimode_drives(&p, dc.theta);
    assert_eq!((e1, e2), (2.0, -5.0));
}

#[test]
fn matched_drive_leaves_second_quasimode_undriven() {
    let mut p = P::reference();
    let dc = kerr_coefficients(&p).unwrap();
    p.eps1 = 0.1 * std::f64::consts::PI;
    p.eps2 = p.eps1 * dc.theta.tan();
    let (_, e2) = quasimode_drives(&p, dc.theta);
    assert!(e2.abs() < 1e-17);
    let sp = space();
    let with = hamiltonian_interaction(&sp, &p, &dc).unwrap();
    let mut q = p;
    q.eps1 = 0.0;
    q.eps2 = 0.0;
    let without = hamiltonian_interaction(&sp, &q, &dc).unwrap();
    let c2 = lowering::<f64>(&sp, 1).unwrap();
    let x2 = &c2 + &c2.adjoint();
    let diff = &with.static_part() - &without.static_part();
    // The drive difference has no component along c2 + c2^dagger.
    for (r, c, v) in x2.iter() {
        assert!(diff.get(r, c).norm() < 1e-15, "{r} {c} {v}");
    }
}

#[test]
fn rotation_preserves_total_number() {
    let sp = space();
    let (a1, a2) = bare_modes::<f64>(&sp, 0.37).unwrap();
    let bare = &(&a1.adjoint() * &a1) + &(&a2.adjoint() * &a2);
    let quasi = &number::<f64>(&sp, 0).unwrap() + &number(&sp, 1).unwrap();
    assert!((&bare - &quasi).max_abs() < 1e-14);
}

#[test]
fn theta_consistency_and_mode_count() {
    let p = P::reference();
    let mut dc = kerr_coefficients(&p).unwrap();
    dc.theta += 1e-9;
    assert!(matches!(
        hamiltonian_interaction(&space(), &p, &dc),
        Err(Error::ThetaInconsistent { .. })
    ));
    let two = ModeSpace::new(&[3, 3]).unwrap();
    let dc = kerr_coefficients(&p).unwrap();
    assert!(matches!(
        hamiltonian_effective(&two, &dc),
        Err(Error::WrongModeCount {
            expected: 3,
            found: 2
        })
    ));
    assert!(jump_operators(&two, &p, &dc).is_err());
}

#[test]
fn effective_is_diagonal_and_nondemolition() {
    let p = P::reference();
    let dc = kerr_coefficients(&p).unwrap();
    let sp = ModeSpace::quasimodes(4, 3, 5).unwrap();
    let h = hamiltonian_effective(&sp, &dc).unwrap();
    assert!(h.is_diagonal());
    let idx = sp.index(&[2, 1, 3]).unwrap();
    let (n1, n2, nb) = (2.0, 1.0, 3.0);
    let expected = dc.eta1 * n1 * n2
        + dc.eta2 * (n1 - n2) * nb
        + dc.s * (n1 * n1 + n2 * n2)
        + dc.u1 * n1
        + dc.u2 * n2;
    assert!((h.get(idx, idx).re - expected).abs() < 1e-12 * expected.abs());
    assert_eq!(h.get(0, 0), re(0.0));
    for m in 0..3 {
        assert_eq!(h.commutator(&number(&sp, m).unwrap()).max_abs(), 0.0);
    }
}

fn dissipator(jumps: &[OperatorMatrix<f64>], rho: &DenseMatrix<f64>) -> DenseMatrix<f64> {
    let n = rho.dim();
    let mut out = DenseMatrix::zeros(n);
    for a in jumps {
        let ad = a.to_dense();
        let add = ad.adjoint();
        let ada = add.matmul(&ad);
        let term1 = ad.matmul(rho).matmul(&add);
        let term2 = ada.matmul(rho);
        let term3 = rho.matmul(&ada);
        for k in 0..n * n {
            out.as_mut_slice()[k] +=
                term1.as_slice()[k] - (term2.as_slice()[k] + term3.as_slice()[k]) * 0.5;
        }
    }
    out
}

#[test]
fn jump_set_layout() {
    let mut p = P::reference();
    p.kappa1 = 2.0;
    p.kappa2 = 2.0;
    p.gamma_m = 0.5;
    let dc = kerr_coefficients(&p).unwrap();
    let sp = ModeSpace::quasimodes(2, 2, 3).unwrap();
    let j = jump_operators(&sp, &p, &dc).unwrap();
    assert_eq!(
        j.labels().collect::<Vec<_>>(),
        [CAVITY1, CAVITY2, PHONON_DOWN, PHONON_UP]
    );
    assert_eq!(j.get(PHONON_UP).unwrap().nnz(), 0);
    assert_eq!(j.without_zeros().len(), 3);

    p.rabi = 0.0;
    let dc = kerr_coefficients(&p).unwrap();
    let j = jump_operators(&sp, &p, &dc).unwrap();
    let c1 = lowering::<f64>(&sp, 0).unwrap().scale_real(2.0);
    let c2 = lowering::<f64>(&sp, 1).unwrap().scale_real(-2.0);
    assert!((j.get(CAVITY1).unwrap() - &c1).max_abs() < 1e-15);
    assert!((j.get(CAVITY2).unwrap() - &c2).max_abs() < 1e-15);
}

#[test]
fn isotropic_loss_is_rotation_invariant() {
    let mut p = P::reference();
    p.kappa1 = 1.5;
    p.kappa2 = 1.5;
    let dc = kerr_coefficients(&p).unwrap();
    assert!(dc.theta > 0.01);
    let sp = ModeSpace::quasimodes(3, 3, 2).unwrap();
    let j = jump_operators(&sp, &p, &dc).unwrap();
    let bare: Vec<_> = [CAVITY1, CAVITY2]
        .iter()
        .map(|l| j.get(l).unwrap().clone())
        .collect();
    let k = (2.0 * 1.5f64).sqrt();
    let quasi = vec![
        lowering(&sp, 0).unwrap().scale_real(k),
        lowering(&sp, 1).unwrap().scale_real(k),
    ];
    let n = sp.total_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi: Vec<Cx<f64>> = (0..n)
        .map(|_| Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let phi: Vec<Cx<f64>> = (0..n)
        .map(|_| Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut rho = DenseMatrix::outer(&psi);
    let other = DenseMatrix::outer(&phi);
    for (x, y) in rho.as_mut_slice().iter_mut().zip(other.as_slice()) {
        *x += *y * 0.5;
    }
    let d1 = dissipator(&bare, &rho);
    let d2 = dissipator(&quasi, &rho);
    assert!(d1.max_abs_diff(&d2) < 1e-12 * d1.max_abs());
}

#[test]
fn single_atom_structure() {
    let sp = ModeSpace::atom_fields(3, 3).unwrap();
    let mut p = P::reference().with_atoms(1);
    let h = single_atom_model(&sp, &p).unwrap();
    assert!(h.hermiticity_residual() < 1e-12);
    p.g1 = 0.0;
    p.g2 = 0.0;
    p.rabi = 0.0;
    let h = single_atom_model(&sp, &p).unwrap();
    assert!(h.is_diagonal());
    for i in 0..sp.total_dim() {
        let expected = match sp.level(i, 2) {
            LEVEL_A => -p.delta,
            LEVEL_B => 0.0,
            _ => p.big_delta,
        };
        assert_eq!(h.get(i, i).re, expected);
    }
    let bad = ModeSpace::new(&[2, 2, 4]).unwrap();
    assert!(matches!(
        single_atom_model(&bad, &p),
        Err(Error::AtomDimension(4))
    ));
}

#[test]
fn beat_hamiltonian_matches_quasimode_energies() {
    let p = P::reference();
    let dc = kerr_coefficients(&p).unwrap();
    let fields = ModeSpace::new(&[3, 3]).unwrap();
    let h = hamiltonian_beat(&fields, &dc.beat()).unwrap();
    // Same operator built from the bare modes expressed on the quasimode space.
    let sp = space();
    let (a1, a2) = bare_modes(&sp, dc.theta).unwrap();
    let hop = &a1.adjoint() * &a2;
    let bare = linear_combination(
        &sp,
        &[
            (re(-dc.nu1), &(&a1.adjoint() * &a1)),
            (re(-dc.nu2), &(&a2.adjoint() * &a2)),
            (re(dc.lambda), &hop),
            (re(dc.lambda), &hop.adjoint()),
        ],
    );
    let quasi = linear_combination(
        &sp,
        &[
            (re(-dc.omega_c1), &number(&sp, 0).unwrap()),
            (re(-dc.omega_c2), &number(&sp, 1).unwrap()),
        ],
    );
    assert!((&bare - &quasi).max_abs() < 1e-10 * dc.omega_c2);
    // Single-excitation eigenvalues are -omega_c2 and -omega_c1.
    let one = fields.index(&[1, 0]).unwrap();
    let two = fields.index(&[0, 1]).unwrap();
    let block = [
        [h.get(one, one).re, h.get(one, two).re],
        [h.get(two, one).re, h.get(two, two).re],
    ];
    let tr = block[0][0] + block[1][1];
    let det = block[0][0] * block[1][1] - block[0][1] * block[1][0];
    let disc = (tr * tr / 4.0 - det).sqrt();
    assert!((tr / 2.0 - disc + dc.omega_c2).abs() < 1e-9 * dc.omega_c2);
    assert!((tr / 2.0 + disc + dc.omega_c1).abs() < 1e-9 * dc.omega_c2);
}
