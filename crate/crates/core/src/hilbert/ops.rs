//! Single-mode operators embedded in composite spaces.

use num_traits::One;

use super::operator::OperatorMatrix;
use super::space::ModeSpace;
use crate::error::Result;
use crate::scalar::{Cx, Real};

/// Annihilation operator on `mode`: `<n-1|a|n> = sqrt(n)` inside the truncation.
pub fn lowering<T: Real>(space: &ModeSpace, mode: usize) -> Result<OperatorMatrix<T>> {
    space.check_mode(mode)?;
    let d = space.dims()[mode];
    let local: Vec<_> = (1..d)
        .map(|n| (n - 1, n, Cx::new(T::from_usize_lossy(n).sqrt(), T::zero())))
        .collect();
    Ok(OperatorMatrix::embed(space, mode, &local))
}

pub fn raising<T: Real>(space: &ModeSpace, mode: usize) -> Result<OperatorMatrix<T>> {
    Ok(lowering(space, mode)?.adjoint())
}

pub fn number<T: Real>(space: &ModeSpace, mode: usize) -> Result<OperatorMatrix<T>> {
    space.check_mode(mode)?;
    let d = space.dims()[mode];
    let local: Vec<_> = (1..d)
        .map(|n| (n, n, Cx::new(T::from_usize_lossy(n), T::zero())))
        .collect();
    Ok(OperatorMatrix::embed(space, mode, &local))
}

/// Quadrature `x = a + a^dagger`.
pub fn quadrature<T: Real>(space: &ModeSpace, mode: usize) -> Result<OperatorMatrix<T>> {
    let a = lowering(space, mode)?;
    Ok(&a + &a.adjoint())
}

/// Transition operator `|i><j|` on `mode` (atomic `sigma_ij`).
pub fn transition<T: Real>(
    space: &ModeSpace,
    mode: usize,
    i: usize,
    j: usize,
) -> Result<OperatorMatrix<T>> {
    space.check_mode(mode)?;
    let d = space.dims()[mode];
    if i >= d || j >= d {
        return Err(crate::Error::InvalidMode {
            mode: i.max(j),
            modes: d,
        });
    }
    Ok(OperatorMatrix::embed(space, mode, &[(i, j, Cx::one())]))
}

pub fn identity<T: Real>(space: &ModeSpace) -> OperatorMatrix<T> {
    OperatorMatrix::identity(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Cx<f64> {
        Cx::new(re, 0.0)
    }

    #[test]
    fn single_mode_lowering_entries() {
        let s = ModeSpace::new(&[3]).unwrap();
        let a = lowering::<f64>(&s, 0).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 1), c(1.0));
        assert!((a.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tensor_embedding_on_second_mode() {
        let s = ModeSpace::new(&[2, 2]).unwrap();
        let a = lowering::<f64>(&s, 1).unwrap();
        // nonzero only between |x1> -> |x0>
        let entries: Vec<_> = a.iter().map(|(r, c, _)| (r, c)).collect();
        assert_eq!(entries, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn two_level_quadrature() {
        let s = ModeSpace::new(&[2]).unwrap();
        let x = quadrature::<f64>(&s, 0).unwrap().to_dense();
        assert_eq!(x[(0, 1)], c(1.0));
        assert_eq!(x[(1, 0)], c(1.0));
        assert_eq!(x[(0, 0)], c(0.0));
        assert_eq!(x[(1, 1)], c(0.0));
        assert!(
            quadrature::<f64>(&ModeSpace::new(&[5, 3]).unwrap(), 1)
                .unwrap()
                .hermiticity_residual()
                < 1e-12
        );
    }

    #[test]
    fn invalid_mode_rejected() {
        let s = ModeSpace::new(&[2, 2]).unwrap();
        assert!(lowering::<f64>(&s, 2).is_err());
        assert!(quadrature::<f64>(&s, 5).is_err());
    }

    #[test]
    fn transition_is_unit_matrix() {
        let s = ModeSpace::atom_fields(2, 2).unwrap();
        let sig = transition::<f64>(&s, 2, 2, 0).unwrap();
        assert_eq!(sig.nnz(), 4);
        // |0,0,c><0,0,a|
        assert_eq!(sig.get(2, 0), c(1.0));
    }

    fn commutator_profile(dims: &[usize], mode: usize) {
        let s = ModeSpace::new(dims).unwrap();
        let a = lowering::<f64>(&s, mode).unwrap();
        let comm = a.commutator(&a.adjoint());
        let d = dims[mode];
        for (r, col, v) in comm.iter() {
            assert_eq!(r, col, "commutator must be diagonal");
            let level = s.level(r, mode);
            let expected = if level == d - 1 { 1.0 - d as f64 } else { 1.0 };
            assert!((v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
        assert_eq!(comm.nnz(), s.total_dim());
    }

    proptest! {
        #[test]
        fn canonical_commutator_except_top_level(
            dims in proptest::collection::vec(2usize..6, 1..4),
            pick in 0usize..4,
        ) {
            let mode = pick % dims.len();
            commutator_profile(&dims, mode);
        }

        #[test]
        fn quasimode_rotation_commutators(theta in -3.2f64..3.2) {
            let s = ModeSpace::new(&[4, 4]).unwrap();
            let a1 = lowering::<f64>(&s, 0).unwrap();
            let a2 = lowering::<f64>(&s, 1).unwrap();
            let (st, ct) = theta.sin_cos();
            let c1 = &(&a1 * ct) + &(&a2 * st);
            let c2 = &(&a1 * st) - &(&a2 * ct);
            let cross = c1.commutator(&c2.adjoint());
            let selfs = [c1.commutator(&c1.adjoint()), c2.commutator(&c2.adjoint())];
            // away from the truncation boundary the cross commutator vanishes
            // and the self commutators are the identity
            for idx in 0..s.total_dim() {
                let occ = s.occupations(idx);
                if occ.iter().any(|&n| n >= 3) {
                    continue;
                }
                for other in 0..s.total_dim() {
                    let o = s.occupations(other);
                    if o.iter().any(|&n| n >= 3) { continue; }
                    prop_assert!(cross.get(idx, other).norm() < 1e-12);
                    for comm in &selfs {
                        let v = comm.get(idx, other);
                        let want = if idx == other { 1.0 } else { 0.0 };
                        prop_assert!((v - Cx::new(want, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
    }
}
