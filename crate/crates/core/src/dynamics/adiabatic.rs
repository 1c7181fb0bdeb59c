use nalgebra::DMatrix;
use num_complex::Complex;

use crate::effective::{beat_coefficients, SystemParams};
use crate::error::{Error, Result};
use crate::hilbert::{lowering, number, transition, ModeSpace, OperatorMatrix};
use crate::model::{hamiltonian_beat, single_atom_model, LEVEL_A, LEVEL_B, LEVEL_C};

type C = Complex<f64>;

/// Largest field truncation the check accepts.
pub const MAX_FIELD_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticReport {
    pub horizon: f64,
    /// Largest population outside the atomic ground level `a`.
    pub max_excited_population: f64,
    /// `(name, max_t |full - eff| / max_t |eff|)` for `n_a1`, `n_a2`, `a1^dagger a2`.
    pub discrepancies: Vec<(String, f64)>,
}

impl AdiabaticReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.discrepancies
            .iter()
            .map(|(_, d)| *d)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticOptions {
    pub field_dims: (usize, usize),
    /// Initial Fock occupations of the two fields.
    pub initial: (usize, usize),
    pub samples: usize,
}

impl Default for AdiabaticOptions {
    fn default() -> Self {
        Self {
            field_dims: (3, 3),
            initial: (1, 0),
            samples: 400,
        }
    }
}

/// Beat period `2 pi / |lambda|` of one atom, the natural horizon of the check.
pub fn single_atom_beat_period(p: &SystemParams<f64>) -> Result<f64> {
    let b = beat_coefficients(&p.with_atoms(1))?;
    Ok(2.0 * std::f64::consts::PI / b.lambda.abs())
}

/// Exact propagator `psi(t) = V exp(-i L t) V^dagger psi0` of a static Hamiltonian.
struct Spectral {
    vecs: DMatrix<C>,
    vals: Vec<f64>,
    coeffs: Vec<C>,
}

impl Spectral {
    fn new(h: &OperatorMatrix<f64>, psi0: &[C]) -> Self {
        let n = h.dim();
        let d = h.to_dense();
        let m = DMatrix::<C>::from_fn(n, n, |i, j| 0.5 * (d[(i, j)] + d[(j, i)].conj()));
        let eig = m.symmetric_eigen();
        let coeffs = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| eig.eigenvectors[(i, k)].conj() * psi0[i])
                    .sum()
            })
            .collect();
        Self {
            vecs: eig.eigenvectors,
            vals: eig.eigenvalues.iter().copied().collect(),
            coeffs,
        }
    }

    fn at(&self, t: f64) -> Vec<C> {
        let n = self.vals.len();
        let mut out = vec![C::new(0.0, 0.0); n];
        for k in 0..n {
            let c = self.coeffs[k] * C::new(0.0, -self.vals[k] * t).exp();
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.vecs[(i, k)] * c;
            }
        }
        out
    }
}

fn expect(op: &OperatorMatrix<f64>, psi: &[C]) -> C {
    op.iter().fold(C::new(0.0, 0.0), |acc, (r, c, v)| {
        acc + psi[r].conj() * v * psi[c]
    })
}

/// Evolves one atom (starting in `a`) with both fields, and the
/// atom-eliminated field model, from the same Fock state; compares field
/// observables over `horizon`.
pub fn adiabatic_elimination_check(
    p: &SystemParams<f64>,
    horizon: f64,
    options: &AdiabaticOptions,
) -> Result<AdiabaticReport> {
    let (f1, f2) = options.field_dims;
    if f1 > MAX_FIELD_DIM || f2 > MAX_FIELD_DIM {
        return Err(Error::DimensionCap {
            total: f1.max(f2),
            cap: MAX_FIELD_DIM,
        });
    }
    if !(horizon > 0.0) || options.samples == 0 {
        return Err(Error::InvalidSpec(
            "horizon and sample count must be positive".into(),
        ));
    }
    let p = p.with_atoms(1);
    let full_space = ModeSpace::atom_fields(f1, f2)?;
    let field_space = ModeSpace::new(&[f1, f2])?;
    let h_full = single_atom_model(&full_space, &p)?;
    let h_eff = hamiltonian_beat(&field_space, &beat_coefficients(&p)?)?;

    let (n1, n2) = options.initial;
    let mut psi_full = vec![C::new(0.0, 0.0); full_space.total_dim()];
    psi_full[full_space.index(&[n1, n2, LEVEL_A])?] = C::new(1.0, 0.0);
    let mut psi_eff = vec![C::new(0.0, 0.0); field_space.total_dim()];
    psi_eff[field_space.index(&[n1, n2])?] = C::new(1.0, 0.0);

    let observables = |s: &ModeSpace| -> Result<Vec<OperatorMatrix<f64>>> {
        let a1 = lowering(s, 0)?;
        let a2 = lowering(s, 1)?;
        Ok(vec![number(s, 0)?, number(s, 1)?, &a1.adjoint() * &a2])
    };
    let obs_full = observables(&full_space)?;
    let obs_eff = observables(&field_space)?;
    let excited = &transition::<f64>(&full_space, 2, LEVEL_B, LEVEL_B)?
        + &transition(&full_space, 2, LEVEL_C, LEVEL_C)?;

    let prop_full = Spectral::new(&h_full, &psi_full);
    let prop_eff = Spectral::new(&h_eff, &psi_eff);
    let mut max_excited: f64 = 0.0;
    let mut max_diff = [0.0f64; 3];
    let mut max_eff = [0.0f64; 3];
    for k in 0..=options.samples {
        let t = horizon * k as f64 / options.samples as f64;
        let full = prop_full.at(t);
        let eff = prop_eff.at(t);
        max_excited = max_excited.max(expect(&excited, &full).re);
        for j in 0..3 {
            let a = expect(&obs_full[j], &full);
            let b = expect(&obs_eff[j], &eff);
            max_diff[j] = max_diff[j].max((a - b).norm());
            max_eff[j] = max_eff[j].max(b.norm());
        }
    }
    let names = ["n_a1", "n_a2", "a1^dagger a2"];
    Ok(AdiabaticReport {
        horizon,
        max_excited_population: max_excited,
        discrepancies: (0..3)
            .map(|j| (names[j].to_string(), max_diff[j] / max_eff[j].max(1e-12)))
            .collect(),
    })
}
