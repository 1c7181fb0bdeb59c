use num_traits::{One, Zero};

use super::dense::DenseMatrix;
use super::operator::OperatorMatrix;
use super::space::ModeSpace;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Per-mode initial condition used by [`product_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeState<T> {
    Fock(usize),
    Coherent(Cx<T>),
    /// Thermal state with the given mean occupation.
    Thermal(T),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateData<T> {
    Pure(Vec<Cx<T>>),
    Mixed(DenseMatrix<T>),
}

/// Pure vector or density matrix on a [`ModeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    space: ModeSpace,
    data: StateData<T>,
}

fn state_tolerance<T: Real>(dim: usize) -> T {
    T::lit(1e-10).max(T::EPS * T::from_usize_lossy(dim) * T::lit(16.0))
}

impl<T: Real> QuantumState<T> {
    pub fn pure(space: &ModeSpace, psi: Vec<Cx<T>>) -> Result<Self> {
        if psi.len() != space.total_dim() {
            return Err(Error::SpaceMismatch(format!(
                "vector of length {} on space of dimension {}",
                psi.len(),
                space.total_dim()
            )));
        }
        let s = Self {
            space: space.clone(),
            data: StateData::Pure(psi),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn mixed(space: &ModeSpace, rho: DenseMatrix<T>) -> Result<Self> {
        if rho.dim() != space.total_dim() {
            return Err(Error::SpaceMismatch(format!(
                "density matrix of dimension {} on space of dimension {}",
                rho.dim(),
                space.total_dim()
            )));
        }
        let s = Self {
            space: space.clone(),
            data: StateData::Mixed(rho),
        };
        s.validate()?;
        Ok(s)
    }

    /// Wraps raw data without checking the invariants (integrator output).
    pub(crate) fn from_parts_unchecked(space: &ModeSpace, data: StateData<T>) -> Self {
        Self {
            space: space.clone(),
            data,
        }
    }

    /// Basis state `|occupations>`.
    pub fn basis(space: &ModeSpace, occupations: &[usize]) -> Result<Self> {
        let idx = space.index(occupations)?;
        let mut psi = vec![Cx::zero(); space.total_dim()];
        psi[idx] = Cx::one();
        Self::pure(space, psi)
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn data(&self) -> &StateData<T> {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn as_pure(&self) -> Option<&[Cx<T>]> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&DenseMatrix<T>> {
        match &self.data {
            StateData::Mixed(m) => Some(m),
            StateData::Pure(_) => None,
        }
    }

    pub fn to_density(&self) -> DenseMatrix<T> {
        match &self.data {
            StateData::Pure(v) => DenseMatrix::outer(v),
            StateData::Mixed(m) => m.clone(),
        }
    }

    /// `tr rho` for mixed states, `<psi|psi>` for pure ones.
    pub fn trace(&self) -> T {
        match &self.data {
            StateData::Pure(v) => v.iter().map(|a| a.norm_sqr()).sum(),
            StateData::Mixed(m) => m.trace().re,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.space.total_dim();
        let tol = state_tolerance::<T>(n);
        match &self.data {
            StateData::Pure(v) => {
                let norm = v.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
                if (norm - T::one()).abs() > tol {
                    return Err(Error::InvalidSpec(format!("state norm {norm} != 1")));
                }
            }
            StateData::Mixed(m) => {
                let tr = m.trace();
                if (tr - Cx::one()).norm() > tol {
                    return Err(Error::InvalidSpec(format!("density trace {tr} != 1")));
                }
                let h = m.hermiticity_residual();
                if h > tol {
                    return Err(Error::InvalidSpec(format!(
                        "density matrix not Hermitian ({h})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Single-mode amplitudes or populations for one [`ModeState`].
fn local_state<T: Real>(mode: usize, dim: usize, spec: &ModeState<T>) -> Result<LocalState<T>> {
    match *spec {
        ModeState::Fock(n) => {
            if n >= dim {
                return Err(Error::TruncationRisk {
                    mode,
                    reason: format!("fock level {n} needs dimension > {n}, have {dim}"),
                });
            }
            let mut v = vec![Cx::zero(); dim];
            v[n] = Cx::one();
            Ok(LocalState::Pure(v))
        }
        ModeState::Coherent(alpha) => {
            let mean = alpha.norm_sqr();
            if mean > T::from_usize_lossy(dim) / T::lit(4.0) {
                return Err(Error::TruncationRisk {
                    mode,
                    reason: format!("|alpha|^2 = {mean} exceeds dim/4 = {}", dim as f64 / 4.0),
                });
            }
            let mut v = Vec::with_capacity(dim);
            let mut amp = Cx::new((-mean / T::lit(2.0)).exp(), T::zero());
            for n in 0..dim {
                if n > 0 {
                    amp = amp * alpha / T::from_usize_lossy(n).sqrt();
                }
                v.push(amp);
            }
            normalize(&mut v);
            Ok(LocalState::Pure(v))
        }
        ModeState::Thermal(nbar) => {
            if !(nbar >= T::zero()) {
                return Err(Error::TruncationRisk {
                    mode,
                    reason: format!("thermal occupation {nbar} must be non-negative"),
                });
            }
            let q = nbar / (nbar + T::one());
            let mut w = Vec::with_capacity(dim);
            let mut p = T::one();
            for _ in 0..dim {
                w.push(p);
                p = p * q;
            }
            let total: T = w.iter().copied().sum();
            Ok(LocalState::Diagonal(
                w.into_iter().map(|x| x / total).collect(),
            ))
        }
    }
}

enum LocalState<T> {
    Pure(Vec<Cx<T>>),
    Diagonal(Vec<T>),
}

fn normalize<T: Real>(v: &mut [Cx<T>]) {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
    for a in v.iter_mut() {
        *a = *a / norm;
    }
}

fn local_density<T: Real>(s: &LocalState<T>) -> DenseMatrix<T> {
    match s {
        LocalState::Pure(v) => DenseMatrix::outer(v),
        LocalState::Diagonal(w) => {
            let mut m = DenseMatrix::zeros(w.len());
            for (i, &p) in w.iter().enumerate() {
                m[(i, i)] = Cx::new(p, T::zero());
            }
            m
        }
    }
}

/// Tensor product of per-mode states, pure when every factor is pure.
pub fn product_state<T: Real>(
    space: &ModeSpace,
    specs: &[ModeState<T>],
) -> Result<QuantumState<T>> {
    if specs.len() != space.n_modes() {
        return Err(Error::WrongModeCount {
            expected: space.n_modes(),
            found: specs.len(),
        });
    }
    let locals = specs
        .iter()
        .enumerate()
        .map(|(mode, spec)| local_state(mode, space.dims()[mode], spec))
        .collect::<Result<Vec<_>>>()?;

    if locals.iter().all(|l| matches!(l, LocalState::Pure(_))) {
        let mut psi = vec![Cx::<T>::one()];
        for l in &locals {
            let LocalState::Pure(v) = l else {
                unreachable!()
            };
            psi = psi
                .iter()
                .flat_map(|a| v.iter().map(move |b| a * b))
                .collect();
        }
        normalize(&mut psi);
        QuantumState::pure(space, psi)
    } else {
        let mut rho = DenseMatrix::<T>::identity(1);
        for l in &locals {
            rho = rho.kron(&local_density(l));
        }
        QuantumState::mixed(space, rho)
    }
}

/// `tr(rho O)` or `<psi|O|psi>`.
pub fn expectation<T: Real>(state: &QuantumState<T>, op: &OperatorMatrix<T>) -> Result<Cx<T>> {
    state.space().ensure_same(op.space())?;
    Ok(expectation_unchecked(state.data(), op))
}

pub(crate) fn expectation_unchecked<T: Real>(data: &StateData<T>, op: &OperatorMatrix<T>) -> Cx<T> {
    match data {
        StateData::Pure(psi) => {
            let mut acc = Cx::zero();
            for (r, c, v) in op.iter() {
                acc += psi[r].conj() * v * psi[c];
            }
            acc
        }
        StateData::Mixed(rho) => {
            let mut acc = Cx::zero();
            for (r, c, v) in op.iter() {
                acc += v * rho[(c, r)];
            }
            acc
        }
    }
}

/// Real expectation of a Hermitian observable and the size of the discarded
/// imaginary part, relative to `max(|value|, 1)`.
pub fn expectation_real<T: Real>(
    state: &QuantumState<T>,
    op: &OperatorMatrix<T>,
) -> Result<(T, T)> {
    let v = expectation(state, op)?;
    Ok((v.re, v.im.abs() / v.norm().max(T::one())))
}
