use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{Cx, Real};

/// Dense square complex matrix in row-major order (density matrices).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Cx::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Cx::one();
        }
        m
    }

    pub fn from_vec(n: usize, data: Vec<Cx<T>>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    /// Projector `|psi><psi|`.
    pub fn outer(psi: &[Cx<T>]) -> Self {
        let n = psi.len();
        let mut m = Self::zeros(n);
        for (i, a) in psi.iter().enumerate() {
            for (j, b) in psi.iter().enumerate() {
                m.data[i * n + j] = a * b.conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Cx<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Cx<T>> {
        self.data
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.n).fold(Cx::zero(), |acc, i| acc + self.data[i * self.n + i])
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// `max |rho - rho^dagger|` (absolute).
    pub fn hermiticity_residual(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = self.data[i * n + j] - self.data[j * n + i].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        assert_eq!(other.n, n);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.n, other.n);
        let dim = n * m;
        let mut out = Self::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a.is_zero() {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * dim + j * m + l] = a * other.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    /// Eigenvalues of the Hermitian part, ascending (computed in f64).
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let m = DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| {
            let a = self.data[i * n + j];
            let b = self.data[j * n + i].conj();
            Complex::new(
                0.5 * (a.re.to_f64_lossy() + b.re.to_f64_lossy()),
                0.5 * (a.im.to_f64_lossy() + b.im.to_f64_lossy()),
            )
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()
            .first()
            .copied()
            .unwrap_or(f64::NAN)
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Cx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.n + j]
    }
}
