use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::dense::DenseMatrix;
use super::space::ModeSpace;
use crate::scalar::{Cx, Real};

/// Sparse complex operator on a [`ModeSpace`], stored in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T> {
    space: ModeSpace,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Cx<T>>,
}

impl<T: Real> OperatorMatrix<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets<I>(space: &ModeSpace, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Cx<T>)>,
    {
        let n = space.total_dim();
        let mut rows: Vec<BTreeMap<usize, Cx<T>>> = vec![BTreeMap::new(); n];
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r},{c}) outside dimension {n}");
            *rows[r].entry(c).or_insert_with(Cx::zero) += v;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if !v.is_zero() {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            space: space.clone(),
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn zeros(space: &ModeSpace) -> Self {
        Self {
            space: space.clone(),
            row_ptr: vec![0; space.total_dim() + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(space: &ModeSpace) -> Self {
        Self::diagonal(space, &vec![T::one(); space.total_dim()])
    }

    pub fn diagonal(space: &ModeSpace, values: &[T]) -> Self {
        assert_eq!(values.len(), space.total_dim());
        Self::from_triplets(
            space,
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, i, Cx::new(v, T::zero()))),
        )
    }

    /// Embeds a single-mode operator (given by its local triplets) into the
    /// composite space, identity on every other mode.
    pub fn embed(space: &ModeSpace, mode: usize, local: &[(usize, usize, Cx<T>)]) -> Self {
        let d = space.dims()[mode];
        let stride = space.stride(mode);
        let n = space.total_dim();
        let mut by_col: Vec<Vec<(usize, Cx<T>)>> = vec![Vec::new(); d];
        for &(r, c, v) in local {
            assert!(r < d && c < d);
            by_col[c].push((r, v));
        }
        let mut trip = Vec::new();
        for idx in 0..n {
            let level = (idx / stride) % d;
            for &(r, v) in &by_col[level] {
                let target = idx + r * stride - level * stride;
                trip.push((target, idx, v));
            }
        }
        Self::from_triplets(space, trip)
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub(crate) fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub(crate) fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub(crate) fn vals(&self) -> &[Cx<T>] {
        &self.vals
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Cx<T>)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[a..b]
            .iter()
            .copied()
            .zip(self.vals[a..b].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Cx<T>)> + '_ {
        (0..self.dim()).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Cx<T> {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        match self.cols[a..b].binary_search(&c) {
            Ok(k) => self.vals[a + k],
            Err(_) => Cx::zero(),
        }
    }

    pub fn diagonal_values(&self) -> Vec<Cx<T>> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.iter().all(|(r, c, _)| r == c)
    }

    pub fn max_abs(&self) -> T {
        self.vals.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn max_row_abs_sum(&self) -> T {
        (0..self.dim())
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn map_values(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Self {
        Self::from_triplets(&self.space, self.iter().map(|(r, c, v)| (r, c, f(v))))
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        self.map_values(|v| v * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map_values(|v| v * s)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(&self.space, self.iter().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.space.dims(),
            other.space.dims(),
            "operator spaces differ"
        );
        let mut trip = Vec::new();
        for r in 0..self.dim() {
            let mut acc: BTreeMap<usize, Cx<T>> = BTreeMap::new();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    *acc.entry(c).or_insert_with(Cx::zero) += a * b;
                }
            }
            trip.extend(acc.into_iter().map(|(c, v)| (r, c, v)));
        }
        Self::from_triplets(&self.space, trip)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `max |M - M^dagger|` in units of the largest entry.
    pub fn hermiticity_residual(&self) -> T {
        let scale = self.max_abs();
        if scale.is_zero() {
            return T::zero();
        }
        let diff = self - &self.adjoint();
        diff.max_abs() / scale
    }

    pub fn apply(&self, x: &[Cx<T>]) -> Vec<Cx<T>> {
        let mut out = vec![Cx::zero(); self.dim()];
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_into(&self, x: &[Cx<T>], out: &mut [Cx<T>]) {
        assert_eq!(x.len(), self.dim());
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).fold(Cx::zero(), |acc, (c, v)| acc + v * x[c]);
        }
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.dim());
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    /// Sparse-times-dense product `self * rho`.
    pub fn mul_dense(&self, rho: &DenseMatrix<T>) -> DenseMatrix<T> {
        let n = self.dim();
        assert_eq!(rho.dim(), n);
        let mut out = DenseMatrix::zeros(n);
        let src = rho.as_slice();
        for (r, row) in out.as_mut_slice().chunks_mut(n).enumerate() {
            for (k, v) in self.row(r) {
                for (o, x) in row.iter_mut().zip(&src[k * n..(k + 1) * n]) {
                    *o += v * x;
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn add(self, rhs: Self) -> OperatorMatrix<T> {
        assert_eq!(
            self.space.dims(),
            rhs.space.dims(),
            "operator spaces differ"
        );
        OperatorMatrix::from_triplets(&self.space, self.iter().chain(rhs.iter()))
    }
}

impl<T: Real> Sub for &OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn sub(self, rhs: Self) -> OperatorMatrix<T> {
        assert_eq!(
            self.space.dims(),
            rhs.space.dims(),
            "operator spaces differ"
        );
        OperatorMatrix::from_triplets(
            &self.space,
            self.iter().chain(rhs.iter().map(|(r, c, v)| (r, c, -v))),
        )
    }
}

impl<T: Real> Mul for &OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn mul(self, rhs: Self) -> OperatorMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Mul<T> for &OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn mul(self, rhs: T) -> OperatorMatrix<T> {
        self.scale_real(rhs)
    }
}

impl<T: Real> Neg for &OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn neg(self) -> OperatorMatrix<T> {
        self.scale_real(-T::one())
    }
}

/// Sum of `coefficient * operator` terms, all on the same space.
pub fn linear_combination<T: Real>(
    space: &ModeSpace,
    terms: &[(Cx<T>, &OperatorMatrix<T>)],
) -> OperatorMatrix<T> {
    OperatorMatrix::from_triplets(
        space,
        terms
            .iter()
            .flat_map(|(s, op)| op.iter().map(move |(r, c, v)| (r, c, v * *s))),
    )
}
