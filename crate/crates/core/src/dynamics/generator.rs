//! Compiled right-hand sides. The static diagonal `E` of the Hamiltonian is
//! split off and propagated exactly; everything else lives in
//! `M(t) = -i (H(t) - diag E) - 1/2 sum A^dagger A` on one merged sparsity
//! pattern whose values are rescaled per stage, never rebuilt.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::hilbert::OperatorMatrix;
use crate::model::{Envelope, JumpSet, TimeDependentHamiltonian};
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone)]
pub(crate) struct Csr<T> {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<Cx<T>>,
}

impl<T: Real> Csr<T> {
    pub fn from_operator(op: &OperatorMatrix<T>) -> Self {
        Self {
            row_ptr: op.row_ptr().to_vec(),
            cols: op.cols().to_vec(),
            vals: op.vals().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// `out = self * x` for a vector.
    pub fn mul_vec(&self, x: &[Cx<T>], out: &mut [Cx<T>]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Cx::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    /// `out (+)= scale * self * x` for row-major `n x n` matrices.
    pub fn mul_dense(&self, x: &[Cx<T>], out: &mut [Cx<T>], scale: T, accumulate: bool) {
        let n = self.dim();
        for (r, row) in out.chunks_mut(n).enumerate() {
            if !accumulate {
                row.iter_mut().for_each(|v| *v = Cx::zero());
            }
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v = self.vals[k] * scale;
                let src = &x[self.cols[k] * n..(self.cols[k] + 1) * n];
                for (o, s) in row.iter_mut().zip(src) {
                    *o += v * *s;
                }
            }
        }
    }

    pub fn max_row_abs_sum(&self) -> T {
        (0..self.dim())
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.vals[k].norm())
                    .sum::<T>()
            })
            .fold(T::zero(), T::max)
    }
}

/// `dst = src^dagger` for row-major `n x n` matrices, blocked for cache use.
pub(crate) fn adjoint_into<T: Real>(n: usize, src: &[Cx<T>], dst: &mut [Cx<T>]) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    dst[j * n + i] = src[i * n + j].conj();
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Oscillation<T> {
    amplitude: T,
    frequency: T,
    phase: T,
    /// `-i O` on the merged pattern.
    vals: Vec<Cx<T>>,
}

#[derive(Debug, Clone)]
struct Modulation<T> {
    envelope: Envelope<T>,
    /// `-i P` and `-i P^dagger` on the merged pattern.
    vals: Vec<Cx<T>>,
    vals_adj: Vec<Cx<T>>,
}

#[derive(Debug, Clone)]
pub(crate) struct Generator<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    static_vals: Vec<Cx<T>>,
    oscillations: Vec<Oscillation<T>>,
    modulations: Vec<Modulation<T>>,
    current: Csr<T>,
    current_t: Option<T>,
    /// Exactly propagated static diagonal.
    pub energies: Vec<T>,
    pub jumps: Vec<Csr<T>>,
}

impl<T: Real> Generator<T> {
    pub fn new(h: &TimeDependentHamiltonian<T>, jumps: &JumpSet<T>) -> Self {
        let space = h.space();
        let n = space.total_dim();
        let neg_i = Cx::new(T::zero(), -T::one());
        let half = T::lit(0.5);

        let static_h = h.static_part();
        let energies: Vec<T> = static_h.diagonal_values().iter().map(|v| v.re).collect();
        let jump_ops: Vec<OperatorMatrix<T>> = jumps.without_zeros().operators().cloned().collect();
        let mut decay = OperatorMatrix::zeros(space);
        for a in &jump_ops {
            decay = &decay + &(&a.adjoint() * a);
        }
        let without_diag =
            OperatorMatrix::from_triplets(space, static_h.iter().filter(|(r, c, _)| r != c));
        let static_m = &without_diag.scale(neg_i) - &decay.scale_real(half);

        let mut pattern: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (r, c, _) in static_m.iter() {
            pattern[r].insert(c);
        }
        for o in &h.oscillating_terms {
            for (r, c, _) in o.op.iter() {
                pattern[r].insert(c);
            }
        }
        let adjoints: Vec<OperatorMatrix<T>> =
            h.modulated_terms.iter().map(|m| m.op.adjoint()).collect();
        for op in h.modulated_terms.iter().map(|m| &m.op).chain(&adjoints) {
            for (r, c, _) in op.iter() {
                pattern[r].insert(c);
            }
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        for row in &pattern {
            cols.extend(row.iter().copied());
            row_ptr.push(cols.len());
        }
        let aligned = |op: &OperatorMatrix<T>, s: Cx<T>| -> Vec<Cx<T>> {
            let mut out = Vec::with_capacity(cols.len());
            for r in 0..n {
                for &c in &cols[row_ptr[r]..row_ptr[r + 1]] {
                    out.push(op.get(r, c) * s);
                }
            }
            out
        };
        let static_vals = aligned(&static_m, Cx::new(T::one(), T::zero()));
        let oscillations = h
            .oscillating_terms
            .iter()
            .map(|o| Oscillation {
                amplitude: o.amplitude,
                frequency: o.frequency,
                phase: o.phase,
                vals: aligned(&o.op, neg_i),
            })
            .collect();
        let modulations = h
            .modulated_terms
            .iter()
            .zip(&adjoints)
            .map(|(m, adj)| Modulation {
                envelope: m.envelope.clone(),
                vals: aligned(&m.op, neg_i),
                vals_adj: aligned(adj, neg_i),
            })
            .collect();
        let current = Csr {
            row_ptr: row_ptr.clone(),
            cols: cols.clone(),
            vals: static_vals.clone(),
        };
        Self {
            n,
            row_ptr,
            cols,
            static_vals,
            oscillations,
            modulations,
            current,
            current_t: None,
            energies,
            jumps: jump_ops.iter().map(Csr::from_operator).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Sets `M(t)`; repeated calls at the same time are free.
    pub fn update(&mut self, t: T) -> &Csr<T> {
        if self.current_t != Some(t) {
            self.current.vals.copy_from_slice(&self.static_vals);
            for o in &self.oscillations {
                let c = o.amplitude * (o.frequency * t + o.phase).cos();
                if c != T::zero() {
                    for (v, x) in self.current.vals.iter_mut().zip(&o.vals) {
                        *v += *x * c;
                    }
                }
            }
            for m in &self.modulations {
                let f = m.envelope.eval(t);
                let g = f.conj();
                for ((v, x), y) in self.current.vals.iter_mut().zip(&m.vals).zip(&m.vals_adj) {
                    *v += *x * f + *y * g;
                }
            }
            self.current_t = Some(t);
        }
        &self.current
    }

    /// Bound on the rate scale of the numerically integrated part: the larger
    /// of a Gershgorin bound and the fastest frequency any coupling carries
    /// in the frame of `E`.
    pub fn rate_scale(&self) -> T {
        let mut gersh = Csr {
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.static_vals.clone(),
        }
        .max_row_abs_sum();
        let mut fastest = T::zero();
        for o in &self.oscillations {
            let osc = Csr {
                row_ptr: self.row_ptr.clone(),
                cols: self.cols.clone(),
                vals: o.vals.clone(),
            };
            gersh += o.amplitude.abs() * osc.max_row_abs_sum();
            fastest = fastest.max(o.frequency.abs());
        }
        for m in &self.modulations {
            let csr = |vals: &Vec<Cx<T>>| Csr {
                row_ptr: self.row_ptr.clone(),
                cols: self.cols.clone(),
                vals: vals.clone(),
            };
            gersh += m.envelope.bound()
                * (csr(&m.vals).max_row_abs_sum() + csr(&m.vals_adj).max_row_abs_sum());
            fastest = fastest.max(m.envelope.max_frequency());
        }
        for a in &self.jumps {
            let s = a.max_row_abs_sum();
            gersh += s * s;
        }
        let mut transition = T::zero();
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                let live = !self.static_vals[k].is_zero()
                    || self.oscillations.iter().any(|o| !o.vals[k].is_zero())
                    || self
                        .modulations
                        .iter()
                        .any(|m| !m.vals[k].is_zero() || !m.vals_adj[k].is_zero());
                if live && c != r {
                    transition = transition.max((self.energies[r] - self.energies[c]).abs());
                }
            }
        }
        gersh.max(transition + fastest)
    }
}

/// A linear ODE `dy/dt = -i D y + F(t, y)` on a flat buffer, where `D` acts
/// diagonally and is integrated exactly.
pub(crate) trait SplitSystem<T: Real> {
    fn len(&self) -> usize;
    /// Multiplies `y` by the exact propagator of the diagonal part over `tau`.
    fn propagate_diagonal(&mut self, tau: T, y: &mut [Cx<T>]);
    /// `out = F(t, y)`.
    fn rhs_split(&mut self, t: T, y: &[Cx<T>], out: &mut [Cx<T>]);
    /// `out = -i D y + F(t, y)`.
    fn rhs_full(&mut self, t: T, y: &[Cx<T>], out: &mut [Cx<T>]);
}

/// Lindblad generator on row-major density matrices.
pub(crate) struct DensitySystem<T> {
    pub gen: Generator<T>,
    scratch: Vec<Cx<T>>,
    scratch_t: Vec<Cx<T>>,
    phases: Vec<Cx<T>>,
    phases_tau: Option<T>,
}

impl<T: Real> DensitySystem<T> {
    pub fn new(gen: Generator<T>) -> Self {
        let nn = gen.dim() * gen.dim();
        let has_jumps = !gen.jumps.is_empty();
        Self {
            scratch: if has_jumps {
                vec![Cx::zero(); nn]
            } else {
                Vec::new()
            },
            scratch_t: if has_jumps {
                vec![Cx::zero(); nn]
            } else {
                Vec::new()
            },
            gen,
            phases: Vec::new(),
            phases_tau: None,
        }
    }
}

fn phases_for<T: Real>(energies: &[T], tau: T) -> Vec<Cx<T>> {
    energies
        .iter()
        .map(|&e| Cx::new(T::zero(), -e * tau).exp())
        .collect()
}

impl<T: Real> SplitSystem<T> for DensitySystem<T> {
    fn len(&self) -> usize {
        self.gen.dim() * self.gen.dim()
    }

    fn propagate_diagonal(&mut self, tau: T, y: &mut [Cx<T>]) {
        if self.phases_tau != Some(tau) {
            self.phases = phases_for(&self.gen.energies, tau);
            self.phases_tau = Some(tau);
        }
        let n = self.gen.dim();
        for (i, row) in y.chunks_mut(n).enumerate() {
            let wi = self.phases[i];
            for (v, wj) in row.iter_mut().zip(&self.phases) {
                *v *= wi * wj.conj();
            }
        }
    }

    fn rhs_split(&mut self, t: T, y: &[Cx<T>], out: &mut [Cx<T>]) {
        let n = self.gen.dim();
        let half = T::lit(0.5);
        self.gen.update(t).mul_dense(y, out, T::one(), false);
        for a in &self.gen.jumps {
            a.mul_dense(y, &mut self.scratch, T::one(), false);
            adjoint_into(n, &self.scratch, &mut self.scratch_t);
            a.mul_dense(&self.scratch_t, out, half, true);
        }
        // out <- Q + Q^dagger keeps the result Hermitian to the last bit.
        for i in 0..n {
            let d = out[i * n + i];
            out[i * n + i] = Cx::new(d.re + d.re, T::zero());
            for j in i + 1..n {
                let v = out[i * n + j] + out[j * n + i].conj();
                out[i * n + j] = v;
                out[j * n + i] = v.conj();
            }
        }
    }

    fn rhs_full(&mut self, t: T, y: &[Cx<T>], out: &mut [Cx<T>]) {
        self.rhs_split(t, y, out);
        let n = self.gen.dim();
        let e = &self.gen.energies;
        for i in 0..n {
            for j in 0..n {
                let w = e[i] - e[j];
                if w != T::zero() {
                    let k = i * n + j;
                    out[k] += Cx::new(T::zero(), -w) * y[k];
                }
            }
        }
    }
}

/// Schrodinger equation with the non-Hermitian effective Hamiltonian
/// `K = H - i/2 sum A^dagger A` on state vectors.
pub(crate) struct VectorSystem<T> {
    pub gen: Generator<T>,
    phases: Vec<Cx<T>>,
    phases_tau: Option<T>,
}

impl<T: Real> VectorSystem<T> {
    pub fn new(gen: Generator<T>) -> Self {
        Self {
            gen,
            phases: Vec::new(),
            phases_tau: None,
        }
    }
}

impl<T: Real> SplitSystem<T> for VectorSystem<T> {
    fn len(&self) -> usize {
        self.gen.dim()
    }

    fn propagate_diagonal(&mut self, tau: T, y: &mut [Cx<T>]) {
        if self.phases_tau != Some(tau) {
            self.phases = phases_for(&self.gen.energies, tau);
            self.phases_tau = Some(tau);
        }
        for (v, w) in y.iter_mut().zip(&self.phases) {
            *v *= *w;
        }
    }

    fn rhs_split(&mut self, t: T, y: &[Cx<T>], out: &mut [Cx<T>]) {
        self.gen.update(t).mul_vec(y, out);
    }

    fn rhs_full(&mut self, t: T, y: &[Cx<T>], out: &mut [Cx<T>]) {
        self.rhs_split(t, y, out);
        for ((o, x), e) in out.iter_mut().zip(y).zip(&self.gen.energies) {
            *o += Cx::new(T::zero(), -*e) * *x;
        }
    }
}
