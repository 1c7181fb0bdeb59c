use num_traits::Zero;

use super::generator::SplitSystem;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

fn axpy<T: Real>(out: &mut [Cx<T>], a: T, x: &[Cx<T>]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += *v * a;
    }
}

/// `out = y + a * x`.
fn set_axpy<T: Real>(out: &mut [Cx<T>], y: &[Cx<T>], a: T, x: &[Cx<T>]) {
    for ((o, u), v) in out.iter_mut().zip(y).zip(x) {
        *o = *u + *v * a;
    }
}

/// Integrating-factor RK4: the diagonal part is propagated exactly, the rest
/// by classical RK4 in its interaction picture.
pub(crate) struct LawsonRk4<T> {
    k: Vec<Cx<T>>,
    acc: Vec<Cx<T>>,
    y: Vec<Cx<T>>,
}

impl<T: Real> LawsonRk4<T> {
    pub fn new(len: usize) -> Self {
        Self {
            k: vec![Cx::zero(); len],
            acc: vec![Cx::zero(); len],
            y: vec![Cx::zero(); len],
        }
    }

    pub fn step<S: SplitSystem<T>>(&mut self, sys: &mut S, t: T, h: T, x: &mut [Cx<T>]) {
        let half = h * T::lit(0.5);
        let sixth = h / T::lit(6.0);
        let third = h / T::lit(3.0);
        let Self { k, acc, y } = self;

        sys.rhs_split(t, x, k);
        sys.propagate_diagonal(half, x);
        sys.propagate_diagonal(half, k);
        set_axpy(acc, x, sixth, k);
        set_axpy(y, x, half, k);

        sys.rhs_split(t + half, y, k);
        axpy(acc, third, k);
        set_axpy(y, x, half, k);

        sys.rhs_split(t + half, y, k);
        axpy(acc, third, k);
        set_axpy(y, x, h, k);
        sys.propagate_diagonal(half, y);

        sys.rhs_split(t + h, y, k);
        sys.propagate_diagonal(half, acc);
        set_axpy(x, acc, sixth, k);
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Dormand-Prince 5(4) with first-same-as-last reuse.
pub(crate) struct DormandPrince<T> {
    k: Vec<Vec<Cx<T>>>,
    y: Vec<Cx<T>>,
    fsal_valid: bool,
    pub rtol: T,
    pub atol: T,
    pub accepted: usize,
    pub rejected: usize,
}

impl<T: Real> DormandPrince<T> {
    pub fn new(len: usize, rtol: T, atol: T) -> Self {
        Self {
            k: (0..7).map(|_| vec![Cx::zero(); len]).collect(),
            y: vec![Cx::zero(); len],
            fsal_valid: false,
            rtol,
            atol,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Advances `x` from `t0` to exactly `t1`; `h` carries the step size
    /// suggestion across calls.
    pub fn advance<S: SplitSystem<T>>(
        &mut self,
        sys: &mut S,
        t0: T,
        t1: T,
        x: &mut [Cx<T>],
        h: &mut T,
    ) -> Result<()> {
        let mut t = t0;
        let min_step = T::lit(1e-13) * t1.abs().max(T::one());
        while t < t1 {
            let last = *h >= t1 - t;
            let step = if last { t1 - t } else { *h };
            if !self.fsal_valid {
                sys.rhs_full(t, x, &mut self.k[0]);
                self.fsal_valid = true;
            }
            for s in 1..7 {
                self.y.copy_from_slice(x);
                for (j, &a) in A[s].iter().enumerate().take(s) {
                    if a != 0.0 {
                        axpy(&mut self.y, step * T::lit(a), &self.k[j]);
                    }
                }
                sys.rhs_full(t + step * T::lit(C[s]), &self.y, &mut self.k[s]);
            }
            // y now holds the fifth-order solution (row 7 equals the weights).
            let mut err = T::zero();
            for i in 0..x.len() {
                let mut e = Cx::zero();
                for (s, &b) in B_LOW.iter().enumerate() {
                    let w = T::lit(A[6].get(s).copied().unwrap_or(0.0) - b);
                    if w != T::zero() {
                        e += self.k[s][i] * w;
                    }
                }
                let e = (e * step).norm();
                let scale = self.atol + self.rtol * x[i].norm().max(self.y[i].norm());
                err = err.max(e / scale);
            }
            if !err.is_finite() {
                return Err(Error::Divergence {
                    time: t.to_f64_lossy(),
                });
            }
            let factor = if err == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * err.powf(T::lit(-0.2)))
                    .max(T::lit(0.2))
                    .min(T::lit(5.0))
            };
            if err <= T::one() {
                x.copy_from_slice(&self.y);
                self.k.swap(0, 6);
                t = if last { t1 } else { t + step };
                self.accepted += 1;
                if !last || factor < T::one() {
                    *h = step * factor;
                }
            } else {
                self.rejected += 1;
                *h = step * factor.min(T::one());
                if *h < min_step {
                    return Err(Error::StepUnderflow {
                        step: h.to_f64_lossy(),
                        time: t.to_f64_lossy(),
                    });
                }
            }
        }
        Ok(())
    }
}
