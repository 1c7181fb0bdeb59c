use crate::hilbert::{ModeSpace, OperatorMatrix};
use crate::scalar::{Cx, Real};

/// `amplitude * cos(frequency * t + phase) * op` with Hermitian `op`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatingTerm<T> {
    pub op: OperatorMatrix<T>,
    pub amplitude: T,
    pub frequency: T,
    pub phase: T,
}

impl<T: Real> OscillatingTerm<T> {
    pub fn coefficient(&self, t: T) -> T {
        self.amplitude * (self.frequency * t + self.phase).cos()
    }
}

/// `f(t) = sum_k c_k e^{s_k t}` with complex weights `c_k` and rates `s_k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Envelope<T> {
    pub terms: Vec<(Cx<T>, Cx<T>)>,
}

impl<T: Real> Envelope<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self {
            terms: vec![(c, Cx::new(T::zero(), T::zero()))],
        }
    }

    pub fn exponential(c: Cx<T>, rate: Cx<T>) -> Self {
        Self {
            terms: vec![(c, rate)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|(c, _)| c.re == T::zero() && c.im == T::zero())
    }

    pub fn eval(&self, t: T) -> Cx<T> {
        self.terms
            .iter()
            .fold(Cx::new(T::zero(), T::zero()), |acc, (c, s)| {
                acc + *c * (*s * t).exp()
            })
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(c, s)| (c.conj(), s.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, k: Cx<T>) -> Self {
        Self {
            terms: self.terms.iter().map(|(c, s)| (*c * k, *s)).collect(),
        }
    }

    /// `f(t) e^{rate t}`.
    pub fn shifted(&self, rate: Cx<T>) -> Self {
        Self {
            terms: self.terms.iter().map(|(c, s)| (*c, *s + rate)).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            terms: self.terms.iter().chain(&other.terms).copied().collect(),
        }
    }

    pub fn times(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, r) in &self.terms {
            for (b, q) in &other.terms {
                terms.push((*a * *b, *r + *q));
            }
        }
        Self { terms }
    }

    /// `sum_k |c_k|`, a bound on `|f(t)|` for `t >= 0` when no rate grows.
    pub fn bound(&self) -> T {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }

    pub fn max_frequency(&self) -> T {
        self.terms
            .iter()
            .fold(T::zero(), |m, (_, s)| m.max(s.im.abs()))
    }
}

/// `f(t) O + conj(f(t)) O^dagger` for an arbitrary `O`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedTerm<T> {
    pub op: OperatorMatrix<T>,
    pub envelope: Envelope<T>,
}

/// `H(t) = sum_k c_k S_k + sum_j a_j cos(f_j t + phi_j) O_j + sum_m (f_m(t) P_m + h.c.)`;
/// `S_k` and `O_j` are Hermitian, so `H(t)` is Hermitian for all real `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDependentHamiltonian<T> {
    space: ModeSpace,
    pub static_terms: Vec<(OperatorMatrix<T>, T)>,
    pub oscillating_terms: Vec<OscillatingTerm<T>>,
    pub modulated_terms: Vec<ModulatedTerm<T>>,
}

impl<T: Real> TimeDependentHamiltonian<T> {
    pub fn new(space: &ModeSpace) -> Self {
        Self {
            space: space.clone(),
            static_terms: Vec::new(),
            oscillating_terms: Vec::new(),
            modulated_terms: Vec::new(),
        }
    }

    pub fn from_static(op: OperatorMatrix<T>) -> Self {
        let mut h = Self::new(op.space());
        h.add_static(op, T::one());
        h
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn add_static(&mut self, op: OperatorMatrix<T>, coefficient: T) {
        assert_eq!(
            op.space().dims(),
            self.space.dims(),
            "operator spaces differ"
        );
        self.static_terms.push((op, coefficient));
    }

    pub fn add_oscillating(&mut self, op: OperatorMatrix<T>, amplitude: T, frequency: T, phase: T) {
        assert_eq!(
            op.space().dims(),
            self.space.dims(),
            "operator spaces differ"
        );
        self.oscillating_terms.push(OscillatingTerm {
            op,
            amplitude,
            frequency,
            phase,
        });
    }

    /// Adds `amplitude * (O e^{-i f t} + O^dagger e^{i f t})` as the two
    /// Hermitian pieces `O + O^dagger` (cosine) and `-i(O - O^dagger)` (sine).
    pub fn add_rotating_pair(&mut self, op: &OperatorMatrix<T>, amplitude: T, frequency: T) {
        let adj = op.adjoint();
        let cos_part = op + &adj;
        let sin_part = (op - &adj).scale(Cx::new(T::zero(), -T::one()));
        self.add_oscillating(cos_part, amplitude, frequency, T::zero());
        self.add_oscillating(sin_part, amplitude, frequency, -T::FRAC_PI_2());
    }

    pub fn add_modulated(&mut self, op: OperatorMatrix<T>, envelope: Envelope<T>) {
        assert_eq!(
            op.space().dims(),
            self.space.dims(),
            "operator spaces differ"
        );
        if !envelope.is_zero() {
            self.modulated_terms.push(ModulatedTerm { op, envelope });
        }
    }

    pub fn is_time_independent(&self) -> bool {
        self.oscillating_terms
            .iter()
            .all(|o| o.frequency == T::zero())
            && self.modulated_terms.is_empty()
    }

    pub fn static_part(&self) -> OperatorMatrix<T> {
        let terms: Vec<_> = self
            .static_terms
            .iter()
            .map(|(op, c)| (Cx::new(*c, T::zero()), op))
            .collect();
        crate::hilbert::linear_combination(&self.space, &terms)
    }

    pub fn evaluate(&self, t: T) -> OperatorMatrix<T> {
        let adjoints: Vec<_> = self
            .modulated_terms
            .iter()
            .map(|m| m.op.adjoint())
            .collect();
        let terms: Vec<_> = self
            .static_terms
            .iter()
            .map(|(op, c)| (Cx::new(*c, T::zero()), op))
            .chain(
                self.oscillating_terms
                    .iter()
                    .map(|o| (Cx::new(o.coefficient(t), T::zero()), &o.op)),
            )
            .chain(
                self.modulated_terms
                    .iter()
                    .zip(&adjoints)
                    .flat_map(|(m, adj)| {
                        let f = m.envelope.eval(t);
                        [(f, &m.op), (f.conj(), adj)]
                    }),
            )
            .collect();
        crate::hilbert::linear_combination(&self.space, &terms)
    }

    /// Largest oscillation frequency, zero for a static Hamiltonian.
    pub fn max_drive_frequency(&self) -> T {
        let osc = self
            .oscillating_terms
            .iter()
            .fold(T::zero(), |m, o| m.max(o.frequency.abs()));
        self.modulated_terms
            .iter()
            .fold(osc, |m, o| m.max(o.envelope.max_frequency()))
    }

    /// Upper bound on `||H(t)||` for every `t >= 0` (envelopes must not grow).
    pub fn norm_bound(&self) -> T {
        self.static_part().max_row_abs_sum()
            + self
                .oscillating_terms
                .iter()
                .map(|o| o.amplitude.abs() * o.op.max_row_abs_sum())
                .sum::<T>()
            + self
                .modulated_terms
                .iter()
                .map(|m| {
                    m.envelope.bound() * (m.op.max_row_abs_sum() + m.op.adjoint().max_row_abs_sum())
                })
                .sum::<T>()
    }

    pub fn max_hermiticity_residual(&self) -> T {
        self.static_terms
            .iter()
            .map(|(op, _)| op.hermiticity_residual())
            .chain(
                self.oscillating_terms
                    .iter()
                    .map(|o| o.op.hermiticity_residual()),
            )
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> From<OperatorMatrix<T>> for TimeDependentHamiltonian<T> {
    fn from(op: OperatorMatrix<T>) -> Self {
        Self::from_static(op)
    }
}
