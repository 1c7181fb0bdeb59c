use crate::error::{Error, Result};
use crate::hilbert::{OperatorMatrix, QuantumState};
use crate::model::{Envelope, JumpSet, TimeDependentHamiltonian};
use crate::scalar::Real;

/// Quantity recorded along an evolution.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable<T> {
    /// `Re <O>` of a Hermitian operator.
    Operator(OperatorMatrix<T>),
    /// `2 Re((<c> + alpha(t)) e^{-i f t})`: the quadrature `c + c^dagger` seen
    /// in a frame rotating at `frequency`, removing the free `e^{i f t}` of
    /// `<c>`. `shift` is the displacement `alpha(t)` of a displaced frame
    /// (empty otherwise).
    RotatingQuadrature {
        lowering: OperatorMatrix<T>,
        frequency: T,
        shift: Envelope<T>,
    },
    /// `<(c + alpha)^dagger (c + alpha)> = <n> + 2 Re(conj(alpha) <c>) + |alpha|^2`
    /// for a mode evolved in a frame displaced by `alpha(t)`.
    DisplacedNumber {
        number: OperatorMatrix<T>,
        lowering: OperatorMatrix<T>,
        shift: Envelope<T>,
    },
}

impl<T: Real> Observable<T> {
    /// The operator whose space the observable lives on.
    pub fn operator(&self) -> &OperatorMatrix<T> {
        match self {
            Self::Operator(op) => op,
            Self::RotatingQuadrature { lowering, .. } => lowering,
            Self::DisplacedNumber { number, .. } => number,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator<T> {
    /// Integrating-factor RK4; `None` picks the step from the generator's
    /// rate scale.
    Fixed { step: Option<T> },
    /// Dormand-Prince 5(4).
    Adaptive { rtol: T, atol: T },
    /// Closed pure-state evolution under a Hamiltonian periodic in `period`:
    /// the one-period propagator is built column by column with RK4 (`step`
    /// as in `Fixed`), projected onto the nearest unitary, then applied
    /// repeatedly. Output steps must be whole multiples of the period.
    Floquet { period: T, step: Option<T> },
}

impl<T: Real> Default for Integrator<T> {
    fn default() -> Self {
        Self::Fixed { step: None }
    }
}

/// Outputs at `start + k * output_step`, with `end` always the final point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    pub start: T,
    pub end: T,
    pub output_step: T,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(start: T, end: T, output_step: T) -> Self {
        Self {
            start,
            end,
            output_step,
        }
    }

    pub fn times(&self) -> Vec<T> {
        let span = (self.end - self.start) / self.output_step;
        let k = (span - T::lit(1e-9))
            .ceil()
            .max(T::one())
            .to_usize()
            .unwrap_or(1);
        let mut out: Vec<T> = (0..k)
            .map(|i| self.start + T::from_usize_lossy(i) * self.output_step)
            .collect();
        out.push(self.end);
        out
    }
}

/// Default step safety factor against the generator's rate scale.
pub const STEP_SAFETY: f64 = 0.5;
/// Master-equation runs: safety factor against the power-iteration estimate
/// of the integrated generator's spectral radius.
pub const DENSITY_STEP_SAFETY: f64 = 0.5;
/// Floor on that estimate, as a fraction of the Gershgorin-type bound.
pub const DENSITY_BOUND_FLOOR: f64 = 0.125;
/// Tighter factor for closed pure-state runs, whose norm RK4 does not conserve.
pub const UNITARY_STEP_SAFETY: f64 = 0.125;

/// Inputs of an evolution.
#[derive(Debug, Clone)]
pub struct EvolutionSpec<T> {
    pub initial: QuantumState<T>,
    pub hamiltonian: TimeDependentHamiltonian<T>,
    pub jumps: JumpSet<T>,
    pub grid: TimeGrid<T>,
    pub integrator: Integrator<T>,
    pub observables: Vec<(String, Observable<T>)>,
    /// Largest tolerated `|tr rho - 1|` at any output point.
    pub trace_tolerance: T,
    /// Compute the smallest eigenvalue of the final density matrix.
    pub check_positivity: bool,
    pub metadata: Vec<(String, String)>,
}

impl<T: Real> EvolutionSpec<T> {
    pub fn new(
        initial: QuantumState<T>,
        hamiltonian: impl Into<TimeDependentHamiltonian<T>>,
        grid: TimeGrid<T>,
    ) -> Self {
        Self {
            initial,
            hamiltonian: hamiltonian.into(),
            jumps: JumpSet::new(),
            grid,
            integrator: Integrator::default(),
            observables: Vec::new(),
            trace_tolerance: T::lit(1e-6),
            check_positivity: false,
            metadata: Vec::new(),
        }
    }

    pub fn with_jumps(mut self, jumps: JumpSet<T>) -> Self {
        self.jumps = jumps;
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator<T>) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn observe(mut self, name: &str, op: OperatorMatrix<T>) -> Self {
        self.observables
            .push((name.to_string(), Observable::Operator(op)));
        self
    }

    pub fn observe_rotating(
        mut self,
        name: &str,
        lowering: OperatorMatrix<T>,
        frequency: T,
    ) -> Self {
        self.observables.push((
            name.to_string(),
            Observable::RotatingQuadrature {
                lowering,
                frequency,
                shift: Envelope::zero(),
            },
        ));
        self
    }

    pub fn with_metadata(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_positivity_check(mut self, on: bool) -> Self {
        self.check_positivity = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if !(g.end > g.start) {
            return Err(Error::InvalidSpec(format!(
                "end {} must exceed start {}",
                g.end, g.start
            )));
        }
        if !(g.output_step > T::zero()) {
            return Err(Error::InvalidSpec("output step must be positive".into()));
        }
        match self.integrator {
            Integrator::Fixed { step: Some(h) } if !(h > T::zero() && h <= g.output_step) => {
                return Err(Error::InvalidSpec(format!(
                    "fixed step {h} must lie in (0, output step {}]",
                    g.output_step
                )))
            }
            Integrator::Adaptive { rtol, atol } if !(rtol > T::zero() && atol > T::zero()) => {
                return Err(Error::InvalidSpec(
                    "adaptive tolerances must be positive".into(),
                ))
            }
            Integrator::Floquet { period, step } => {
                if !(period > T::zero()) || step.is_some_and(|h| !(h > T::zero() && h <= period)) {
                    return Err(Error::InvalidSpec(format!(
                        "Floquet period {period} must be positive and bound the step"
                    )));
                }
                let ratio = g.output_step / period;
                if (ratio - ratio.round()).abs() > T::lit(1e-6) * ratio.max(T::one())
                    || ratio.round() < T::one()
                {
                    return Err(Error::InvalidSpec(format!(
                        "output step {} is not a whole multiple of the period {period}",
                        g.output_step
                    )));
                }
                let span = (g.end - g.start) / g.output_step;
                if (span - span.round()).abs() > T::lit(1e-6) * span.max(T::one()) {
                    return Err(Error::InvalidSpec(
                        "Floquet runs need a whole number of output steps".into(),
                    ));
                }
                if !self.hamiltonian.modulated_terms.is_empty() {
                    return Err(Error::InvalidSpec(
                        "the Floquet integrator takes no modulated terms".into(),
                    ));
                }
                for o in &self.hamiltonian.oscillating_terms {
                    let k = o.frequency * period / T::TAU();
                    if (k - k.round()).abs() > T::lit(1e-9) * k.abs().max(T::one()) {
                        return Err(Error::InvalidSpec(format!(
                            "frequency {} is not a harmonic of the period {period}",
                            o.frequency
                        )));
                    }
                }
            }
            _ => {}
        }
        let space = self.initial.space();
        space.ensure_same(self.hamiltonian.space())?;
        for (_, op) in self.jumps.iter() {
            space.ensure_same(op.space())?;
        }
        for (name, o) in &self.observables {
            space
                .ensure_same(o.operator().space())
                .map_err(|e| match e {
                    Error::SpaceMismatch(m) => {
                        Error::SpaceMismatch(format!("observable {name}: {m}"))
                    }
                    other => other,
                })?;
        }
        self.initial.validate()
    }
}
