use std::time::Instant;

use num_traits::Zero;

use super::generator::{DensitySystem, Generator, SplitSystem, VectorSystem};
use super::integrate::{DormandPrince, LawsonRk4};
use super::series::TimeSeries;
use super::spec::{
    EvolutionSpec, Integrator, Observable, DENSITY_BOUND_FLOOR, DENSITY_STEP_SAFETY,
    UNITARY_STEP_SAFETY,
};
use crate::error::{Error, Result};
use crate::hilbert::{DenseMatrix, OperatorMatrix, QuantumState, StateData};
use crate::scalar::{Cx, Real};

pub(crate) fn expect_density<T: Real>(op: &OperatorMatrix<T>, rho: &[Cx<T>], n: usize) -> Cx<T> {
    op.iter()
        .fold(Cx::zero(), |acc, (r, c, v)| acc + v * rho[c * n + r])
}

pub(crate) fn expect_pure<T: Real>(op: &OperatorMatrix<T>, psi: &[Cx<T>]) -> Cx<T> {
    op.iter().fold(Cx::zero(), |acc, (r, c, v)| {
        acc + psi[r].conj() * v * psi[c]
    })
}

/// Observable value at time `t` from normalized expectations, plus the
/// discarded imaginary residual.
pub(crate) fn observable_value<T: Real>(
    obs: &Observable<T>,
    expect: impl Fn(&OperatorMatrix<T>) -> Cx<T>,
    t: T,
) -> (T, T) {
    match obs {
        Observable::Operator(op) => {
            let e = expect(op);
            (e.re, e.im.abs() / e.norm().max(T::one()))
        }
        Observable::RotatingQuadrature {
            lowering,
            frequency,
            shift,
        } => {
            let rot =
                (expect(lowering) + shift.eval(t)) * Cx::new(T::zero(), -*frequency * t).exp();
            (T::lit(2.0) * rot.re, T::zero())
        }
        Observable::DisplacedNumber {
            number,
            lowering,
            shift,
        } => {
            let n = expect(number);
            let alpha = shift.eval(t);
            let v = n.re + T::lit(2.0) * (alpha.conj() * expect(lowering)).re + alpha.norm_sqr();
            (v, n.im.abs() / n.norm().max(T::one()))
        }
    }
}

pub(crate) enum Stepper<T> {
    Fixed { rk: LawsonRk4<T>, step: T },
    Adaptive { dp: DormandPrince<T>, h: T },
}

impl<T: Real> Stepper<T> {
    pub fn new(
        integrator: Integrator<T>,
        len: usize,
        rate: T,
        output_step: T,
        safety: f64,
    ) -> Self {
        let auto = if rate > T::zero() {
            T::lit(safety) / rate
        } else {
            output_step
        };
        match integrator {
            Integrator::Fixed { step } => Self::Fixed {
                rk: LawsonRk4::new(len),
                step: step.unwrap_or(auto.min(output_step)),
            },
            Integrator::Floquet { period, step } => Self::Fixed {
                rk: LawsonRk4::new(len),
                step: step.unwrap_or(auto.min(period)),
            },
            Integrator::Adaptive { rtol, atol } => Self::Adaptive {
                dp: DormandPrince::new(len, rtol, atol),
                h: auto.min(output_step),
            },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Fixed { step, .. } => format!("integrating-factor RK4, max step {step} ms"),
            Self::Adaptive { dp, .. } => {
                format!("Dormand-Prince 5(4), rtol {}, atol {}", dp.rtol, dp.atol)
            }
        }
    }

    pub fn advance<S: SplitSystem<T>>(
        &mut self,
        sys: &mut S,
        t0: T,
        t1: T,
        x: &mut [Cx<T>],
    ) -> Result<()> {
        match self {
            Self::Fixed { rk, step } => {
                let span = t1 - t0;
                let m = (span / *step - T::lit(1e-9)).ceil().max(T::one());
                let h = span / m;
                let m = m.to_usize().expect("step count");
                for i in 0..m {
                    rk.step(sys, t0 + T::from_usize_lossy(i) * h, h, x);
                }
                Ok(())
            }
            Self::Adaptive { dp, h } => dp.advance(sys, t0, t1, x, h),
        }
    }
}

/// Spectral radius of the full generator at `t`, estimated as the mean growth
/// rate of power iterates between iterations `SKIP` and `ITERS` from a fixed
/// pseudo-random start. Density systems need a Hermitian start.
pub(crate) fn spectral_rate<T: Real, S: SplitSystem<T>>(sys: &mut S, t: T, start: Vec<Cx<T>>) -> T {
    const SKIP: usize = 20;
    const ITERS: usize = 60;
    let norm = |x: &[Cx<T>]| x.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt();
    let mut x = start;
    let mut y = vec![Cx::zero(); x.len()];
    let mut log_growth = T::zero();
    for k in 0..ITERS {
        let n0 = norm(&x);
        if !(n0 > T::zero()) {
            return T::zero();
        }
        sys.rhs_split(t, &x, &mut y);
        let n1 = norm(&y);
        if !(n1 > T::zero()) {
            return T::zero();
        }
        if k >= SKIP {
            log_growth += (n1 / n0).ln();
        }
        let inv = T::one() / n1;
        for (a, b) in x.iter_mut().zip(&y) {
            *a = *b * inv;
        }
    }
    (log_growth / T::from_usize_lossy(ITERS - SKIP)).exp()
}

pub(crate) fn random_start<T: Real>(n: usize, hermitian: bool) -> Vec<Cx<T>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut draw = || {
        Cx::new(
            T::lit(rng.random::<f64>() - 0.5),
            T::lit(rng.random::<f64>() - 0.5),
        )
    };
    if !hermitian {
        return (0..n).map(|_| draw()).collect();
    }
    let mut m = vec![Cx::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = Cx::new(draw().re, T::zero());
        for j in i + 1..n {
            let v = draw();
            m[i * n + j] = v;
            m[j * n + i] = v.conj();
        }
    }
    m
}

fn check_finite<T: Real>(x: &[Cx<T>], t: T) -> Result<()> {
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence {
            time: t.to_f64_lossy(),
        })
    }
}

fn header<T: Real>(spec: &EvolutionSpec<T>, series: &mut TimeSeries<T>, stepper: &Stepper<T>) {
    let dims: Vec<String> = spec
        .initial
        .space()
        .dims()
        .iter()
        .map(|d| d.to_string())
        .collect();
    series.push_metadata("dims", dims.join("x"));
    series.push_metadata("integrator", stepper.describe());
    for (k, v) in &spec.metadata {
        series.push_metadata(k, v);
    }
}

/// Lindblad evolution (or Schrodinger evolution for a pure state without
/// jumps). Trace is never renormalized; drift beyond the spec tolerance fails.
pub fn evolve_master<T: Real>(spec: &EvolutionSpec<T>) -> Result<TimeSeries<T>> {
    spec.validate()?;
    let jumps = spec.jumps.without_zeros();
    if jumps.is_empty() && spec.initial.is_pure() {
        return evolve_unitary(spec);
    }
    if matches!(spec.integrator, Integrator::Floquet { .. }) {
        return Err(Error::InvalidSpec(
            "the Floquet integrator needs a closed pure-state evolution".into(),
        ));
    }
    let clock = Instant::now();
    let space = spec.initial.space().clone();
    let n = space.total_dim();
    let gen = Generator::new(&spec.hamiltonian, &jumps);
    let rate = gen.rate_scale();
    let mut sys = DensitySystem::new(gen);
    let g = spec.grid;
    // The estimate only picks the step; a given fixed step needs none.
    let rate = if matches!(spec.integrator, Integrator::Fixed { step: Some(_) }) {
        rate
    } else {
        let spectral = [g.start, (g.start + g.end) * T::lit(0.5), g.end]
            .into_iter()
            .map(|t| spectral_rate(&mut sys, t, random_start(n, true)))
            .fold(T::zero(), T::max);
        let rate = spectral.max(rate * T::lit(DENSITY_BOUND_FLOOR));
        log::info!("spectral rate estimate {spectral}, using {rate}");
        rate
    };
    let mut stepper = Stepper::new(
        spec.integrator,
        sys.len(),
        rate,
        spec.grid.output_step,
        DENSITY_STEP_SAFETY,
    );
    let mut series = TimeSeries::new(spec.observables.iter().map(|(k, _)| k.clone()).collect());
    header(spec, &mut series, &stepper);

    let mut rho = spec.initial.to_density().into_vec();
    let times = spec.grid.times();
    let record = |series: &mut TimeSeries<T>, t: T, rho: &[Cx<T>]| -> Result<()> {
        check_finite(rho, t)?;
        let tr = (0..n).map(|i| rho[i * n + i].re).sum::<T>();
        let drift = (tr - T::one()).abs();
        if drift > spec.trace_tolerance {
            return Err(Error::TraceDrift {
                drift: drift.to_f64_lossy(),
                time: t.to_f64_lossy(),
                limit: spec.trace_tolerance.to_f64_lossy(),
            });
        }
        let mut herm = T::zero();
        for i in 0..n {
            for j in i..n {
                herm = herm.max((rho[i * n + j] - rho[j * n + i].conj()).norm());
            }
        }
        series.max_hermiticity_residual = series.max_hermiticity_residual.max(herm);
        series.times.push(t);
        series.trace.push(tr);
        for (k, (_, obs)) in spec.observables.iter().enumerate() {
            let (v, im) = observable_value(obs, |op| expect_density(op, rho, n), t);
            series.values[k].push(v);
            series.max_imag_residual = series.max_imag_residual.max(im);
        }
        Ok(())
    };

    record(&mut series, times[0], &rho)?;
    for w in times.windows(2) {
        stepper.advance(&mut sys, w[0], w[1], &mut rho)?;
        record(&mut series, w[1], &rho)?;
    }

    let rho = DenseMatrix::from_vec(n, rho);
    if spec.check_positivity {
        series.final_min_eigenvalue = Some(rho.min_eigenvalue());
    }
    series.final_state = Some(QuantumState::from_parts_unchecked(
        &space,
        StateData::Mixed(rho),
    ));
    series.wall_time_s = clock.elapsed().as_secs_f64();
    log::info!(
        "master equation on {n} states finished in {:.2} s",
        series.wall_time_s
    );
    Ok(series)
}

/// Closed-system evolution of a pure state. The recorded trace is the norm
/// squared.
pub fn evolve_unitary<T: Real>(spec: &EvolutionSpec<T>) -> Result<TimeSeries<T>> {
    spec.validate()?;
    let Some(psi0) = spec.initial.as_pure() else {
        return Err(Error::NonPureState);
    };
    let jumps = spec.jumps.without_zeros();
    if !jumps.is_empty() {
        return Err(Error::InvalidSpec(
            "unitary evolution takes no jump operators".into(),
        ));
    }
    let clock = Instant::now();
    let space = spec.initial.space().clone();
    let gen = Generator::new(&spec.hamiltonian, &jumps);
    let rate = gen.rate_scale();
    let mut sys = VectorSystem::new(gen);
    let mut stepper = Stepper::new(
        spec.integrator,
        sys.len(),
        rate,
        spec.grid.output_step,
        UNITARY_STEP_SAFETY,
    );
    let mut series = TimeSeries::new(spec.observables.iter().map(|(k, _)| k.clone()).collect());
    header(spec, &mut series, &stepper);
    if let Integrator::Floquet { period, .. } = spec.integrator {
        series.push_metadata("floquet_period", period);
    }

    let mut psi = psi0.to_vec();
    let times = spec.grid.times();
    let record = |series: &mut TimeSeries<T>, t: T, psi: &[Cx<T>]| -> Result<()> {
        check_finite(psi, t)?;
        let norm2 = psi.iter().map(|a| a.norm_sqr()).sum::<T>();
        let drift = (norm2 - T::one()).abs();
        if drift > spec.trace_tolerance {
            return Err(Error::TraceDrift {
                drift: drift.to_f64_lossy(),
                time: t.to_f64_lossy(),
                limit: spec.trace_tolerance.to_f64_lossy(),
            });
        }
        series.times.push(t);
        series.trace.push(norm2);
        for (k, (_, obs)) in spec.observables.iter().enumerate() {
            let (v, im) = observable_value(obs, |op| expect_pure(op, psi), t);
            series.values[k].push(v);
            series.max_imag_residual = series.max_imag_residual.max(im);
        }
        Ok(())
    };
    record(&mut series, times[0], &psi)?;
    if let Integrator::Floquet { period, .. } = spec.integrator {
        let u = one_period_propagator(&mut sys, &mut stepper, spec.grid.start, period)?;
        let per_output = (spec.grid.output_step / period)
            .round()
            .to_usize()
            .expect("checked multiple");
        let mut next = vec![Cx::zero(); psi.len()];
        for &t in &times[1..] {
            for _ in 0..per_output {
                u.mul_vec(&psi, &mut next);
                std::mem::swap(&mut psi, &mut next);
            }
            record(&mut series, t, &psi)?;
        }
    } else {
        for w in times.windows(2) {
            stepper.advance(&mut sys, w[0], w[1], &mut psi)?;
            record(&mut series, w[1], &psi)?;
        }
    }
    series.final_state = Some(QuantumState::from_parts_unchecked(
        &space,
        StateData::Pure(psi),
    ));
    series.wall_time_s = clock.elapsed().as_secs_f64();
    Ok(series)
}

/// Dense row-major one-period propagator, projected onto the unitary group
/// through its polar decomposition.
struct DenseOperator<T> {
    n: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> DenseOperator<T> {
    fn mul_vec(&self, x: &[Cx<T>], out: &mut [Cx<T>]) {
        for (row, o) in self.data.chunks(self.n).zip(out.iter_mut()) {
            *o = row
                .iter()
                .zip(x)
                .fold(Cx::zero(), |acc, (a, b)| acc + *a * *b);
        }
    }
}

fn one_period_propagator<T: Real>(
    sys: &mut VectorSystem<T>,
    stepper: &mut Stepper<T>,
    start: T,
    period: T,
) -> Result<DenseOperator<T>> {
    let n = sys.len();
    let mut m = nalgebra::DMatrix::<num_complex::Complex<f64>>::zeros(n, n);
    let mut col = vec![Cx::zero(); n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = Cx::zero());
        col[j] = Cx::new(T::one(), T::zero());
        stepper.advance(sys, start, start + period, &mut col)?;
        check_finite(&col, start + period)?;
        for (i, v) in col.iter().enumerate() {
            m[(i, j)] = num_complex::Complex::new(v.re.to_f64_lossy(), v.im.to_f64_lossy());
        }
    }
    let svd = m.svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::Divergence {
            time: (start + period).to_f64_lossy(),
        });
    };
    let polar = u * v_t;
    let data = (0..n * n)
        .map(|k| {
            let z = polar[(k / n, k % n)];
            Cx::new(T::lit(z.re), T::lit(z.im))
        })
        .collect();
    Ok(DenseOperator { n, data })
}
