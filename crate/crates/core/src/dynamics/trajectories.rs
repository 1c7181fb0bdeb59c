use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::generator::{Csr, Generator, SplitSystem, VectorSystem};
use super::integrate::LawsonRk4;
use super::master::{expect_pure, observable_value};
use super::series::TimeSeries;
use super::spec::{EvolutionSpec, Integrator, STEP_SAFETY};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

struct Trajectory<T> {
    /// `values[k][i]` for observable `k` at output `i`.
    values: Vec<Vec<T>>,
    jumps: usize,
}

struct Shared<'a, T> {
    spec: &'a EvolutionSpec<T>,
    gen: &'a Generator<T>,
    jumps: &'a [Csr<T>],
    times: &'a [T],
    step: T,
}

fn norm_sqr<T: Real>(x: &[Cx<T>]) -> T {
    x.iter().map(|a| a.norm_sqr()).sum()
}

fn run_one<T: Real>(sh: &Shared<'_, T>, seed: u64, index: u64) -> Trajectory<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut draw = || T::lit(rng.random::<f64>());

    let mut sys = VectorSystem::new(sh.gen.clone());
    let mut rk = LawsonRk4::new(sys.len());
    let mut psi = sh.spec.initial.as_pure().expect("checked pure").to_vec();
    let mut scratch = vec![Cx::zero(); psi.len()];
    let mut rates = vec![T::zero(); sh.jumps.len()];
    let mut threshold = draw();
    let mut jumps = 0;
    let n_obs = sh.spec.observables.len();
    let mut values = vec![Vec::with_capacity(sh.times.len()); n_obs];

    let record = |values: &mut Vec<Vec<T>>, t: T, psi: &[Cx<T>]| {
        let norm2 = norm_sqr(psi);
        for (k, (_, obs)) in sh.spec.observables.iter().enumerate() {
            let (v, _) = observable_value(obs, |op| expect_pure(op, psi) / norm2, t);
            values[k].push(v);
        }
    };
    record(&mut values, sh.times[0], &psi);
    for w in sh.times.windows(2) {
        let span = w[1] - w[0];
        let m = (span / sh.step - T::lit(1e-9)).ceil().max(T::one());
        let h = span / m;
        for i in 0..m.to_usize().expect("step count") {
            rk.step(&mut sys, w[0] + T::from_usize_lossy(i) * h, h, &mut psi);
            if sh.jumps.is_empty() || norm_sqr(&psi) > threshold {
                continue;
            }
            for (a, r) in sh.jumps.iter().zip(rates.iter_mut()) {
                a.mul_vec(&psi, &mut scratch);
                *r = norm_sqr(&scratch);
            }
            let total: T = rates.iter().copied().sum();
            if total > T::zero() {
                let mut pick = draw() * total;
                let mut chosen = rates.len() - 1;
                for (j, &r) in rates.iter().enumerate() {
                    if pick < r {
                        chosen = j;
                        break;
                    }
                    pick -= r;
                }
                sh.jumps[chosen].mul_vec(&psi, &mut scratch);
                let norm = norm_sqr(&scratch).sqrt();
                for (p, s) in psi.iter_mut().zip(&scratch) {
                    *p = *s / norm;
                }
                jumps += 1;
            }
            threshold = draw();
        }
        record(&mut values, w[1], &psi);
    }
    Trajectory { values, jumps }
}

/// Monte-Carlo unravelling of the master equation. Trajectory `k` draws from
/// stream `k` of a ChaCha8 generator seeded with `seed`, and the ensemble is
/// reduced in trajectory order, so the output depends only on
/// `(seed, n_traj)`. Adaptive and Floquet settings fall back to fixed RK4
/// steps; jumps are resolved at step granularity.
pub fn evolve_trajectories<T: Real>(
    spec: &EvolutionSpec<T>,
    n_traj: usize,
    seed: u64,
) -> Result<TimeSeries<T>> {
    spec.validate()?;
    if !spec.initial.is_pure() {
        return Err(Error::NonPureState);
    }
    if spec.jumps.is_empty() {
        return Err(Error::NoJumps);
    }
    if n_traj == 0 {
        return Err(Error::InvalidSpec("need at least one trajectory".into()));
    }
    let clock = Instant::now();
    let live = spec.jumps.without_zeros();
    let gen = Generator::new(&spec.hamiltonian, &live);
    let rate = gen.rate_scale();
    let auto = if rate > T::zero() {
        T::lit(STEP_SAFETY) / rate
    } else {
        spec.grid.output_step
    };
    let step = match spec.integrator {
        Integrator::Fixed { step: Some(h) } | Integrator::Floquet { step: Some(h), .. } => h,
        _ => auto.min(spec.grid.output_step),
    };
    let times = spec.grid.times();
    let shared = Shared {
        spec,
        gen: &gen,
        jumps: &gen.jumps,
        times: &times,
        step,
    };

    let n_obs = spec.observables.len();
    let n_t = times.len();
    let mut sum = vec![vec![T::zero(); n_t]; n_obs];
    let mut sum_sq = vec![vec![T::zero(); n_t]; n_obs];
    let mut total_jumps = 0usize;
    let chunk = (rayon::current_num_threads() * 8).max(8);
    for start in (0..n_traj).step_by(chunk) {
        let end = (start + chunk).min(n_traj);
        let batch: Vec<Trajectory<T>> = (start..end)
            .into_par_iter()
            .map(|k| run_one(&shared, seed, k as u64))
            .collect();
        for tr in batch {
            total_jumps += tr.jumps;
            for k in 0..n_obs {
                for i in 0..n_t {
                    let v = tr.values[k][i];
                    sum[k][i] += v;
                    sum_sq[k][i] += v * v;
                }
            }
        }
    }

    let nt = T::from_usize_lossy(n_traj);
    let mut series = TimeSeries::new(spec.observables.iter().map(|(k, _)| k.clone()).collect());
    let dims: Vec<String> = spec
        .initial
        .space()
        .dims()
        .iter()
        .map(|d| d.to_string())
        .collect();
    series.push_metadata("dims", dims.join("x"));
    series.push_metadata(
        "integrator",
        format!("quantum trajectories, integrating-factor RK4, step {step} ms"),
    );
    series.push_metadata("trajectories", n_traj);
    series.push_metadata("seed", seed);
    series.push_metadata("mean_jumps", total_jumps as f64 / n_traj as f64);
    for (k, v) in &spec.metadata {
        series.push_metadata(k, v);
    }
    series.times = times;
    series.trace = vec![T::one(); n_t];
    let mut errors = vec![vec![T::zero(); n_t]; n_obs];
    series.values = vec![vec![T::zero(); n_t]; n_obs];
    for k in 0..n_obs {
        for i in 0..n_t {
            let mean = sum[k][i] / nt;
            series.values[k][i] = mean;
            if n_traj > 1 {
                let var = ((sum_sq[k][i] - nt * mean * mean) / (nt - T::one())).max(T::zero());
                errors[k][i] = (var / nt).sqrt();
            }
        }
    }
    series.std_errors = Some(errors);
    series.wall_time_s = clock.elapsed().as_secs_f64();
    Ok(series)
}
