use super::*;
use crate::effective::{kerr_coefficients, SystemParams};
use crate::hilbert::{
    lowering, number, product_state, ModeSpace, ModeState, OperatorMatrix, QuantumState,
};
use crate::model::{hamiltonian_interaction, JumpSet, TimeDependentHamiltonian};
use crate::scalar::Cx;
use crate::Error;

fn damped_spec(n0: usize, dim: usize, kappa: f64, end: f64, dt: f64) -> EvolutionSpec<f64> {
    let sp = ModeSpace::new(&[dim]).unwrap();
    let a = lowering::<f64>(&sp, 0).unwrap();
    let psi = QuantumState::basis(&sp, &[n0]).unwrap();
    EvolutionSpec::new(psi, OperatorMatrix::zeros(&sp), TimeGrid::new(0.0, end, dt))
        .with_jumps(JumpSet::new().with("loss", a.scale_real((2.0 * kappa).sqrt())))
        .observe("n", number(&sp, 0).unwrap())
}

#[test]
fn damped_mode_decays_exponentially() {
    let kappa = 1.3;
    let s = evolve_master(&damped_spec(3, 5, kappa, 2.0, 0.05)).unwrap();
    for (t, n) in s.times.iter().zip(s.get("n").unwrap()) {
        let exact = 3.0 * (-2.0 * kappa * t).exp();
        assert!((n - exact).abs() <= 1e-6 * exact, "t={t}: {n} vs {exact}");
    }
    assert!(s.max_trace_drift() < 1e-12);
    assert!(s.max_hermiticity_residual < 1e-12);
}

#[test]
fn adaptive_matches_closed_form() {
    let kappa = 0.7;
    let spec = damped_spec(2, 4, kappa, 3.0, 0.1)
        .with_integrator(Integrator::Adaptive {
            rtol: 1e-10,
            atol: 1e-12,
        })
        .with_positivity_check(true);
    let s = evolve_master(&spec).unwrap();
    let n = s.last("n").unwrap();
    assert!((n - 2.0 * (-6.0 * kappa).exp()).abs() < 1e-8);
    assert!(s.max_trace_drift() < 1e-10);
    assert!(s.final_min_eigenvalue.unwrap() > -1e-10);
}

/// Truncated detailed balance: `p_{n+1} / p_n = n_th / (n_th + 1)`.
fn birth_death_mean(n_th: f64, dim: usize) -> f64 {
    let q = n_th / (n_th + 1.0);
    let mut p = vec![1.0];
    for _ in 1..dim {
        let last = *p.last().unwrap();
        p.push(last * q);
    }
    let z: f64 = p.iter().sum();
    p.iter().enumerate().map(|(n, w)| n as f64 * w).sum::<f64>() / z
}

#[test]
fn thermal_bath_fixed_point() {
    let (gamma, n_th, dim) = (1.0f64, 4.0f64, 60);
    let sp = ModeSpace::new(&[dim]).unwrap();
    let b = lowering::<f64>(&sp, 0).unwrap();
    let jumps = JumpSet::new()
        .with("down", b.scale_real((2.0 * gamma * (n_th + 1.0)).sqrt()))
        .with("up", b.adjoint().scale_real((2.0 * gamma * n_th).sqrt()));
    let init = product_state(&sp, &[ModeState::Fock(1)]).unwrap();
    let spec = EvolutionSpec::new(
        init,
        OperatorMatrix::zeros(&sp),
        TimeGrid::new(0.0, 12.0, 1.0),
    )
    .with_jumps(jumps)
    .with_integrator(Integrator::Adaptive {
        rtol: 1e-9,
        atol: 1e-12,
    })
    .observe("n", number(&sp, 0).unwrap());
    let s = evolve_master(&spec).unwrap();
    let n = s.last("n").unwrap();
    let oracle = birth_death_mean(n_th, dim);
    assert!((n - oracle).abs() < 1e-6, "{n} vs {oracle}");
    assert!((n - n_th).abs() < 1e-3);
}

fn small_model(
    g: f64,
    d: f64,
    eps: f64,
) -> (ModeSpace, TimeDependentHamiltonian<f64>, SystemParams<f64>) {
    let mut p = SystemParams::<f64>::reference();
    p.g_om = g;
    p.d = d;
    p.eps1 = eps;
    let dc = kerr_coefficients(&p).unwrap();
    let sp = ModeSpace::quasimodes(3, 3, 4).unwrap();
    let h = hamiltonian_interaction(&sp, &p, &dc).unwrap();
    (sp, h, p)
}

#[test]
fn unitary_conserves_norm_and_energy() {
    let (sp, h, _) = small_model(20.0 * std::f64::consts::PI, 0.0, 0.0);
    assert!(h.is_time_independent());
    let psi = product_state(
        &sp,
        &[
            ModeState::Coherent(Cx::new(0.3, 0.0)),
            ModeState::Fock(1),
            ModeState::Fock(0),
        ],
    )
    .unwrap();
    let h0 = h.evaluate(0.0);
    let spec = EvolutionSpec::new(psi, h.clone(), TimeGrid::new(0.0, 0.02, 0.002)).observe("E", h0);
    let s = evolve_unitary(&spec).unwrap();
    assert!(s.max_trace_drift() < 1e-9);
    let e = s.get("E").unwrap();
    for v in e {
        assert!((v - e[0]).abs() <= 1e-8 * e[0].abs());
    }
}

#[test]
fn quasimode_numbers_conserved_without_coupling() {
    let (sp, h, _) = small_model(0.0, 200.0 * std::f64::consts::PI, 0.0);
    let psi = product_state(
        &sp,
        &[
            ModeState::Coherent(Cx::new(0.5, 0.0)),
            ModeState::Fock(1),
            ModeState::Fock(1),
        ],
    )
    .unwrap();
    let spec = EvolutionSpec::new(psi, h, TimeGrid::new(0.0, 0.05, 0.005))
        .observe("n1", number(&sp, 0).unwrap())
        .observe("n2", number(&sp, 1).unwrap());
    let s = evolve_master(&spec).unwrap();
    for name in ["n1", "n2"] {
        let v = s.get(name).unwrap();
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-10), "{name}");
    }
}

#[test]
fn step_halving_shows_fourth_order() {
    let (sp, h, _) = small_model(
        20.0 * std::f64::consts::PI,
        200.0 * std::f64::consts::PI,
        0.0,
    );
    let psi = product_state(
        &sp,
        &[
            ModeState::Coherent(Cx::new(0.4, 0.0)),
            ModeState::Fock(1),
            ModeState::Fock(0),
        ],
    )
    .unwrap();
    let run = |step: f64| {
        let spec = EvolutionSpec::new(psi.clone(), h.clone(), TimeGrid::new(0.0, 0.01, 0.01))
            .with_integrator(Integrator::Fixed { step: Some(step) })
            .observe("nb", number(&sp, 2).unwrap());
        evolve_master(&spec).unwrap().last("nb").unwrap()
    };
    let (a, b, c) = (run(4e-5), run(2e-5), run(1e-5));
    let ratio = (a - b).abs() / (b - c).abs();
    assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    // Default step is already converged to well below 1e-4.
    let spec = EvolutionSpec::new(psi.clone(), h.clone(), TimeGrid::new(0.0, 0.01, 0.01))
        .observe("nb", number(&sp, 2).unwrap());
    let auto = evolve_master(&spec).unwrap().last("nb").unwrap();
    assert!((auto - c).abs() < 1e-4 * c.abs());
}

#[test]
fn oversized_step_is_reported() {
    let spec =
        damped_spec(3, 5, 50.0, 1.0, 0.5).with_integrator(Integrator::Fixed { step: Some(0.5) });
    match evolve_master(&spec) {
        Err(Error::Divergence { .. }) | Err(Error::TraceDrift { .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn spec_validation() {
    let good = damped_spec(1, 3, 1.0, 1.0, 0.1);
    let mut bad = good.clone();
    bad.grid.end = 0.0;
    assert!(matches!(evolve_master(&bad), Err(Error::InvalidSpec(_))));
    let bad = good
        .clone()
        .with_integrator(Integrator::Fixed { step: Some(0.2) });
    assert!(matches!(evolve_master(&bad), Err(Error::InvalidSpec(_))));
    let bad = good.clone().with_integrator(Integrator::Adaptive {
        rtol: 0.0,
        atol: 1e-9,
    });
    assert!(matches!(evolve_master(&bad), Err(Error::InvalidSpec(_))));
    let other = ModeSpace::new(&[4]).unwrap();
    let bad = good.clone().observe("x", number(&other, 0).unwrap());
    assert!(matches!(evolve_master(&bad), Err(Error::SpaceMismatch(_))));
}

#[test]
fn trajectories_follow_decay() {
    let kappa = 1.0;
    let spec = damped_spec(2, 4, kappa, 1.5, 0.1);
    let s = evolve_trajectories(&spec, 1000, 11).unwrap();
    let se = &s.std_errors.as_ref().unwrap()[0];
    for ((t, n), e) in s.times.iter().zip(s.get("n").unwrap()).zip(se) {
        let exact = 2.0 * (-2.0 * kappa * t).exp();
        assert!(
            (n - exact).abs() <= 3.0 * e + 1e-12,
            "t={t}: {n} vs {exact} +- {e}"
        );
    }
}

#[test]
fn trajectories_are_deterministic() {
    let spec = damped_spec(2, 4, 1.0, 1.0, 0.1);
    let a = evolve_trajectories(&spec, 50, 5).unwrap();
    let b = evolve_trajectories(&spec, 50, 5).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.std_errors, b.std_errors);
    let c = evolve_trajectories(&spec, 50, 6).unwrap();
    assert_ne!(a.values, c.values);
}

#[test]
fn lossless_trajectory_is_unitary() {
    let (sp, h, _) = small_model(
        20.0 * std::f64::consts::PI,
        200.0 * std::f64::consts::PI,
        0.0,
    );
    let psi = product_state(
        &sp,
        &[
            ModeState::Coherent(Cx::new(0.3, 0.0)),
            ModeState::Fock(1),
            ModeState::Fock(0),
        ],
    )
    .unwrap();
    let zero = lowering::<f64>(&sp, 0).unwrap().scale_real(0.0);
    let base = EvolutionSpec::new(psi, h, TimeGrid::new(0.0, 0.005, 0.001))
        .observe("n1", number(&sp, 0).unwrap())
        .observe("nb", number(&sp, 2).unwrap());
    let base = base.with_integrator(Integrator::Fixed { step: Some(2e-6) });
    let u = evolve_unitary(&base).unwrap();
    let t = evolve_trajectories(
        &base.clone().with_jumps(JumpSet::new().with("none", zero)),
        1,
        0,
    )
    .unwrap();
    for (x, y) in u.values.iter().flatten().zip(t.values.iter().flatten()) {
        assert!((x - y).abs() < 1e-11, "{x} {y}");
    }
}

#[test]
fn floquet_matches_direct_integration() {
    let d = 200.0 * std::f64::consts::PI;
    let (sp, h, _) = small_model(20.0 * std::f64::consts::PI, d, 0.0);
    let psi = product_state(
        &sp,
        &[
            ModeState::Coherent(Cx::new(0.2, 0.0)),
            ModeState::Fock(1),
            ModeState::Fock(0),
        ],
    )
    .unwrap();
    let period = std::f64::consts::TAU / d;
    let base = EvolutionSpec::new(psi, h, TimeGrid::new(0.0, 40.0 * period, 4.0 * period))
        .observe("n1", number(&sp, 0).unwrap())
        .observe_rotating("X1", lowering(&sp, 0).unwrap(), 1.0);
    let direct = evolve_unitary(&base.clone().with_integrator(Integrator::Fixed {
        step: Some(period / 400.0),
    }))
    .unwrap();
    let floquet = evolve_unitary(
        &base
            .clone()
            .with_integrator(Integrator::Floquet { period, step: None }),
    )
    .unwrap();
    assert_eq!(direct.times.len(), floquet.times.len());
    for (x, y) in direct
        .values
        .iter()
        .flatten()
        .zip(floquet.values.iter().flatten())
    {
        assert!((x - y).abs() < 1e-7, "{x} {y}");
    }
    assert!(floquet.max_trace_drift() < 1e-12);
    let bad = base.clone().with_integrator(Integrator::Floquet {
        period: period * 0.7,
        step: None,
    });
    assert!(matches!(evolve_unitary(&bad), Err(Error::InvalidSpec(_))));
}

#[test]
fn trajectory_input_checks() {
    let spec = damped_spec(2, 4, 1.0, 1.0, 0.1);
    let no_jumps = EvolutionSpec {
        jumps: JumpSet::new(),
        ..spec.clone()
    };
    assert!(matches!(
        evolve_trajectories(&no_jumps, 10, 0),
        Err(Error::NoJumps)
    ));
    let sp = ModeSpace::new(&[4]).unwrap();
    let mixed = product_state(&sp, &[ModeState::Thermal(0.5)]).unwrap();
    let spec = EvolutionSpec {
        initial: mixed,
        ..spec
    };
    assert!(matches!(
        evolve_trajectories(&spec, 10, 0),
        Err(Error::NonPureState)
    ));
}

#[test]
fn adiabatic_check_limits() {
    let mut p = SystemParams::<f64>::reference();
    p.g1 = 0.0;
    p.g2 = 0.0;
    let horizon = 0.01;
    let r = adiabatic_elimination_check(&p, horizon, &AdiabaticOptions::default()).unwrap();
    assert_eq!(r.max_excited_population, 0.0);
    assert!(r.max_discrepancy() < 1e-12, "{r:?}");
    let opts = AdiabaticOptions {
        field_dims: (5, 3),
        ..Default::default()
    };
    assert!(matches!(
        adiabatic_elimination_check(&p, horizon, &opts),
        Err(Error::DimensionCap { .. })
    ));
}

#[test]
fn adiabatic_check_improves_with_detuning() {
    let p = SystemParams::<f64>::reference();
    let horizon = single_atom_beat_period(&p).unwrap();
    let opts = AdiabaticOptions::default();
    let near = adiabatic_elimination_check(&p, horizon, &opts).unwrap();
    let mut q = p;
    q.delta *= 10.0;
    q.big_delta *= 10.0;
    let far = adiabatic_elimination_check(&q, horizon, &opts).unwrap();
    assert!(far.max_excited_population < near.max_excited_population);
    assert!(far.max_discrepancy() < near.max_discrepancy());
}
