use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::analysis::{amplitude, dominant_frequency, relative_excursion, relative_gap};
use super::config::{
    reference_file_params, to_internal, ExperimentConfig, ExperimentId, Frame, ModeSpec,
};
use super::convergence::ConvergenceTable;
use super::output::{self, OutputFile};
use crate::dynamics::{
    evolve_master, evolve_trajectories, steady_state_detect, EvolutionSpec, Integrator, Observable,
    TimeGrid, TimeSeries,
};
use crate::effective::{
    kerr_coefficients, sweep, DerivedCoefficients, SweepAxis, SweepRow, SystemParams,
};
use crate::error::{Error, Result};
use crate::hilbert::{lowering, number, product_state, ModeSpace, ModeState};
use crate::model::{
    hamiltonian_displaced, hamiltonian_interaction, jump_operators, Envelope, JumpSet,
};
use crate::scalar::Cx;
use crate::units::to_pi_units;
use crate::UNIT_CONVENTION;

/// Written into every run header.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Smaller truncation for quick Fig. 4 checks.
pub const FIG4_SMOKE_DIMS: [usize; 3] = [6, 4, 16];
pub const FIG3_DIMS: [usize; 3] = [6, 6, 8];
pub const FIG4_DIMS: [usize; 3] = [10, 6, 30];
pub const EVOLVE_DIMS: [usize; 3] = [6, 6, 8];

/// Target number of output points of a Fig. 3 run.
const FIG3_POINTS: f64 = 4000.0;
const FIG4_POINTS: f64 = 200.0;
/// Default fixed step (ms) of the Fig. 4 runs in the displaced frame; halving
/// it moves the final numbers by about 2e-6 relative at the smoke dims.
pub const FIG4_STEP: f64 = 1e-4;
/// Relative tolerance of the Fig. 4 steady-state window.
pub const STEADY_TOL: f64 = 0.01;
const DEFAULT_RTOL: f64 = 1e-8;
const DEFAULT_ATOL: f64 = 1e-10;

/// One time-dependent run of an experiment.
#[derive(Debug, Clone)]
pub struct DynamicsRun {
    pub label: String,
    pub atoms: u32,
    pub coefficients: DerivedCoefficients<f64>,
    pub series: TimeSeries<f64>,
    /// Scalar results of the run's analysis, frequencies in krad/s.
    pub measures: Vec<(String, f64)>,
}

impl DynamicsRun {
    pub fn measure(&self, name: &str) -> Option<f64> {
        self.measures
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone)]
pub enum Detail {
    Coefficients {
        axis: SweepAxis,
        params: SystemParams<f64>,
        rows: Vec<SweepRow<f64>>,
    },
    Dynamics(Vec<DynamicsRun>),
    Convergence(ConvergenceTable),
}

/// Everything a run produced; `config` is the effective configuration.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub id: Option<ExperimentId>,
    pub config: ExperimentConfig,
    pub files: Vec<OutputFile>,
    pub detail: Detail,
}

impl ExperimentOutput {
    pub fn runs(&self) -> &[DynamicsRun] {
        match &self.detail {
            Detail::Dynamics(r) => r,
            _ => &[],
        }
    }

    pub fn run(&self, label: &str) -> Option<&DynamicsRun> {
        self.runs().iter().find(|r| r.label == label)
    }

    /// Writes all files into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
        output::write_files(dir, &self.files)
    }
}

/// Built-in settings of each experiment, in file units.
pub fn defaults(id: ExperimentId) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        experiment: Some(id),
        ..Default::default()
    };
    match id {
        ExperimentId::Fig3a | ExperimentId::Fig3b => c.dims = FIG3_DIMS.map(Some),
        ExperimentId::Fig4a | ExperimentId::Fig4b => {
            c.dims = FIG4_DIMS.map(Some);
            c.params = vec![
                ("kappa1", 200.0),
                ("kappa2", 2.0),
                ("gamma_m", 0.2),
                ("n_th", 4.0),
            ];
            c.frame = Some(Frame::Displaced);
            c.step = Some(FIG4_STEP);
        }
        _ => {}
    }
    c
}

fn default_atoms(id: ExperimentId) -> Vec<u32> {
    match id {
        ExperimentId::Fig3a => vec![320, 400],
        ExperimentId::Fig3b => vec![380],
        ExperimentId::Fig4a | ExperimentId::Fig4b => vec![320, 380],
        _ => vec![350],
    }
}

fn reject(cfg: &ExperimentConfig, id: ExperimentId) -> Result<()> {
    let unused = |key: &str| Error::Config {
        key: key.into(),
        reason: format!("not used by {id}"),
    };
    let is_fig2 = matches!(id, ExperimentId::Fig2a | ExperimentId::Fig2b);
    if is_fig2 {
        for (m, key) in ["dims.c1", "dims.c2", "dims.b"].iter().enumerate() {
            if cfg.dims[m].is_some() {
                return Err(unused(key));
            }
        }
        for (set, key) in [
            (cfg.step.is_some(), "integrator.step"),
            (cfg.rtol.is_some(), "integrator.rtol"),
            (cfg.atol.is_some(), "integrator.atol"),
            (cfg.horizon.is_some(), "horizon"),
            (cfg.output_step.is_some(), "output_step"),
            (cfg.initial.iter().any(Option::is_some), "initial"),
        ] {
            if set {
                return Err(unused(key));
            }
        }
    }
    for (set, key) in [
        (cfg.trajectories.is_some(), "trajectories"),
        (cfg.observables.is_some(), "observables"),
        (cfg.jumps.is_some(), "jumps"),
        (
            cfg.frame.is_some() && !matches!(id, ExperimentId::Fig4a | ExperimentId::Fig4b),
            "frame",
        ),
        (cfg.convergence_base.is_some(), "convergence.base"),
        (
            cfg.convergence_multipliers.is_some(),
            "convergence.multipliers",
        ),
        (cfg.convergence_modes.is_some(), "convergence.modes"),
    ] {
        if set {
            return Err(unused(key));
        }
    }
    let swept = match id {
        ExperimentId::Fig2a => Some("N"),
        ExperimentId::Fig2b => Some("d"),
        _ => None,
    };
    if let Some(k) = swept {
        if cfg.param(k).is_some() {
            return Err(Error::Config {
                key: k.into(),
                reason: format!("swept by {id}"),
            });
        }
    }
    Ok(())
}

/// Effective configuration of `id` with `user` on top, completed with the
/// values the experiment derives (drives, seed).
pub fn resolve(id: ExperimentId, user: &ExperimentConfig) -> Result<ExperimentConfig> {
    if let Some(other) = user.experiment.filter(|&e| e != id) {
        return Err(Error::Config {
            key: "experiment".into(),
            reason: format!("configuration names {other} but {id} was requested"),
        });
    }
    reject(user, id)?;
    if id == ExperimentId::Convergence {
        return Err(Error::Config {
            key: "experiment".into(),
            reason: "use convergence_scan".into(),
        });
    }
    let mut eff = user.over(&defaults(id));
    eff.experiment = Some(id);
    if id.is_dynamics() {
        eff.seed.get_or_insert(0);
    }
    let file = eff.file_params(&reference_file_params())?;
    let add = |eff: &mut ExperimentConfig, k: &'static str, v: f64| {
        if eff.param(k).is_none() {
            eff.params.push((k, v));
        }
    };
    match id {
        ExperimentId::Fig4a => {
            add(&mut eff, "eps1", 23.0 * file.g1);
            add(&mut eff, "eps2", 62.0 * file.g1);
        }
        ExperimentId::Fig4b => {
            add(&mut eff, "eps1", 31.0 * file.g1);
            if eff.param("eps2").is_none() {
                let eps1 = eff.param("eps1").expect("just set");
                let theta = kerr_coefficients(&to_internal(&eff.file_params(&file)?))?.theta;
                eff.params.push(("eps2", eps1 * theta.tan()));
            }
        }
        _ => {}
    }
    Ok(eff)
}

/// Runs the experiment named by `cfg.experiment`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let id = cfg.experiment.ok_or_else(|| Error::Config {
        key: "experiment".into(),
        reason: "no experiment id given".into(),
    })?;
    match id {
        ExperimentId::Fig2a | ExperimentId::Fig2b => run_fig2(id, cfg),
        ExperimentId::Fig3a | ExperimentId::Fig3b => run_fig3(id, cfg),
        ExperimentId::Fig4a | ExperimentId::Fig4b => run_fig4(id, cfg),
        ExperimentId::Convergence => super::convergence::convergence_scan_from_config(cfg),
    }
}

/// Fig. 2 grids: `N` in 200..=400 step 10, or `d` at 90 points over
/// `(0, 0.9 omega_m]`, in internal units.
pub fn fig2_grid(id: ExperimentId, p: &SystemParams<f64>) -> (SweepAxis, Vec<f64>) {
    match id {
        ExperimentId::Fig2a => (
            SweepAxis::Atoms,
            (200..=400).step_by(10).map(f64::from).collect(),
        ),
        _ => (
            SweepAxis::Splitting,
            (1..=90)
                .map(|k| 0.9 * p.omega_m * k as f64 / 90.0)
                .collect(),
        ),
    }
}

pub fn run_fig2(id: ExperimentId, user: &ExperimentConfig) -> Result<ExperimentOutput> {
    if !matches!(id, ExperimentId::Fig2a | ExperimentId::Fig2b) {
        return Err(Error::Config {
            key: "experiment".into(),
            reason: format!("{id} is not a Fig. 2 variant"),
        });
    }
    let eff = resolve(id, user)?;
    let p = to_internal(&eff.file_params(&reference_file_params())?);
    let (axis, grid) = fig2_grid(id, &p);
    let rows = sweep(&p, axis, &grid)?;
    let mut csv = Vec::new();
    output::config_comment(&mut csv, &eff)?;
    crate::effective::write_sweep_csv(&mut csv, &p, axis, &rows)?;
    let name = format!("{id}.csv");
    let files = vec![
        OutputFile::text(&name, csv),
        OutputFile::new(&format!("{id}.gp"), output::fig2_script(id, &name)),
        OutputFile::new("effective.cfg", eff.to_text()),
    ];
    Ok(ExperimentOutput {
        id: Some(id),
        config: eff,
        files,
        detail: Detail::Coefficients {
            axis,
            params: p,
            rows,
        },
    })
}

/// Observable by name on the quasimode space: `n_c1`/`N_c1`, `n_c2`/`N_c2`,
/// `n_b`/`N_b`, rotating-frame quadratures `X_c1`, `X_c2`, and `x_b = b +
/// b^dagger`. `shift` holds the cavity displacements of a displaced frame
/// (empty envelopes in the lab frame); cavity observables are reported for
/// the full fields.
pub fn named_observable(
    space: &ModeSpace,
    dc: &DerivedCoefficients<f64>,
    shift: &[Envelope<f64>; 2],
    name: &str,
) -> Result<Observable<f64>> {
    let cavity_number = |m: usize| -> Result<Observable<f64>> {
        Ok(if shift[m].is_zero() {
            Observable::Operator(number(space, m)?)
        } else {
            Observable::DisplacedNumber {
                number: number(space, m)?,
                lowering: lowering(space, m)?,
                shift: shift[m].clone(),
            }
        })
    };
    Ok(match name {
        "n_c1" | "N_c1" => cavity_number(0)?,
        "n_c2" | "N_c2" => cavity_number(1)?,
        "n_b" | "N_b" => Observable::Operator(number(space, 2)?),
        "X_c1" => Observable::RotatingQuadrature {
            lowering: lowering(space, 0)?,
            frequency: dc.omega_c1,
            shift: shift[0].clone(),
        },
        "X_c2" => Observable::RotatingQuadrature {
            lowering: lowering(space, 1)?,
            frequency: dc.omega_c2,
            shift: shift[1].clone(),
        },
        "x_b" => {
            let b = lowering(space, 2)?;
            Observable::Operator(&b + &b.adjoint())
        }
        other => return Err(Error::UnknownObservable(other.to_string())),
    })
}

fn select_integrator(eff: &ExperimentConfig, floquet_period: Option<f64>) -> Integrator<f64> {
    if eff.rtol.is_some() || eff.atol.is_some() {
        Integrator::Adaptive {
            rtol: eff.rtol.unwrap_or(DEFAULT_RTOL),
            atol: eff.atol.unwrap_or(DEFAULT_ATOL),
        }
    } else if let Some(period) = floquet_period {
        Integrator::Floquet {
            period,
            step: eff.step,
        }
    } else {
        Integrator::Fixed { step: eff.step }
    }
}

fn dims_of(eff: &ExperimentConfig, fallback: [usize; 3]) -> [usize; 3] {
    [0, 1, 2].map(|m| eff.dims[m].unwrap_or(fallback[m]))
}

struct RunPlan {
    label: String,
    params: SystemParams<f64>,
    initial: [ModeState<f64>; 3],
    observables: Vec<&'static str>,
    horizon: f64,
    output_step: f64,
    integrator: Integrator<f64>,
    jumps: bool,
    frame: Frame,
    positivity: bool,
    trajectories: Option<(usize, u64)>,
}

fn execute(
    id: Option<ExperimentId>,
    eff: &ExperimentConfig,
    dims: [usize; 3],
    plan: &RunPlan,
) -> Result<DynamicsRun> {
    let ctx = match id {
        Some(id) => format!("{id} run {}", plan.label),
        None => format!("evolve run {}", plan.label),
    };
    let inner = || -> Result<DynamicsRun> {
        let space = ModeSpace::quasimodes(dims[0], dims[1], dims[2])?;
        let dc = kerr_coefficients(&plan.params)?;
        let (h, shift) = match plan.frame {
            Frame::Lab => (
                hamiltonian_interaction(&space, &plan.params, &dc)?,
                [Envelope::zero(), Envelope::zero()],
            ),
            Frame::Displaced => hamiltonian_displaced(&space, &plan.params, &dc)?,
        };
        let initial = product_state(&space, &plan.initial)?;
        let grid = TimeGrid::new(0.0, plan.horizon, plan.output_step);
        let mut spec = EvolutionSpec::new(initial, h, grid)
            .with_integrator(plan.integrator)
            .with_positivity_check(plan.positivity)
            .with_metadata(
                "experiment",
                id.map_or("evolve".to_string(), |i| i.to_string()),
            )
            .with_metadata("run", &plan.label)
            .with_metadata("N", plan.params.atoms)
            .with_metadata("seed", eff.seed.unwrap_or(0))
            .with_metadata("code_version", CODE_VERSION)
            .with_metadata("frame", plan.frame)
            .with_metadata("horizon_ms", plan.horizon)
            .with_metadata("output_step_ms", plan.output_step)
            .with_metadata(
                "initial",
                plan.initial.map(|s| ModeSpec(s).to_string()).join(" "),
            )
            .with_metadata("params", crate::effective::params_comment(&plan.params));
        for line in eff.to_text().lines() {
            spec = spec.with_metadata("config", line);
        }
        if plan.jumps {
            spec = spec.with_jumps(jump_operators(&space, &plan.params, &dc)?);
        } else {
            spec = spec.with_jumps(JumpSet::new());
        }
        for name in &plan.observables {
            spec.observables.push((
                name.to_string(),
                named_observable(&space, &dc, &shift, name)?,
            ));
        }
        let series = match plan.trajectories {
            Some((n, seed)) => evolve_trajectories(&spec, n, seed)?,
            None => evolve_master(&spec)?,
        };
        Ok(DynamicsRun {
            label: plan.label.clone(),
            atoms: plan.params.atoms,
            coefficients: dc,
            series,
            measures: Vec::new(),
        })
    };
    inner().map_err(|e| e.in_run(ctx))
}

/// `[k * step for k in 0..=K]` with `K * step >= horizon`.
fn whole_steps(horizon: f64, step: f64) -> f64 {
    (horizon / step - 1e-9).ceil().max(1.0) * step
}

fn dynamics_files(
    id: ExperimentId,
    eff: &ExperimentConfig,
    runs: &[DynamicsRun],
) -> Result<Vec<OutputFile>> {
    let mut files = Vec::new();
    let mut names = Vec::new();
    for r in runs {
        let mut csv = Vec::new();
        r.series.write_csv(&mut csv)?;
        let name = format!("{id}_{}.csv", r.label);
        files.push(OutputFile::text(&name, csv));
        names.push((name, r.label.clone()));
    }
    let observables = runs
        .first()
        .map(|r| r.series.names.clone())
        .unwrap_or_default();
    files.push(OutputFile::new(
        &format!("{id}.gp"),
        output::dynamics_script(id, &names, &observables),
    ));
    if runs.iter().any(|r| !r.measures.is_empty()) {
        files.push(OutputFile::new(
            &format!("{id}_summary.csv"),
            summary_csv(runs),
        ));
    }
    files.push(OutputFile::new("effective.cfg", eff.to_text()));
    Ok(files)
}

/// Run measures, frequencies converted to file units.
fn summary_csv(runs: &[DynamicsRun]) -> String {
    let mut out = format!("# units: {UNIT_CONVENTION}; time in ms\nrun,measure,value\n");
    for r in runs {
        for (name, v) in &r.measures {
            let frequency = name.starts_with("frequency_") || name.starts_with("predicted_");
            let v = if frequency { to_pi_units(*v) } else { *v };
            out.push_str(&format!("{},{name},{v}\n", r.label));
        }
    }
    out
}

/// Closed-system runs without drives or losses. Variant a starts from
/// `|0.1> (x) |1> (x) |0>` at N = 320 and 400; variant b from coherent pairs
/// (0.1, 0.2) and (0.2, 0.4) at N = 380.
pub fn run_fig3(id: ExperimentId, user: &ExperimentConfig) -> Result<ExperimentOutput> {
    if !matches!(id, ExperimentId::Fig3a | ExperimentId::Fig3b) {
        return Err(Error::Config {
            key: "experiment".into(),
            reason: format!("{id} is not a Fig. 3 variant"),
        });
    }
    let eff = resolve(id, user)?;
    let mut file = eff.file_params(&reference_file_params())?;
    for k in ["eps1", "eps2", "kappa1", "kappa2", "gamma_m"] {
        if file.get(k) != Some(0.0) {
            return Err(Error::Config {
                key: k.into(),
                reason: format!("{id} is a closed-system run; must be 0"),
            });
        }
    }
    let atoms = eff
        .param("N")
        .map_or_else(|| default_atoms(id), |n| vec![n as u32]);
    let dims = dims_of(&eff, FIG3_DIMS);
    let coh = |a: f64| ModeState::Coherent(Cx::new(a, 0.0));
    let cases: Vec<(String, u32, [ModeState<f64>; 3], Vec<&'static str>)> = match id {
        ExperimentId::Fig3a => atoms
            .iter()
            .map(|&n| {
                (
                    format!("N{n}"),
                    n,
                    [coh(0.1), ModeState::Fock(1), ModeState::Fock(0)],
                    vec!["X_c1", "n_c1", "n_c2"],
                )
            })
            .collect(),
        _ => atoms
            .iter()
            .flat_map(|&n| {
                [(1, 0.1, 0.2), (2, 0.2, 0.4)].map(|(k, a, b)| {
                    let label = if atoms.len() == 1 {
                        format!("pair{k}")
                    } else {
                        format!("N{n}_pair{k}")
                    };
                    (
                        label,
                        n,
                        [coh(a), coh(b), ModeState::Fock(0)],
                        vec!["X_c1", "X_c2"],
                    )
                })
            })
            .collect(),
    };
    let plans = cases
        .into_iter()
        .map(|(label, n, mut initial, observables)| {
            for m in 0..3 {
                if let Some(s) = eff.initial[m] {
                    initial[m] = s.0;
                }
            }
            file.atoms = n;
            let params = to_internal(&file);
            let dc =
                kerr_coefficients(&params).map_err(|e| e.in_run(format!("{id} run {label}")))?;
            let period = (params.d != 0.0).then(|| TAU / params.d.abs());
            let integrator = select_integrator(&eff, period);
            let floquet = matches!(integrator, Integrator::Floquet { .. });
            let target = eff.horizon.unwrap_or(20.0 * TAU / dc.eta1.abs());
            let output_step = match (eff.output_step, floquet) {
                (Some(s), _) => s,
                (None, true) => {
                    let p = period.expect("Floquet needs d");
                    p * (target / (FIG3_POINTS * p)).round().max(1.0)
                }
                (None, false) => target / FIG3_POINTS,
            };
            let horizon = if floquet {
                whole_steps(target, output_step)
            } else {
                target
            };
            Ok(RunPlan {
                label,
                params,
                initial,
                observables,
                horizon,
                output_step,
                integrator,
                jumps: false,
                frame: Frame::Lab,
                positivity: false,
                trajectories: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut runs = plans
        .par_iter()
        .map(|plan| execute(Some(id), &eff, dims, plan))
        .collect::<Result<Vec<_>>>()?;
    for run in &mut runs {
        analyse_fig3(run);
    }
    let files = dynamics_files(id, &eff, &runs)?;
    Ok(ExperimentOutput {
        id: Some(id),
        config: eff,
        files,
        detail: Detail::Dynamics(runs),
    })
}

fn analyse_fig3(run: &mut DynamicsRun) {
    let dc = run.coefficients;
    let s = &run.series;
    let mut m = vec![("predicted_eta1_u1_s".to_string(), dc.eta1 + dc.u1 + dc.s)];
    for name in s.names.clone() {
        let v = s.get(&name).expect("recorded");
        if name.starts_with('X') {
            let f = dominant_frequency(&s.times, v).unwrap_or(f64::NAN);
            m.push((format!("frequency_{name}"), f));
            m.push((format!("period_{name}"), TAU / f));
            m.push((format!("amplitude_{name}"), amplitude(v)));
        } else {
            m.push((format!("excursion_{name}"), relative_excursion(v)));
        }
    }
    m.push((
        "output_step".into(),
        s.times.get(1).map_or(0.0, |t1| t1 - s.times[0]),
    ));
    m.push(("max_trace_drift".into(), s.max_trace_drift()));
    run.measures = m;
}

/// Driven, damped runs with all four jump operators at N = 320 and 380.
pub fn run_fig4(id: ExperimentId, user: &ExperimentConfig) -> Result<ExperimentOutput> {
    if !matches!(id, ExperimentId::Fig4a | ExperimentId::Fig4b) {
        return Err(Error::Config {
            key: "experiment".into(),
            reason: format!("{id} is not a Fig. 4 variant"),
        });
    }
    let mut eff = resolve(id, user)?;
    let mut file = eff.file_params(&reference_file_params())?;
    let atoms = eff
        .param("N")
        .map_or_else(|| default_atoms(id), |n| vec![n as u32]);
    let dims = dims_of(&eff, FIG4_DIMS);
    let kappa2 = file.kappa2 * PI;
    let horizon = match eff.horizon {
        Some(h) => h,
        None if kappa2 > 0.0 => 15.0 / (2.0 * kappa2),
        None => {
            return Err(Error::Config {
                key: "horizon".into(),
                reason: "required when kappa2 = 0".into(),
            })
        }
    };
    let output_step = eff.output_step.unwrap_or(horizon / FIG4_POINTS);
    if user.step.is_none() {
        eff.step = eff.step.map(|h| h.min(output_step));
    }
    let n_th = file.n_th;
    let (mut initial, observables) = match id {
        ExperimentId::Fig4a => (
            [
                ModeState::Fock(0),
                ModeState::Fock(1),
                ModeState::Thermal(n_th),
            ],
            vec!["N_c1", "N_c2"],
        ),
        _ => (
            [
                ModeState::Fock(0),
                ModeState::Fock(0),
                ModeState::Thermal(n_th),
            ],
            vec!["N_c1", "N_b"],
        ),
    };
    for m in 0..3 {
        if let Some(s) = eff.initial[m] {
            initial[m] = s.0;
        }
    }
    let plans: Vec<RunPlan> = atoms
        .iter()
        .map(|&n| {
            file.atoms = n;
            RunPlan {
                label: format!("N{n}"),
                params: to_internal(&file),
                initial,
                observables: observables.clone(),
                horizon,
                output_step,
                integrator: select_integrator(&eff, None),
                jumps: true,
                frame: eff.frame.unwrap_or(Frame::Displaced),
                positivity: true,
                trajectories: None,
            }
        })
        .collect();
    let mut runs = plans
        .par_iter()
        .map(|plan| execute(Some(id), &eff, dims, plan))
        .collect::<Result<Vec<_>>>()?;
    let window = if kappa2 > 0.0 {
        1.0 / kappa2
    } else {
        horizon / 8.0
    };
    for run in &mut runs {
        analyse_fig4(run, window)?;
    }
    let files = dynamics_files(id, &eff, &runs)?;
    Ok(ExperimentOutput {
        id: Some(id),
        config: eff,
        files,
        detail: Detail::Dynamics(runs),
    })
}

fn analyse_fig4(run: &mut DynamicsRun, window: f64) -> Result<()> {
    let s = &run.series;
    let names: Vec<&str> = s.names.iter().map(String::as_str).collect();
    let span = s.times.last().copied().unwrap_or(0.0) - s.times.first().copied().unwrap_or(0.0);
    // Too short a run to hold one window: no detection is possible.
    let steady = if window < span {
        steady_state_detect(s, &names, window, STEADY_TOL)?
    } else {
        None
    };
    let (a, b) = (s.last(names[0])?, s.last(names[1])?);
    run.measures = vec![
        (
            "steady_time".into(),
            steady.map_or(f64::NAN, |i| s.times[i]),
        ),
        ("steady_window".into(), window),
        (format!("final_{}", names[0]), a),
        (format!("final_{}", names[1]), b),
        ("final_gap".into(), relative_gap(a, b)),
        ("max_trace_drift".into(), s.max_trace_drift()),
        (
            "final_min_eigenvalue".into(),
            s.final_min_eigenvalue.unwrap_or(f64::NAN),
        ),
        (
            "max_hermiticity_residual".into(),
            s.max_hermiticity_residual,
        ),
    ];
    Ok(())
}

/// A single run of the interaction Hamiltonian described entirely by the
/// configuration: `horizon` is required; dims default to (6, 6, 8),
/// initial modes to vacuum, observables to the three numbers, losses on.
/// With `trajectories = n` the master equation is unravelled instead.
pub fn run_evolve(user: &ExperimentConfig) -> Result<ExperimentOutput> {
    if let Some(id) = user.experiment {
        return Err(Error::Config {
            key: "experiment".into(),
            reason: format!("evolve takes no experiment id, found {id}"),
        });
    }
    for (set, key) in [
        (user.convergence_base.is_some(), "convergence.base"),
        (
            user.convergence_multipliers.is_some(),
            "convergence.multipliers",
        ),
        (user.convergence_modes.is_some(), "convergence.modes"),
    ] {
        if set {
            return Err(Error::Config {
                key: key.into(),
                reason: "not used by evolve".into(),
            });
        }
    }
    let horizon = user.horizon.ok_or_else(|| Error::Config {
        key: "horizon".into(),
        reason: "required by evolve".into(),
    })?;
    let mut eff = user.clone();
    eff.dims = dims_of(user, EVOLVE_DIMS).map(Some);
    eff.output_step.get_or_insert(horizon / FIG4_POINTS);
    eff.seed.get_or_insert(0);
    eff.jumps.get_or_insert(true);
    for m in 0..3 {
        eff.initial[m].get_or_insert(ModeSpec(ModeState::Fock(0)));
    }
    let observables = eff
        .observables
        .get_or_insert_with(|| vec!["n_c1".into(), "n_c2".into(), "n_b".into()])
        .clone();
    let names: Vec<&'static str> = observables
        .iter()
        .map(|n| {
            [
                "n_c1", "N_c1", "n_c2", "N_c2", "n_b", "N_b", "X_c1", "X_c2", "x_b",
            ]
            .into_iter()
            .find(|k| k == n)
            .ok_or_else(|| Error::UnknownObservable(n.clone()))
        })
        .collect::<Result<_>>()?;
    let params = to_internal(&eff.file_params(&reference_file_params())?);
    let trajectories = match eff.trajectories {
        Some(0) => {
            return Err(Error::Config {
                key: "trajectories".into(),
                reason: "must be positive".into(),
            })
        }
        Some(n) => Some((n, eff.seed.unwrap_or(0))),
        None => None,
    };
    let plan = RunPlan {
        label: "run".into(),
        params,
        initial: eff.initial.map(|s| s.expect("filled").0),
        observables: names,
        horizon,
        output_step: eff.output_step.expect("filled"),
        integrator: select_integrator(&eff, None),
        jumps: eff.jumps.expect("filled"),
        frame: *eff.frame.get_or_insert(Frame::Lab),
        positivity: trajectories.is_none(),
        trajectories,
    };
    let dims = dims_of(&eff, EVOLVE_DIMS);
    let run = execute(None, &eff, dims, &plan)?;
    let mut csv = Vec::new();
    run.series.write_csv(&mut csv)?;
    let files = vec![
        OutputFile::text("evolve.csv", csv),
        OutputFile::new("effective.cfg", eff.to_text()),
    ];
    Ok(ExperimentOutput {
        id: None,
        config: eff,
        files,
        detail: Detail::Dynamics(vec![run]),
    })
}
