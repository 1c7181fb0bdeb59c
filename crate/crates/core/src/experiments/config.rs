//! Flat `key = value` configuration. Frequencies are multiples of
//! pi krad/s, times are ms. Unknown keys are errors.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::effective::{SystemParams, PARAM_NAMES};
use crate::error::{Error, Result};
use crate::hilbert::ModeState;
use crate::scalar::Cx;
use crate::units::from_pi_units;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExperimentId {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Convergence,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        Self::Fig2a,
        Self::Fig2b,
        Self::Fig3a,
        Self::Fig3b,
        Self::Fig4a,
        Self::Fig4b,
        Self::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
            Self::Fig4a => "fig4a",
            Self::Fig4b => "fig4b",
            Self::Convergence => "convergence",
        }
    }

    pub fn is_dynamics(self) -> bool {
        matches!(self, Self::Fig3a | Self::Fig3b | Self::Fig4a | Self::Fig4b)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| Error::Config {
            key: "experiment".into(),
            reason: format!("unknown experiment {s:?}; expected one of fig2a, fig2b, fig3a, fig3b, fig4a, fig4b, convergence"),
        })
    }
}

/// Initial condition of one mode, written `vacuum`, `fock:n`,
/// `coherent:re[,im]` or `thermal:nbar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec(pub ModeState<f64>);

impl FromStr for ModeSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        Ok(ModeSpec(match kind.trim() {
            "vacuum" => ModeState::Fock(0),
            "fock" => ModeState::Fock(arg.trim().parse().map_err(|e| format!("{arg:?}: {e}"))?),
            "coherent" => {
                let (re, im) = arg.split_once(',').unwrap_or((arg, "0"));
                ModeState::Coherent(Cx::new(num(re)?, num(im)?))
            }
            "thermal" => ModeState::Thermal(num(arg)?),
            other => return Err(format!("unknown mode state {other:?}")),
        }))
    }
}

impl fmt::Display for ModeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            ModeState::Fock(n) => write!(f, "fock:{n}"),
            ModeState::Coherent(a) if a.im == 0.0 => write!(f, "coherent:{}", a.re),
            ModeState::Coherent(a) => write!(f, "coherent:{},{}", a.re, a.im),
            ModeState::Thermal(n) => write!(f, "thermal:{n}"),
        }
    }
}

/// Picture in which the cavity fields are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// The interaction-picture fields themselves.
    Lab,
    /// Fluctuations about the classical driven, damped mean fields.
    Displaced,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lab => "lab",
            Self::Displaced => "displaced",
        })
    }
}

impl FromStr for Frame {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lab" => Ok(Self::Lab),
            "displaced" => Ok(Self::Displaced),
            other => Err(format!(
                "unknown frame {other:?}, expected lab or displaced"
            )),
        }
    }
}

/// Keys beyond the physical parameters, in the order they are written.
pub const EXTRA_KEYS: [&str; 20] = [
    "experiment",
    "dims.c1",
    "dims.c2",
    "dims.b",
    "integrator.step",
    "integrator.rtol",
    "integrator.atol",
    "horizon",
    "output_step",
    "seed",
    "trajectories",
    "initial.c1",
    "initial.c2",
    "initial.b",
    "observables",
    "jumps",
    "frame",
    "convergence.base",
    "convergence.multipliers",
    "convergence.modes",
];

/// Parsed configuration; `None` means "experiment default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentId>,
    /// Parameter overrides in file units (pi krad/s), by name.
    pub params: Vec<(&'static str, f64)>,
    pub dims: [Option<usize>; 3],
    pub step: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub horizon: Option<f64>,
    pub output_step: Option<f64>,
    pub seed: Option<u64>,
    pub trajectories: Option<usize>,
    pub initial: [Option<ModeSpec>; 3],
    pub observables: Option<Vec<String>>,
    pub jumps: Option<bool>,
    pub frame: Option<Frame>,
    pub convergence_base: Option<ExperimentId>,
    pub convergence_multipliers: Option<Vec<f64>>,
    pub convergence_modes: Option<Vec<usize>>,
}

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| bad(key, format!("{v:?} is not a number")))?;
    if !x.is_finite() {
        return Err(bad(key, "must be finite"));
    }
    Ok(x)
}

fn parse_positive(key: &str, v: &str) -> Result<f64> {
    let x = parse_f64(key, v)?;
    if x <= 0.0 {
        return Err(bad(key, "must be positive"));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| bad(key, format!("{v:?} is not a non-negative integer")))
}

const MODE_NAMES: [&str; 3] = ["c1", "c2", "b"];

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                bad(
                    &format!("line {}", lineno + 1),
                    format!("expected key = value, found {line:?}"),
                )
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies one `key = value` assignment (later assignments win).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some(&name) = PARAM_NAMES.iter().find(|&&n| n == key) {
            let x = parse_f64(key, value)?;
            if name == "N" && (x.fract() != 0.0 || x < 1.0) {
                return Err(bad(key, "must be a positive integer"));
            }
            self.params.retain(|(n, _)| *n != name);
            self.params.push((name, x));
            return Ok(());
        }
        match key {
            "experiment" => self.experiment = Some(value.parse()?),
            "dims.c1" | "dims.c2" | "dims.b" => {
                let m = MODE_NAMES
                    .iter()
                    .position(|n| key.ends_with(n))
                    .expect("mode key");
                let d = parse_usize(key, value)?;
                if d < 2 {
                    return Err(bad(key, "truncation must be at least 2"));
                }
                self.dims[m] = Some(d);
            }
            "integrator.step" => self.step = Some(parse_positive(key, value)?),
            "integrator.rtol" => self.rtol = Some(parse_positive(key, value)?),
            "integrator.atol" => self.atol = Some(parse_positive(key, value)?),
            "horizon" => self.horizon = Some(parse_positive(key, value)?),
            "output_step" => self.output_step = Some(parse_positive(key, value)?),
            "seed" => {
                self.seed = Some(
                    value
                        .parse()
                        .map_err(|_| bad(key, "must be an unsigned integer"))?,
                )
            }
            "trajectories" => self.trajectories = Some(parse_usize(key, value)?),
            "initial.c1" | "initial.c2" | "initial.b" => {
                let m = MODE_NAMES
                    .iter()
                    .position(|n| key.ends_with(n))
                    .expect("mode key");
                self.initial[m] = Some(value.parse().map_err(|e: String| bad(key, e))?);
            }
            "observables" => {
                let names: Vec<String> = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                if names.is_empty() {
                    return Err(bad(key, "empty observable list"));
                }
                self.observables = Some(names);
            }
            "jumps" => {
                self.jumps = Some(match value {
                    "on" | "true" => true,
                    "off" | "false" => false,
                    _ => return Err(bad(key, "expected on or off")),
                })
            }
            "frame" => self.frame = Some(value.parse().map_err(|e: String| bad(key, e))?),
            "convergence.base" => {
                let id: ExperimentId = value.parse()?;
                if !id.is_dynamics() {
                    return Err(bad(key, format!("{id} is not a dynamics experiment")));
                }
                self.convergence_base = Some(id);
            }
            "convergence.multipliers" => {
                let m = value
                    .split(',')
                    .map(|s| parse_positive(key, s.trim()))
                    .collect::<Result<Vec<_>>>()?;
                if m.is_empty() {
                    return Err(Error::EmptyGrid);
                }
                self.convergence_multipliers = Some(m);
            }
            "convergence.modes" => {
                let m = value
                    .split(',')
                    .map(|s| {
                        MODE_NAMES
                            .iter()
                            .position(|n| *n == s.trim())
                            .ok_or_else(|| {
                                bad(key, format!("unknown mode {s:?}; expected c1, c2, b"))
                            })
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.convergence_modes = Some(m);
            }
            _ => {
                return Err(bad(key, "unknown key"));
            }
        }
        Ok(())
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
    }

    /// Layers `self` on top of `base`: set fields of `self` win.
    pub fn over(&self, base: &ExperimentConfig) -> ExperimentConfig {
        let mut out = base.clone();
        if self.experiment.is_some() {
            out.experiment = self.experiment;
        }
        for &(n, v) in &self.params {
            out.params.retain(|(m, _)| *m != n);
            out.params.push((n, v));
        }
        for m in 0..3 {
            if self.dims[m].is_some() {
                out.dims[m] = self.dims[m];
            }
            if self.initial[m].is_some() {
                out.initial[m] = self.initial[m];
            }
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if self.$f.is_some() { out.$f = self.$f.clone(); } )* };
        }
        take!(
            step,
            rtol,
            atol,
            horizon,
            output_step,
            seed,
            trajectories,
            observables,
            jumps,
            frame,
            convergence_base,
            convergence_multipliers,
            convergence_modes
        );
        out
    }

    /// Parameters in file units with overrides applied to `defaults`.
    pub fn file_params(&self, defaults: &SystemParams<f64>) -> Result<SystemParams<f64>> {
        let mut p = *defaults;
        for &(name, v) in &self.params {
            p.set(name, v)?;
        }
        Ok(p)
    }

    /// Canonical text; parsing it back gives an equal configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(id) = self.experiment {
            let _ = writeln!(s, "experiment = {id}");
        }
        for name in PARAM_NAMES {
            if let Some(v) = self.param(name) {
                let _ = writeln!(s, "{name} = {v}");
            }
        }
        for m in 0..3 {
            if let Some(d) = self.dims[m] {
                let _ = writeln!(s, "dims.{} = {d}", MODE_NAMES[m]);
            }
        }
        let opt = |s: &mut String, k: &str, v: Option<f64>| {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {v}");
            }
        };
        opt(&mut s, "integrator.step", self.step);
        opt(&mut s, "integrator.rtol", self.rtol);
        opt(&mut s, "integrator.atol", self.atol);
        opt(&mut s, "horizon", self.horizon);
        opt(&mut s, "output_step", self.output_step);
        if let Some(v) = self.seed {
            let _ = writeln!(s, "seed = {v}");
        }
        if let Some(v) = self.trajectories {
            let _ = writeln!(s, "trajectories = {v}");
        }
        for m in 0..3 {
            if let Some(st) = self.initial[m] {
                let _ = writeln!(s, "initial.{} = {st}", MODE_NAMES[m]);
            }
        }
        if let Some(o) = &self.observables {
            let _ = writeln!(s, "observables = {}", o.join(","));
        }
        if let Some(j) = self.jumps {
            let _ = writeln!(s, "jumps = {}", if j { "on" } else { "off" });
        }
        if let Some(f) = self.frame {
            let _ = writeln!(s, "frame = {f}");
        }
        if let Some(b) = self.convergence_base {
            let _ = writeln!(s, "convergence.base = {b}");
        }
        if let Some(m) = &self.convergence_multipliers {
            let m: Vec<String> = m.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "convergence.multipliers = {}", m.join(","));
        }
        if let Some(m) = &self.convergence_modes {
            let m: Vec<&str> = m.iter().map(|&i| MODE_NAMES[i]).collect();
            let _ = writeln!(s, "convergence.modes = {}", m.join(","));
        }
        s
    }
}

/// The reference parameter set in file units (multiples of pi krad/s).
pub fn reference_file_params() -> SystemParams<f64> {
    to_file_units(&SystemParams::reference())
}

/// Converts parameters from internal krad/s to file units.
pub fn to_file_units(p: &SystemParams<f64>) -> SystemParams<f64> {
    let mut out = *p;
    for name in PARAM_NAMES {
        if SystemParams::<f64>::is_frequency(name) {
            let v = p.get(name).expect("known parameter");
            out.set(name, crate::units::to_pi_units(v))
                .expect("frequency parameter");
        }
    }
    out
}

/// Converts parameters from file units to internal krad/s.
pub fn to_internal(file: &SystemParams<f64>) -> SystemParams<f64> {
    let mut p = *file;
    for name in PARAM_NAMES {
        if SystemParams::<f64>::is_frequency(name) {
            let v = file.get(name).expect("known parameter");
            p.set(name, from_pi_units(v)).expect("frequency parameter");
        }
    }
    p
}
