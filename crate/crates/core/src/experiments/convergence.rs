use std::fmt::Write as _;

use super::config::{ExperimentConfig, ExperimentId};
use super::output::{config_comment, OutputFile};
use super::runners::{defaults, run_experiment, Detail, ExperimentOutput};
use crate::error::{Error, Result};
use crate::UNIT_CONVENTION;

/// Largest total dimension scanned without an explicit override.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;
/// Last successive difference below which a scan counts as converged.
pub const CONVERGENCE_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub multiplier: f64,
    pub dims: [usize; 3],
    /// Final-time value of every `run.observable`, in column order.
    pub values: Vec<f64>,
    /// Largest `|v - v_prev| / max(|v|, |v_prev|)` against the previous row.
    pub rel_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub base: ExperimentId,
    pub columns: Vec<String>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Whether the last successive difference is below [`CONVERGENCE_TOL`].
    pub fn converged(&self) -> bool {
        self.rows
            .last()
            .and_then(|r| r.rel_diff)
            .is_some_and(|d| d < CONVERGENCE_TOL)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# units: {UNIT_CONVENTION}; time in ms");
        let _ = writeln!(s, "# base: {}", self.base);
        let _ = writeln!(s, "# converged: {}", self.converged());
        let _ = writeln!(
            s,
            "multiplier,dims.c1,dims.c2,dims.b,total,{},rel_diff",
            self.columns.join(",")
        );
        for r in &self.rows {
            let _ = write!(
                s,
                "{},{},{},{},{}",
                r.multiplier,
                r.dims[0],
                r.dims[1],
                r.dims[2],
                r.dims.iter().product::<usize>()
            );
            for v in &r.values {
                let _ = write!(s, ",{v}");
            }
            match r.rel_diff {
                Some(d) => {
                    let _ = writeln!(s, ",{d}");
                }
                None => s.push_str(",\n"),
            }
        }
        s
    }
}

/// Scan settings: which modes scale and the dimension cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    /// Indices into `(c1, c2, b)`; empty scales every mode.
    pub modes: Vec<usize>,
    pub cap: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            modes: Vec::new(),
            cap: DEFAULT_DIMENSION_CAP,
        }
    }
}

/// Dims of `base` with the selected modes multiplied by `m` (rounded, at least 2).
pub fn scaled_dims(base: [usize; 3], m: f64, modes: &[usize]) -> [usize; 3] {
    let mut d = base;
    for (i, x) in d.iter_mut().enumerate() {
        if modes.is_empty() || modes.contains(&i) {
            *x = ((*x as f64 * m).round() as usize).max(2);
        }
    }
    d
}

/// Reruns `base` (a dynamics experiment) once per multiplier and compares
/// final-time observables of successive rows. Every row is checked against
/// the cap before anything runs.
pub fn convergence_scan(
    base: &ExperimentConfig,
    multipliers: &[f64],
    opts: &ScanOptions,
) -> Result<ConvergenceTable> {
    let id = base.experiment.ok_or_else(|| Error::Config {
        key: "convergence.base".into(),
        reason: "a base experiment is required".into(),
    })?;
    if !id.is_dynamics() {
        return Err(Error::Config {
            key: "convergence.base".into(),
            reason: format!("{id} is not a dynamics experiment"),
        });
    }
    if multipliers.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let start = base.over(&defaults(id));
    let dims0 = start
        .dims
        .map(|d| d.expect("dynamics experiments have default dims"));
    let plan: Vec<[usize; 3]> = multipliers
        .iter()
        .map(|&m| scaled_dims(dims0, m, &opts.modes))
        .collect();
    if let Some(d) = plan.iter().find(|d| d.iter().product::<usize>() > opts.cap) {
        return Err(Error::DimensionCap {
            total: d.iter().product(),
            cap: opts.cap,
        });
    }
    let mut columns = Vec::new();
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for (&m, dims) in multipliers.iter().zip(&plan) {
        let mut cfg = base.clone();
        cfg.dims = dims.map(Some);
        let out = run_experiment(&cfg)?;
        let mut names = Vec::new();
        let mut values = Vec::new();
        for run in out.runs() {
            for (k, name) in run.series.names.iter().enumerate() {
                names.push(format!("{}.{name}", run.label));
                values.push(*run.series.values[k].last().expect("non-empty series"));
            }
        }
        if columns.is_empty() {
            columns = names;
        }
        let rel_diff = rows.last().map(|prev| {
            prev.values
                .iter()
                .zip(&values)
                .map(|(a, b)| {
                    let scale = a.abs().max(b.abs());
                    if scale == 0.0 {
                        0.0
                    } else {
                        (a - b).abs() / scale
                    }
                })
                .fold(0.0, f64::max)
        });
        log::info!("convergence {id}: dims {dims:?} rel_diff {rel_diff:?}");
        rows.push(ConvergenceRow {
            multiplier: m,
            dims: *dims,
            values,
            rel_diff,
        });
    }
    Ok(ConvergenceTable {
        base: id,
        columns,
        rows,
    })
}

/// Entry point for `experiment = convergence` configurations.
pub fn convergence_scan_from_config(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    convergence_scan_with_cap(cfg, DEFAULT_DIMENSION_CAP)
}

pub fn convergence_scan_with_cap(cfg: &ExperimentConfig, cap: usize) -> Result<ExperimentOutput> {
    let base_id = cfg.convergence_base.ok_or_else(|| Error::Config {
        key: "convergence.base".into(),
        reason: "required for a convergence scan".into(),
    })?;
    let multipliers = cfg
        .convergence_multipliers
        .clone()
        .unwrap_or_else(|| vec![1.0, 1.5, 2.0]);
    let modes = cfg.convergence_modes.clone().unwrap_or_default();
    let mut base = cfg.clone();
    base.experiment = Some(base_id);
    base.convergence_base = None;
    base.convergence_multipliers = None;
    base.convergence_modes = None;
    let table = convergence_scan(
        &base,
        &multipliers,
        &ScanOptions {
            modes: modes.clone(),
            cap,
        },
    )?;
    let mut eff = cfg.clone();
    eff.experiment = Some(ExperimentId::Convergence);
    eff.convergence_multipliers = Some(multipliers);
    eff.convergence_modes = Some(
        (0..3)
            .filter(|m| modes.is_empty() || modes.contains(m))
            .collect(),
    );
    let mut header = Vec::new();
    config_comment(&mut header, &eff)?;
    let csv = String::from_utf8(header).expect("utf-8") + &table.to_csv();
    let files = vec![
        OutputFile::new(&format!("convergence_{base_id}.csv"), csv),
        OutputFile::new("effective.cfg", eff.to_text()),
    ];
    Ok(ExperimentOutput {
        id: Some(ExperimentId::Convergence),
        config: eff,
        files,
        detail: Detail::Convergence(table),
    })
}
