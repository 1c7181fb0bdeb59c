use std::io::Write;

use crate::error::{Error, Result};
use crate::hilbert::QuantumState;
use crate::scalar::Real;
use crate::UNIT_CONVENTION;

/// Observables recorded on an output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    pub times: Vec<T>,
    pub names: Vec<String>,
    /// `values[k][i]`: observable `k` at `times[i]`.
    pub values: Vec<Vec<T>>,
    /// Standard errors (trajectory averages only), same layout as `values`.
    pub std_errors: Option<Vec<Vec<T>>>,
    /// `tr rho` (or the mean norm squared) at every output time.
    pub trace: Vec<T>,
    /// Largest imaginary part met while taking Hermitian expectation values.
    pub max_imag_residual: T,
    /// Largest `max |rho - rho^dagger|` over the output points.
    pub max_hermiticity_residual: T,
    /// Smallest eigenvalue of the final density matrix, when computed.
    pub final_min_eigenvalue: Option<f64>,
    pub final_state: Option<QuantumState<T>>,
    /// `key = value` header lines.
    pub metadata: Vec<(String, String)>,
    /// Wall-clock seconds; kept out of serialized output so reruns compare equal.
    pub wall_time_s: f64,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(names: Vec<String>) -> Self {
        let k = names.len();
        Self {
            times: Vec::new(),
            names,
            values: vec![Vec::new(); k],
            std_errors: None,
            trace: Vec::new(),
            max_imag_residual: T::zero(),
            max_hermiticity_residual: T::zero(),
            final_min_eigenvalue: None,
            final_state: None,
            metadata: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Result<&[T]> {
        Ok(&self.values[self.index_of(name)?])
    }

    pub fn last(&self, name: &str) -> Result<T> {
        self.get(name)?.last().copied().ok_or(Error::EmptyGrid)
    }

    pub fn max_trace_drift(&self) -> T {
        self.trace
            .iter()
            .fold(T::zero(), |m, &t| m.max((t - T::one()).abs()))
    }

    pub fn push_metadata(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    /// CSV with `#` header lines; time in ms, observables as recorded.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# units: {UNIT_CONVENTION}; time in ms")?;
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(
            w,
            "# max_trace_drift: {:e}",
            self.max_trace_drift().to_f64_lossy()
        )?;
        write!(w, "t")?;
        for n in &self.names {
            write!(w, ",{n}")?;
        }
        if self.std_errors.is_some() {
            for n in &self.names {
                write!(w, ",{n}_stderr")?;
            }
        }
        writeln!(w, ",trace")?;
        for i in 0..self.len() {
            write!(w, "{}", self.times[i])?;
            for v in &self.values {
                write!(w, ",{}", v[i])?;
            }
            if let Some(se) = &self.std_errors {
                for v in se {
                    write!(w, ",{}", v[i])?;
                }
            }
            writeln!(w, ",{}", self.trace[i])?;
        }
        Ok(())
    }
}

pub const DEFAULT_ABS_FLOOR: f64 = 1e-9;

/// Earliest output index after which every named trace stays within `tol`
/// (relative to `max(|window mean|, 1e-9)`) over every trailing window of
/// length `window`.
pub fn steady_state_detect<T: Real>(
    series: &TimeSeries<T>,
    names: &[&str],
    window: T,
    tol: T,
) -> Result<Option<usize>> {
    steady_state_detect_with_floor(series, names, window, tol, T::lit(DEFAULT_ABS_FLOOR))
}

/// As [`steady_state_detect`] with an explicit absolute floor.
pub fn steady_state_detect_with_floor<T: Real>(
    series: &TimeSeries<T>,
    names: &[&str],
    window: T,
    tol: T,
    floor: T,
) -> Result<Option<usize>> {
    let idx: Vec<usize> = names
        .iter()
        .map(|n| series.index_of(n))
        .collect::<Result<_>>()?;
    let times = &series.times;
    let Some(&t0) = times.first() else {
        return Ok(None);
    };
    if !(window > T::zero()) || window >= *times.last().unwrap() - t0 {
        return Err(Error::InvalidSpec(format!(
            "steady-state window {window} must be positive and shorter than the series span"
        )));
    }
    let slack = window * T::lit(1e-9);
    let steady = |start: usize, end: usize| {
        idx.iter().all(|&k| {
            let w = &series.values[k][start..=end];
            let (lo, hi) = w
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(a, b), &x| {
                    (a.min(x), b.max(x))
                });
            let mean = w.iter().copied().sum::<T>() / T::from_usize_lossy(w.len());
            hi - lo <= tol * mean.abs().max(floor)
        })
    };
    // Windows ending at every j with a full trailing span; scan from the end.
    let mut start = 0;
    let mut first_ok: Option<usize> = None;
    let mut windows = Vec::new();
    for j in 0..times.len() {
        if times[j] - t0 + slack < window {
            continue;
        }
        while times[j] - times[start] > window + slack {
            start += 1;
        }
        windows.push((start, j));
    }
    for &(s, j) in windows.iter().rev() {
        if steady(s, j) {
            first_ok = Some(s);
        } else {
            break;
        }
    }
    Ok(first_ok)
}
