use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use super::coefficients::{kerr_coefficients, DerivedCoefficients, COEFFICIENT_NAMES};
use super::params::{SystemParams, PARAM_NAMES};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::units::{tidy, to_pi_units};
use crate::UNIT_CONVENTION;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Atoms,
    Splitting,
    Rabi,
    Delta,
    BigDelta,
}

impl SweepAxis {
    pub fn key(self) -> &'static str {
        match self {
            Self::Atoms => "N",
            Self::Splitting => "d",
            Self::Rabi => "Omega",
            Self::Delta => "delta",
            Self::BigDelta => "Delta",
        }
    }

    /// Whether grid values are frequencies (scaled by pi in files).
    pub fn is_frequency(self) -> bool {
        self != Self::Atoms
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "N" => Self::Atoms,
            "d" => Self::Splitting,
            "Omega" => Self::Rabi,
            "delta" => Self::Delta,
            "Delta" => Self::BigDelta,
            _ => {
                return Err(Error::Config {
                    key: "axis".into(),
                    reason: format!("{s:?} is not one of N, d, Omega, delta, Delta"),
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    /// Grid value in internal units.
    pub value: T,
    pub result: Result<DerivedCoefficients<T>>,
}

/// One row per grid point, in grid order; failing points keep their error.
pub fn sweep<T: Real>(
    p: &SystemParams<T>,
    axis: SweepAxis,
    grid: &[T],
) -> Result<Vec<SweepRow<T>>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(grid
        .par_iter()
        .map(|&value| {
            let mut q = *p;
            let result = q.set(axis.key(), value).and_then(|_| kerr_coefficients(&q));
            SweepRow { value, result }
        })
        .collect())
}

/// Values of a coefficient row in file units: frequencies divided by pi,
/// `Delta_tilde` by pi^2, `theta` in radians.
pub fn coefficients_in_file_units<T: Real>(dc: &DerivedCoefficients<T>) -> [f64; 14] {
    let pi = std::f64::consts::PI;
    let mut out = [0.0; 14];
    for ((name, x), o) in COEFFICIENT_NAMES
        .iter()
        .zip(dc.values())
        .zip(out.iter_mut())
    {
        let x = x.to_f64_lossy();
        *o = match *name {
            "theta" => x,
            "Delta_tilde" => tidy(x / (pi * pi)),
            _ => to_pi_units(x),
        };
    }
    out
}

/// `key=value` list of every parameter in file units.
pub fn params_comment<T: Real>(p: &SystemParams<T>) -> String {
    PARAM_NAMES
        .iter()
        .map(|k| {
            let v = p.get(k).expect("known parameter");
            let v = if SystemParams::<T>::is_frequency(k) {
                to_pi_units(v)
            } else {
                v.to_f64_lossy()
            };
            format!("{k}={v}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn axis_in_file_units<T: Real>(axis: SweepAxis, value: T) -> f64 {
    if axis.is_frequency() {
        to_pi_units(value)
    } else {
        value.to_f64_lossy()
    }
}

pub fn write_sweep_csv<T: Real, W: Write>(
    mut w: W,
    p: &SystemParams<T>,
    axis: SweepAxis,
    rows: &[SweepRow<T>],
) -> Result<()> {
    writeln!(w, "# params: {}", params_comment(p))?;
    writeln!(
        w,
        "# units: {UNIT_CONVENTION}; theta in rad; Delta_tilde in (pi*krad/s)^2"
    )?;
    writeln!(w, "{},{},error", axis.key(), COEFFICIENT_NAMES.join(","))?;
    for row in rows {
        write!(w, "{}", axis_in_file_units(axis, row.value))?;
        match &row.result {
            Ok(dc) => {
                for x in coefficients_in_file_units(dc) {
                    write!(w, ",{x}")?;
                }
                writeln!(w, ",")?;
            }
            Err(e) => {
                let msg = e.to_string().replace(['"', ','], ";");
                writeln!(w, "{}\"{msg}\"", ",".repeat(COEFFICIENT_NAMES.len() + 1))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn monotone_demo_curves() {
        let p = SystemParams::<f64>::reference();
        let grid: Vec<f64> = (200..=400).step_by(20).map(f64::from).collect();
        let rows = sweep(&p, SweepAxis::Atoms, &grid).unwrap();
        let eta: Vec<_> = rows
            .iter()
            .map(|r| r.result.as_ref().unwrap().eta1)
            .collect();
        assert!(eta.windows(2).all(|w| w[1] > w[0]));

        let grid: Vec<f64> = (1..40).map(|k| k as f64 * 20.0 * PI).collect();
        let rows = sweep(&p, SweepAxis::Splitting, &grid).unwrap();
        let s: Vec<_> = rows
            .iter()
            .map(|r| r.result.as_ref().unwrap().s.abs())
            .collect();
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn order_and_error_rows() {
        let p = SystemParams::<f64>::reference();
        let grid = [100.0 * PI, 800.0 * PI, 300.0 * PI];
        let rows = sweep(&p, SweepAxis::Splitting, &grid).unwrap();
        assert_eq!(rows.iter().map(|r| r.value).collect::<Vec<_>>(), grid);
        assert!(rows[0].result.is_ok() && rows[1].result.is_err() && rows[2].result.is_ok());
        assert_eq!(sweep(&p, SweepAxis::Atoms, &[]), Err(Error::EmptyGrid));
        let rows = sweep(&p, SweepAxis::Atoms, &[1.5]).unwrap();
        assert!(rows[0].result.is_err());
    }

    #[test]
    fn angle_shared_across_scaled_atoms() {
        let p = SystemParams::<f64>::reference();
        let rows = sweep(&p, SweepAxis::Atoms, &[175.0, 350.0]).unwrap();
        let t: Vec<_> = rows
            .iter()
            .map(|r| r.result.as_ref().unwrap().theta)
            .collect();
        assert!((t[0] - t[1]).abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let p = SystemParams::<f64>::reference();
        let rows = sweep(&p, SweepAxis::Splitting, &[200.0 * PI, 800.0 * PI]).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &p, SweepAxis::Splitting, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("# params: g1=20 g2=22 Omega=20"));
        assert!(lines[1].contains(UNIT_CONVENTION));
        assert!(lines[2].starts_with("d,nu1,nu2,lambda,Delta_tilde,theta"));
        let cols = lines[2].split(',').count();
        assert!(lines[3..].iter().all(|l| l.split(',').count() == cols));
        let first: Vec<f64> = lines[3]
            .split(',')
            .take(15)
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(first[0], 200.0);
        assert!((first[13] - 0.7491398807705218).abs() < 1e-9);
        assert!(lines[4].contains("resonance"));
    }
}
