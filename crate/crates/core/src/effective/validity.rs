use std::fmt;

use super::coefficients::{beat_coefficients, quasimode_transform};
use super::params::SystemParams;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relation<T> {
    /// `lhs < rhs`.
    Less,
    /// `lhs >= ratio * rhs`.
    MuchGreater { ratio: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inequality<T> {
    pub name: String,
    pub lhs: T,
    pub rhs: T,
    pub relation: Relation<T>,
}

impl<T: Real> Inequality<T> {
    /// Derived from the stored sides; NaN sides never pass.
    pub fn passes(&self) -> bool {
        match self.relation {
            Relation::Less => self.lhs < self.rhs,
            Relation::MuchGreater { ratio } => self.lhs >= ratio * self.rhs,
        }
    }
}

impl<T: Real> fmt::Display for Inequality<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = if self.passes() { "ok  " } else { "FAIL" };
        let rel = match self.relation {
            Relation::Less => "<".to_string(),
            Relation::MuchGreater { ratio } => format!(">= {ratio} x"),
        };
        write!(
            f,
            "{flag} {:<40} {} {rel} {}",
            self.name, self.lhs, self.rhs
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityThresholds<T> {
    /// Ratio implementing "much greater than".
    pub much_greater: T,
}

impl<T: Real> Default for ValidityThresholds<T> {
    fn default() -> Self {
        Self {
            much_greater: T::lit(10.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport<T> {
    pub entries: Vec<Inequality<T>>,
}

impl<T: Real> ValidityReport<T> {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(Inequality::passes)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Inequality<T>> {
        self.entries.iter().filter(|e| !e.passes())
    }

    pub fn get(&self, name: &str) -> Option<&Inequality<T>> {
        self.entries.iter().find(|e| e.name == name)
    }
}

impl<T: Real> fmt::Display for ValidityReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Regime diagnostics of the effective description. Never fails: when the
/// quasimodes cannot be formed the gap entries carry NaN and are flagged.
pub fn validity_report<T: Real>(
    p: &SystemParams<T>,
    thresholds: &ValidityThresholds<T>,
) -> ValidityReport<T> {
    let ratio = thresholds.much_greater;
    let mg = |name: &str, lhs: T, rhs: T| Inequality {
        name: name.to_string(),
        lhs,
        rhs,
        relation: Relation::MuchGreater { ratio },
    };
    let lt = |name: &str, lhs: T, rhs: T| Inequality {
        name: name.to_string(),
        lhs,
        rhs,
        relation: Relation::Less,
    };
    let mut entries = vec![
        mg("delta >> g1", p.delta.abs(), p.g1),
        mg("delta >> g2", p.delta.abs(), p.g2),
        mg("Delta >> Omega", p.big_delta.abs(), p.rabi),
        lt("G < omega_m", p.g_om.abs(), p.omega_m),
        lt(
            "G^2 < kappa1*omega_m",
            p.g_om * p.g_om,
            p.kappa1 * p.omega_m,
        ),
    ];

    let (theta, omega_f) = beat_coefficients(p)
        .and_then(|b| quasimode_transform(b.nu1, b.nu2, b.lambda))
        .map(|q| (q.theta, q.omega_f))
        .unwrap_or((T::nan(), T::nan()));
    let (sn, cs) = theta.sin_cos();
    let g = p.g_om.abs();
    let sides = [
        ("G sin^2(theta)", g * sn * sn),
        ("G cos^2(theta)", g * cs * cs),
    ];
    let gaps = [
        ("|omega_f+d-omega_m|", omega_f + p.d - p.omega_m),
        ("|omega_f-d-omega_m|", omega_f - p.d - p.omega_m),
        ("|omega_f+d+omega_m|", omega_f + p.d + p.omega_m),
        ("|omega_f-d+omega_m|", omega_f - p.d + p.omega_m),
    ];
    for (gap_name, gap) in gaps {
        for (side_name, side) in sides {
            entries.push(lt(&format!("{side_name} < {gap_name}"), side, gap.abs()));
        }
    }
    ValidityReport { entries }
}
