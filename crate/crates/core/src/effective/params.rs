use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physical inputs of the atom-cavity-mirror system.
///
/// Every rate and frequency is an angular frequency in krad/s; times derived
/// from them are in ms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    /// Atom coupling to cavity mode 1 (transition a-c).
    pub g1: T,
    /// Atom coupling to cavity mode 2 (transition a-b).
    pub g2: T,
    /// Classical Rabi frequency on b-c (`Omega`).
    pub rabi: T,
    /// Common detuning of the two cavity transitions (`delta`).
    pub delta: T,
    /// Detuning of the classical field (`Delta`).
    pub big_delta: T,
    /// Number of atoms (`N`).
    pub atoms: u32,
    /// Single-photon radiation-pressure coupling (`G`).
    pub g_om: T,
    pub omega_m: T,
    /// Cavity mode splitting `omega_2 - omega_1`.
    pub d: T,
    pub eps1: T,
    pub eps2: T,
    pub kappa1: T,
    pub kappa2: T,
    pub gamma_m: T,
    /// Mean thermal occupation of the mechanical bath.
    pub n_th: T,
}

/// Configuration-level names, in declaration order.
pub const PARAM_NAMES: [&str; 15] = [
    "g1", "g2", "Omega", "delta", "Delta", "N", "G", "omega_m", "d", "eps1", "eps2", "kappa1",
    "kappa2", "gamma_m", "n_th",
];

impl<T: Real> SystemParams<T> {
    /// Atomic, optomechanical and splitting values shared by every figure
    /// (in krad/s): g1 = 20pi, g2 = 22pi, Omega = 20pi, delta = Delta = 250pi,
    /// omega_m = 800pi, G = 20pi, d = 200pi, N = 350; no drives, no loss.
    pub fn reference() -> Self {
        let pi = T::PI();
        let k = |x: f64| T::lit(x) * pi;
        Self {
            g1: k(20.0),
            g2: k(22.0),
            rabi: k(20.0),
            delta: k(250.0),
            big_delta: k(250.0),
            atoms: 350,
            g_om: k(20.0),
            omega_m: k(800.0),
            d: k(200.0),
            eps1: T::zero(),
            eps2: T::zero(),
            kappa1: T::zero(),
            kappa2: T::zero(),
            gamma_m: T::zero(),
            n_th: T::zero(),
        }
    }

    pub fn with_atoms(mut self, atoms: u32) -> Self {
        self.atoms = atoms;
        self
    }

    pub fn atoms_real(&self) -> T {
        T::from_u32(self.atoms).expect("atom number representable")
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("g1", self.g1),
            ("g2", self.g2),
            ("Omega", self.rabi),
            ("omega_m", self.omega_m),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma_m", self.gamma_m),
            ("n_th", self.n_th),
        ];
        for (name, v) in nonneg {
            if !(v >= T::zero()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} must be >= 0"),
                });
            }
        }
        for (name, v) in [
            ("delta", self.delta),
            ("Delta", self.big_delta),
            ("G", self.g_om),
            ("d", self.d),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "not finite".into(),
                });
            }
        }
        if self.atoms < 1 {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: "need at least one atom".into(),
            });
        }
        Ok(())
    }

    /// Value by configuration name (`N` converted to the scalar).
    pub fn get(&self, name: &str) -> Option<T> {
        Some(match name {
            "g1" => self.g1,
            "g2" => self.g2,
            "Omega" => self.rabi,
            "delta" => self.delta,
            "Delta" => self.big_delta,
            "N" => self.atoms_real(),
            "G" => self.g_om,
            "omega_m" => self.omega_m,
            "d" => self.d,
            "eps1" => self.eps1,
            "eps2" => self.eps2,
            "kappa1" => self.kappa1,
            "kappa2" => self.kappa2,
            "gamma_m" => self.gamma_m,
            "n_th" => self.n_th,
            _ => return None,
        })
    }

    /// Sets a value by configuration name. `N` must be a positive integer.
    pub fn set(&mut self, name: &str, value: T) -> Result<()> {
        let slot = match name {
            "g1" => &mut self.g1,
            "g2" => &mut self.g2,
            "Omega" => &mut self.rabi,
            "delta" => &mut self.delta,
            "Delta" => &mut self.big_delta,
            "N" => {
                let rounded = value.round();
                if rounded != value || value < T::one() || value > T::lit(u32::MAX as f64) {
                    return Err(Error::InvalidParameter {
                        name: "N",
                        reason: format!("{value} is not a positive integer"),
                    });
                }
                self.atoms = rounded.to_u32().expect("checked range");
                return Ok(());
            }
            "G" => &mut self.g_om,
            "omega_m" => &mut self.omega_m,
            "d" => &mut self.d,
            "eps1" => &mut self.eps1,
            "eps2" => &mut self.eps2,
            "kappa1" => &mut self.kappa1,
            "kappa2" => &mut self.kappa2,
            "gamma_m" => &mut self.gamma_m,
            "n_th" => &mut self.n_th,
            _ => {
                return Err(Error::Config {
                    key: name.into(),
                    reason: "unknown parameter".into(),
                })
            }
        };
        *slot = value;
        Ok(())
    }

    /// Whether a parameter is a rate or frequency (scaled by pi in configs).
    pub fn is_frequency(name: &str) -> bool {
        !matches!(name, "N" | "n_th")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let mut p = SystemParams::<f64>::reference();
        for (k, name) in PARAM_NAMES.iter().enumerate() {
            let v = p.get(name).unwrap();
            p.set(name, v + if *name == "N" { 1.0 } else { 0.5 * k as f64 })
                .unwrap();
        }
        assert_eq!(p.atoms, 351);
        assert!(p.set("kappa3", 1.0).is_err());
        assert!(p.set("N", 2.5).is_err());
        assert!(p.set("N", 0.0).is_err());
    }

    #[test]
    fn validation() {
        let mut p = SystemParams::<f64>::reference();
        assert!(p.validate().is_ok());
        p.kappa1 = -1.0;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { name: "kappa1", .. })
        ));
    }
}
