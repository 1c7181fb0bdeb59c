use crate::error::{Error, Result};

/// Ordered list of truncated bosonic (or atomic) modes.
///
/// Composite basis states are indexed big-endian: mode 0 varies slowest, so
/// `|n0, n1, ..., nk>` sits at `((n0 * d1 + n1) * d2 + ...) + nk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeSpace {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl ModeSpace {
    pub fn new(dims: &[usize]) -> Result<Self> {
        let labels = (0..dims.len()).map(|k| format!("mode{k}")).collect();
        Self::with_labels(dims, labels)
    }

    pub fn with_labels(dims: &[usize], labels: Vec<String>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::SpaceMismatch(
                "a mode space needs at least one mode".into(),
            ));
        }
        if labels.len() != dims.len() {
            return Err(Error::SpaceMismatch(format!(
                "{} labels for {} modes",
                labels.len(),
                dims.len()
            )));
        }
        if let Some((mode, &dim)) = dims.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::InvalidDimension { mode, dim });
        }
        Ok(Self {
            dims: dims.to_vec(),
            labels,
        })
    }

    /// Standard quasimode space `(c1, c2, b)`.
    pub fn quasimodes(c1: usize, c2: usize, b: usize) -> Result<Self> {
        Self::with_labels(&[c1, c2, b], vec!["c1".into(), "c2".into(), "b".into()])
    }

    /// Space of the single-atom validation model `(field1, field2, atom)`.
    pub fn atom_fields(field1: usize, field2: usize) -> Result<Self> {
        Self::with_labels(
            &[field1, field2, 3],
            vec!["field1".into(), "field2".into(), "atom".into()],
        )
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.dims.len() {
            Ok(())
        } else {
            Err(Error::InvalidMode {
                mode,
                modes: self.dims.len(),
            })
        }
    }

    /// Distance in the composite index between adjacent levels of `mode`.
    pub fn stride(&self, mode: usize) -> usize {
        self.dims[mode + 1..].iter().product()
    }

    /// Composite index of the occupation tuple.
    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.dims.len() {
            return Err(Error::WrongModeCount {
                expected: self.dims.len(),
                found: occupations.len(),
            });
        }
        let mut idx = 0;
        for (mode, (&n, &d)) in occupations.iter().zip(&self.dims).enumerate() {
            if n >= d {
                return Err(Error::TruncationRisk {
                    mode,
                    reason: format!("level {n} outside truncation {d}"),
                });
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    /// Occupation tuple of a composite index.
    pub fn occupations(&self, mut idx: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        for (slot, &d) in occ.iter_mut().zip(&self.dims).rev() {
            *slot = idx % d;
            idx /= d;
        }
        occ
    }

    /// Level of `mode` in composite basis state `idx`.
    #[inline]
    pub fn level(&self, idx: usize, mode: usize) -> usize {
        (idx / self.stride(mode)) % self.dims[mode]
    }

    pub fn ensure_same(&self, other: &ModeSpace) -> Result<()> {
        if self.dims == other.dims {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )))
        }
    }
}

impl std::fmt::Display for ModeSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.dims)
            .map(|(l, d)| format!("{l}={d}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals() {
        assert_eq!(ModeSpace::new(&[4]).unwrap().total_dim(), 4);
        assert_eq!(ModeSpace::new(&[4, 4, 6]).unwrap().total_dim(), 96);
    }

    #[test]
    fn big_endian_order() {
        let s = ModeSpace::new(&[2, 3]).unwrap();
        let order: Vec<Vec<usize>> = (0..6).map(|i| s.occupations(i)).collect();
        assert_eq!(
            order,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2]
            ]
        );
        for i in 0..6 {
            assert_eq!(s.index(&s.occupations(i)).unwrap(), i);
        }
    }

    #[test]
    fn rejects_small_dims() {
        assert_eq!(
            ModeSpace::new(&[4, 1]),
            Err(Error::InvalidDimension { mode: 1, dim: 1 })
        );
        assert!(ModeSpace::new(&[0]).is_err());
    }

    #[test]
    fn mode_bounds() {
        let s = ModeSpace::new(&[2, 2]).unwrap();
        assert!(s.check_mode(1).is_ok());
        assert_eq!(
            s.check_mode(2),
            Err(Error::InvalidMode { mode: 2, modes: 2 })
        );
    }
}
