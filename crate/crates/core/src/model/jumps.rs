use crate::hilbert::OperatorMatrix;
use crate::scalar::Real;

/// Labelled Lindblad jump operators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JumpSet<T> {
    entries: Vec<(String, OperatorMatrix<T>)>,
}

impl<T: Real> JumpSet<T> {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn with(mut self, label: &str, op: OperatorMatrix<T>) -> Self {
        self.push(label, op);
        self
    }

    pub fn push(&mut self, label: &str, op: OperatorMatrix<T>) {
        self.entries.push((label.to_string(), op));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&OperatorMatrix<T>> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, op)| op)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn operators(&self) -> impl Iterator<Item = &OperatorMatrix<T>> {
        self.entries.iter().map(|(_, op)| op)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &OperatorMatrix<T>)> {
        self.entries.iter().map(|(l, op)| (l.as_str(), op))
    }

    /// Same set without zero operators; they leave the dynamics unchanged.
    pub fn without_zeros(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(_, op)| op.nnz() > 0)
                .cloned()
                .collect(),
        }
    }
}
