use std::sync::Arc;

use super::ExprError;

/// Largest chart the tool works with: the eleven-dimensional product.
pub const MAX_DIM: usize = 11;

/// Ordered coordinate names of a single chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart(Arc<Vec<String>>);

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Chart, ExprError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() || names.len() > MAX_DIM {
            return Err(ExprError::ChartDimension(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) || super::parse::is_function_name(n) {
                return Err(ExprError::BadCoordinateName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(ExprError::DuplicateCoordinate(n.clone()));
            }
        }
        Ok(Chart(Arc::new(names)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Concatenates two charts; the second chart's indices are shifted by
    /// `self.dim()`.
    pub fn product(&self, other: &Chart) -> Result<Chart, ExprError> {
        let names: Vec<&String> = self.0.iter().chain(other.0.iter()).collect();
        Chart::new(&names)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
