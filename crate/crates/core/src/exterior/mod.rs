//! Sparse differential forms with expression coefficients, pseudo-Riemannian
//! metrics, the induced inner product and the Hodge star.

mod form;
mod hodge;
mod metric;
mod numeric;

pub use form::{merge_sign, KForm};
pub use hodge::{
    form_inner, hodge, hodge_numeric, hodge_std, norm_sq, permutation_sign, raise_indices,
    standard_orientation, volume_form,
};
pub use metric::{Metric, SingularHyperplane};
pub use numeric::NumForm;

use thiserror::Error;

use crate::exprlang::EvalError;

/// Sorted index set encoded as a bitmask (bit `i` set means `dx^i` present).
pub type Mask = u16;

/// Indices of the set bits, in increasing order.
pub fn mask_indices(mask: Mask) -> Vec<usize> {
    (0..16).filter(|i| mask & (1 << i) != 0).collect()
}

/// Bitmask of a list of distinct indices.
pub fn indices_mask(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, i| m | (1 << i))
}

#[derive(Debug, Clone, Error)]
pub enum FormError {
    #[error("forms live on different charts")]
    ChartMismatch,
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("index tuple {0:?} is not strictly increasing")]
    UnsortedIndices(Vec<usize>),
    #[error("index {index} outside dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("vector has {got} components, chart dimension is {dim}")]
    VectorLength { got: usize, dim: usize },
    #[error("coordinate map does not embed the source chart")]
    BadEmbedding,
    #[error("metric is not a {0}x{0} matrix")]
    MetricShape(usize),
    #[error("signature ({p},{q}) does not add up to dimension {n}")]
    SignatureDimension { p: usize, q: usize, n: usize },
    #[error("metric entries ({0},{1}) and ({1},{0}) differ")]
    NotSymmetric(usize, usize),
    #[error("metric is singular at {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("declared {declared} negative directions, found {found}")]
    SignatureMismatch { declared: usize, found: usize },
    #[error("orientation is not a permutation of the coordinates")]
    BadOrientation,
    #[error(transparent)]
    Eval(#[from] EvalError),
}
