//! Levi-Civita curvature of symbolic metrics, Laplacians, and the product
//! and Walker constructions.

mod curvature;
mod product;
mod walker;

pub use curvature::{
    christoffel, eval_matrix, laplace_beltrami, ricci, scalar_curvature, Christoffel, MetricJet,
    PointCurvature,
};
pub use product::{product_metric, ProductStructure, LORENTZ_DIM, RIEMANN_DIM};
pub use walker::{walker_laplacian, walker_metric, WalkerData, U, V, X};

use thiserror::Error;

use crate::exprlang::{EvalError, ExprError};
use crate::exterior::FormError;

#[derive(Debug, Clone, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("factor dimensions {lorentz}+{riemann}, expected 5+6")]
    BlockDimension { lorentz: usize, riemann: usize },
    #[error("{0} factor has signature {1:?}")]
    BlockSignature(&'static str, (usize, usize)),
    #[error("walker data must be a five-chart with a 3x3 rho and three A components")]
    WalkerShape,
    #[error("rho is not negative definite at {0:?}")]
    RhoNotNegativeDefinite(Vec<f64>),
    #[error("not Ricci-isotropic: {0}")]
    NotRicciIsotropic(String),
}

impl From<EvalError> for GeometryError {
    fn from(e: EvalError) -> Self {
        GeometryError::Form(FormError::Eval(e))
    }
}
