//! The bosonic field equations on a 5+6 product: flux assembly, residuals
//! of closedness, Maxwell and Einstein equations, and the reduced-case
//! diagnostics of the closedness/Maxwell system.

mod background;
mod diagnose;
mod flux;
mod residual;

pub use background::{
    Background, SampleBox, SamplePlan, DEFAULT_POINTS, DEFAULT_SEED, DEFAULT_TOLERANCE,
    SINGULAR_MARGIN,
};
pub use diagnose::{
    classify, diagnose_reduced_case, ReducedCase, ReducedCaseDiagnosis, SubResidual,
    ZERO_THRESHOLD,
};
pub use flux::{assemble_flux, flux_norm_sq, flux_norm_sq_pieces, EmbeddedFlux, FluxSpec, Pieces};
pub use residual::{
    evaluate, evaluate_prepared, PointEval, Prepared, ResidualReport, ResidualRow, Stat, ROWS,
};

use thiserror::Error;

use crate::exprlang::EvalError;
use crate::exterior::FormError;
use crate::geometry::GeometryError;

#[derive(Debug, Clone, Error)]
pub enum SugraError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("block violation: {0}")]
    BlockViolation(String),
    #[error("sample box must give 11 non-empty ranges")]
    BadSampleBox,
    #[error("could not place sample points away from singular hyperplanes")]
    SamplingExhausted,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl From<EvalError> for SugraError {
    fn from(e: EvalError) -> Self {
        SugraError::Form(FormError::Eval(e))
    }
}
