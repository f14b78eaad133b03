//! Warped-product structure checks, the identity suites, Frobenius
//! integrability and the Chen-type inequality.

mod chen;
mod identities;
mod local;
mod structure;

pub use chen::{chen_inequality, ChenRow, EqualityReport};
pub use identities::{lemma_suite, warped_lemma_suite, IdentityValue, Mutation, LEMMA_IDS, WARPED_IDS};
pub use local::LocalGeometry;
pub use structure::{check_eq3, check_metric_split, integrability_check, MetricSplit};

use nalgebra::DVector;
use thiserror::Error;

use crate::expr::{eval_jet, parse_str, Bindings, EvalError, ExprError, ExprNode};
use crate::extrinsic::ExtrinsicError;
use crate::geometry::{GeometryError, Immersion};
use crate::operators::OperatorError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WarpedError {
    #[error("warping function: {0}")]
    Warp(ExprError),
    #[error("`{0}` is not a parameter of the immersion")]
    UnknownParam(String),
    #[error("parameter `{0}` is listed as both base and fiber")]
    Overlap(String),
    #[error("parameter `{0}` is neither base nor fiber")]
    Unassigned(String),
    #[error("base and fiber parameter lists must both be non-empty")]
    EmptyFactor,
    #[error("warping function depends on fiber parameter `{0}`")]
    WarpUsesFiber(String),
    #[error("warping function: {0}")]
    WarpEval(EvalError),
    #[error("warping function is {value} at {point:?}; it must be positive")]
    NonPositiveWarp { point: Vec<f64>, value: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Extrinsic(#[from] ExtrinsicError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("eigenvalue multiplicities change inside the difference stencil at {point:?} (parameter {param})")]
    MultiplicityDrift { point: Vec<f64>, param: usize },
    #[error("warped split does not match the distributions: {0}")]
    PartitionMismatch(String),
    #[error("not a proper skew semi-invariant submanifold of order 1: {0}")]
    NotProperOrderOne(String),
}

/// Base/fiber partition of the parameters and the warping function f.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedSpec {
    pub base: Vec<usize>,
    pub fiber: Vec<usize>,
    pub warp: ExprNode,
}

impl WarpedSpec {
    pub fn new(
        imm: &Immersion,
        base_params: &[String],
        fiber_params: &[String],
        warp: &str,
    ) -> Result<WarpedSpec, WarpedError> {
        if base_params.is_empty() || fiber_params.is_empty() {
            return Err(WarpedError::EmptyFactor);
        }
        let index = |name: &String| imm.param_index(name).ok_or_else(|| WarpedError::UnknownParam(name.clone()));
        let base = base_params.iter().map(index).collect::<Result<Vec<_>, _>>()?;
        let fiber = fiber_params.iter().map(index).collect::<Result<Vec<_>, _>>()?;
        for name in fiber_params {
            if base_params.contains(name) {
                return Err(WarpedError::Overlap(name.clone()));
            }
        }
        for (i, name) in imm.params().iter().enumerate() {
            if !base.contains(&i) && !fiber.contains(&i) {
                return Err(WarpedError::Unassigned(name.clone()));
            }
        }
        let warp = parse_str(warp).map_err(WarpedError::Warp)?;
        for name in warp.params() {
            if fiber_params.contains(&name) {
                return Err(WarpedError::WarpUsesFiber(name));
            }
            if !base_params.contains(&name) {
                return Err(WarpedError::UnknownParam(name));
            }
        }
        Ok(WarpedSpec { base, fiber, warp })
    }

    /// f and the parameter gradient of σ = ln f.
    pub fn log_warp(&self, imm: &Immersion, p: &[f64]) -> Result<(f64, DVector<f64>), WarpedError> {
        let j = eval_jet(&self.warp, &Bindings::new(imm.params(), p)).map_err(WarpedError::WarpEval)?;
        if j.value <= 0.0 {
            return Err(WarpedError::NonPositiveWarp { point: p.to_vec(), value: j.value });
        }
        Ok((j.value, DVector::from_iterator(p.len(), j.grad.iter().map(|g| g / j.value))))
    }

    pub fn warp_value(&self, imm: &Immersion, p: &[f64]) -> Result<f64, WarpedError> {
        Ok(self.log_warp(imm, p)?.0)
    }
}
