use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{LocalGeometry, WarpedError};
use crate::operators::BlockLabel::{AntiInvariant, Invariant, Slant};

/// Quantities checked when the inequality is (numerically) an equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    /// ‖h‖ restricted to pairs from D^⊥ ⊕ D^θ.
    pub base_h: f64,
    /// ‖h‖ restricted to mixed pairs (D^T, D^⊥ ⊕ D^θ).
    pub mixed_h: f64,
    /// Mean curvature of the D^T leaf in the ambient.
    pub leaf_mean_curvature: f64,
    /// max ‖h_T(X, Y) + (∇^⊥σ + ∇^θσ) g(X, Y)‖ over basis pairs of D^T.
    pub umbilicity: f64,
    pub grad_perp: f64,
    pub grad_theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChenRow {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub equality: Option<EqualityReport>,
}

/// ‖h‖² against m (‖∇^⊥σ‖² + cot²θ ‖∇^θσ‖²), m = dim D^T, at one point.
/// `dsigma` is the frame gradient of σ = ln f.
pub fn chen_inequality(lg: &LocalGeometry, dsigma: &DVector<f64>, eq_tol: f64) -> Result<ChenRow, WarpedError> {
    let (perp, slant, inv) = (lg.vectors(AntiInvariant), lg.vectors(Slant), lg.vectors(Invariant));
    let n_slant = lg.split.blocks.iter().filter(|b| b.label == Slant).count();
    if perp.is_empty() || inv.is_empty() || n_slant != 1 {
        return Err(WarpedError::NotProperOrderOne(format!("{:?}", lg.split.signature())));
    }
    let lam = lg.split.find(Slant).map(|b| b.lambda).unwrap_or(0.0);
    let proj_sq = |basis: &[DVector<f64>]| basis.iter().map(|e| e.dot(dsigma).powi(2)).sum::<f64>();
    let (gp, gt) = (proj_sq(&perp), proj_sq(&slant));
    let m = inv.len() as f64;
    let lhs = lg.ext.norm_sq();
    let rhs = m * (gp + lam / (1.0 - lam) * gt);
    let margin = lhs - rhs;
    let equality = (margin < eq_tol).then(|| {
        let base: Vec<&DVector<f64>> = perp.iter().chain(&slant).collect();
        let mut base_h = 0.0;
        let mut mixed_h = 0.0;
        for a in &base {
            for b in &base {
                base_h += lg.ext.h_vec(a, b).norm_squared();
            }
            for x in &inv {
                mixed_h += lg.ext.h_vec(a, x).norm_squared();
            }
        }
        let kt = lg.block(Invariant).expect("invariant block present");
        let mut h_mean = DVector::zeros(lg.ext.codim);
        for x in &inv {
            h_mean += lg.ext.h_vec(x, x);
        }
        h_mean /= m;
        let mut leaf_sq = h_mean.norm_squared();
        for c in &base {
            let s: f64 = inv.iter().map(|x| lg.nabla(x, kt, x, c)).sum::<f64>() / m;
            leaf_sq += s * s;
        }
        let mut umbilicity = 0.0f64;
        for (i, x) in inv.iter().enumerate() {
            for (j, y) in inv.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                let s: f64 = base.iter().map(|c| (lg.nabla(x, kt, y, c) + c.dot(dsigma) * delta).powi(2)).sum();
                umbilicity = umbilicity.max(s.sqrt());
            }
        }
        EqualityReport {
            base_h: base_h.sqrt(),
            mixed_h: mixed_h.sqrt(),
            leaf_mean_curvature: leaf_sq.sqrt(),
            umbilicity,
            grad_perp: gp.sqrt(),
            grad_theta: gt.sqrt(),
        }
    });
    Ok(ChenRow { lhs, rhs, margin, equality })
}
