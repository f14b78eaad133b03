use nalgebra::DVector;

use super::{LocalGeometry, WarpedError, WarpedSpec};
use crate::geometry::{frames, Immersion};
use crate::operators::{BlockLabel, DistributionSplit};

/// Residuals of g = g₁ + f² g₂ over a set of sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSplit {
    /// Largest fiber derivative of a base-block metric entry, or base–fiber cross term.
    pub base: f64,
    pub base_point: usize,
    /// Largest deviation of the fiber block from f² times its value at the reference base point.
    pub fiber: f64,
    pub fiber_point: usize,
}

/// Base dims must match D^⊥ ⊕ D^θ and the fiber coordinate fields must lie in D^T.
fn check_partition(
    imm: &Immersion,
    spec: &WarpedSpec,
    split: &DistributionSplit,
    p: &[f64],
    cluster_tol: f64,
) -> Result<(), WarpedError> {
    let [perp, slant, inv] = split.dims();
    if spec.base.len() != perp + slant || spec.fiber.len() != inv {
        return Err(WarpedError::PartitionMismatch(format!(
            "{} base and {} fiber parameters against D^⊥ ⊕ D^θ of dimension {} and D^T of dimension {}",
            spec.base.len(),
            spec.fiber.len(),
            perp + slant,
            inv
        )));
    }
    let lg = LocalGeometry::at(imm, p, cluster_tol)?;
    let pt = lg.split.find(BlockLabel::Invariant).map(|b| b.projector());
    for &c in &spec.fiber {
        // coordinate field ∂_c in frame coordinates: R e_c
        let v = lg.frame.r.column(c).into_owned();
        let off = match &pt {
            Some(pt) => (&v - pt * &v).norm(),
            None => v.norm(),
        } / v.norm();
        if off > 1e-6 {
            return Err(WarpedError::PartitionMismatch(format!(
                "fiber field {} leaves D^T by {off:e} at {p:?}",
                imm.params()[c]
            )));
        }
    }
    Ok(())
}

pub fn check_metric_split(
    imm: &Immersion,
    spec: &WarpedSpec,
    split: &DistributionSplit,
    samples: &[Vec<f64>],
    cluster_tol: f64,
) -> Result<MetricSplit, WarpedError> {
    if let Some(p) = samples.first() {
        check_partition(imm, spec, split, p, cluster_tol)?;
    }
    let centre: Vec<f64> = imm.domain().iter().map(|(a, b)| 0.5 * (a + b)).collect();
    let mut out = MetricSplit { base: 0.0, base_point: 0, fiber: 0.0, fiber_point: 0 };
    for (k, p) in samples.iter().enumerate() {
        let der = imm.derivatives(p)?;
        let col = |i: usize| der.jacobian.column(i);
        for &a in &spec.base {
            for &b in &spec.base {
                for &c in &spec.fiber {
                    let dg = der.second(a, c).dot(&col(b)) + col(a).dot(der.second(b, c));
                    if dg.abs() > out.base {
                        out.base = dg.abs();
                        out.base_point = k;
                    }
                }
            }
            for &c in &spec.fiber {
                let cross = col(a).dot(&col(c)).abs();
                if cross > out.base {
                    out.base = cross;
                    out.base_point = k;
                }
            }
        }
        let mut q = p.clone();
        for &b in &spec.base {
            q[b] = centre[b];
        }
        let jq = imm.derivatives(&q)?.jacobian;
        let ratio = (spec.warp_value(imm, p)? / spec.warp_value(imm, &q)?).powi(2);
        for &a in &spec.fiber {
            for &b in &spec.fiber {
                let dev = (col(a).dot(&col(b)) - ratio * jq.column(a).dot(&jq.column(b))).abs();
                if dev > out.fiber {
                    out.fiber = dev;
                    out.fiber_point = k;
                }
            }
        }
    }
    Ok(out)
}

/// Worst ‖tan(∂_b ∂_c φ) − ∂_b(ln f) ∂_c φ‖ / (‖∂_b φ‖ ‖∂_c φ‖) over base b,
/// fiber c and the samples, with the sample index where it occurs.
pub fn check_eq3(imm: &Immersion, spec: &WarpedSpec, samples: &[Vec<f64>]) -> Result<(f64, usize), WarpedError> {
    let mut worst = (0.0, 0);
    for (k, p) in samples.iter().enumerate() {
        let der = imm.derivatives(p)?;
        let fr = frames(imm, p)?;
        let (_, dsigma) = spec.log_warp(imm, p)?;
        for &b in &spec.base {
            for &c in &spec.fiber {
                let v = der.second(b, c);
                let tan = &fr.tangent * (fr.tangent.transpose() * v);
                let phi_c = der.jacobian.column(c);
                let r: DVector<f64> = tan - phi_c * dsigma[b];
                let res = r.norm() / (der.jacobian.column(b).norm() * phi_c.norm());
                if res > worst.0 {
                    worst = (res, k);
                }
            }
        }
    }
    Ok(worst)
}

/// sqrt Σ_C (g(∇_X Y, C) − g(∇_Y X, C))² over basis pairs X, Y of `block` and
/// C running over the other blocks: the normal part of [X, Y]. Zero for blocks
/// of dimension below two.
pub fn integrability_check(lg: &LocalGeometry, block: usize) -> f64 {
    let basis = lg.split.blocks[block].vectors();
    if basis.len() < 2 {
        return 0.0;
    }
    let others: Vec<DVector<f64>> = lg
        .split
        .blocks
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != block)
        .flat_map(|(_, b)| b.vectors())
        .collect();
    let mut worst = 0.0f64;
    for (i, x) in basis.iter().enumerate() {
        for y in &basis[i + 1..] {
            let s: f64 = others
                .iter()
                .map(|c| (lg.nabla(x, block, y, c) - lg.nabla(y, block, x, c)).powi(2))
                .sum();
            worst = worst.max(s.sqrt());
        }
    }
    worst
}
