use nalgebra::{DMatrix, DVector};

use super::WarpedError;
use crate::extrinsic::{second_fundamental_form, ExtrinsicPack};
use crate::geometry::{frames, FramePack, Immersion};
use crate::operators::{decompose, split_point, t2_spectrum, BlockLabel, OperatorPack, PointSplit, T2Spectrum};
use crate::tol::FD_STEP_REL;

/// Everything computed at one sample point, plus the parameter derivatives
/// of the block projectors needed to differentiate block-valued fields.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub frame: FramePack,
    pub ops: OperatorPack,
    pub spectrum: T2Spectrum,
    pub split: PointSplit,
    pub ext: ExtrinsicPack,
    /// `dproj[m][k]`: ∂ₘ of the projector onto block k, tangent-frame coordinates.
    pub dproj: Vec<Vec<DMatrix<f64>>>,
}

fn split_at(imm: &Immersion, p: &[f64], cluster_tol: f64) -> Result<PointSplit, WarpedError> {
    let frame = frames(imm, p)?;
    let spec = t2_spectrum(&decompose(&frame, imm.ambient()), cluster_tol)?;
    Ok(split_point(&spec, cluster_tol))
}

impl LocalGeometry {
    pub fn at(imm: &Immersion, p: &[f64], cluster_tol: f64) -> Result<LocalGeometry, WarpedError> {
        let frame = frames(imm, p)?;
        let ops = decompose(&frame, imm.ambient());
        let spectrum = t2_spectrum(&ops, cluster_tol)?;
        let split = split_point(&spectrum, cluster_tol);
        let steps = imm.fd_steps(FD_STEP_REL);
        let ext = second_fundamental_form(imm, &frame, &steps)?;
        let sig = split.signature();
        let mut dproj = Vec::with_capacity(p.len());
        for (m, &s) in steps.iter().enumerate() {
            let mut qp = p.to_vec();
            let mut qm = p.to_vec();
            qp[m] += s;
            qm[m] -= s;
            let (sp, sm) = (split_at(imm, &qp, cluster_tol)?, split_at(imm, &qm, cluster_tol)?);
            if sp.signature() != sig || sm.signature() != sig {
                return Err(WarpedError::MultiplicityDrift { point: p.to_vec(), param: m });
            }
            dproj.push(
                sp.blocks
                    .iter()
                    .zip(&sm.blocks)
                    .map(|(a, b)| (a.projector() - b.projector()) / (2.0 * s))
                    .collect(),
            );
        }
        Ok(LocalGeometry { frame, ops, spectrum, split, ext, dproj })
    }

    pub fn d(&self) -> usize {
        self.frame.d()
    }

    /// Basis vectors of the block with this label; empty when absent.
    pub fn vectors(&self, label: BlockLabel) -> Vec<DVector<f64>> {
        self.split.find(label).map(|b| b.vectors()).unwrap_or_default()
    }

    pub fn block(&self, label: BlockLabel) -> Option<usize> {
        self.split.index_of(label)
    }

    /// g(∇_A B, C) for tangent-frame vectors a, b, c, with B extended as the
    /// field q ↦ P_k(q) b of block k.
    pub fn nabla(&self, a: &DVector<f64>, block: usize, b: &DVector<f64>, c: &DVector<f64>) -> f64 {
        let d = self.d();
        let alpha = &self.frame.coeffs * a;
        let mut s = 0.0;
        for (m, &am) in alpha.iter().enumerate() {
            if am != 0.0 {
                s += am * (&self.dproj[m][block] * b).dot(c);
            }
        }
        for i in 0..d {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if b[j] == 0.0 {
                    continue;
                }
                for k in 0..d {
                    s += a[i] * b[j] * c[k] * self.ext.gamma_at(i, j, k);
                }
            }
        }
        s
    }

    /// Tangent-frame gradient of a function from its parameter gradient.
    pub fn frame_gradient(&self, dparam: &DVector<f64>) -> DVector<f64> {
        self.frame.coeffs.transpose() * dparam
    }

    /// ⟨h(u, v), ν⟩ with ν in normal-frame coordinates.
    pub fn hn(&self, u: &DVector<f64>, v: &DVector<f64>, nu: &DVector<f64>) -> f64 {
        self.ext.h_vec(u, v).dot(nu)
    }

    pub fn t(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.ops.big_t * u
    }

    pub fn n(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.ops.big_n * u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::operators::BlockLabel::*;

    /// g(∇_A B, C) from the ambient block projector differenced directly.
    fn nabla_oracle(imm: &Immersion, lg: &LocalGeometry, a: &DVector<f64>, k: usize, b: &DVector<f64>, c: &DVector<f64>) -> f64 {
        let p = &lg.frame.point;
        let b_amb = lg.frame.to_ambient(b);
        let c_amb = lg.frame.to_ambient(c);
        let dir = lg.frame.to_params(a);
        let s = 1e-5;
        let proj = |t: f64| {
            let q: Vec<f64> = p.iter().zip(dir.iter()).map(|(x, d)| x + t * d).collect();
            let sp = split_at(imm, &q, 1e-8).unwrap();
            sp.ambient_projector(k, &frames(imm, &q).unwrap())
        };
        // B(q) = P(q) b_amb, so ∂_A B = (∂_A P) b_amb; ∇ is its tangential part
        let db = (proj(s) - proj(-s)) / (2.0 * s) * &b_amb;
        db.dot(&c_amb)
    }

    #[test]
    fn connection_matches_ambient_projector_route() {
        let imm = fixtures::example43();
        let lg = LocalGeometry::at(&imm, &[1.3, 0.2, -0.4, 0.7, 1.1], 1e-8).unwrap();
        let mut worst = 0.0f64;
        // only pairs with C outside the block of B are independent of the extension
        for ba in &lg.split.blocks {
            for (kb, bb) in lg.split.blocks.iter().enumerate() {
                let others: Vec<_> =
                    lg.split.blocks.iter().enumerate().filter(|(k, _)| *k != kb).flat_map(|(_, x)| x.vectors()).collect();
                for a in ba.vectors() {
                    for b in bb.vectors() {
                        for c in &others {
                            let got = lg.nabla(&a, kb, &b, c);
                            let want = nabla_oracle(&imm, &lg, &a, kb, &b, c);
                            worst = worst.max((got - want).abs());
                        }
                    }
                }
            }
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn metric_compatibility_across_blocks() {
        // g(∇_A B, C) = −g(B, ∇_A C) for B, C in different blocks
        let imm = fixtures::bundled("rotation_slant").immersion;
        let lg = LocalGeometry::at(&imm, &[1.2, 0.3, -0.2, 0.4], 1e-8).unwrap();
        let kv = lg.block(Slant).unwrap();
        let kt = lg.block(Invariant).unwrap();
        for a in (0..lg.d()).map(|i| DVector::from_fn(lg.d(), |j, _| if i == j { 1.0 } else { 0.0 })) {
            for b in lg.vectors(Slant) {
                for c in lg.vectors(Invariant) {
                    let s = lg.nabla(&a, kv, &b, &c) + lg.nabla(&a, kt, &c, &b);
                    assert!(s.abs() < 1e-6, "{s}");
                }
            }
        }
    }
}
