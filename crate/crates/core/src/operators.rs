//! Tangential and normal parts of F, the spectrum of T², and the
//! invariant / anti-invariant / slant classification.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{FramePack, ProductAmbient};
use crate::tol::SYMMETRY_TOL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("T is not symmetric (max asymmetry {0:e})")]
    Asymmetry(f64),
    #[error("T² eigenvalue {0} lies outside [0, 1]")]
    OutOfRange(f64),
    #[error("classification needs spectra at two or more points, got {0}")]
    TooFewPoints(usize),
    #[error("eigenvalue multiplicities change between sample points ({first} vs {other} at point {point})")]
    DimensionJump { first: String, other: String, point: usize },
    #[error("slant eigenvalue is not constant: spread {spread:e} over [{min}, {max}]")]
    NonConstantLambda { spread: f64, min: f64, max: f64 },
}

/// F on the tangent and normal frames: FU = TU + NU, Fξ = tξ + ωξ.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPack {
    /// d × d
    pub big_t: DMatrix<f64>,
    /// (n − d) × d
    pub big_n: DMatrix<f64>,
    /// d × (n − d)
    pub small_t: DMatrix<f64>,
    /// (n − d) × (n − d)
    pub omega: DMatrix<f64>,
}

pub fn decompose(frame: &FramePack, ambient: &ProductAmbient) -> OperatorPack {
    let fe = ambient.apply_f_cols(&frame.tangent);
    let fxi = ambient.apply_f_cols(&frame.normal);
    OperatorPack {
        big_t: frame.tangent.transpose() * &fe,
        big_n: frame.normal.transpose() * &fe,
        small_t: frame.tangent.transpose() * &fxi,
        omega: frame.normal.transpose() * &fxi,
    }
}

impl OperatorPack {
    pub fn d(&self) -> usize {
        self.big_t.nrows()
    }

    /// Max-entry residuals of T² + tN = I, ω² + Nt = I, NT + ωN = 0, Tt + tω = 0.
    pub fn eq13_residuals(&self) -> [f64; 4] {
        let (t, n, s, w) = (&self.big_t, &self.big_n, &self.small_t, &self.omega);
        let d = t.nrows();
        let m = w.nrows();
        [
            (t * t + s * n - DMatrix::identity(d, d)).amax(),
            (w * w + n * s - DMatrix::identity(m, m)).amax(),
            (n * t + w * n).amax(),
            (t * s + s * w).amax(),
        ]
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.big_t - self.big_t.transpose()).amax()
    }
}

/// Eigen-decomposition of T², eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct T2Spectrum {
    /// Clamped to exactly 0 or 1 when within `cluster_tol` of either end.
    pub values: Vec<f64>,
    pub raw: Vec<f64>,
    /// Column k is the unit eigenvector of `values[k]` in tangent-frame coordinates.
    pub vectors: DMatrix<f64>,
}

pub fn t2_spectrum(pack: &OperatorPack, cluster_tol: f64) -> Result<T2Spectrum, OperatorError> {
    let asym = pack.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(OperatorError::Asymmetry(asym));
    }
    let t = (&pack.big_t + pack.big_t.transpose()) * 0.5;
    let t2 = &t * &t;
    let t2 = (&t2 + t2.transpose()) * 0.5;
    let eig = t2.symmetric_eigen();
    let d = t.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let raw: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut values = Vec::with_capacity(d);
    for &v in &raw {
        if v < -cluster_tol || v > 1.0 + cluster_tol {
            return Err(OperatorError::OutOfRange(v));
        }
        values.push(if v.abs() <= cluster_tol {
            0.0
        } else if (v - 1.0).abs() <= cluster_tol {
            1.0
        } else {
            v
        });
    }
    let cols: Vec<DVector<f64>> = order
        .iter()
        .map(|&k| {
            let mut v = eig.eigenvectors.column(k).into_owned();
            if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
                if *first < 0.0 {
                    v = -v;
                }
            }
            v
        })
        .collect();
    Ok(T2Spectrum { values, raw, vectors: DMatrix::from_columns(&cols) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockLabel {
    AntiInvariant,
    Slant,
    Invariant,
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockLabel::AntiInvariant => "anti-invariant",
            BlockLabel::Slant => "slant",
            BlockLabel::Invariant => "invariant",
        })
    }
}

/// One eigen-block of T² at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointBlock {
    pub label: BlockLabel,
    pub lambda: f64,
    /// d × dim, orthonormal, tangent-frame coordinates.
    pub basis: DMatrix<f64>,
}

impl PointBlock {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthogonal projector onto the block, tangent-frame coordinates.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn vectors(&self) -> Vec<DVector<f64>> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }
}

/// Sorted-gap clustering of one spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSplit {
    pub blocks: Vec<PointBlock>,
}

pub fn split_point(spec: &T2Spectrum, cluster_tol: f64) -> PointSplit {
    let d = spec.values.len();
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=d {
        if k == d || spec.values[k] - spec.values[k - 1] > cluster_tol {
            let vals = &spec.values[start..k];
            let lambda = vals.iter().sum::<f64>() / vals.len() as f64;
            let label = if lambda.abs() <= cluster_tol {
                BlockLabel::AntiInvariant
            } else if (lambda - 1.0).abs() <= cluster_tol {
                BlockLabel::Invariant
            } else {
                BlockLabel::Slant
            };
            let lambda = match label {
                BlockLabel::AntiInvariant => 0.0,
                BlockLabel::Invariant => 1.0,
                BlockLabel::Slant => lambda,
            };
            blocks.push(PointBlock { label, lambda, basis: spec.vectors.columns(start, k - start).into_owned() });
            start = k;
        }
    }
    PointSplit { blocks }
}

impl PointSplit {
    pub fn signature(&self) -> Vec<(BlockLabel, usize)> {
        self.blocks.iter().map(|b| (b.label, b.dim())).collect()
    }

    pub fn find(&self, label: BlockLabel) -> Option<&PointBlock> {
        self.blocks.iter().find(|b| b.label == label)
    }

    pub fn index_of(&self, label: BlockLabel) -> Option<usize> {
        self.blocks.iter().position(|b| b.label == label)
    }

    /// Ambient projector of block `k`: E B Bᵀ Eᵀ.
    pub fn ambient_projector(&self, k: usize, frame: &FramePack) -> DMatrix<f64> {
        let eb = &frame.tangent * &self.blocks[k].basis;
        &eb * eb.transpose()
    }
}

fn describe(sig: &[(BlockLabel, usize)]) -> String {
    sig.iter().map(|(l, d)| format!("{l}x{d}")).collect::<Vec<_>>().join(",")
}

/// The special cases recognized from the block structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialCase {
    Invariant,
    AntiInvariant,
    SemiInvariant,
    Slant,
    SemiSlant,
    HemiSlant,
    BiSlant,
    None,
}

impl SpecialCase {
    pub fn from_dims(perp: usize, inv: usize, slant_blocks: usize) -> SpecialCase {
        match (perp, inv, slant_blocks) {
            (0, _, 0) => SpecialCase::Invariant,
            (_, 0, 0) => SpecialCase::AntiInvariant,
            (_, _, 0) => SpecialCase::SemiInvariant,
            (0, 0, 1) => SpecialCase::Slant,
            (0, _, 1) => SpecialCase::SemiSlant,
            (_, 0, 1) => SpecialCase::HemiSlant,
            (0, 0, 2) => SpecialCase::BiSlant,
            _ => SpecialCase::None,
        }
    }

    /// Letter (a)–(g), or `-` when no special case applies.
    pub fn code(self) -> &'static str {
        match self {
            SpecialCase::Invariant => "a",
            SpecialCase::AntiInvariant => "b",
            SpecialCase::SemiInvariant => "c",
            SpecialCase::Slant => "d",
            SpecialCase::SemiSlant => "e",
            SpecialCase::HemiSlant => "f",
            SpecialCase::BiSlant => "g",
            SpecialCase::None => "-",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpecialCase::Invariant => "invariant",
            SpecialCase::AntiInvariant => "anti-invariant",
            SpecialCase::SemiInvariant => "semi-invariant",
            SpecialCase::Slant => "slant",
            SpecialCase::SemiSlant => "semi-slant",
            SpecialCase::HemiSlant => "hemi-slant",
            SpecialCase::BiSlant => "bi-slant",
            SpecialCase::None => "none",
        }
    }
}

/// Summary of one block across all sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub label: BlockLabel,
    /// Eigenvalue of T² (mean over points); λ = cos²θ.
    pub lambda: f64,
    /// Largest minus smallest per-point λ.
    pub spread: f64,
    pub dim: usize,
    /// Basis at the first sample point, tangent-frame coordinates.
    pub basis: DMatrix<f64>,
}

impl Block {
    /// Slant angle arccos √λ in radians.
    pub fn theta(&self) -> f64 {
        self.lambda.max(0.0).min(1.0).sqrt().acos()
    }

    pub fn cos_theta(&self) -> f64 {
        self.lambda.max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSplit {
    pub blocks: Vec<Block>,
    pub order_k: usize,
    pub proper: bool,
    pub special_case: SpecialCase,
}

impl DistributionSplit {
    pub fn dim_of(&self, label: BlockLabel) -> usize {
        self.blocks.iter().filter(|b| b.label == label).map(|b| b.dim).sum()
    }

    /// (D^⊥, D^θ, D^T) dimensions.
    pub fn dims(&self) -> [usize; 3] {
        [
            self.dim_of(BlockLabel::AntiInvariant),
            self.dim_of(BlockLabel::Slant),
            self.dim_of(BlockLabel::Invariant),
        ]
    }

    /// The unique slant block when the order is one.
    pub fn slant(&self) -> Option<&Block> {
        let mut it = self.blocks.iter().filter(|b| b.label == BlockLabel::Slant);
        match (it.next(), it.next()) {
            (Some(b), None) => Some(b),
            _ => None,
        }
    }

    /// Proper skew semi-invariant of order 1.
    pub fn is_proper_order_one(&self) -> bool {
        self.order_k == 1 && self.proper
    }
}

pub fn classify(
    spectra: &[T2Spectrum],
    cluster_tol: f64,
    constancy_tol: f64,
) -> Result<DistributionSplit, OperatorError> {
    if spectra.len() < 2 {
        return Err(OperatorError::TooFewPoints(spectra.len()));
    }
    let splits: Vec<PointSplit> = spectra.iter().map(|s| split_point(s, cluster_tol)).collect();
    let first = splits[0].signature();
    for (point, s) in splits.iter().enumerate().skip(1) {
        let sig = s.signature();
        if sig != first {
            return Err(OperatorError::DimensionJump { first: describe(&first), other: describe(&sig), point });
        }
    }
    let mut blocks = Vec::with_capacity(first.len());
    for (k, &(label, dim)) in first.iter().enumerate() {
        let lams: Vec<f64> = splits.iter().map(|s| s.blocks[k].lambda).collect();
        let min = lams.iter().copied().fold(f64::INFINITY, f64::min);
        let max = lams.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spread = max - min;
        if spread > constancy_tol {
            return Err(OperatorError::NonConstantLambda { spread, min, max });
        }
        let lambda = lams.iter().sum::<f64>() / lams.len() as f64;
        blocks.push(Block { label, lambda, spread, dim, basis: splits[0].blocks[k].basis.clone() });
    }
    let perp = blocks.iter().filter(|b| b.label == BlockLabel::AntiInvariant).map(|b| b.dim).sum();
    let inv = blocks.iter().filter(|b| b.label == BlockLabel::Invariant).map(|b| b.dim).sum();
    let order_k = blocks.iter().filter(|b| b.label == BlockLabel::Slant).count();
    Ok(DistributionSplit {
        proper: perp > 0 && inv > 0,
        special_case: SpecialCase::from_dims(perp, inv, order_k),
        order_k,
        blocks,
    })
}
