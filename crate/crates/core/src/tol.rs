//! Default numerical tolerances.

use serde::{Deserialize, Serialize};

/// Singular-value threshold for rank and frame degeneracy decisions.
pub const RANK_TOL: f64 = 1e-9;
/// Eigenvalues of T² closer than this belong to one cluster.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Allowed drift of a slant eigenvalue across sample points.
pub const CONSTANCY_TOL: f64 = 1e-6;
/// Symmetry check on T before diagonalizing.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Relative finite-difference step, multiplied by the domain width.
pub const FD_STEP_REL: f64 = 1e-5;
/// Disagreement allowed between step h and 2h coefficient derivatives.
pub const FD_INSTABILITY: f64 = 1e-4;

pub const NUM_TOL: f64 = 1e-9;
pub const EQ_TOL: f64 = 1e-6;
pub const MIXED_TOL: f64 = 1e-8;

/// Per-check pass thresholds. `scaled` applies the command-line multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub eq13: f64,
    pub algebraic: f64,
    pub fd: f64,
    pub eq3: f64,
    pub metric_split: f64,
    pub integrability: f64,
    pub num: f64,
    pub eq: f64,
    pub mixed: f64,
    pub cluster: f64,
    pub constancy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq13: 1e-10,
            algebraic: 1e-9,
            fd: 1e-4,
            eq3: 1e-5,
            metric_split: 1e-10,
            integrability: 1e-5,
            num: NUM_TOL,
            eq: EQ_TOL,
            mixed: MIXED_TOL,
            cluster: CLUSTER_TOL,
            constancy: CONSTANCY_TOL,
        }
    }
}

impl Tolerances {
    /// Name and value of every field, in declaration order.
    pub fn entries(&self) -> [(&'static str, f64); 11] {
        [
            ("eq13", self.eq13),
            ("algebraic", self.algebraic),
            ("fd", self.fd),
            ("eq3", self.eq3),
            ("metric_split", self.metric_split),
            ("integrability", self.integrability),
            ("num", self.num),
            ("eq", self.eq),
            ("mixed", self.mixed),
            ("cluster", self.cluster),
            ("constancy", self.constancy),
        ]
    }

    /// Multiplies the pass thresholds. Classification tolerances are structural
    /// and stay fixed.
    pub fn scaled(&self, k: f64) -> Tolerances {
        Tolerances {
            eq13: self.eq13 * k,
            algebraic: self.algebraic * k,
            fd: self.fd * k,
            eq3: self.eq3 * k,
            metric_split: self.metric_split * k,
            integrability: self.integrability * k,
            num: self.num * k,
            ..*self
        }
    }
}
