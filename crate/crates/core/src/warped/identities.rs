//! Pointwise residuals of the connection identities for D^⊥, D^θ, D^T and of
//! the second-fundamental-form identities of a warped product.
//!
//! Letters follow the usual convention: V, W ∈ D^⊥; U, Z ∈ D^θ; X, Y ∈ D^T.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::LocalGeometry;
use crate::operators::BlockLabel::{self, AntiInvariant, Invariant, Slant};

pub const LEMMA_IDS: [&str; 10] =
    ["eq14", "eq15", "eq16", "eq17", "eq18", "eq19", "eq20", "eq21", "eq22", "eq22-sign-corrected"];
pub const WARPED_IDS: [&str; 7] = ["eq24", "eq25", "eq30", "eq31", "eq32", "eq33", "eq33-corrected"];

/// A deliberately wrong wiring of one identity, for detection tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// eq14: W taken from the slant block.
    Eq14WFromSlant,
    /// eq15: NTZ and NZ exchanged.
    Eq15SwapNtzNz,
    /// eq16: F dropped on X.
    Eq16DropFOnX,
    /// eq17: X taken from the anti-invariant block.
    Eq17XFromAntiInvariant,
    /// eq18: csc²θ replaced by sec²θ.
    Eq18CscToSec,
    /// eq19: F dropped on Y.
    Eq19DropFOnY,
    /// eq20: NTZ and NZ exchanged.
    Eq20SwapNtzNz,
    /// eq21: sec²θ replaced by csc²θ.
    Eq21SecToCsc,
    /// eq22: TZ replaced by Z.
    Eq22TzToZ,
    /// eq30: V taken from the invariant block.
    Eq30VFromInvariant,
    /// eq31: V taken from the invariant block.
    Eq31VFromInvariant,
    /// eq32: F dropped on Y.
    Eq32DropFOnY,
    /// eq33: TZ replaced by Z in the gradient term.
    Eq33TzToZ,
}

impl Mutation {
    pub const ALL: [Mutation; 13] = [
        Mutation::Eq14WFromSlant,
        Mutation::Eq15SwapNtzNz,
        Mutation::Eq16DropFOnX,
        Mutation::Eq17XFromAntiInvariant,
        Mutation::Eq18CscToSec,
        Mutation::Eq19DropFOnY,
        Mutation::Eq20SwapNtzNz,
        Mutation::Eq21SecToCsc,
        Mutation::Eq22TzToZ,
        Mutation::Eq30VFromInvariant,
        Mutation::Eq31VFromInvariant,
        Mutation::Eq32DropFOnY,
        Mutation::Eq33TzToZ,
    ];

    /// Identity ids whose evaluation the mutation changes.
    pub fn targets(self) -> &'static [&'static str] {
        match self {
            Mutation::Eq14WFromSlant => &["eq14"],
            Mutation::Eq15SwapNtzNz => &["eq15"],
            Mutation::Eq16DropFOnX => &["eq16"],
            Mutation::Eq17XFromAntiInvariant => &["eq17"],
            Mutation::Eq18CscToSec => &["eq18"],
            Mutation::Eq19DropFOnY => &["eq19"],
            Mutation::Eq20SwapNtzNz => &["eq20"],
            Mutation::Eq21SecToCsc => &["eq21"],
            Mutation::Eq22TzToZ => &["eq22", "eq22-sign-corrected"],
            Mutation::Eq30VFromInvariant => &["eq30"],
            Mutation::Eq31VFromInvariant => &["eq31"],
            Mutation::Eq32DropFOnY => &["eq32"],
            Mutation::Eq33TzToZ => &["eq33", "eq33-corrected"],
        }
    }
}

/// Worst |lhs − rhs| at one point and the largest side seen, or `None` when a
/// required block is absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityValue {
    pub residual: f64,
    pub magnitude: f64,
}

#[derive(Default)]
struct Acc {
    residual: f64,
    magnitude: f64,
    any: bool,
}

impl Acc {
    fn push(&mut self, lhs: f64, rhs: f64) {
        self.any = true;
        self.residual = self.residual.max((lhs - rhs).abs());
        self.magnitude = self.magnitude.max(lhs.abs()).max(rhs.abs());
    }

    fn push_vec(&mut self, v: &DVector<f64>, scale: f64) {
        self.any = true;
        self.residual = self.residual.max(v.norm());
        self.magnitude = self.magnitude.max(scale);
    }

    fn done(self) -> Option<IdentityValue> {
        self.any.then_some(IdentityValue { residual: self.residual, magnitude: self.magnitude })
    }
}

struct Ctx<'a> {
    lg: &'a LocalGeometry,
    m: Option<Mutation>,
    perp: Vec<DVector<f64>>,
    slant: Vec<DVector<f64>>,
    inv: Vec<DVector<f64>>,
    kp: usize,
    ks: usize,
    kt: usize,
    lam: f64,
}

impl Ctx<'_> {
    fn on(&self, m: Mutation) -> bool {
        self.m == Some(m)
    }

    fn csc2(&self) -> f64 {
        1.0 / (1.0 - self.lam)
    }

    fn sec2(&self) -> f64 {
        1.0 / self.lam
    }

    fn vecs(&self, l: BlockLabel) -> &[DVector<f64>] {
        match l {
            AntiInvariant => &self.perp,
            Slant => &self.slant,
            Invariant => &self.inv,
        }
    }

    fn index(&self, l: BlockLabel) -> usize {
        match l {
            AntiInvariant => self.kp,
            Slant => self.ks,
            Invariant => self.kt,
        }
    }
}

fn context<'a>(lg: &'a LocalGeometry, m: Option<Mutation>) -> Option<Ctx<'a>> {
    let kp = lg.block(AntiInvariant)?;
    let ks = lg.block(Slant)?;
    let kt = lg.block(Invariant)?;
    Some(Ctx {
        lg,
        m,
        perp: lg.vectors(AntiInvariant),
        slant: lg.vectors(Slant),
        inv: lg.vectors(Invariant),
        kp,
        ks,
        kt,
        lam: lg.split.blocks[ks].lambda,
    })
}

/// The connection identities at one point, in [`LEMMA_IDS`] order.
/// Every entry is `None` unless all three kinds of block are present.
pub fn lemma_suite(lg: &LocalGeometry, m: Option<Mutation>) -> Vec<(&'static str, Option<IdentityValue>)> {
    let Some(c) = context(lg, m) else {
        return LEMMA_IDS.iter().map(|id| (*id, None)).collect();
    };
    let g = c.lg;
    let (t, n) = (|u: &DVector<f64>| g.t(u), |u: &DVector<f64>| g.n(u));
    let mut out = Vec::with_capacity(LEMMA_IDS.len());

    // eq14: g(∇_V W, X) = −g(A_{FW} V, FX)
    let mut a = Acc::default();
    let w_kind = if c.on(Mutation::Eq14WFromSlant) { Slant } else { AntiInvariant };
    for v in &c.perp {
        for w in c.vecs(w_kind) {
            for x in &c.inv {
                a.push(g.nabla(v, c.index(w_kind), w, x), -g.hn(v, &t(x), &n(w)));
            }
        }
    }
    out.push(("eq14", a.done()));

    // eq15: g(∇_V Z, X) = −csc²θ {g(A_{NTZ} V, X) + g(A_{NZ} V, FX)}
    let mut a = Acc::default();
    for v in &c.perp {
        for z in &c.slant {
            let (ntz, nz) = (n(&t(z)), n(z));
            let (p, q) = if c.on(Mutation::Eq15SwapNtzNz) { (&nz, &ntz) } else { (&ntz, &nz) };
            for x in &c.inv {
                a.push(g.nabla(v, c.ks, z, x), -c.csc2() * (g.hn(v, x, p) + g.hn(v, &t(x), q)));
            }
        }
    }
    out.push(("eq15", a.done()));

    // eq16: g(∇_Z V, X) = −g(A_{FV} Z, FX)
    let mut a = Acc::default();
    for z in &c.slant {
        for v in &c.perp {
            for x in &c.inv {
                let fx = if c.on(Mutation::Eq16DropFOnX) { x.clone() } else { t(x) };
                a.push(g.nabla(z, c.kp, v, x), -g.hn(z, &fx, &n(v)));
            }
        }
    }
    out.push(("eq16", a.done()));

    // eq17: g(∇_U Z, X) = −csc²θ {g(A_{NTZ} U, X) + g(A_{NZ} U, FX)}
    let mut a = Acc::default();
    let x_kind = if c.on(Mutation::Eq17XFromAntiInvariant) { AntiInvariant } else { Invariant };
    for u in &c.slant {
        for z in &c.slant {
            let (ntz, nz) = (n(&t(z)), n(z));
            for x in c.vecs(x_kind) {
                a.push(g.nabla(u, c.ks, z, x), -c.csc2() * (g.hn(u, x, &ntz) + g.hn(u, &t(x), &nz)));
            }
        }
    }
    out.push(("eq17", a.done()));

    // eq18: g(∇_X Y, Z) = csc²θ {g(A_{NTZ} X, Y) + g(A_{NZ} X, FY)}
    let mut a = Acc::default();
    let k18 = if c.on(Mutation::Eq18CscToSec) { c.sec2() } else { c.csc2() };
    for x in &c.inv {
        for y in &c.inv {
            for z in &c.slant {
                a.push(g.nabla(x, c.kt, y, z), k18 * (g.hn(x, y, &n(&t(z))) + g.hn(x, &t(y), &n(z))));
            }
        }
    }
    out.push(("eq18", a.done()));

    // eq19: g(∇_X Y, V) = g(A_{FV} X, FY)
    let mut a = Acc::default();
    for x in &c.inv {
        for y in &c.inv {
            let fy = if c.on(Mutation::Eq19DropFOnY) { y.clone() } else { t(y) };
            for v in &c.perp {
                a.push(g.nabla(x, c.kt, y, v), g.hn(x, &fy, &n(v)));
            }
        }
    }
    out.push(("eq19", a.done()));

    // eq20: g(∇_V X, Z) = csc²θ {g(A_{NTZ} V, X) + g(A_{NZ} V, FX)}
    let mut a = Acc::default();
    for v in &c.perp {
        for x in &c.inv {
            for z in &c.slant {
                let (ntz, nz) = (n(&t(z)), n(z));
                let (p, q) = if c.on(Mutation::Eq20SwapNtzNz) { (&nz, &ntz) } else { (&ntz, &nz) };
                a.push(g.nabla(v, c.kt, x, z), c.csc2() * (g.hn(v, x, p) + g.hn(v, &t(x), q)));
            }
        }
    }
    out.push(("eq20", a.done()));

    // eq21: g(∇_U Z, V) = sec²θ {g(A_{FV} U, TZ) + g(A_{NTZ} U, V)}
    let mut a = Acc::default();
    let k21 = if c.on(Mutation::Eq21SecToCsc) { c.csc2() } else { c.sec2() };
    for u in &c.slant {
        for z in &c.slant {
            for v in &c.perp {
                a.push(g.nabla(u, c.ks, z, v), k21 * (g.hn(u, &t(z), &n(v)) + g.hn(u, v, &n(&t(z)))));
            }
        }
    }
    out.push(("eq21", a.done()));

    // eq22: g(∇_X V, Z) = sec²θ {g(A_{FV} X, TZ) + g(A_{NTZ} X, V)}, and with the sign reversed
    let (mut a, mut b) = (Acc::default(), Acc::default());
    for x in &c.inv {
        for v in &c.perp {
            for z in &c.slant {
                let tz = if c.on(Mutation::Eq22TzToZ) { z.clone() } else { t(z) };
                let lhs = g.nabla(x, c.kp, v, z);
                let rhs = c.sec2() * (g.hn(x, &tz, &n(v)) + g.hn(x, v, &n(&t(z))));
                a.push(lhs, rhs);
                b.push(lhs, -rhs);
            }
        }
    }
    out.push(("eq22", a.done()));
    out.push(("eq22-sign-corrected", b.done()));
    out
}

/// The warped-product identities at one point, in [`WARPED_IDS`] order.
/// `dsigma` is the frame gradient of σ = ln f.
pub fn warped_lemma_suite(
    lg: &LocalGeometry,
    dsigma: &DVector<f64>,
    m: Option<Mutation>,
) -> Vec<(&'static str, Option<IdentityValue>)> {
    let Some(c) = context(lg, m) else {
        return WARPED_IDS.iter().map(|id| (*id, None)).collect();
    };
    let g = c.lg;
    let (t, n) = (|u: &DVector<f64>| g.t(u), |u: &DVector<f64>| g.n(u));
    let ds = |u: &DVector<f64>| u.dot(dsigma);
    let mut out = Vec::with_capacity(WARPED_IDS.len());

    // eq24: A_{FV} FX + V[σ] X = 0
    let mut a = Acc::default();
    for v in &c.perp {
        let av = g.ext.shape_of(&n(v));
        for x in &c.inv {
            let first = &av * t(x);
            let second = x * ds(v);
            a.push_vec(&(&first + &second), first.norm().max(second.norm()));
        }
    }
    out.push(("eq24", a.done()));

    // eq25: A_{NZ} FX + A_{NTZ} X + Z[σ] sin²θ X = 0
    let mut a = Acc::default();
    for z in &c.slant {
        let (anz, antz) = (g.ext.shape_of(&n(z)), g.ext.shape_of(&n(&t(z))));
        for x in &c.inv {
            let first = &anz * t(x) + &antz * x;
            let second = x * (ds(z) * (1.0 - c.lam));
            a.push_vec(&(&first + &second), first.norm().max(second.norm()));
        }
    }
    out.push(("eq25", a.done()));

    // eq30: g(h(X, V), FW) = 0
    let mut a = Acc::default();
    let v_kind = if c.on(Mutation::Eq30VFromInvariant) { Invariant } else { AntiInvariant };
    for x in &c.inv {
        for v in c.vecs(v_kind) {
            for w in &c.perp {
                a.push(g.hn(x, v, &n(w)), 0.0);
            }
        }
    }
    out.push(("eq30", a.done()));

    // eq31: g(h(X, V), NZ) = 0
    let mut a = Acc::default();
    let v_kind = if c.on(Mutation::Eq31VFromInvariant) { Invariant } else { AntiInvariant };
    for x in &c.inv {
        for v in c.vecs(v_kind) {
            for z in &c.slant {
                a.push(g.hn(x, v, &n(z)), 0.0);
            }
        }
    }
    out.push(("eq31", a.done()));

    // eq32: g(h(X, FY), FV) = −V(ln f) g(X, Y)
    let mut a = Acc::default();
    for x in &c.inv {
        for y in &c.inv {
            let fy = if c.on(Mutation::Eq32DropFOnY) { y.clone() } else { t(y) };
            for v in &c.perp {
                a.push(g.hn(x, &fy, &n(v)), -ds(v) * x.dot(y));
            }
        }
    }
    out.push(("eq32", a.done()));

    // eq33: g(h(X, Y), NZ) = TZ(ln f) g(X, Y), and with the missing −Z(ln f) g(X, FY)
    let (mut a, mut b) = (Acc::default(), Acc::default());
    for x in &c.inv {
        for y in &c.inv {
            for z in &c.slant {
                let grad_dir = if c.on(Mutation::Eq33TzToZ) { z.clone() } else { t(z) };
                let lhs = g.hn(x, y, &n(z));
                let rhs = ds(&grad_dir) * x.dot(y);
                a.push(lhs, rhs);
                b.push(lhs, rhs - ds(z) * x.dot(&t(y)));
            }
        }
    }
    out.push(("eq33", a.done()));
    out.push(("eq33-corrected", b.done()));
    out
}
