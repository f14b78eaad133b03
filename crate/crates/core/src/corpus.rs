//! Seeded random expressions and immersions for property tests and sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::{ExprNode, Func};
use crate::geometry::{Immersion, ProductAmbient};

fn bx(e: ExprNode) -> Box<ExprNode> {
    Box::new(e)
}

fn cst(c: f64) -> ExprNode {
    ExprNode::Const(c)
}

/// 1.5 + e², positive everywhere.
fn positive(e: ExprNode) -> ExprNode {
    ExprNode::Add(bx(cst(1.5)), bx(ExprNode::Pow(bx(e), 2)))
}

fn leaf<R: Rng>(rng: &mut R, params: &[String]) -> ExprNode {
    if rng.gen_bool(0.7) {
        ExprNode::Param(params.choose(rng).expect("at least one parameter").clone())
    } else {
        cst((rng.gen_range(-20..=20) as f64) / 10.0)
    }
}

/// A random tree of depth at most `depth` that is defined everywhere except
/// for overflow of `exp`: logarithms, roots and divisions act on `1.5 + e²`
/// and tangents on `0.3 sin(e)`.
pub fn random_expr<R: Rng>(rng: &mut R, params: &[String], depth: usize) -> ExprNode {
    if depth <= 1 || rng.gen_bool(0.2) {
        return leaf(rng, params);
    }
    // subtree leaving room for `wrap` extra levels below this node
    let sub = |rng: &mut R, wrap: usize| random_expr(rng, params, depth.saturating_sub(1 + wrap).max(1));
    let roomy = depth >= 4;
    match rng.gen_range(0..11) {
        0 => ExprNode::Add(bx(sub(rng, 0)), bx(sub(rng, 0))),
        1 => ExprNode::Sub(bx(sub(rng, 0)), bx(sub(rng, 0))),
        2 | 3 => ExprNode::Mul(bx(sub(rng, 0)), bx(sub(rng, 0))),
        4 if roomy => ExprNode::Div(bx(sub(rng, 0)), bx(positive(sub(rng, 2)))),
        5 => ExprNode::Neg(bx(sub(rng, 0))),
        6 => {
            let k = rng.gen_range(-2..=3);
            if k < 0 && roomy {
                ExprNode::Pow(bx(positive(sub(rng, 2))), k)
            } else {
                ExprNode::Pow(bx(sub(rng, 0)), k.abs())
            }
        }
        7 => ExprNode::Call(*[Func::Sin, Func::Cos].choose(rng).expect("non-empty"), bx(sub(rng, 0))),
        8 if depth >= 3 => ExprNode::Call(Func::Exp, bx(ExprNode::Call(Func::Sin, bx(sub(rng, 1))))),
        9 if roomy => ExprNode::Call(*[Func::Log, Func::Sqrt].choose(rng).expect("non-empty"), bx(positive(sub(rng, 2)))),
        10 if roomy => ExprNode::Call(
            Func::Tan,
            bx(ExprNode::Mul(bx(cst(0.3)), bx(ExprNode::Call(Func::Sin, bx(sub(rng, 2)))))),
        ),
        _ => ExprNode::Mul(bx(sub(rng, 0)), bx(sub(rng, 0))),
    }
}

/// Parameter names p0, p1, ...
pub fn param_names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("p{i}")).collect()
}

/// A random immersion of dimension 1..=4 into ℝⁿ, n ≤ 8. Each parameter
/// appears alone in one component, so the Jacobian has full rank; the
/// components are shuffled against a random sign vector containing both
/// signs.
pub fn random_immersion<R: Rng>(rng: &mut R) -> Immersion {
    let d = rng.gen_range(1..=4);
    let n = rng.gen_range(d + 1..=(d + 4).min(8));
    let params = param_names(d);
    let mut comps: Vec<ExprNode> = params.iter().map(|p| ExprNode::Param(p.clone())).collect();
    for _ in d..n {
        comps.push(random_expr(rng, &params, 3));
    }
    comps.shuffle(rng);
    let mut signs: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    if signs.iter().all(|&s| s == signs[0]) {
        let k = rng.gen_range(0..n);
        signs[k] = -signs[k];
    }
    let ambient = ProductAmbient::new(&signs).expect("both signs present");
    Immersion::new(params, comps, vec![(0.2, 1.2); d], ambient).expect("valid by construction")
}

/// `count` immersions from one seed.
pub fn corpus(seed: u64, count: usize) -> Vec<Immersion> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_immersion(&mut rng)).collect()
}
