use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skewprod::corpus::corpus;
use skewprod::expr::ExprNode;
use skewprod::fixtures;
use skewprod::geometry::{frames, Immersion};
use skewprod::operators::{classify, decompose, split_point, t2_spectrum, OperatorPack, T2Spectrum};
use skewprod::run::sample_points;
use skewprod::tol::{CLUSTER_TOL, CONSTANCY_TOL};

fn spectrum(imm: &Immersion, p: &[f64]) -> T2Spectrum {
    let f = frames(imm, p).unwrap();
    t2_spectrum(&decompose(&f, imm.ambient()), CLUSTER_TOL).unwrap()
}

fn random_points(imm: &Immersion, k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| imm.domain().iter().map(|&(a, b)| rng.gen_range(a..b)).collect()).collect()
}

#[test]
fn eq13_on_example_samples() {
    let p = fixtures::bundled("example43");
    let s = &p.manifest.sampling;
    for q in sample_points(p.immersion.domain(), s, s.random, s.seed).0 {
        let f = frames(&p.immersion, &q).unwrap();
        assert!(decompose(&f, p.immersion.ambient()).eq13_residuals().iter().all(|r| *r < 1e-10));
    }
}

#[test]
fn corpus_operator_invariants() {
    for (i, imm) in corpus(2024, 200).iter().enumerate() {
        for p in random_points(imm, 5, i as u64) {
            let f = frames(imm, &p).unwrap();
            let ops = decompose(&f, imm.ambient());
            let r = ops.eq13_residuals();
            assert!(r.iter().all(|v| *v < 1e-10), "immersion {i} at {p:?}: {r:?}");
            assert!((&ops.small_t - ops.big_n.transpose()).amax() < 1e-14);
            let spec = t2_spectrum(&ops, CLUSTER_TOL).unwrap();
            assert!(spec.raw.iter().all(|v| (-CLUSTER_TOL..=1.0 + CLUSTER_TOL).contains(v)));
            let split = split_point(&spec, CLUSTER_TOL);
            let d = imm.d();
            let mut sum = DMatrix::zeros(d, d);
            for b in &split.blocks {
                sum += b.projector();
                // each block is T-invariant
                let tb = &ops.big_t * &b.basis;
                assert!((&tb - &b.basis * (b.basis.transpose() * &tb)).amax() < 1e-9);
            }
            assert!((sum - DMatrix::identity(d, d)).amax() < 1e-10);
        }
    }
}

#[test]
fn spectrum_of_conjugated_diagonal_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let d = rng.gen_range(2..7);
        let q = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
        let mu: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = &q * DMatrix::from_diagonal(&DVector::from_vec(mu.clone())) * q.transpose();
        let t = (&t + t.transpose()) * 0.5;
        let pack = OperatorPack { big_t: t, big_n: DMatrix::zeros(1, d), small_t: DMatrix::zeros(d, 1), omega: DMatrix::zeros(1, 1) };
        let mut want: Vec<f64> = mu.iter().map(|m| m * m).collect();
        want.sort_by(f64::total_cmp);
        let got = t2_spectrum(&pack, CLUSTER_TOL).unwrap().values;
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10);
        }
    }
}

fn subst(e: &ExprNode, name: &str, by: &ExprNode) -> ExprNode {
    use ExprNode::*;
    let s = |a: &ExprNode| Box::new(subst(a, name, by));
    match e {
        Param(p) if p == name => by.clone(),
        Const(_) | Param(_) => e.clone(),
        Neg(a) => Neg(s(a)),
        Add(a, b) => Add(s(a), s(b)),
        Sub(a, b) => Sub(s(a), s(b)),
        Mul(a, b) => Mul(s(a), s(b)),
        Div(a, b) => Div(s(a), s(b)),
        Pow(a, k) => Pow(s(a), *k),
        Call(f, a) => Call(*f, s(a)),
    }
}

#[test]
fn classification_survives_affine_reparametrization() {
    let imm = fixtures::example43();
    // x = 0.5 + 1.5 s, z = 2 w - 1
    let x_of_s = skewprod::expr::parse_str("0.5 + 1.5*s").unwrap();
    let z_of_w = skewprod::expr::parse_str("2*w - 1").unwrap();
    let comps: Vec<ExprNode> = imm.components().iter().map(|c| subst(&subst(c, "x", &x_of_s), "z", &z_of_w)).collect();
    let params: Vec<String> = ["s", "y", "w", "u", "v"].iter().map(|s| s.to_string()).collect();
    let mut dom = imm.domain().to_vec();
    dom[0] = (0.0, 1.0);
    dom[2] = (0.0, 1.0);
    let re = Immersion::new(params, comps, dom, imm.ambient().clone()).unwrap();

    let pts = random_points(&re, 12, 5);
    let back: Vec<Vec<f64>> = pts.iter().map(|q| vec![0.5 + 1.5 * q[0], q[1], 2.0 * q[2] - 1.0, q[3], q[4]]).collect();
    let a = classify(&back.iter().map(|p| spectrum(&imm, p)).collect::<Vec<_>>(), CLUSTER_TOL, CONSTANCY_TOL).unwrap();
    let b = classify(&pts.iter().map(|p| spectrum(&re, p)).collect::<Vec<_>>(), CLUSTER_TOL, CONSTANCY_TOL).unwrap();
    assert_eq!(a.dims(), b.dims());
    for (x, y) in a.blocks.iter().zip(&b.blocks) {
        assert_eq!(x.label, y.label);
        assert!((x.lambda - y.lambda).abs() < 1e-12);
    }
    // same ambient projectors at corresponding points
    for (p, q) in back.iter().zip(&pts) {
        let (fa, fb) = (frames(&imm, p).unwrap(), frames(&re, q).unwrap());
        let sa = split_point(&t2_spectrum(&decompose(&fa, imm.ambient()), CLUSTER_TOL).unwrap(), CLUSTER_TOL);
        let sb = split_point(&t2_spectrum(&decompose(&fb, re.ambient()), CLUSTER_TOL).unwrap(), CLUSTER_TOL);
        for k in 0..sa.blocks.len() {
            assert!((sa.ambient_projector(k, &fa) - sb.ambient_projector(k, &fb)).amax() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn classification_ignores_sample_order(seed in any::<u64>()) {
        let imm = fixtures::example43();
        let mut spectra: Vec<T2Spectrum> = random_points(&imm, 20, 1).iter().map(|p| spectrum(&imm, p)).collect();
        let a = classify(&spectra, CLUSTER_TOL, CONSTANCY_TOL).unwrap();
        spectra.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let b = classify(&spectra, CLUSTER_TOL, CONSTANCY_TOL).unwrap();
        prop_assert_eq!(a.dims(), b.dims());
        prop_assert_eq!(a.order_k, b.order_k);
        for (x, y) in a.blocks.iter().zip(&b.blocks) {
            prop_assert!((x.lambda - y.lambda).abs() < 1e-12);
        }
    }
}
