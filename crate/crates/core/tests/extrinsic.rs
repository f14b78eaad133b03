use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skewprod::corpus::corpus;
use skewprod::expr::ExprNode;
use skewprod::extrinsic::{gauss_weingarten_check, mixed_tg_residual, second_fundamental_form, ExtrinsicPack};
use skewprod::fixtures;
use skewprod::geometry::{frames, FramePack, Immersion};
use skewprod::operators::{decompose, split_point, t2_spectrum, BlockLabel, PointBlock, PointSplit};
use skewprod::tol::{CLUSTER_TOL, FD_STEP_REL};

fn pack(imm: &Immersion, p: &[f64]) -> (FramePack, ExtrinsicPack) {
    let f = frames(imm, p).unwrap();
    let e = second_fundamental_form(imm, &f, &imm.fd_steps(FD_STEP_REL)).unwrap();
    (f, e)
}

/// Normal part of Σ uⁱ vʲ ∂ᵢ∂ⱼφ with the second derivatives taken by central
/// differences of φ itself.
fn h_oracle(imm: &Immersion, f: &FramePack, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let p = &f.point;
    let (a, b) = (&f.coeffs * u, &f.coeffs * v);
    let h = 1e-4;
    let at = |i: usize, si: f64, j: usize, sj: f64| {
        let mut q = p.clone();
        q[i] += si;
        q[j] += sj;
        imm.evaluate(&q).unwrap()
    };
    let mut acc = DVector::zeros(imm.n());
    for i in 0..p.len() {
        for j in 0..p.len() {
            let d2 = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h);
            acc += d2 * (a[i] * b[j]);
        }
    }
    f.normal.transpose() * acc
}

#[test]
fn second_fundamental_form_matches_difference_oracle() {
    for name in ["example43", "sphere_cone", "rotation_slant", "torus_cone"] {
        let imm = fixtures::bundled(name).immersion;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let p: Vec<f64> = imm.domain().iter().map(|&(a, b)| a + (b - a) * rng.gen_range(0.1..0.9)).collect();
            let (f, e) = pack(&imm, &p);
            let d = imm.d();
            for i in 0..d {
                for j in 0..d {
                    let (ei, ej) = (DVector::from_fn(d, |k, _| (k == i) as u8 as f64), DVector::from_fn(d, |k, _| (k == j) as u8 as f64));
                    let diff = (e.h_vec(&ei, &ej) - h_oracle(&imm, &f, &ei, &ej)).amax();
                    assert!(diff < 1e-6, "{name} h({i},{j}) off by {diff}");
                }
            }
        }
    }
}

#[test]
fn affine_immersion_is_totally_geodesic() {
    let imm = Immersion::parse(&["a", "b"], &["a+2*b", "3*a", "b-a", "1"], &[(0.0, 1.0); 2], &[1, -1, 1, -1]).unwrap();
    let (_, e) = pack(&imm, &[0.3, 0.6]);
    assert!(e.norm_sq() < 1e-24);
    assert!(e.mean_norm() < 1e-12);
}

#[test]
fn sphere_mean_curvature_and_gauss_equation() {
    for r in [0.5, 1.0, 2.5] {
        let imm = fixtures::round_sphere(r);
        for p in [[0.7, 0.3], [1.5, 2.0], [2.2, 4.4]] {
            let (_, e) = pack(&imm, &p);
            assert!((e.mean_norm() - 1.0 / r).abs() < 1e-6, "r = {r}: |H| = {}", e.mean_norm());
            assert!((e.sectional_curvature(0, 1) - 1.0 / (r * r)).abs() < 1e-5);
        }
    }
}

#[test]
fn example_u_direction_bends() {
    let imm = fixtures::example43();
    let (f, e) = pack(&imm, &[1.0, 0.0, 0.0, 0.0, 0.0]);
    // e_u = φ_u / x in frame coordinates, and φ_uu = (0, 0, −x cos u, −x sin u, 0, …)
    let eu_frame = f.r.column(3).into_owned();
    let huu = e.h_vec(&eu_frame, &eu_frame);
    let mut phi_uu = DVector::zeros(10);
    phi_uu[2] = -1.0;
    assert!((&huu - f.normal.transpose() * phi_uu).amax() < 1e-9);
    assert!(huu.norm() > 0.1);
}

#[test]
fn corpus_gauss_weingarten_and_symmetry() {
    for (i, imm) in corpus(2024, 200).iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        for _ in 0..3 {
            let p: Vec<f64> = imm.domain().iter().map(|&(a, b)| rng.gen_range(a..b)).collect();
            let (_, e) = pack(imm, &p);
            assert!(gauss_weingarten_check(&e) < 1e-9, "immersion {i}");
            assert!(e.symmetry_residual() < 1e-9, "immersion {i}");
        }
    }
}

#[test]
fn corrupted_shape_operator_is_detected() {
    let (_, mut e) = pack(&fixtures::example43(), &[1.2, 0.1, 0.2, 0.3, 0.4]);
    assert!(gauss_weingarten_check(&e) < 1e-9);
    e.shape.swap(0, 1);
    assert!(gauss_weingarten_check(&e) > 1e-3);
}

fn split_of(imm: &Immersion, f: &FramePack) -> PointSplit {
    split_point(&t2_spectrum(&decompose(f, imm.ambient()), CLUSTER_TOL).unwrap(), CLUSTER_TOL)
}

#[test]
fn product_immersion_is_mixed_totally_geodesic() {
    let imm = Immersion::parse(&["u", "v"], &["cos(u)", "sin(u)", "v", "v^2"], &[(0.1, 1.0); 2], &[1, 1, -1, -1]).unwrap();
    let (f, e) = pack(&imm, &[0.4, 0.7]);
    // φ_u and φ_v are orthogonal, so the first two frame vectors follow them
    let blocks = (0..2)
        .map(|k| PointBlock { label: BlockLabel::Invariant, lambda: 1.0, basis: DMatrix::identity(2, 2).columns(k, 1).into_owned() })
        .collect();
    let split = PointSplit { blocks };
    assert!(mixed_tg_residual(&e, &split, 0, 1) < 1e-9);
    assert!(mixed_tg_residual(&e, &split, 0, 0) > 0.1);
    assert_eq!(split_of(&imm, &f).blocks.len(), 1);
}

fn permuted(imm: &Immersion, order: &[usize]) -> Immersion {
    let params = order.iter().map(|&i| imm.params()[i].clone()).collect();
    let dom = order.iter().map(|&i| imm.domain()[i]).collect();
    Immersion::new(params, imm.components().to_vec(), dom, imm.ambient().clone()).unwrap()
}

#[test]
fn invariants_do_not_depend_on_parameter_order() {
    for name in ["example43", "rotation_slant"] {
        let imm = fixtures::bundled(name).immersion;
        let d = imm.d();
        let order: Vec<usize> = (0..d).rev().collect();
        let other = permuted(&imm, &order);
        let p: Vec<f64> = imm.domain().iter().map(|&(a, b)| 0.37 * a + 0.63 * b).collect();
        let q: Vec<f64> = order.iter().map(|&i| p[i]).collect();
        let ((fa, ea), (fb, eb)) = (pack(&imm, &p), pack(&other, &q));
        assert!((ea.norm_sq() - eb.norm_sq()).abs() < 1e-8);
        assert!((ea.mean_norm() - eb.mean_norm()).abs() < 1e-8);
        let (sa, sb) = (split_of(&imm, &fa), split_of(&other, &fb));
        assert_eq!(sa.signature(), sb.signature());
        for i in 0..sa.blocks.len() {
            for j in 0..sa.blocks.len() {
                let (x, y) = (mixed_tg_residual(&ea, &sa, i, j), mixed_tg_residual(&eb, &sb, i, j));
                assert!((x - y).abs() < 1e-8, "{name} blocks {i},{j}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn scaling_the_immersion() {
    let imm = fixtures::example43();
    let p = [1.3, 0.2, -0.1, 0.5, 0.9];
    let (fa, ea) = pack(&imm, &p);
    for c in [0.5, 3.0] {
        let comps = imm.components().iter().map(|e| ExprNode::Mul(Box::new(ExprNode::Const(c)), Box::new(e.clone()))).collect();
        let scaled = Immersion::new(imm.params().to_vec(), comps, imm.domain().to_vec(), imm.ambient().clone()).unwrap();
        let (fb, eb) = pack(&scaled, &p);
        assert!((eb.norm_sq() - ea.norm_sq() / (c * c)).abs() < 1e-9);
        let (sa, sb) = (split_of(&imm, &fa), split_of(&scaled, &fb));
        assert_eq!(sa.signature(), sb.signature());
        for (x, y) in sa.blocks.iter().zip(&sb.blocks) {
            assert!((x.lambda - y.lambda).abs() < 1e-12);
        }
    }
}
