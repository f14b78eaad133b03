//! |h|^2 against the gradient bound, including a case where the bound fails.

use skewprod::fixtures;
use skewprod::warped::{chen_inequality, LocalGeometry};
use skewprod::tol::CLUSTER_TOL;

fn main() {
    for name in ["example43", "sphere_cone", "sphere_cone_equal"] {
        let p = fixtures::bundled(name);
        let (imm, spec) = (&p.immersion, p.warped.as_ref().unwrap());
        println!("{name}");
        for x in [0.6, 1.0, 1.8] {
            let q: Vec<f64> = std::iter::once(x).chain(imm.domain()[1..].iter().map(|(a, b)| 0.5 * (a + b))).collect();
            let lg = LocalGeometry::at(imm, &q, CLUSTER_TOL).unwrap();
            let ds = lg.frame_gradient(&spec.log_warp(imm, &q).unwrap().1);
            let row = chen_inequality(&lg, &ds, 1e-6).unwrap();
            print!("  x = {x}: lhs {:.9} rhs {:.9} margin {:+.3e}", row.lhs, row.rhs, row.margin);
            match row.equality {
                Some(eq) => println!("  equality: base h {:.1e}, mixed h {:.1e}, leaf H {:.4}", eq.base_h, eq.mixed_h, eq.leaf_mean_curvature),
                None => println!(),
            }
        }
    }
}
