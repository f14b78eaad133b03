//! Seeded random immersions, as used by the property tests.

use skewprod::corpus::corpus;
use skewprod::geometry::frames;
use skewprod::operators::{decompose, split_point, t2_spectrum};
use skewprod::tol::CLUSTER_TOL;

fn main() {
    let mut worst = 0.0f64;
    for (i, imm) in corpus(2024, 200).iter().enumerate() {
        let p = vec![0.7; imm.d()];
        let f = frames(imm, &p).unwrap();
        let ops = decompose(&f, imm.ambient());
        worst = worst.max(ops.eq13_residuals().into_iter().fold(0.0, f64::max));
        if i < 5 {
            let split = split_point(&t2_spectrum(&ops, CLUSTER_TOL).unwrap(), CLUSTER_TOL);
            println!("#{i}: d = {}, n = {}, blocks {:?}", imm.d(), imm.n(), split.signature());
            for c in imm.components() {
                println!("      {c}");
            }
        }
    }
    println!("worst operator identity residual over 200 immersions: {worst:.2e}");
}
