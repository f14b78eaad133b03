//! Normal part of the bracket of each distribution: zero for the example,
//! not for a contact-type orbit.

use skewprod::fixtures;
use skewprod::warped::{integrability_check, LocalGeometry};
use skewprod::tol::CLUSTER_TOL;

fn main() {
    for (name, p) in [("example43", vec![1.2, 0.1, 0.3, 1.0, 2.0]), ("rotation_orbit", vec![0.2, -0.3, 0.4])] {
        let imm = fixtures::bundled(name).immersion;
        let lg = LocalGeometry::at(&imm, &p, CLUSTER_TOL).unwrap();
        for (k, b) in lg.split.blocks.iter().enumerate() {
            println!("{name:15} {:?} (dim {}): {:.3e}", b.label, b.dim(), integrability_check(&lg, k));
        }
    }
}
