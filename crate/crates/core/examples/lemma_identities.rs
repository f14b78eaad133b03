//! Evaluate the connection identities at one point, then break one on purpose.

use skewprod::fixtures;
use skewprod::warped::{lemma_suite, warped_lemma_suite, LocalGeometry, Mutation};
use skewprod::tol::CLUSTER_TOL;

fn main() {
    let p = fixtures::bundled("example43");
    let (imm, spec) = (&p.immersion, p.warped.as_ref().unwrap());
    let q = [1.3, 0.2, -0.25, 0.7, 0.6];
    let lg = LocalGeometry::at(imm, &q, CLUSTER_TOL).unwrap();
    let ds = lg.frame_gradient(&spec.log_warp(imm, &q).unwrap().1);

    let show = |m: Option<Mutation>| {
        for (id, v) in lemma_suite(&lg, m).into_iter().chain(warped_lemma_suite(&lg, &ds, m)) {
            match v {
                Some(v) => println!("  {id:20} {:.3e}  (scale {:.2})", v.residual, v.magnitude),
                None => println!("  {id:20} n/a"),
            }
        }
    };
    println!("as derived:");
    show(None);
    println!("with csc^2 replaced by sec^2:");
    show(Some(Mutation::Eq18CscToSec));
}
