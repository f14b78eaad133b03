//! Split the tangent bundle into anti-invariant, slant and invariant parts.

use skewprod::fixtures;
use skewprod::geometry::frames;
use skewprod::operators::{classify, decompose, t2_spectrum};
use skewprod::run::sample_points;
use skewprod::tol::{CLUSTER_TOL, CONSTANCY_TOL};

fn main() {
    for name in ["example43", "rotation_slant", "rotation_orbit", "graph_varying_slant"] {
        let p = fixtures::bundled(name);
        let imm = &p.immersion;
        let s = &p.manifest.sampling;
        let (pts, _) = sample_points(imm.domain(), s, s.random, s.seed);
        let spectra: Vec<_> = pts
            .iter()
            .map(|q| t2_spectrum(&decompose(&frames(imm, q).unwrap(), imm.ambient()), CLUSTER_TOL).unwrap())
            .collect();
        match classify(&spectra, CLUSTER_TOL, CONSTANCY_TOL) {
            Ok(split) => {
                println!("{name}: dims {:?}, order {}, proper {}, case {}", split.dims(), split.order_k, split.proper, split.special_case.name());
                for b in &split.blocks {
                    println!("    {:?} dim {} cos(theta) {:.9}", b.label, b.dim, b.cos_theta());
                }
            }
            Err(e) => println!("{name}: {e}"),
        }
    }
}
