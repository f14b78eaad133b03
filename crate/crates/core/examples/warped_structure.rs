//! Check that g = g1 + f^2 g2 and the warped connection formula hold, and
//! watch both fail when the warping function is wrong.

use skewprod::geometry::frames;
use skewprod::operators::{classify, decompose, t2_spectrum};
use skewprod::run::sample_points;
use skewprod::tol::{CLUSTER_TOL, CONSTANCY_TOL};
use skewprod::warped::{check_eq3, check_metric_split};
use skewprod::fixtures;

fn main() {
    for name in ["example43", "wrong_warp", "multiply_warped"] {
        let p = fixtures::bundled(name);
        let (imm, spec) = (&p.immersion, p.warped.as_ref().unwrap());
        let s = &p.manifest.sampling;
        let (pts, _) = sample_points(imm.domain(), s, s.random, s.seed);
        let spectra: Vec<_> = pts
            .iter()
            .map(|q| t2_spectrum(&decompose(&frames(imm, q).unwrap(), imm.ambient()), CLUSTER_TOL).unwrap())
            .collect();
        let split = classify(&spectra, CLUSTER_TOL, CONSTANCY_TOL).unwrap();
        let ms = check_metric_split(imm, spec, &split, &pts, CLUSTER_TOL).unwrap();
        let (conn, at) = check_eq3(imm, spec, &pts).unwrap();
        println!("{name:16} f = {:<6} metric split base {:.2e} fiber {:.2e}  connection {:.2e} at {:?}", spec.warp.to_string(), ms.base, ms.fiber, conn, pts[at]);
    }
}
