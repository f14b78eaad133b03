//! Second fundamental form, mean curvature and the Gauss equation on spheres.

use skewprod::extrinsic::{gauss_weingarten_check, second_fundamental_form};
use skewprod::fixtures;
use skewprod::geometry::frames;
use skewprod::tol::FD_STEP_REL;

fn main() {
    for r in [0.5, 1.0, 3.0] {
        let imm = fixtures::round_sphere(r);
        let p = [1.1, 0.8];
        let f = frames(&imm, &p).unwrap();
        let e = second_fundamental_form(&imm, &f, &imm.fd_steps(FD_STEP_REL)).unwrap();
        println!(
            "r = {r}: |H| = {:.9} (1/r = {:.9}), K = {:.6} (1/r^2 = {:.6}), gauss/weingarten {:.1e}",
            e.mean_norm(),
            1.0 / r,
            e.sectional_curvature(0, 1),
            1.0 / (r * r),
            gauss_weingarten_check(&e)
        );
    }

    let imm = fixtures::example43();
    let f = frames(&imm, &[1.0, 0.0, 0.0, 0.5, 0.5]).unwrap();
    let e = second_fundamental_form(&imm, &f, &imm.fd_steps(FD_STEP_REL)).unwrap();
    println!("example: |h|^2 = {:.9}, symmetry residual {:.1e}", e.norm_sq(), e.symmetry_residual());
}
