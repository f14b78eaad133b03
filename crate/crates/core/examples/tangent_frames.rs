//! Induced metric and orthonormal frames of the 10-dimensional example.

use skewprod::fixtures;
use skewprod::geometry::{frames, induced_metric};

fn main() {
    let imm = fixtures::example43();
    let p = [1.5, 0.2, -0.3, 0.4, 2.1];

    let g = induced_metric(&imm, &p).unwrap();
    println!("induced metric at {p:?}:{g:.6}");

    let f = frames(&imm, &p).unwrap();
    let d = f.d();
    let ortho = (f.tangent.transpose() * &f.tangent - nalgebra::DMatrix::identity(d, d)).amax();
    let cross = (f.tangent.transpose() * &f.normal).amax();
    println!("tangent frame {}x{}, normal frame {}x{}", f.tangent.nrows(), d, f.normal.nrows(), f.codim());
    println!("|E^T E - I| = {ortho:.2e}, |E^T N| = {cross:.2e}");
    println!("J = E R residual {:.2e}", (&f.tangent * &f.r - &f.jacobian).amax());
}
