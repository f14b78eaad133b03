//! Bundled manifests and small parametric families used by the examples and tests.

use crate::geometry::Immersion;
use crate::manifest::{Manifest, Problem};
use crate::warped::WarpedSpec;

/// Name and JSON text of every bundled manifest.
pub const BUNDLED: &[(&str, &str)] = &[
    ("example43", include_str!("../manifests/example43.json")),
    ("wrong_warp", include_str!("../manifests/wrong_warp.json")),
    ("multiply_warped", include_str!("../manifests/multiply_warped.json")),
    ("warp_xz", include_str!("../manifests/warp_xz.json")),
    ("sphere_cone", include_str!("../manifests/sphere_cone.json")),
    ("sphere_cone_equal", include_str!("../manifests/sphere_cone_equal.json")),
    ("torus_cone", include_str!("../manifests/torus_cone.json")),
    ("torus_cone_small", include_str!("../manifests/torus_cone_small.json")),
    ("rotation_cone", include_str!("../manifests/rotation_cone.json")),
    ("rotation_slant", include_str!("../manifests/rotation_slant.json")),
    ("rotation_slant_flipped", include_str!("../manifests/rotation_slant_flipped.json")),
    ("rotation_orbit", include_str!("../manifests/rotation_orbit.json")),
    ("graph_varying_slant", include_str!("../manifests/graph_varying_slant.json")),
];

/// Loads a bundled manifest by name. Panics on an unknown name.
pub fn bundled(name: &str) -> Problem {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no bundled manifest `{name}`"));
    Manifest::from_json(text)
        .and_then(Manifest::build)
        .unwrap_or_else(|e| panic!("bundled manifest `{name}`: {e}"))
}

/// The 5-dimensional warped product in ℝ¹⁰ with f = x.
pub fn example43() -> Immersion {
    bundled("example43").immersion
}

/// Sphere of radius `r` in the first three coordinates of ℝ⁴ with signs (+,+,+,−).
pub fn round_sphere(r: f64) -> Immersion {
    let r = format!("{r:?}");
    Immersion::parse(
        &["th", "ph"],
        &[
            &format!("{r}*sin(th)*cos(ph)"),
            &format!("{r}*sin(th)*sin(ph)"),
            &format!("{r}*cos(th)"),
            "0",
        ],
        &[(0.3, 2.8), (0.0, std::f64::consts::TAU)],
        &[1, 1, 1, -1],
    )
    .expect("sphere is a valid immersion")
}

/// Coefficient of y in the minus factor giving y the same slant as x.
fn matching_e(a: f64, b: f64, c: f64) -> f64 {
    let t = (2.0 * a * a - c * c) / (2.0 * a * a + c * c + 2.0);
    (2.0 * b * b * (1.0 - t) / (1.0 + t)).sqrt()
}

/// A family through the 10-dimensional example:
/// `(a x + b y, a x − b y, x cos u, x sin u, z, −z, c x, e y, x cos v, x sin v)`
/// with `e` chosen so that x and y share one slant angle. Warping function x.
///
/// The two fiber circles sit in opposite factors, so F restricted to the
/// invariant distribution has zero trace.
pub fn balanced_warped(a: f64, b: f64, c: f64) -> (Immersion, WarpedSpec) {
    let e = matching_e(a, b, c);
    let comps = [
        format!("{a:?}*x+{b:?}*y"),
        format!("{a:?}*x-{b:?}*y"),
        "x*cos(u)".into(),
        "x*sin(u)".into(),
        "z".into(),
        "-z".into(),
        format!("{c:?}*x"),
        format!("{e:?}*y"),
        "x*cos(v)".into(),
        "x*sin(v)".into(),
    ];
    let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
    let tau = std::f64::consts::TAU;
    let imm = Immersion::parse(
        &["x", "y", "z", "u", "v"],
        &refs,
        &[(0.5, 2.0), (-1.0, 1.0), (-1.0, 1.0), (0.0, tau), (0.0, tau)],
        &[1, 1, 1, 1, 1, -1, -1, -1, -1, -1],
    )
    .expect("family member is a valid immersion");
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let spec = WarpedSpec::new(&imm, &names(&["x", "y", "z"]), &names(&["u", "v"]), "x").expect("valid split");
    (imm, spec)
}

/// cos²θ of [`balanced_warped`].
pub fn balanced_lambda(a: f64, c: f64) -> f64 {
    let t = (2.0 * a * a - c * c) / (2.0 * a * a + c * c + 2.0);
    t * t
}
