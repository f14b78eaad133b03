//! One line per acceptance criterion. Exits nonzero when a criterion fails
//! for a reason not listed in `KNOWN`.

use std::panic;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skewprod::corpus::{corpus, param_names, random_expr};
use skewprod::expr::{eval, eval_jet, parse_str, Bindings, ExprNode};
use skewprod::extrinsic::{gauss_weingarten_check, second_fundamental_form};
use skewprod::fixtures;
use skewprod::geometry::{frames, induced_metric};
use skewprod::manifest::Problem;
use skewprod::operators::decompose;
use skewprod::report::Report;
use skewprod::run::{run, sample_points, Command, RunOptions};
use skewprod::tol::FD_STEP_REL;
use skewprod::warped::Mutation;

struct Outcome {
    pass: bool,
    detail: String,
    /// Set when the failure is the documented identity conflict.
    known: bool,
}

fn ok(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, known: false }
}

fn verify(p: &Problem, opts: &RunOptions) -> Report {
    run(p, Command::Verify, opts).expect("bundled manifest runs")
}

fn residual(r: &Report, id: &str) -> f64 {
    r.entry(id).and_then(|e| e.residual).unwrap_or(f64::NAN)
}

fn samples(p: &Problem) -> Vec<Vec<f64>> {
    let s = &p.manifest.sampling;
    sample_points(p.immersion.domain(), s, s.random, s.seed).0
}

fn c1() -> Outcome {
    let p = fixtures::bundled("example43");
    let start = Instant::now();
    let r = verify(&p, &RunOptions::default());
    let secs = start.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    for q in samples(&p) {
        let x = q[0];
        let want = DMatrix::from_diagonal(&DVector::from_vec(vec![5.0, 10.0 / 3.0, 2.0, x * x, x * x]));
        worst = worst.max((induced_metric(&p.immersion, &q).unwrap() - want).amax());
    }
    let c = r.classification.as_ref().unwrap();
    let cos = c.blocks.iter().find(|b| b.label == "slant").map_or(f64::NAN, |b| b.cos_theta);
    let pass = secs < 5.0 && worst < 1e-10 && c.dims == [1, 2, 2] && c.order == 1 && c.proper && (cos - 0.2).abs() < 1e-9;
    ok(pass, format!("{secs:.2}s, metric {worst:.1e}, dims {:?}, order {}, proper {}, cos(theta) {cos:.9}", c.dims, c.order, c.proper))
}

fn c2() -> Outcome {
    let p = fixtures::bundled("example43");
    let mut worst = 0.0f64;
    for q in samples(&p) {
        let ops = decompose(&frames(&p.immersion, &q).unwrap(), p.immersion.ambient());
        worst = worst.max(ops.eq13_residuals().into_iter().fold(0.0, f64::max));
    }
    let example = worst;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for imm in corpus(2024, 200) {
        for _ in 0..5 {
            let q: Vec<f64> = imm.domain().iter().map(|&(a, b)| rng.gen_range(a..b)).collect();
            let ops = decompose(&frames(&imm, &q).unwrap(), imm.ambient());
            worst = worst.max(ops.eq13_residuals().into_iter().fold(0.0, f64::max));
        }
    }
    ok(worst < 1e-10, format!("example {example:.1e}, example + corpus of 200 {worst:.1e}"))
}

fn c3() -> Outcome {
    let (mut gw, mut sym) = (0.0f64, 0.0f64);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for imm in corpus(2024, 200) {
        for _ in 0..3 {
            let q: Vec<f64> = imm.domain().iter().map(|&(a, b)| rng.gen_range(a..b)).collect();
            let f = frames(&imm, &q).unwrap();
            let e = second_fundamental_form(&imm, &f, &imm.fd_steps(FD_STEP_REL)).unwrap();
            gw = gw.max(gauss_weingarten_check(&e));
            sym = sym.max(e.symmetry_residual());
        }
    }
    let mut h_err = 0.0f64;
    for r in [0.5, 1.0, 2.0] {
        let imm = fixtures::round_sphere(r);
        let f = frames(&imm, &[1.0, 0.5]).unwrap();
        let e = second_fundamental_form(&imm, &f, &imm.fd_steps(FD_STEP_REL)).unwrap();
        h_err = h_err.max((e.mean_norm() - 1.0 / r).abs());
    }
    ok(gw < 1e-9 && sym < 1e-9 && h_err < 1e-6, format!("gauss/weingarten {gw:.1e}, symmetry {sym:.1e}, sphere |H| - 1/r {h_err:.1e}"))
}

const KNOWN: &str = "eq33 as stated omits -Z(ln f) g(X,FY), which is nonzero here; eq33-corrected holds";

fn c4() -> Outcome {
    let p = fixtures::bundled("example43");
    let r = verify(&p, &RunOptions::default());
    let ids = ["eq14", "eq15", "eq16", "eq17", "eq18", "eq19", "eq20", "eq21", "eq22", "eq30", "eq31", "eq32", "eq33"];
    let over: Vec<(&str, f64)> = ids.iter().map(|id| (*id, residual(&r, id))).filter(|(_, v)| !(*v < 1e-4)).collect();

    let fixture = |m: Mutation| match m {
        Mutation::Eq14WFromSlant => "rotation_slant",
        Mutation::Eq15SwapNtzNz | Mutation::Eq20SwapNtzNz => "rotation_slant_flipped",
        Mutation::Eq16DropFOnX
        | Mutation::Eq17XFromAntiInvariant
        | Mutation::Eq19DropFOnY
        | Mutation::Eq21SecToCsc
        | Mutation::Eq22TzToZ => "rotation_cone",
        Mutation::Eq18CscToSec | Mutation::Eq31VFromInvariant | Mutation::Eq33TzToZ => "example43",
        Mutation::Eq30VFromInvariant | Mutation::Eq32DropFOnY => "warp_xz",
    };
    let mut weakest = f64::INFINITY;
    for m in Mutation::ALL {
        let opts = RunOptions { random: Some(4), mutation: Some(m), ..RunOptions::default() };
        let mr = verify(&fixtures::bundled(fixture(m)), &opts);
        let id = *m.targets().last().unwrap();
        weakest = weakest.min(residual(&mr, id));
    }
    let detected = weakest > 1e-2;
    let corrected = residual(&r, "eq33-corrected");
    let detail = format!(
        "over 1e-4: {over:?}, eq33-corrected {corrected:.1e}, weakest of 13 mutations {weakest:.2e}"
    );
    let known = detected && over.len() == 1 && over[0].0 == "eq33" && corrected < 1e-9;
    Outcome { pass: over.is_empty() && detected, detail, known }
}

fn c5() -> Outcome {
    let r = verify(&fixtures::bundled("example43"), &RunOptions::default());
    let w = verify(&fixtures::bundled("wrong_warp"), &RunOptions::default());
    let (base, fiber, eq3) = (residual(&r, "metric-split-base"), residual(&r, "metric-split-fiber"), residual(&r, "eq3"));
    let wrong = residual(&w, "metric-split-fiber").min(residual(&w, "eq3"));
    ok(
        base < 1e-10 && fiber < 1e-10 && eq3 < 1e-5 && wrong > 1e-2,
        format!("metric split {base:.1e}/{fiber:.1e}, connection {eq3:.1e}, wrong warp {wrong:.2e}"),
    )
}

fn c6() -> Outcome {
    let r = verify(&fixtures::bundled("example43"), &RunOptions::default());
    let mut rhs_err = 0.0f64;
    let mut margin = f64::INFINITY;
    let mut spurious = 0;
    for row in &r.inequality {
        let x = row.point[0];
        rhs_err = rhs_err.max((row.rhs - 1.0 / (60.0 * x * x)).abs());
        margin = margin.min(row.margin);
        spurious += (row.equality.is_some() != (row.margin < 1e-6)) as usize;
    }
    let e = run(&fixtures::bundled("sphere_cone_equal"), Command::Inequality, &RunOptions::default()).unwrap();
    let eq_ok = ["eq41", "eq42", "leaf-mean-curvature"].iter().all(|id| e.entry(id).is_some_and(|x| x.pass && x.residual.is_some()))
        && e.inequality.iter().all(|row| row.equality.is_some());
    ok(
        rhs_err < 1e-8 && margin >= -1e-9 && spurious == 0 && eq_ok && !r.inequality.is_empty(),
        format!("rhs - 1/(60x^2) {rhs_err:.1e}, min margin {margin:.3e}, equality case on the equality fixture {eq_ok}"),
    )
}

fn c7() -> Outcome {
    let r = verify(&fixtures::bundled("example43"), &RunOptions::default());
    let o = verify(&fixtures::bundled("rotation_orbit"), &RunOptions::default());
    let (inv, contact) = (residual(&r, "integrability-invariant"), residual(&o, "integrability-anti-invariant"));
    ok(inv < 1e-5 && contact > 1e-1, format!("invariant leaf {inv:.1e}, contact fixture {contact:.3}"))
}

fn c8() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-5 + 1e-5 * a.abs().max(b.abs());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..1000 {
        let d = rng.gen_range(1..=4);
        let names = param_names(d);
        let e: ExprNode = random_expr(&mut rng, &names, 6);
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let j = eval_jet(&e, &Bindings::new(&names, &p)).unwrap();
        let f = |q: &[f64]| eval(&e, &Bindings::new(&names, q)).unwrap();
        for i in 0..d {
            let c = |h: f64| {
                let (mut a, mut b) = (p.clone(), p.clone());
                a[i] += h;
                b[i] -= h;
                (f(&a) - f(&b)) / (2.0 * h)
            };
            let fd = (4.0 * c(5e-4) - c(1e-3)) / 3.0;
            bad += !close(j.grad[i], fd) as usize;
        }
    }
    let malformed = ["x $ y", "x++y", "(x", "x+", "sin(x,y)", "x^1.5", "foo(x)", "x y", "", ")", "1e", "x^99999999999"];
    let structured = malformed.iter().filter(|s| matches!(panic::catch_unwind(|| parse_str(s)), Ok(Err(_)))).count();
    ok(bad == 0 && structured == malformed.len(), format!("{bad} gradient mismatches in 1000 expressions, {structured}/{} malformed inputs rejected", malformed.len()))
}

fn c9() -> Outcome {
    let p = fixtures::bundled("example43");
    let a = verify(&p, &RunOptions::default()).to_json_without_timings();
    let b = verify(&p, &RunOptions::default()).to_json_without_timings();
    ok(a == b, format!("{} bytes, identical {}", a.len(), a == b))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("example golden run", c1),
        ("operator identities", c2),
        ("extrinsic compatibility", c3),
        ("connection identities and mutations", c4),
        ("warped structure", c5),
        ("gradient inequality", c6),
        ("integrability", c7),
        ("parser and derivatives", c8),
        ("determinism", c9),
    ];
    let mut unexpected = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {tag} {name}: {}", i + 1, o.detail);
        if !o.pass {
            if o.known {
                println!("    known: {KNOWN}");
            } else {
                unexpected += 1;
            }
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
