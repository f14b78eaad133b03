//! Sampling and orchestration of every requested check into a [`Report`].

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::extrinsic::{gauss_weingarten_check, mixed_tg_residual, second_fundamental_form, ExtrinsicError, ExtrinsicPack};
use crate::geometry::{frames, GeometryError, Immersion};
use crate::manifest::{Check, ManifestError, Problem, SamplingSection};
use crate::operators::{classify, decompose, t2_spectrum, BlockLabel, DistributionSplit, OperatorError};
use crate::report::{BlockSummary, Classification, IdentityEntry, InequalityRow, Report, SampleInfo, Timings};
use crate::tol::{Tolerances, FD_STEP_REL};
use crate::warped::{
    chen_inequality, check_eq3, check_metric_split, integrability_check, lemma_suite, warped_lemma_suite, IdentityValue,
    LocalGeometry, Mutation, WarpedError, WarpedSpec,
};

/// Upper bound on the number of grid points.
pub const GRID_CAP: usize = 243;
pub const DEFAULT_GRID: usize = 3;

/// Bad input: exit code 2.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Extrinsic(#[from] ExtrinsicError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Warped(WarpedError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Verify,
    Inequality,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Verify => "verify",
            Command::Inequality => "inequality",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Replaces the manifest's random sample count.
    pub random: Option<usize>,
    /// Replaces the manifest's seed.
    pub seed: Option<u64>,
    /// Multiplier on every pass threshold.
    pub tol_scale: f64,
    pub mutation: Option<Mutation>,
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { random: None, seed: None, tol_scale: 1.0, mutation: None, timings: false }
    }
}

/// Largest k ≤ `want` with k^d ≤ [`GRID_CAP`], at least 1.
pub fn grid_per_axis(d: usize, want: usize) -> usize {
    let mut k = want.max(1);
    while k > 1 && (k as f64).powi(d as i32) > GRID_CAP as f64 {
        k -= 1;
    }
    k
}

/// Cell-centred grid points followed by seeded uniform points in the inner
/// 90% of the box.
pub fn sample_points(domain: &[(f64, f64)], sampling: &SamplingSection, random: usize, seed: u64) -> (Vec<Vec<f64>>, SampleInfo) {
    let d = domain.len();
    let k = grid_per_axis(d, sampling.grid.unwrap_or(DEFAULT_GRID));
    let count = k.pow(d as u32);
    let mut pts = Vec::with_capacity(count + random);
    for mut idx in 0..count {
        let mut p = vec![0.0; d];
        for (i, &(a, b)) in domain.iter().enumerate().rev() {
            let j = idx % k;
            idx /= k;
            p[i] = a + (b - a) * (j as f64 + 0.5) / k as f64;
        }
        pts.push(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        pts.push(domain.iter().map(|&(a, b)| a + (b - a) * (0.05 + 0.9 * rng.gen::<f64>())).collect());
    }
    let info = SampleInfo { grid_per_axis: k, grid_points: count, random, total: pts.len() };
    (pts, info)
}

#[derive(Default)]
struct Worst {
    residual: f64,
    at: usize,
    seen: usize,
}

impl Worst {
    fn push(&mut self, r: f64, k: usize) {
        if self.seen == 0 || r > self.residual || r.is_nan() {
            self.residual = r;
            self.at = k;
        }
        self.seen += 1;
    }
}

struct Builder<'a> {
    samples: &'a [Vec<f64>],
    entries: Vec<IdentityEntry>,
}

impl Builder<'_> {
    fn measured(&mut self, id: &str, check: Check, w: &Worst, tolerance: f64) {
        self.entries.push(IdentityEntry {
            id: id.into(),
            check: check_name(check).into(),
            residual: Some(w.residual),
            worst_point: Some(self.samples[w.at].clone()),
            tolerance,
            pass: w.residual <= tolerance,
            samples: w.seen,
            note: None,
        });
    }

    fn skipped(&mut self, id: &str, check: Check, tolerance: f64, pass: bool, note: impl Into<String>) {
        self.entries.push(IdentityEntry {
            id: id.into(),
            check: check_name(check).into(),
            residual: None,
            worst_point: None,
            tolerance,
            pass,
            samples: 0,
            note: Some(note.into()),
        });
    }

    fn note_last(&mut self, note: impl Into<String>) {
        if let Some(e) = self.entries.last_mut() {
            e.note = Some(note.into());
        }
    }
}

fn check_name(c: Check) -> &'static str {
    match c {
        Check::Classify => "classify",
        Check::Identities => "identities",
        Check::Warped => "warped",
        Check::Inequality => "inequality",
        Check::Integrability => "integrability",
    }
}

fn summarize(split: &DistributionSplit) -> Classification {
    let mut slant_no = 0;
    let n_slant = split.order_k;
    let blocks = split
        .blocks
        .iter()
        .map(|b| {
            let label = if b.label == BlockLabel::Slant && n_slant > 1 {
                slant_no += 1;
                format!("slant-{slant_no}")
            } else {
                b.label.to_string()
            };
            BlockSummary {
                label,
                dim: b.dim,
                lambda: b.lambda,
                cos_theta: b.cos_theta(),
                theta_deg: b.theta().to_degrees(),
                spread: b.spread,
            }
        })
        .collect();
    Classification {
        dims: split.dims(),
        blocks,
        order: split.order_k,
        proper: split.proper,
        proper_order_one: split.is_proper_order_one(),
        special_case: split.special_case.code().into(),
        special_case_name: split.special_case.name().into(),
    }
}

fn accumulate(acc: &mut BTreeMap<&'static str, Worst>, order: &mut Vec<&'static str>, vals: Vec<(&'static str, Option<IdentityValue>)>, k: usize) {
    for (id, v) in vals {
        if !order.contains(&id) {
            order.push(id);
        }
        if let Some(v) = v {
            acc.entry(id).or_default().push(v.residual, k);
        }
    }
}

fn warped_error(e: WarpedError) -> RunError {
    match e {
        WarpedError::Geometry(g) => RunError::Geometry(g),
        WarpedError::Extrinsic(x) => RunError::Extrinsic(x),
        WarpedError::Operator(o) => RunError::Operator(o),
        other => RunError::Warped(other),
    }
}

/// Frame gradient of ln f at every sample.
fn log_warp_gradients(imm: &Immersion, spec: &WarpedSpec, lgs: &[LocalGeometry], samples: &[Vec<f64>]) -> Result<Vec<DVector<f64>>, RunError> {
    lgs.iter()
        .zip(samples)
        .map(|(lg, p)| Ok(lg.frame_gradient(&spec.log_warp(imm, p).map_err(warped_error)?.1)))
        .collect()
}

const NOT_PROPER: &str = "needs a proper skew semi-invariant submanifold of order 1";

pub fn run(problem: &Problem, command: Command, opts: &RunOptions) -> Result<Report, RunError> {
    let start = Instant::now();
    let imm = &problem.immersion;
    let m = &problem.manifest;
    let wants = |c: Check| match command {
        Command::Classify => c == Check::Classify,
        Command::Inequality => matches!(c, Check::Classify | Check::Inequality),
        Command::Verify => c == Check::Classify || problem.wants(c),
    };
    if command == Command::Inequality && problem.warped.is_none() {
        return Err(RunError::Usage("the inequality needs a `warped` section in the manifest".into()));
    }
    if !(opts.tol_scale.is_finite() && opts.tol_scale > 0.0) {
        return Err(RunError::Usage(format!("tolerance multiplier must be positive, got {}", opts.tol_scale)));
    }
    let base_tol = problem.tolerances();
    let tol: Tolerances = base_tol.scaled(opts.tol_scale);
    let seed = opts.seed.unwrap_or(m.sampling.seed);
    let (samples, sampling) = sample_points(imm.domain(), &m.sampling, opts.random.unwrap_or(m.sampling.random), seed);

    let mut b = Builder { samples: &samples, entries: Vec::new() };
    let mut warnings = Vec::new();
    let mut errors = Vec::new();
    let mut inequality = Vec::new();

    // pointwise algebra
    let mut framesv = Vec::with_capacity(samples.len());
    let mut spectra = Vec::with_capacity(samples.len());
    let mut eq13 = [Worst::default(), Worst::default(), Worst::default(), Worst::default()];
    for (k, p) in samples.iter().enumerate() {
        let fr = frames(imm, p)?;
        let ops = decompose(&fr, imm.ambient());
        for (w, r) in eq13.iter_mut().zip(ops.eq13_residuals()) {
            w.push(r, k);
        }
        spectra.push(t2_spectrum(&ops, tol.cluster)?);
        framesv.push(fr);
    }
    if wants(Check::Identities) {
        for (w, id) in eq13.iter().zip(["eq13a", "eq13b", "eq13c", "eq13d"]) {
            b.measured(id, Check::Identities, w, tol.eq13);
        }
    }

    let split = match classify(&spectra, tol.cluster, tol.constancy) {
        Ok(s) => Some(s),
        Err(e @ OperatorError::TooFewPoints(_)) => return Err(e.into()),
        Err(e) => {
            errors.push(format!("classification: {e}"));
            None
        }
    };
    let classification = split.as_ref().map(summarize);
    let proper1 = split.as_ref().is_some_and(|s| s.is_proper_order_one());

    let needs_local = split.is_some()
        && (wants(Check::Warped) || wants(Check::Inequality) || wants(Check::Integrability) || (wants(Check::Identities) && proper1));
    let mut local: Option<Vec<LocalGeometry>> = None;
    if needs_local {
        let mut v = Vec::with_capacity(samples.len());
        for p in &samples {
            match LocalGeometry::at(imm, p, tol.cluster) {
                Ok(lg) => v.push(lg),
                Err(e @ WarpedError::MultiplicityDrift { .. }) => {
                    errors.push(e.to_string());
                    break;
                }
                Err(e) => return Err(warped_error(e)),
            }
        }
        if v.len() == samples.len() {
            local = Some(v);
        }
    }

    if wants(Check::Identities) {
        let steps = imm.fd_steps(FD_STEP_REL);
        let mut gw = Worst::default();
        let mut sym = Worst::default();
        for (k, fr) in framesv.iter().enumerate() {
            let own;
            let ext: &ExtrinsicPack = match &local {
                Some(lgs) => &lgs[k].ext,
                None => {
                    own = second_fundamental_form(imm, fr, &steps)?;
                    &own
                }
            };
            gw.push(gauss_weingarten_check(ext), k);
            sym.push(ext.symmetry_residual(), k);
        }
        b.measured("gauss-weingarten", Check::Identities, &gw, tol.algebraic);
        b.measured("h-symmetry", Check::Identities, &sym, tol.algebraic);

        match (&local, proper1) {
            (Some(lgs), true) => {
                let mut acc = BTreeMap::new();
                let mut order = Vec::new();
                for (k, lg) in lgs.iter().enumerate() {
                    accumulate(&mut acc, &mut order, lemma_suite(lg, opts.mutation), k);
                }
                for id in order {
                    match acc.get(id) {
                        Some(w) => b.measured(id, Check::Identities, w, tol.fd),
                        None => b.skipped(id, Check::Identities, tol.fd, true, "no admissible frame fields"),
                    }
                }
            }
            _ => {
                let note = if split.is_none() { "classification failed" } else { NOT_PROPER };
                for id in crate::warped::LEMMA_IDS {
                    b.skipped(id, Check::Identities, tol.fd, split.is_some(), note);
                }
            }
        }
    }

    let dsigma = match (&problem.warped, &local) {
        (Some(spec), Some(lgs)) if wants(Check::Warped) || wants(Check::Inequality) => {
            Some(log_warp_gradients(imm, spec, lgs, &samples)?)
        }
        _ => None,
    };

    if wants(Check::Warped) {
        let spec = problem.warped.as_ref().expect("manifest validation requires a warped section");
        match &split {
            Some(split) => match check_metric_split(imm, spec, split, &samples, tol.cluster) {
                Ok(ms) => {
                    let base = Worst { residual: ms.base, at: ms.base_point, seen: samples.len() };
                    let fiber = Worst { residual: ms.fiber, at: ms.fiber_point, seen: samples.len() };
                    b.measured("metric-split-base", Check::Warped, &base, tol.metric_split);
                    b.measured("metric-split-fiber", Check::Warped, &fiber, tol.metric_split);
                }
                Err(e @ (WarpedError::PartitionMismatch(_) | WarpedError::MultiplicityDrift { .. })) => {
                    b.skipped("metric-split-base", Check::Warped, tol.metric_split, false, e.to_string());
                    b.skipped("metric-split-fiber", Check::Warped, tol.metric_split, false, e.to_string());
                }
                Err(e) => return Err(warped_error(e)),
            },
            None => {
                b.skipped("metric-split-base", Check::Warped, tol.metric_split, false, "classification failed");
                b.skipped("metric-split-fiber", Check::Warped, tol.metric_split, false, "classification failed");
            }
        }
        let (r, at) = check_eq3(imm, spec, &samples).map_err(warped_error)?;
        b.measured("eq3", Check::Warped, &Worst { residual: r, at, seen: samples.len() }, tol.eq3);

        match (&local, &dsigma, proper1) {
            (Some(lgs), Some(ds), true) => {
                let mut acc = BTreeMap::new();
                let mut order = Vec::new();
                let mut mixed = Worst::default();
                for (k, lg) in lgs.iter().enumerate() {
                    accumulate(&mut acc, &mut order, warped_lemma_suite(lg, &ds[k], opts.mutation), k);
                    if let (Some(ks), Some(kt)) = (lg.block(BlockLabel::Slant), lg.block(BlockLabel::Invariant)) {
                        mixed.push(mixed_tg_residual(&lg.ext, &lg.split, ks, kt), k);
                    }
                }
                for id in order {
                    match acc.get(id) {
                        Some(w) => b.measured(id, Check::Warped, w, tol.algebraic),
                        None => b.skipped(id, Check::Warped, tol.algebraic, true, "no admissible frame fields"),
                    }
                }
                if mixed.seen > 0 && mixed.residual > tol.mixed {
                    let msg = format!(
                        "D^theta and D^T are not mixed totally geodesic (|h| = {:e} at {:?}); eq24/eq25 are evaluated outside their hypothesis",
                        mixed.residual, samples[mixed.at]
                    );
                    for id in ["eq24", "eq25"] {
                        if let Some(e) = b.entries.iter_mut().find(|e| e.id == id) {
                            e.note = Some("mixed totally geodesic hypothesis fails".into());
                        }
                    }
                    warnings.push(msg);
                }
            }
            _ => {
                let note = if split.is_none() || local.is_none() { "classification failed" } else { NOT_PROPER };
                for id in crate::warped::WARPED_IDS {
                    b.skipped(id, Check::Warped, tol.algebraic, split.is_some(), note);
                }
            }
        }
    }

    if wants(Check::Inequality) {
        match (&local, &dsigma, proper1) {
            (Some(lgs), Some(ds), true) => {
                let mut margin = Worst::default();
                let mut base = Worst::default();
                let mut mixed = Worst::default();
                let mut leaf: Option<(f64, usize)> = None;
                for (k, lg) in lgs.iter().enumerate() {
                    let row = chen_inequality(lg, &ds[k], base_tol.eq).map_err(warped_error)?;
                    margin.push((-row.margin).max(0.0), k);
                    if let Some(eq) = &row.equality {
                        base.push(eq.base_h * eq.base_h, k);
                        mixed.push(eq.mixed_h * eq.mixed_h, k);
                        if leaf.is_none_or(|(h, _)| eq.leaf_mean_curvature < h) {
                            leaf = Some((eq.leaf_mean_curvature, k));
                        }
                    }
                    inequality.push(InequalityRow {
                        point: samples[k].clone(),
                        lhs: row.lhs,
                        rhs: row.rhs,
                        margin: row.margin,
                        equality: row.equality,
                    });
                }
                b.measured("eq34-margin", Check::Inequality, &margin, tol.num);
                b.note_last("largest shortfall of |h|^2 below the bound");
                if base.seen > 0 {
                    b.measured("eq41", Check::Inequality, &base, tol.eq);
                    b.note_last(format!("|h|^2 on D^perp + D^theta at {} equality points", base.seen));
                    b.measured("eq42", Check::Inequality, &mixed, tol.eq);
                    b.note_last(format!("|h|^2 on mixed pairs with D^T at {} equality points", mixed.seen));
                    let (h, at) = leaf.expect("set with the equality rows");
                    b.entries.push(IdentityEntry {
                        id: "leaf-mean-curvature".into(),
                        check: check_name(Check::Inequality).into(),
                        residual: Some(h),
                        worst_point: Some(samples[at].clone()),
                        tolerance: tol.num,
                        pass: h > tol.num,
                        samples: base.seen,
                        note: Some("smallest |H_T| at equality points; must be positive".into()),
                    });
                } else {
                    for id in ["eq41", "eq42"] {
                        b.skipped(id, Check::Inequality, tol.eq, true, "equality not attained");
                    }
                    b.skipped("leaf-mean-curvature", Check::Inequality, tol.num, true, "equality not attained");
                }
            }
            _ => {
                let note = if split.is_none() || local.is_none() { "classification failed" } else { NOT_PROPER };
                for id in ["eq34-margin", "eq41", "eq42", "leaf-mean-curvature"] {
                    b.skipped(id, Check::Inequality, tol.num, false, note);
                }
            }
        }
    }

    if wants(Check::Integrability) {
        if let (Some(lgs), Some(cl)) = (&local, &classification) {
            for (k, blk) in cl.blocks.iter().enumerate() {
                if blk.dim < 2 {
                    continue;
                }
                let mut w = Worst::default();
                for (i, lg) in lgs.iter().enumerate() {
                    w.push(integrability_check(lg, k), i);
                }
                b.measured(&format!("integrability-{}", blk.label), Check::Integrability, &w, tol.integrability);
            }
        }
    }

    let entries = b.entries;
    let pass = errors.is_empty() && entries.iter().all(|e| e.pass);
    Ok(Report {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        manifest: m.name.clone(),
        seed,
        tol_scale: opts.tol_scale,
        sampling,
        classification,
        entries,
        inequality,
        warnings,
        errors,
        pass,
        exit_code: if pass { 0 } else { 1 },
        timings: opts.timings.then(|| Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 }),
    })
}
