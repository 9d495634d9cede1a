//! Verification suites behind the `soulcheck` binary.
//!
//! Every suite is deterministic in `(seed, samples, tol)`. Sample-heavy suites
//! are split into fixed blocks, each with its own ChaCha stream, so the result
//! does not depend on `--jobs`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix4};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use soulcheck_core::biquotient::{act, horizontal_at_q0, to_base, vertical_basis, GroupElement};
use soulcheck_core::normal_bundle::{
    dr_nabla, dr_nabla_transport_oracle, holonomy_evidence, parallel_transport, parallel_transport_ode, r_nabla,
    r_nabla_loop_oracle, splitting_defect,
};
use soulcheck_core::oneill::{
    a_tensor_base_q0, a_tensor_fiber_q0, a_tensor_numeric, kf_polynomial, kf_via_a, soul_sectional_curvature,
};
use soulcheck_core::quat::exp_q;
use soulcheck_core::rigidity::{
    clutching_trivial, invariant_splitting, skew_kernel, vanishing_oracle, vanishing_oracle_from,
};
use soulcheck_core::sampling::{self, block_rng};
use soulcheck_core::soul_inequality::{
    ddkf, ddkf_path_oracle, good_vector, good_vector_scan, in_assembled, in_general, in_poly, patterned_vector,
    plucker, scan_block, sos, sos_corrected, ScanSummary, K_SOUL, WITNESS_TOL,
};
use soulcheck_core::{Quat, SkewEndo, TotalPoint};

/// Samples per block for suites that run in parallel.
const BLOCK: usize = 10_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown suite `{0}` (run `soulcheck list` for the available ids)")]
    UnknownSuite(String),
    #[error("samples must be at least 1")]
    NoSamples,
    #[error("could not build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A documented inconsistency between two published formulas.
    Discrepancy,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Discrepancy => "discrepancy",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationResult {
    pub id: String,
    pub status: Status,
    pub max_error: f64,
    pub samples: u64,
    pub notes: String,
}

/// Run parameters after suite defaults have been applied.
#[derive(Clone, Copy, Debug)]
pub struct Params {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub jobs: usize,
}

/// User-facing options; `None` selects the suite default.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub seed: u64,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
}

pub struct Suite {
    pub id: &'static str,
    pub summary: &'static str,
    pub default_samples: usize,
    pub default_tol: f64,
    run: fn(&Params) -> VerificationResult,
}

pub const SUITES: &[Suite] = &[
    Suite {
        id: "kf-identity",
        summary: "fiber curvature quartic equals 3|A|^2",
        default_samples: 100_000,
        default_tol: 1e-9,
        run: kf_identity,
    },
    Suite {
        id: "a-tensor",
        summary: "finite-difference A-tensor against both closed forms at the base point",
        default_samples: 100,
        default_tol: 1e-6,
        run: a_tensor,
    },
    Suite {
        id: "soul-curv",
        summary: "soul has constant curvature 16",
        default_samples: 100,
        default_tol: 1e-8,
        run: soul_curv,
    },
    Suite {
        id: "biquotient",
        summary: "vertical rank 13 and orbit invariance of the quotient map",
        default_samples: 1_000,
        default_tol: 1e-9,
        run: biquotient,
    },
    Suite {
        id: "parallel",
        summary: "Runge-Kutta transport against the closed form, and the one-loop table",
        default_samples: 24,
        default_tol: 1e-6,
        run: parallel,
    },
    Suite {
        id: "r-nabla-loop",
        summary: "curvature endomorphism against small-loop holonomy (error in units of eps)",
        default_samples: 8,
        default_tol: 20.0,
        run: r_nabla_loop,
    },
    Suite {
        id: "dr-nabla",
        summary: "covariant derivative of the curvature against the transported difference quotient",
        default_samples: 20,
        default_tol: 1e-5,
        run: dr_nabla_suite,
    },
    Suite {
        id: "ddkf-path",
        summary: "second derivative of k^f along parallel fields",
        default_samples: 20,
        default_tol: 1e-5,
        run: ddkf_path,
    },
    Suite {
        id: "in-assembly",
        summary: "soul inequality assembled from its ingredients equals the closed quartic",
        default_samples: 100_000,
        default_tol: 1e-9,
        run: in_assembly,
    },
    Suite {
        id: "sos-residual",
        summary: "published sum-of-squares certificate minus the quartic",
        default_samples: 10_000,
        default_tol: 1e-9,
        run: sos_residual,
    },
    Suite {
        id: "nonnegativity",
        summary: "random scan of the soul inequality with zero-locus classification",
        default_samples: 1_000_000,
        default_tol: 1e-9,
        run: nonnegativity,
    },
    Suite {
        id: "good-vectors",
        summary: "grid minimization against the closed-form good-vector criterion",
        default_samples: 1_000,
        default_tol: WITNESS_TOL,
        run: good_vectors,
    },
    Suite {
        id: "holonomy",
        summary: "random loop words: SO(4), no fixed vector, moving planes, Lie rank 6",
        default_samples: 64,
        default_tol: 1e-9,
        run: holonomy,
    },
    Suite {
        id: "splitting",
        summary: "curvature maps the transported first plane into the second; soul inequality terms vanish there",
        default_samples: 32,
        default_tol: 1e-9,
        run: splitting,
    },
    Suite {
        id: "invariant-planes",
        summary: "invariant splitting of the curvature endomorphism with rates 11 and 4",
        default_samples: 1,
        default_tol: 1e-9,
        run: invariant_planes,
    },
    Suite {
        id: "clutching",
        summary: "clutching parity against lifted loops in S^3 x S^3",
        default_samples: 21,
        default_tol: 0.0,
        run: clutching,
    },
    Suite {
        id: "skew-kernel",
        summary: "kernel vectors of random odd-dimensional skew matrices",
        default_samples: 10_000,
        default_tol: 1e-10,
        run: skew_kernel_suite,
    },
    Suite {
        id: "vanishing",
        summary: "comparison solution from zero stays zero; growth check from 1e-6",
        default_samples: 16,
        default_tol: 1e-6,
        run: vanishing,
    },
];

pub fn find_suite(id: &str) -> Result<&'static Suite, CliError> {
    SUITES.iter().find(|s| s.id == id).ok_or_else(|| CliError::UnknownSuite(id.to_string()))
}

impl Suite {
    pub fn params(&self, opts: &Options) -> Result<Params, CliError> {
        let samples = opts.samples.unwrap_or(self.default_samples);
        if samples == 0 {
            return Err(CliError::NoSamples);
        }
        Ok(Params {
            seed: opts.seed,
            samples,
            tol: opts.tol.unwrap_or(self.default_tol),
            jobs: opts.jobs.unwrap_or(1).max(1),
        })
    }

    pub fn run(&self, opts: &Options) -> Result<VerificationResult, CliError> {
        let params = self.params(opts)?;
        Ok((self.run)(&params))
    }
}

pub fn verify(id: &str, opts: &Options) -> Result<VerificationResult, CliError> {
    find_suite(id)?.run(opts)
}

/// The nonnegativity scan, reported under the id `scan`.
pub fn scan(opts: &Options) -> Result<VerificationResult, CliError> {
    let mut result = find_suite("nonnegativity")?.run(opts)?;
    result.id = "scan".to_string();
    Ok(result)
}

/// Runs every suite in order. `--samples` and `--tol` are ignored here because
/// defaults differ per suite.
pub fn report(opts: &Options) -> Result<Vec<VerificationResult>, CliError> {
    let per_suite = Options { samples: None, tol: None, ..*opts };
    SUITES.iter().map(|s| s.run(&per_suite)).collect()
}

/// 0 if everything passed, 1 if anything failed, 3 if the only non-passes are discrepancies.
pub fn exit_code(results: &[VerificationResult]) -> i32 {
    if results.iter().any(|r| r.status == Status::Fail) {
        1
    } else if results.iter().any(|r| r.status == Status::Discrepancy) {
        3
    } else {
        0
    }
}

pub fn render_text(results: &[VerificationResult]) -> String {
    let mut out = String::new();
    for r in results {
        let _ = writeln!(
            out,
            "{:<17} {:<11} max_error={:.3e} samples={} {}",
            r.id,
            r.status.as_str(),
            r.max_error,
            r.samples,
            r.notes
        );
    }
    out
}

pub fn render_json(results: &[VerificationResult]) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(results)?;
    s.push('\n');
    Ok(s)
}

fn status(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn result(id: &str, pass: bool, max_error: f64, samples: usize, notes: String) -> VerificationResult {
    VerificationResult { id: id.to_string(), status: status(pass), max_error, samples: samples as u64, notes }
}

/// Stream tag so that suites sharing a seed draw independent samples.
fn stream(tag: u64, block: u64) -> u64 {
    (tag << 40) | block
}

/// Runs `f` over fixed blocks of `samples` and returns the per-block results in block order.
fn blocked<T, F>(params: &Params, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, usize) -> T + Sync,
{
    let blocks = params.samples.div_ceil(BLOCK);
    let len = |b: usize| BLOCK.min(params.samples - b * BLOCK);
    let work = || (0..blocks).into_par_iter().map(|b| f(b as u64, len(b))).collect::<Vec<T>>();
    match rayon::ThreadPoolBuilder::new().num_threads(params.jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => (0..blocks).map(|b| f(b as u64, len(b))).collect(),
    }
}

fn max_over_pairs(params: &Params, tag: u64, err: impl Fn(Quat, Quat) -> f64 + Sync) -> f64 {
    blocked(params, |b, n| {
        let mut rng = block_rng(params.seed, stream(tag, b));
        (0..n)
            .map(|_| {
                let v = sampling::quat_in_ball(&mut rng);
                let w = sampling::quat_in_ball(&mut rng);
                err(v, w)
            })
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

fn kf_identity(p: &Params) -> VerificationResult {
    let sampled = max_over_pairs(p, 1, |v, w| (kf_polynomial(v, w) - kf_via_a(v, w)).abs());
    let spots = [(Quat::ONE, Quat::I, 9.0), (Quat::ONE, Quat::J, 6.0), (Quat::J, Quat::K, 21.0)];
    let spot = spots.iter().map(|&(v, w, e)| (kf_polynomial(v, w) - e).abs()).fold(0.0, f64::max);
    let max_error = sampled.max(spot);
    result("kf-identity", max_error <= p.tol, max_error, p.samples, "k^f(1,i)=9, k^f(1,j)=6, k^f(j,k)=21".into())
}

fn a_tensor(p: &Params) -> VerificationResult {
    let mut rng = block_rng(p.seed, stream(2, 0));
    let q0 = TotalPoint::q0();
    let mut fiber_err: f64 = 0.0;
    let mut base_err: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..p.samples {
        let v = sampling::quat_in_ball(&mut rng);
        let w = sampling::quat_in_ball(&mut rng);
        match a_tensor_numeric(&q0, &horizontal_at_q0(Quat::ZERO, v), &horizontal_at_q0(Quat::ZERO, w)) {
            Ok(a) => fiber_err = fiber_err.max(a.max_abs_diff(&a_tensor_fiber_q0(v, w))),
            Err(_) => errors += 1,
        }
        let x = sampling::base_direction(&mut rng).quat() * rng.random_range(0.2..1.0);
        let y = sampling::base_direction(&mut rng).quat() * rng.random_range(0.2..1.0);
        match a_tensor_numeric(&q0, &horizontal_at_q0(x, Quat::ZERO), &horizontal_at_q0(y, Quat::ZERO)) {
            Ok(a) => base_err = base_err.max(a.max_abs_diff(&a_tensor_base_q0(x, y))),
            Err(_) => errors += 1,
        }
    }
    let max_error = fiber_err.max(base_err);
    result(
        "a-tensor",
        errors == 0 && max_error <= p.tol,
        max_error,
        p.samples,
        format!("fiber form {fiber_err:.2e}, base form {base_err:.2e}, {errors} evaluation errors"),
    )
}

fn soul_curv(p: &Params) -> VerificationResult {
    let mut rng = block_rng(p.seed, stream(3, 0));
    let mut max_error: f64 = 0.0;
    for _ in 0..p.samples {
        let dir = sampling::base_direction(&mut rng);
        let k = soul_sectional_curvature(dir.quat(), dir.complement()).unwrap_or(f64::NAN);
        max_error = max_error.max((k - K_SOUL).abs());
    }
    let pass = max_error <= p.tol;
    result("soul-curv", pass, max_error, p.samples, "value 16 over rotated orthonormal bases".into())
}

fn biquotient(p: &Params) -> VerificationResult {
    let mut rng = block_rng(p.seed, stream(4, 0));
    let mut rank_failures = 0;
    let mut max_error: f64 = 0.0;
    for n in 0..p.samples {
        let u = |rng: &mut _| sampling::unit_quat(rng);
        let v = if n % 4 == 0 { Quat::ZERO } else { sampling::quat_in_box(&mut rng, 2.0) };
        let point = TotalPoint::new(u(&mut rng), v, u(&mut rng), u(&mut rng), u(&mut rng), u(&mut rng));
        let Ok(point) = point else {
            rank_failures += 1;
            continue;
        };
        if vertical_basis(&point).is_err() {
            rank_failures += 1;
        }
        let g =
            GroupElement::new(u(&mut rng), u(&mut rng), u(&mut rng), u(&mut rng), sampling::circle_element(&mut rng));
        let moved = g.and_then(|g| act(&g, &point));
        match (to_base(&point), moved.and_then(|m| to_base(&m))) {
            (Ok((b0, v0)), Ok((b1, v1))) => {
                let base_err = (b0.hopf() - b1.hopf()).norm();
                max_error = max_error.max(base_err).max(v0.max_abs_diff(v1));
            }
            _ => rank_failures += 1,
        }
    }
    result(
        "biquotient",
        rank_failures == 0 && max_error <= p.tol,
        max_error,
        p.samples,
        format!("{rank_failures} points with vertical rank below 13; orbit invariance of the quotient map"),
    )
}

fn parallel(p: &Params) -> VerificationResult {
    let mut rng = block_rng(p.seed, stream(5, 0));
    let mut ode_err: f64 = 0.0;
    let mut errors = 0;
    for n in 0..p.samples {
        let dir = sampling::base_direction(&mut rng);
        let v = sampling::unit_quat(&mut rng);
        let t = if p.samples > 1 { -2.0 * PI + 4.0 * PI * n as f64 / (p.samples - 1) as f64 } else { PI };
        match (parallel_transport_ode(&dir, v, t), parallel_transport(&dir, v, t)) {
            (Ok(a), Ok(b)) => ode_err = ode_err.max(a.max_abs_diff(b)),
            _ => errors += 1,
        }
    }
    let mut table_err: f64 = 0.0;
    for _ in 0..p.samples {
        let dir = sampling::base_direction(&mut rng);
        let (x, y) = (dir.quat(), dir.complement());
        for (from, to) in [(Quat::ONE, -x), (x, Quat::ONE), (Quat::I, -Quat::I), (y, -y)] {
            match parallel_transport(&dir, from, PI) {
                Ok(got) => table_err = table_err.max(got.max_abs_diff(to)),
                Err(_) => errors += 1,
            }
        }
    }
    let max_error = ode_err.max(table_err);
    result(
        "parallel",
        errors == 0 && max_error <= p.tol,
        max_error,
        p.samples,
        format!(
            "|t| <= 2pi: ODE vs closed form {ode_err:.2e}; one loop 1->-X, X->1, i->-i, Y->-Y within {table_err:.1e}"
        ),
    )
}

fn r_nabla_loop(p: &Params) -> VerificationResult {
    let mut rng = block_rng(p.seed, stream(6, 0));
    let vs: Vec<Quat> =
        (0..p.samples).map(|n| if n < 4 { Quat::BASIS[n] } else { sampling::unit_quat(&mut rng) }).collect();
    let mut max_error: f64 = 0.0;
    let mut errors = 0;
    for eps in [1e-2, 1e-3] {
        for &v in &vs {
            match r_nabla_loop_oracle(v, eps) {
                Ok(est) => max_error = max_error.max(est.max_abs_diff(r_nabla(v)) / (eps * v.norm())),
                Err(_) => errors += 1,
            }
        }
    }
    result(
        "r-nabla-loop",
        errors == 0 && max_error <= p.tol,
        max_error,
        p.samples,
        "loop sizes eps = 1e-2, 1e-3; error reported as |H-R|/(eps |V|)".into(),
    )
}

fn dr_nabla_suite(p: &Params) -> VerificationResult {
    let mut rng = block_rng(p.seed, stream(7, 0));
    let mut max_error: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..p.samples {
        let dir = sampling::base_direction(&mut rng);
        let v = sampling::unit_quat(&mut rng);
        match dr_nabla_transport_oracle(&dir, v, 1e-3) {
            Ok(est) => max_error = max_error.max(est.max_abs_diff(dr_nabla(dir.quat(), v))),
            Err(_) => errors += 1,
        }
    }
    result("dr-nabla", errors == 0 && max_error <= p.tol, max_error, p.samples, "step 1e-3 with Richardson".into())
}

fn ddkf_path(p: &Params) -> VerificationResult {
    let mut rng = block_rng(p.seed, stream(8, 0));
    let mut max_error: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..p.samples {
        let dir = sampling::base_direction(&mut rng);
        let v = sampling::quat_in_ball(&mut rng);
        let w = sampling::quat_in_ball(&mut rng);
        match ddkf_path_oracle(&dir, v, w, 1e-2) {
            Ok(est) => max_error = max_error.max((est - ddkf(&dir, v, w)).abs()),
            Err(_) => errors += 1,
        }
    }
    result(
        "ddkf-path",
        errors == 0 && max_error <= p.tol,
        max_error,
        p.samples,
        "fields transported along t -> [exp(tX)] and pulled back to the base point".into(),
    )
}

fn in_assembly(p: &Params) -> VerificationResult {
    let max_error = max_over_pairs(p, 9, |v, w| (in_assembled(v, w).in_value - in_poly(v, w)).abs());
    result(
        "in-assembly",
        max_error <= p.tol,
        max_error,
        p.samples,
        "16(<RV,W>^2 + 2/3 DDk^f) - <(DR)V,W>^2 against the closed quartic".into(),
    )
}

fn sos_residual(p: &Params) -> VerificationResult {
    let residual = max_over_pairs(p, 10, |v, w| {
        let b = plucker(v, w)[1];
        (sos(v, w) - in_poly(v, w) - 28.0 * b * b).abs()
    });
    let corrected = max_over_pairs(p, 11, |v, w| (sos_corrected(v, w) - in_poly(v, w)).abs());
    let max_error = residual.max(corrected);
    let consistent = max_error <= p.tol;
    VerificationResult {
        id: "sos-residual".into(),
        status: if consistent { Status::Discrepancy } else { Status::Fail },
        max_error,
        samples: p.samples as u64,
        notes: format!(
            "published certificate exceeds the quartic by exactly 28(dz-cw)^2 (B^2 coefficient 108 should be 80); residual identity within {residual:.2e}, corrected certificate within {corrected:.2e}"
        ),
    }
}

fn nonnegativity(p: &Params) -> VerificationResult {
    let summary =
        blocked(p, |b, n| scan_block(p.seed, b, n, 1e-10)).into_iter().fold(ScanSummary::default(), ScanSummary::merge);
    let pass = summary.min_value >= -p.tol && summary.unexplained.is_empty();
    let mut notes = format!(
        "min IN = {:.3e}; {} near-zero hits: {} dependent, {} degenerate, {} sigma1, {} sigma2, {} UNEXPLAINED",
        summary.min_value,
        summary.near_zero(),
        summary.dependent,
        summary.degenerate,
        summary.sigma1,
        summary.sigma2,
        summary.unexplained.len()
    );
    for hit in summary.unexplained.iter().take(5) {
        let _ = write!(notes, "; UNEXPLAINED X angle {:.6} V {} W {} IN {:.3e}", hit.angle, hit.v, hit.w, hit.value);
    }
    VerificationResult {
        id: "nonnegativity".into(),
        status: status(pass),
        max_error: (-summary.min_value).max(0.0),
        samples: summary.samples as u64,
        notes,
    }
}

fn good_vectors(p: &Params) -> VerificationResult {
    struct Tally {
        disagreements: usize,
        bad_witness: usize,
        worst_witness: f64,
        min_good: f64,
    }
    let tallies = blocked(p, |b, n| {
        let mut rng = block_rng(p.seed, stream(13, b));
        let mut t = Tally { disagreements: 0, bad_witness: 0, worst_witness: 0.0, min_good: f64::INFINITY };
        for k in 0..n {
            let pattern = ((b as usize * BLOCK + k) % 16) as u8;
            let v = patterned_vector(&mut rng, pattern);
            match (good_vector(v), good_vector_scan(v, 16)) {
                (Err(_), Err(_)) => {}
                (Ok(closed), Ok(scan)) => {
                    if closed != scan.good {
                        t.disagreements += 1;
                    }
                    if scan.good {
                        t.min_good = t.min_good.min(scan.min_value);
                    } else {
                        let (x, w) = scan.witness;
                        let value = in_general(&x, v / v.norm(), w);
                        t.worst_witness = t.worst_witness.max(value);
                        if value > p.tol {
                            t.bad_witness += 1;
                        }
                    }
                }
                _ => t.disagreements += 1,
            }
        }
        t
    });
    let disagreements: usize = tallies.iter().map(|t| t.disagreements).sum();
    let bad_witness: usize = tallies.iter().map(|t| t.bad_witness).sum();
    let worst = tallies.iter().map(|t| t.worst_witness).fold(0.0, f64::max);
    let min_good = tallies.iter().map(|t| t.min_good).fold(f64::INFINITY, f64::min);
    result(
        "good-vectors",
        disagreements == 0 && bad_witness == 0,
        worst,
        p.samples,
        format!(
            "{disagreements} disagreements with the closed-form criterion, {bad_witness} witnesses above tolerance; smallest minimum over good vectors {min_good:.3e}"
        ),
    )
}

fn holonomy(p: &Params) -> VerificationResult {
    match holonomy_evidence(p.seed, p.samples, 8) {
        Ok(e) => result(
            "holonomy",
            e.so4_defect <= p.tol && e.fixed_vector_margin > 1e-3 && e.plane_angle > 0.1 && e.lie_rank == 6,
            e.so4_defect,
            e.words,
            format!(
                "fixed-vector margin {:.3}, plane angle between j- and k-loops {:.3} rad, Lie rank {}",
                e.fixed_vector_margin, e.plane_angle, e.lie_rank
            ),
        ),
        Err(err) => result("holonomy", false, f64::INFINITY, p.samples, format!("error: {err}")),
    }
}

fn splitting(p: &Params) -> VerificationResult {
    let mut rng = block_rng(p.seed, stream(14, 0));
    let mut max_error: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..p.samples {
        let dir = sampling::base_direction(&mut rng);
        let x = dir.quat();
        for n in 0..=31 {
            let t = (0.1 * n as f64).min(PI);
            match splitting_defect(&dir, t) {
                Ok(d) => max_error = max_error.max(d),
                Err(_) => errors += 1,
            }
            // parallel fields in either plane, pulled back to the base point
            let pull = |q: Quat| exp_q(x, 0.25 * t) * q * exp_q(x, -0.75 * t);
            let c: [f64; 4] = [rng.random(), rng.random(), rng.random(), rng.random()];
            for (e1, e2) in [(Quat::ONE, x), (Quat::I, dir.complement())] {
                let v = pull(e1 * c[0] + e2 * c[1]);
                let w = pull(e1 * c[2] + e2 * c[3]);
                max_error = max_error.max(ddkf(&dir, v, w).abs()).max(in_general(&dir, v, w).abs());
            }
        }
    }
    result(
        "splitting",
        errors == 0 && max_error <= p.tol,
        max_error,
        p.samples,
        "t in {0, 0.1, ..., pi}; curvature defect, DDk^f and IN on the transported planes".into(),
    )
}

fn invariant_planes(p: &Params) -> VerificationResult {
    let r = match SkewEndo::from_quat_map(r_nabla) {
        Ok(r) => r,
        Err(err) => return result("invariant-planes", false, f64::INFINITY, 1, format!("error: {err}")),
    };
    match invariant_splitting(&r) {
        Ok(s) => {
            let full = Matrix4::from_iterator(r.matrix().iter().copied());
            let recon = (s.reconstruct() - full).amax();
            let rates = (s.f1.abs() - 11.0).abs().max((s.f2.abs() - 4.0).abs());
            let max_error = recon.max(rates);
            result(
                "invariant-planes",
                max_error <= p.tol,
                max_error,
                1,
                format!(
                    "F1 = {:.9}, F2 = {:.9} (frames oriented so F <= 0); planes span{{j,k}} and span{{1,i}}",
                    s.f1, s.f2
                ),
            )
        }
        Err(err) => result("invariant-planes", false, f64::INFINITY, 1, format!("error: {err}")),
    }
}

/// Whether the continuous lift of `θ ↦ rot(k1 θ) ⊕ rot(k2 θ)` to `S^3 x S^3` closes.
/// With `v ↦ p v q̄`, the lift is `p = e^{i(k1+k2)θ/2}`, `q = e^{i(k1-k2)θ/2}`.
fn lift_closes(k1: i64, k2: i64) -> bool {
    let half = |k: i64| Quat::new((k as f64 * PI).cos(), (k as f64 * PI).sin(), 0.0, 0.0);
    half(k1 + k2).approx_eq(Quat::ONE, 1e-9) && half(k1 - k2).approx_eq(Quat::ONE, 1e-9)
}

fn clutching(p: &Params) -> VerificationResult {
    let range = (p.samples / 2) as i64;
    let mut mismatches = 0;
    let mut count = 0;
    for k1 in -range..=range {
        for k2 in -range..=range {
            count += 1;
            if clutching_trivial(k1, k2) != lift_closes(k1, k2) {
                mismatches += 1;
            }
        }
    }
    result("clutching", mismatches == 0, mismatches as f64, count, format!("|k| <= {range}; trivial iff k1 = k2 mod 2"))
}

fn skew_kernel_suite(p: &Params) -> VerificationResult {
    let worst = blocked(p, |b, n| {
        let mut rng = block_rng(p.seed, stream(15, b));
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let dim = [3, 5, 7, 9][k % 4];
            let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
            let m = &a - a.transpose();
            let err = match SkewEndo::new(m.clone()).and_then(|s| Ok((skew_kernel(&s)?, s.norm()))) {
                Ok((x, norm)) => ((&m * &x).norm() / norm).max((x.norm() - 1.0).abs()),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(err);
        }
        worst
    })
    .into_iter()
    .fold(0.0, f64::max);
    result("skew-kernel", worst <= p.tol, worst, p.samples, "dimensions 3, 5, 7, 9; residual |RX| / |R|".into())
}

fn vanishing(p: &Params) -> VerificationResult {
    let mut rng = block_rng(p.seed, stream(16, 0));
    let mut sup: f64 = 0.0;
    let mut growth_err: f64 = 0.0;
    for _ in 0..p.samples {
        let k: f64 = rng.random_range(0.0..100.0);
        let t: f64 = rng.random_range(0.1..10.0 * PI);
        sup = sup.max(vanishing_oracle(k, t));
    }
    let t = PI;
    let grown = vanishing_oracle_from(1e-6, 16.0, t);
    let exact = 1e-6 * (4.0 * t).exp();
    growth_err = growth_err.max((grown - exact).abs() / exact);
    result(
        "vanishing",
        sup == 0.0 && growth_err <= p.tol,
        sup.max(growth_err),
        p.samples,
        format!("supremum from f(0)=0 is {sup}; relative growth error from 1e-6 is {growth_err:.2e}"),
    )
}
