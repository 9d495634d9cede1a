//! The soul inequality at `q₀` and its zero locus.
//!
//! With `V = a + b i + c j + d k` and `W = x + y i + z j + w k`, the quantity
//!
//! `IN(2X, V, W) = 16 (⟨R^∇ V, W⟩² + ⅔ D_{2X}D_{2X} k^f(W, V)) - ⟨(D_{2X} R^∇) V, W⟩²`
//!
//! is a quartic form which is a quadratic form in the Plücker coordinates of
//! `V ∧ W`. Everything here is stated for the metric-unit direction `2X`.

use nalgebra::{Matrix3, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::normal_bundle::{dr_nabla, parallel_transport_ode, r_nabla, BaseDirection};
use crate::oneill::kf_polynomial;
use crate::quat::{exp_q, Quat};
use crate::sampling;

/// Constant sectional curvature of the soul.
pub const K_SOUL: f64 = 16.0;

/// Threshold of the closed-form good-vector classifier.
pub const TOL_GOOD: f64 = 1e-12;

/// A scan verdict of "not good" needs a witness at or below this value.
pub const WITNESS_TOL: f64 = 1e-6;

/// Plane angle within which a zero is attributed to one of the invariant planes.
pub const ZERO_LOCUS_ANGLE: f64 = 1e-5;

/// The pieces of `IN` computed from independent ingredients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InequalityReport {
    /// `⟨(D_{2X} R^∇) V, W⟩²`.
    pub lhs: f64,
    /// `16 (⟨R^∇ V, W⟩² + ⅔ D_{2X}D_{2X} k^f)`.
    pub rhs: f64,
    /// `rhs - lhs`.
    pub in_value: f64,
    /// `⟨R^∇ V, W⟩`.
    pub r_term: f64,
    /// `D_{2X}D_{2X} k^f(W, V)`.
    pub ddk_term: f64,
    /// `⟨(D_{2X} R^∇) V, W⟩`.
    pub d_term: f64,
}

/// `D_{2j}D_{2j} k^f(W, V)` at `q₀`.
#[rustfmt::skip]
fn ddkf_j(v: Quat, w: Quat) -> f64 {
    let (a, b, c, d) = (v.w, v.x, v.y, v.z);
    let (x, y, z, w) = (w.w, w.x, w.y, w.z);
    -48.0*b*x*a*y + 156.0*d*z*c*w - 12.0*d*x*a*w - 96.0*c*y*b*z
        + 24.0*a*a*y*y - 78.0*d*d*z*z
        - 78.0*c*c*w*w + 6.0*d*d*x*x + 48.0*c*c*y*y + 48.0*b*b*z*z
        + 6.0*a*a*w*w + 24.0*b*b*x*x
}

/// `D_{2X}D_{2X} k^f(W, V)` at `q₀` for a quaternion-unit `X ∈ span{j, k}`.
pub fn ddkf(dir: &BaseDirection, v: Quat, w: Quat) -> f64 {
    let s = dir.isotropy_to_j();
    ddkf_j(rotate(s, v), rotate(s, w))
}

/// `D_{2X}D_{2X} k^f(W, V)` as the second derivative of `k^f` along parallel
/// fields, pulled back to `q₀` by the isometric action.
///
/// The fields are transported by the Runge-Kutta integrator along
/// `t ↦ [e^{tX}]`, which has speed ½, so `t = 2τ` for arclength `τ`. The
/// derivative is a central difference with step `h` and `h/2`, Richardson-extrapolated.
pub fn ddkf_path_oracle(dir: &BaseDirection, v: Quat, w: Quat, h: f64) -> Result<f64> {
    let x = dir.require_unit()?;
    let f = |tau: f64| -> Result<f64> {
        let t = 2.0 * tau;
        let s = exp_q(x, t);
        let pull = |q: Quat| s * q * s.conj();
        let vt = pull(parallel_transport_ode(dir, v, t)?);
        let wt = pull(parallel_transport_ode(dir, w, t)?);
        Ok(kf_polynomial(vt, wt))
    };
    let f0 = f(0.0)?;
    let second = |step: f64| -> Result<f64> { Ok((f(step)? - 2.0 * f0 + f(-step)?) / (step * step)) };
    let d_h = second(h)?;
    let d_half = second(0.5 * h)?;
    Ok((4.0 * d_half - d_h) / 3.0)
}

/// `IN(2j, V, W)` as a closed quartic.
#[rustfmt::skip]
pub fn in_poly(v: Quat, w: Quat) -> f64 {
    let (a, b, c, d) = (v.w, v.x, v.y, v.z);
    let (x, y, z, w) = (w.w, w.x, w.y, w.z);
    188.0*b*b*z*z + 55.0*d*d*x*x + 512.0*b*b*x*x + 512.0*a*a*y*y + 1104.0*d*d*z*z
        + 1104.0*c*c*w*w + 55.0*a*a*w*w + 188.0*c*c*y*y
        + 1300.0*b*x*d*z - 1408.0*b*x*c*w - 1408.0*a*y*d*z + 1300.0*a*y*c*w - 2208.0*d*z*c*w
        - 1024.0*b*x*a*y - 376.0*c*y*b*z + 108.0*c*y*d*x + 108.0*a*w*b*z - 110.0*a*w*d*x
}

/// `IN(2j, V, W)` assembled from `R^∇`, `D R^∇`, `D D k^f` and `K_SOUL`.
pub fn in_assembled(v: Quat, w: Quat) -> InequalityReport {
    let r_term = r_nabla(v).inner(w);
    let ddk_term = ddkf_j(v, w);
    let d_term = dr_nabla(Quat::J * 2.0, v).inner(w);
    let lhs = d_term * d_term;
    let rhs = K_SOUL * (r_term * r_term + 2.0 / 3.0 * ddk_term);
    InequalityReport { lhs, rhs, in_value: rhs - lhs, r_term, ddk_term, d_term }
}

/// The four Plücker-type coordinates `(A, B, C, D)` of `V ∧ W` that enter the certificate.
pub fn plucker(v: Quat, w: Quat) -> [f64; 4] {
    let (a, b, c, d) = (v.w, v.x, v.y, v.z);
    let (x, y, z, w) = (w.w, w.x, w.y, w.z);
    [b * x - a * y, d * z - c * w, b * z - c * y, d * x - a * w]
}

fn certificate(v: Quat, w: Quat, b_coeff: f64) -> f64 {
    let [a, b, c, d] = plucker(v, w);
    107.0 * c * c
        + 19.0 * d * d
        + (9.0 * c - 6.0 * d).powi(2)
        + 28.0 * a * a
        + b_coeff * b * b
        + (22.0 * a + 32.0 * b).powi(2)
}

/// The published sum-of-squares certificate. It exceeds [`in_poly`] by
/// exactly `28 (dz - cw)²`.
pub fn sos(v: Quat, w: Quat) -> f64 {
    certificate(v, w, 108.0)
}

/// The certificate with the `B²` coefficient `80`, which equals [`in_poly`].
pub fn sos_corrected(v: Quat, w: Quat) -> f64 {
    certificate(v, w, 80.0)
}

/// `IN(2X, V, W)` for a quaternion-unit `X ∈ span{j, k}`, reduced to `X = j`
/// by the isotropy rotation `Ad_{e^{iθ}}`.
pub fn in_general(dir: &BaseDirection, v: Quat, w: Quat) -> f64 {
    let s = dir.isotropy_to_j();
    in_poly(rotate(s, v), rotate(s, w))
}

/// [`in_general`] for an arbitrary element of `span{j, k}`, normalized first.
pub fn in_general_quat(x: Quat, v: Quat, w: Quat) -> Result<f64> {
    let dir = BaseDirection::new(x)?;
    if dir.quat().norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(in_general(&BaseDirection::from_angle(dir.angle()), v, w))
}

fn rotate(s: Quat, q: Quat) -> Quat {
    s * q * s.conj()
}

/// A normal vector is good iff it is perpendicular to neither `1` nor `i`.
pub fn good_vector(v: Quat) -> Result<bool> {
    if v.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.w.abs() > TOL_GOOD && v.x.abs() > TOL_GOOD)
}

/// Where a zero of `IN(2X, V, W)` comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ZeroClass {
    /// `V` or `W` vanishes.
    Degenerate,
    /// `V` and `W` are linearly dependent.
    Dependent,
    /// `span{V, W} = span{1, X}`.
    Sigma1,
    /// `span{V, W} = span{i, Y}`.
    Sigma2,
    Unexplained,
}

impl ZeroClass {
    pub fn label(self) -> &'static str {
        match self {
            ZeroClass::Degenerate => "degenerate",
            ZeroClass::Dependent => "dependent",
            ZeroClass::Sigma1 => "sigma1",
            ZeroClass::Sigma2 => "sigma2",
            ZeroClass::Unexplained => "UNEXPLAINED",
        }
    }
}

/// Orthonormal frame of `span{v, w}`, or `None` if they are dependent within `tol` (sine of angle).
fn plane_frame(v: Quat, w: Quat, tol: f64) -> Option<[Quat; 2]> {
    let e1 = v / v.norm();
    let w_perp = w - e1 * e1.inner(w);
    if w_perp.norm() <= tol * w.norm() {
        return None;
    }
    Some([e1, w_perp / w_perp.norm()])
}

fn plane_angle(p: &[Quat; 2], q: &[Quat; 2]) -> f64 {
    // the largest principal angle; the sine of it is the norm of the residual of the projection
    let mut worst: f64 = 0.0;
    for e in p {
        let proj = q[0] * q[0].inner(*e) + q[1] * q[1].inner(*e);
        worst = worst.max((*e - proj).norm());
    }
    worst.min(1.0).asin()
}

/// Attributes a zero of `IN(2X, V, W)` to the known zero locus.
pub fn classify_zero(dir: &BaseDirection, v: Quat, w: Quat) -> ZeroClass {
    if v.norm() == 0.0 || w.norm() == 0.0 {
        return ZeroClass::Degenerate;
    }
    let Some(frame) = plane_frame(v, w, ZERO_LOCUS_ANGLE) else {
        return ZeroClass::Dependent;
    };
    let x = dir.quat() / dir.quat().norm();
    let sigma1 = [Quat::ONE, x];
    let sigma2 = [Quat::I, Quat::I * x];
    if plane_angle(&frame, &sigma1) <= ZERO_LOCUS_ANGLE {
        ZeroClass::Sigma1
    } else if plane_angle(&frame, &sigma2) <= ZERO_LOCUS_ANGLE {
        ZeroClass::Sigma2
    } else {
        ZeroClass::Unexplained
    }
}

/// A sample below the near-zero threshold of a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroHit {
    pub angle: f64,
    pub v: Quat,
    pub w: Quat,
    pub value: f64,
    pub class: ZeroClass,
}

/// Outcome of a nonnegativity scan over a block of samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanSummary {
    pub samples: usize,
    pub min_value: f64,
    pub degenerate: usize,
    pub dependent: usize,
    pub sigma1: usize,
    pub sigma2: usize,
    /// Hits that match no part of the known zero locus.
    pub unexplained: Vec<ZeroHit>,
}

impl Default for ScanSummary {
    fn default() -> Self {
        ScanSummary {
            samples: 0,
            min_value: f64::INFINITY,
            degenerate: 0,
            dependent: 0,
            sigma1: 0,
            sigma2: 0,
            unexplained: Vec::new(),
        }
    }
}

impl ScanSummary {
    pub fn record(&mut self, dir: &BaseDirection, v: Quat, w: Quat, zero_tol: f64) {
        let value = in_general(dir, v, w);
        self.samples += 1;
        self.min_value = self.min_value.min(value);
        if value >= zero_tol {
            return;
        }
        match classify_zero(dir, v, w) {
            ZeroClass::Degenerate => self.degenerate += 1,
            ZeroClass::Dependent => self.dependent += 1,
            ZeroClass::Sigma1 => self.sigma1 += 1,
            ZeroClass::Sigma2 => self.sigma2 += 1,
            ZeroClass::Unexplained => {
                self.unexplained.push(ZeroHit { angle: dir.angle(), v, w, value, class: ZeroClass::Unexplained })
            }
        }
    }

    pub fn merge(mut self, other: ScanSummary) -> ScanSummary {
        self.samples += other.samples;
        self.min_value = self.min_value.min(other.min_value);
        self.degenerate += other.degenerate;
        self.dependent += other.dependent;
        self.sigma1 += other.sigma1;
        self.sigma2 += other.sigma2;
        self.unexplained.extend(other.unexplained);
        self
    }

    pub fn near_zero(&self) -> usize {
        self.degenerate + self.dependent + self.sigma1 + self.sigma2 + self.unexplained.len()
    }
}

/// Directed samples on the zero locus, included in block 0 of every scan.
pub fn directed_samples() -> Vec<(BaseDirection, Quat, Quat)> {
    let j = BaseDirection::j();
    let k = BaseDirection::k();
    vec![
        (j, Quat::ONE, Quat::J),
        (j, Quat::I, Quat::K),
        (j, Quat::new(0.3, 0.0, -0.7, 0.0), Quat::new(0.3, 0.0, -0.7, 0.0) * 2.0),
        (k, Quat::ONE, Quat::K),
        (k, Quat::I, Quat::J),
        (j, Quat::ZERO, Quat::I),
    ]
}

/// Scans `len` random triples `(X, V, W)` with `X` uniform on the unit circle of
/// `span{j, k}` and `V, W` uniform in the unit ball. Deterministic in `(seed, block)`.
pub fn scan_block(seed: u64, block: u64, len: usize, zero_tol: f64) -> ScanSummary {
    let mut rng = sampling::block_rng(seed, block);
    let mut summary = ScanSummary::default();
    if block == 0 {
        for (dir, v, w) in directed_samples() {
            summary.record(&dir, v, w, zero_tol);
        }
    }
    for _ in 0..len {
        let dir = sampling::base_direction(&mut rng);
        let v = sampling::quat_in_ball(&mut rng);
        let w = sampling::quat_in_ball(&mut rng);
        summary.record(&dir, v, w, zero_tol);
    }
    summary
}

/// Result of [`good_vector_scan`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodScan {
    pub good: bool,
    /// Smallest value of `IN(2X, V̂, W)` found, over unit `X` and unit `W ⊥ V̂`.
    pub min_value: f64,
    /// Minimizer `(X, W)`; a witness when `good` is false.
    pub witness: (BaseDirection, Quat),
}

/// Orthonormal basis of the orthogonal complement of the unit vector `v` in `H`.
fn complement_basis(v: Quat) -> [Quat; 3] {
    let mut out = Vec::with_capacity(3);
    for e in Quat::BASIS {
        let mut u = e - v * v.inner(e);
        for f in &out {
            let f: &Quat = f;
            u = u - *f * f.inner(u);
        }
        if u.norm() > 1e-6 {
            out.push(u / u.norm());
        }
        if out.len() == 3 {
            break;
        }
    }
    [out[0], out[1], out[2]]
}

/// Decides goodness of `V` from the definition: minimizes `IN(2X, V̂, W)` over
/// `X` on a grid of `n_grid` angles in `[0, π)` and `W` on an
/// `n_grid × n_grid` spherical grid of the unit sphere of `V̂^⊥`, then refines
/// the angles of the best grid points by a shrinking pattern search.
///
/// During refinement `W` is minimized exactly: for fixed `V̂` and `X`, `IN` is a
/// quadratic form in `W`, so the minimum over unit `W ⊥ V̂` is the smallest
/// eigenvalue of its `3 x 3` Gram matrix on `V̂^⊥`.
pub fn good_vector_scan(v: Quat, n_grid: usize) -> Result<GoodScan> {
    if v.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    if n_grid < 16 {
        return Err(Error::GridTooCoarse { n_grid });
    }
    let v = v / v.norm();
    let basis = complement_basis(v);
    let w_of = |c: [f64; 3]| -> Quat {
        let q = basis[0] * c[0] + basis[1] * c[1] + basis[2] * c[2];
        q / q.norm()
    };

    let pi = std::f64::consts::PI;
    let mut grid: Vec<(f64, f64)> = Vec::with_capacity(n_grid);
    for ia in 0..n_grid {
        let phi = pi * ia as f64 / n_grid as f64;
        let dir = BaseDirection::from_angle(phi);
        let mut best = f64::INFINITY;
        for it in 0..n_grid {
            let theta = pi * (it as f64 + 0.5) / n_grid as f64;
            for ip in 0..n_grid {
                let psi = 2.0 * pi * ip as f64 / n_grid as f64;
                let w = w_of([theta.sin() * psi.cos(), theta.sin() * psi.sin(), theta.cos()]);
                best = best.min(in_general(&dir, v, w));
            }
        }
        grid.push((best, phi));
    }
    grid.sort_by(|l, r| l.0.total_cmp(&r.0));

    let exact_w = |phi: f64| -> (f64, Quat) {
        let dir = BaseDirection::from_angle(phi);
        let f = |w: Quat| in_general(&dir, v, w);
        let mut gram = Matrix3::zeros();
        for r in 0..3 {
            gram[(r, r)] = f(basis[r]);
        }
        for r in 0..3 {
            for c in (r + 1)..3 {
                let off = 0.5 * (f(basis[r] + basis[c]) - gram[(r, r)] - gram[(c, c)]);
                gram[(r, c)] = off;
                gram[(c, r)] = off;
            }
        }
        let eig = SymmetricEigen::new(gram);
        let (idx, value) =
            eig.eigenvalues.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).expect("three eigenvalues");
        let e = eig.eigenvectors.column(idx);
        (value, w_of([e[0], e[1], e[2]]))
    };

    let mut best = (f64::INFINITY, 0.0);
    for &(_, start) in grid.iter().take(4) {
        let refined = pattern_search_1d(&|phi| exact_w(phi).0, start, pi / n_grid as f64);
        if refined.0 < best.0 {
            best = refined;
        }
    }
    let (min_value, w) = exact_w(best.1);
    Ok(GoodScan { good: min_value > WITNESS_TOL, min_value, witness: (BaseDirection::from_angle(best.1), w) })
}

fn pattern_search_1d<F>(f: &F, start: f64, step: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x = start;
    let mut fx = f(x);
    let mut step = step;
    while step > 1e-12 {
        let (lo, hi) = (f(x - step), f(x + step));
        if lo < fx && lo <= hi {
            x -= step;
            fx = lo;
        } else if hi < fx {
            x += step;
            fx = hi;
        } else {
            step *= 0.5;
        }
    }
    (fx, x)
}

/// Random vector whose zero/nonzero pattern of components is `pattern`
/// (bit `n` set means component `n` is nonzero), with nonzero magnitudes in `[0.25, 1]`.
pub fn patterned_vector<R: Rng + ?Sized>(rng: &mut R, pattern: u8) -> Quat {
    let mut c = [0.0; 4];
    for (n, slot) in c.iter_mut().enumerate() {
        if pattern & (1 << n) != 0 {
            let m: f64 = rng.random_range(0.25..=1.0);
            *slot = if rng.random_bool(0.5) { m } else { -m };
        }
    }
    Quat::from_array(c)
}
