//! The normal bundle `ν(Σ) = (S^1\S^3) x H` of the soul, in the global
//! trivialization given by the quotient map.
//!
//! The connection is stored as its difference form against the flat
//! connection. At `q₀ = [1]` it is `∇_X V = ¾ X V - ¼ V X` for
//! `X ∈ span{j, k}`, and it is carried to every other base point by the
//! isometric action `s ⋆ ([a], v) = ([a s⁻¹], s v s⁻¹)`.
//!
//! Two length conventions meet here. A tangent vector `X ∈ span{j, k}` at `q₀`
//! of quaternion norm 1 has metric length ½ on the soul, since the curve
//! `t ↦ [e^{tX}]` has speed ½. The metric-unit direction is `2X`.
//! [`BaseDirection`] always stores the quaternion-norm-1 representative.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SymmetricEigen, Vector6};
use rand::Rng;

use crate::error::{Error, Result};
use crate::quat::{apply_matrix, exp_q, linear_map_matrix, Quat};
use crate::sampling;

/// Fixed step of the classical Runge-Kutta integrator.
pub const ODE_STEP: f64 = 1e-3;

/// Allowed change of `|V|` during an integration.
pub const DRIFT_TOL: f64 = 1e-6;

/// Orientation of the coordinate square in [`r_nabla_loop_oracle`] relative
/// to the `(j, k)` coordinate order, chosen so that the oracle reproduces
/// `+R^∇(1)`.
const LOOP_SIGN: f64 = -1.0;

/// Unit tangent direction `X ∈ span{j, k}` at `q₀`, quaternion-normalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseDirection {
    x: Quat,
}

impl BaseDirection {
    /// Wraps an element of `span{j, k}`; rejects components along `1` or `i`.
    /// The norm is not checked here (see [`BaseDirection::require_unit`]).
    pub fn new(x: Quat) -> Result<Self> {
        let scale = x.norm().max(1.0);
        if x.w.abs() > 1e-12 * scale || x.x.abs() > 1e-12 * scale {
            return Err(Error::DirectionOutOfPlane);
        }
        Ok(BaseDirection { x: x.jk_part() })
    }

    /// `cos φ · j + sin φ · k`.
    pub fn from_angle(phi: f64) -> Self {
        BaseDirection { x: Quat::new(0.0, 0.0, phi.cos(), phi.sin()) }
    }

    pub fn j() -> Self {
        BaseDirection { x: Quat::J }
    }

    pub fn k() -> Self {
        BaseDirection { x: Quat::K }
    }

    pub fn quat(&self) -> Quat {
        self.x
    }

    /// Angle `φ` with `X = |X|(cos φ · j + sin φ · k)`.
    pub fn angle(&self) -> f64 {
        self.x.z.atan2(self.x.y)
    }

    /// Positively oriented complement `Y = i X`, so `{X, Y}` is oriented like `{j, k}`.
    pub fn complement(&self) -> Quat {
        Quat::I * self.x
    }

    /// The metric-unit tangent vector `2X`.
    pub fn metric_unit(&self) -> Quat {
        self.x * 2.0
    }

    /// Metric length on the soul, `|X| / 2`.
    pub fn metric_length(&self) -> f64 {
        0.5 * self.x.norm()
    }

    pub fn require_unit(&self) -> Result<Quat> {
        self.x.require_unit()
    }

    /// Isotropy element `e^{iθ}` with `Ad_{e^{iθ}} X = |X| j`.
    pub fn isotropy_to_j(&self) -> Quat {
        let theta = -0.5 * self.angle();
        Quat::new(theta.cos(), theta.sin(), 0.0, 0.0)
    }
}

/// Tangent vector to the base `S^1\S^3`: velocity `vel` of a curve through the
/// representative `rep`. Components of `vel` along the circle orbit `i·rep` are ignored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseTangent {
    pub rep: Quat,
    pub vel: Quat,
}

impl BaseTangent {
    pub fn at_q0(x: Quat) -> Self {
        BaseTangent { rep: Quat::ONE, vel: x }
    }

    /// Image under the derivative of `s ⋆`, which right-multiplies representatives by `s⁻¹`.
    pub fn push(&self, s: Quat) -> Self {
        BaseTangent { rep: self.rep * s.conj(), vel: self.vel * s.conj() }
    }
}

/// `∇_X V = ¾ X V - ¼ V X` at `q₀` for `X ∈ span{j, k}` (no unit requirement).
pub fn nabla_q0(x: Quat, v: Quat) -> Quat {
    x * v * 0.75 - v * x * 0.25
}

/// Connection difference form at the base point `s ⋆ q₀ = [s⁻¹]`, obtained by
/// pulling back to `q₀`, applying [`nabla_q0`] and pushing forward.
pub fn nabla_at(s: Quat, tangent: &BaseTangent, v: Quat) -> Result<Quat> {
    let s = s.require_unit()?;
    let phase = tangent.rep * s;
    let defect = phase.y.hypot(phase.z);
    if defect > 1e-9 {
        return Err(Error::MismatchedBasepoint { defect });
    }
    let vel = phase.conj() * tangent.vel;
    Ok(pulled_back_nabla(s, vel, v))
}

fn pulled_back_nabla(s: Quat, vel: Quat, v: Quat) -> Quat {
    let x0 = (vel * s).jk_part();
    let v0 = s.conj() * v * s;
    s * nabla_q0(x0, v0) * s.conj()
}

/// Difference form along a curve with representative `rep` and velocity `vel`.
fn connection_form(rep: Quat, vel: Quat, v: Quat) -> Quat {
    pulled_back_nabla(rep.conj(), vel, v)
}

/// Parallel transport along an arbitrary base curve `τ ↦ (rep(τ), vel(τ))`,
/// `τ ∈ [t0, t1]`, with `steps` classical Runge-Kutta steps.
pub fn transport_along<F>(curve: F, v: Quat, t0: f64, t1: f64, steps: usize) -> Quat
where
    F: Fn(f64) -> (Quat, Quat),
{
    let rhs = |tau: f64, state: Quat| {
        let (rep, vel) = curve(tau);
        -connection_form(rep, vel, state)
    };
    let h = (t1 - t0) / steps as f64;
    let mut state = v;
    for n in 0..steps {
        let tau = t0 + n as f64 * h;
        let k1 = rhs(tau, state);
        let k2 = rhs(tau + 0.5 * h, state + k1 * (0.5 * h));
        let k3 = rhs(tau + 0.5 * h, state + k2 * (0.5 * h));
        let k4 = rhs(tau + h, state + k3 * h);
        state += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    state
}

/// Closed-form parallel transport along `γ(t) = ([e^{tX}], 0)`:
/// `V(t) = e^{-¾tX} V e^{¼tX}`.
pub fn parallel_transport(dir: &BaseDirection, v: Quat, t: f64) -> Result<Quat> {
    let x = dir.require_unit()?;
    Ok(exp_q(x, -0.75 * t) * v * exp_q(x, 0.25 * t))
}

/// Parallel transport along `γ(t) = ([e^{tX}], 0)` by integrating
/// `V' = -∇_{γ'} V` with [`nabla_at`] at `s = e^{-tX}`.
pub fn parallel_transport_ode(dir: &BaseDirection, v: Quat, t: f64) -> Result<Quat> {
    let x = dir.require_unit()?;
    let steps = ((t.abs() / ODE_STEP).ceil() as usize).max(1);
    let h = t / steps as f64;
    let rhs = |tau: f64, state: Quat| -> Result<Quat> {
        let rep = exp_q(x, tau);
        let tangent = BaseTangent { rep, vel: x * rep };
        Ok(-nabla_at(rep.conj(), &tangent, state)?)
    };
    let mut state = v;
    for n in 0..steps {
        let tau = n as f64 * h;
        let k1 = rhs(tau, state)?;
        let k2 = rhs(tau + 0.5 * h, state + k1 * (0.5 * h))?;
        let k3 = rhs(tau + 0.5 * h, state + k2 * (0.5 * h))?;
        let k4 = rhs(tau + h, state + k3 * h)?;
        state += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    let drift = (state.norm() - v.norm()).abs();
    if drift > DRIFT_TOL * v.norm().max(1.0) {
        return Err(Error::StepTooLarge { drift });
    }
    Ok(state)
}

/// Curvature endomorphism at `q₀` with respect to an oriented orthonormal
/// basis of the soul: `R^∇(V) = 7/2 V i - 15/2 i V`.
pub fn r_nabla(v: Quat) -> Quat {
    v * Quat::I * 3.5 - Quat::I * v * 7.5
}

/// `R^∇` at the base point `s ⋆ q₀`, in the global trivialization.
pub fn r_nabla_at(s: Quat, v: Quat) -> Quat {
    s * r_nabla(s.conj() * v * s) * s.conj()
}

/// Covariant derivative `(D_X R^∇)(V) = 15/8 (Xi - iX) V - 21/8 V (Xi - iX)`
/// at `q₀`, linear in `X ∈ span{j, k}` (quaternion units).
pub fn dr_nabla(x: Quat, v: Quat) -> Quat {
    let c = x * Quat::I - Quat::I * x;
    c * v * (15.0 / 8.0) - v * c * (21.0 / 8.0)
}

/// Differential of `Z ↦ exp(Z)` on imaginary quaternions, applied to `e`.
fn exp_differential(z: Quat, e: Quat) -> Quat {
    let theta = z.norm();
    let ze = z.inner(e);
    // sinc(θ) and (θ cos θ - sin θ)/θ³, with series near zero
    let (sinc, g) = if theta < 1e-4 {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, -1.0 / 3.0 + t2 / 30.0)
    } else {
        let (s, c) = theta.sin_cos();
        (s / theta, (theta * c - s) / theta.powi(3))
    };
    Quat::real(-sinc * ze) + z * (g * ze) + e * sinc
}

/// Parallel transport of `v` once around a small square loop at `q₀`.
///
/// The loop is the boundary of the square of metric side `eps` centred at `q₀`
/// in the chart `(u, w) ↦ [exp(u j + w k)]`, reached from `q₀` along a
/// straight chart segment and left the same way.
fn square_loop_transport(v: Quat, eps: f64) -> Quat {
    // quaternion-norm coordinates: metric length eps is chart length 2 eps
    let half = eps;
    let corners = [(0.0, 0.0), (-half, -half), (half, -half), (half, half), (-half, half), (-half, -half), (0.0, 0.0)];
    const STEPS: usize = 64;
    let mut state = v;
    for seg in corners.windows(2) {
        let (u0, w0) = seg[0];
        let (du, dw) = (seg[1].0 - u0, seg[1].1 - w0);
        let dir = Quat::new(0.0, 0.0, du, dw);
        let curve = |tau: f64| {
            let z = Quat::new(0.0, 0.0, u0 + tau * du, w0 + tau * dw);
            (exp_q(z, 1.0), exp_differential(z, dir))
        };
        state = transport_along(curve, state, 0.0, 1.0, STEPS);
    }
    state
}

/// Holonomy matrix of the square loop of [`r_nabla_loop_oracle`].
pub fn square_loop_holonomy(eps: f64) -> Result<Matrix4<f64>> {
    if !(1e-4..=1e-1).contains(&eps) {
        return Err(Error::LoopSizeOutOfRange { eps });
    }
    Ok(linear_map_matrix(|v| square_loop_transport(v, eps)))
}

/// `R^∇(V)` estimated from the holonomy `H` of the small square loop of metric
/// side `eps` at `q₀` as `±(H V - V) / eps²`, with the sign fixed once by [`LOOP_SIGN`].
pub fn r_nabla_loop_oracle(v: Quat, eps: f64) -> Result<Quat> {
    if !(1e-4..=1e-1).contains(&eps) {
        return Err(Error::LoopSizeOutOfRange { eps });
    }
    let state = square_loop_transport(v, eps);
    let drift = (state.norm() - v.norm()).abs();
    if drift > DRIFT_TOL * v.norm().max(1.0) {
        return Err(Error::StepTooLarge { drift });
    }
    Ok((state - v) * (LOOP_SIGN / (eps * eps)))
}

/// `(D_X R^∇)(V)` for a unit direction by differentiating the transported
/// curvature `t ↦ P_t⁻¹ R^∇_{γ(t)} P_t V` at `t = 0`, with `P_t` from the
/// Runge-Kutta transport and `P_t⁻¹ = P_tᵀ`.
pub fn dr_nabla_transport_oracle(dir: &BaseDirection, v: Quat, h: f64) -> Result<Quat> {
    let x = dir.require_unit()?;
    let transported = |t: f64| -> Result<Quat> {
        let p = transport_matrix_ode(dir, t)?;
        let s = exp_q(x, -t);
        let r_at = r_nabla_at(s, apply_matrix(&p, v));
        Ok(apply_matrix(&p.transpose(), r_at))
    };
    let central = |step: f64| -> Result<Quat> { Ok((transported(step)? - transported(-step)?) * (0.5 / step)) };
    let d_h = central(h)?;
    let d_half = central(0.5 * h)?;
    Ok((d_half * 4.0 - d_h) * (1.0 / 3.0))
}

/// Matrix of the Runge-Kutta parallel transport along `γ` up to time `t`.
pub fn transport_matrix_ode(dir: &BaseDirection, t: f64) -> Result<Matrix4<f64>> {
    let mut m = Matrix4::zeros();
    for (col, e) in Quat::BASIS.iter().enumerate() {
        let img = parallel_transport_ode(dir, *e, t)?.to_array();
        for row in 0..4 {
            m[(row, col)] = img[row];
        }
    }
    Ok(m)
}

/// Matrix of the closed-form transport along `γ` up to time `t`.
pub fn transport_matrix(dir: &BaseDirection, t: f64) -> Result<Matrix4<f64>> {
    let x = dir.require_unit()?;
    let (left, right) = (exp_q(x, -0.75 * t), exp_q(x, 0.25 * t));
    Ok(linear_map_matrix(|v| left * v * right))
}

/// Composition of transports `P_{(X_n, t_n)} ∘ … ∘ P_{(X_1, t_1)}`; the first
/// pair is applied first. Loops close at `t ∈ πZ`.
pub fn holonomy_word(word: &[(BaseDirection, f64)]) -> Result<Matrix4<f64>> {
    let mut m = Matrix4::identity();
    for (dir, t) in word {
        m = transport_matrix(dir, *t)? * m;
    }
    Ok(m)
}

/// Holonomy of one traversal of the closed geodesic `t ↦ [e^{tX}]`, `t ∈ [0, π]`.
pub fn loop_holonomy(dir: &BaseDirection) -> Result<Matrix4<f64>> {
    holonomy_word(&[(*dir, PI)])
}

/// Max entrywise defect of `MᵀM = I` together with `|det M - 1|`.
pub fn so4_defect(m: &Matrix4<f64>) -> f64 {
    let orth = (m.transpose() * m - Matrix4::identity()).abs().max();
    orth.max((m.determinant() - 1.0).abs())
}

/// `log M` for `M` near the identity, by the Mercator series.
pub fn log_near_identity(m: &Matrix4<f64>) -> Matrix4<f64> {
    let e = m - Matrix4::identity();
    let mut term = e;
    let mut out = Matrix4::zeros();
    for k in 1..200 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out += term * (sign / k as f64);
        term *= e;
        if term.abs().max() < 1e-18 {
            break;
        }
    }
    out
}

fn skew_coords(m: &Matrix4<f64>) -> Vector6<f64> {
    Vector6::new(m[(0, 1)], m[(0, 2)], m[(0, 3)], m[(1, 2)], m[(1, 3)], m[(2, 3)])
}

/// Orthonormal basis of the plane `span{1, X}` fixed-setwise by the loop
/// holonomy, recovered as the `0`-eigenspace of its symmetric part.
pub fn loop_rotation_plane(holonomy: &Matrix4<f64>) -> [Quat; 2] {
    let sym = (holonomy + holonomy.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..4).collect();
    idx.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
    let col = |k: usize| {
        let c = eig.eigenvectors.column(idx[k]);
        Quat::new(c[0], c[1], c[2], c[3])
    };
    [col(0), col(1)]
}

/// Largest principal angle between two planes given by orthonormal frames.
pub fn max_principal_angle(p: &[Quat; 2], q: &[Quat; 2]) -> f64 {
    let m = nalgebra::Matrix2::new(p[0].inner(q[0]), p[0].inner(q[1]), p[1].inner(q[0]), p[1].inner(q[1]));
    let smallest = m.singular_values().min().clamp(-1.0, 1.0);
    smallest.acos()
}

/// Necessary conditions for the holonomy group to be all of `SO(4)`,
/// measured on seeded random loop words.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyEvidence {
    pub words: usize,
    /// Max of [`so4_defect`] over all sampled words.
    pub so4_defect: f64,
    /// Smallest singular value of the stacked `M - I`; positive means no common fixed vector.
    pub fixed_vector_margin: f64,
    /// Largest principal angle between the rotation planes of the `j`- and `k`-loops.
    pub plane_angle: f64,
    /// Singular values (descending) of the normalized logarithms of near-identity
    /// holonomies and their group commutators.
    pub lie_singular_values: Vec<f64>,
    pub lie_rank: usize,
}

/// Collects [`HolonomyEvidence`] from `n_words` random words of length at most
/// `max_len`, each letter a loop `(X, ±π)` with `X` uniform on the circle.
pub fn holonomy_evidence(seed: u64, n_words: usize, max_len: usize) -> Result<HolonomyEvidence> {
    let mut rng = sampling::block_rng(seed, 0);
    let mut words = Vec::with_capacity(n_words);
    for _ in 0..n_words {
        let len = rng.random_range(1..=max_len.max(1));
        let word: Vec<(BaseDirection, f64)> = (0..len)
            .map(|_| {
                let dir = sampling::base_direction(&mut rng);
                let t = if rng.random_bool(0.5) { PI } else { -PI };
                (dir, t)
            })
            .collect();
        words.push(holonomy_word(&word)?);
    }

    let so4 = words.iter().map(so4_defect).fold(0.0, f64::max);

    let mut stacked = nalgebra::DMatrix::zeros(4 * words.len(), 4);
    for (k, m) in words.iter().enumerate() {
        stacked.view_mut((4 * k, 0), (4, 4)).copy_from(&(m - Matrix4::identity()));
    }
    let fixed_vector_margin = stacked.singular_values().min();

    let plane_j = loop_rotation_plane(&loop_holonomy(&BaseDirection::j())?);
    let plane_k = loop_rotation_plane(&loop_holonomy(&BaseDirection::k())?);
    let plane_angle = max_principal_angle(&plane_j, &plane_k);

    // near-identity elements: P(φ) P(φ+δ)⁻¹, which all fix i, and a small
    // contractible square loop together with its conjugates by loop words
    let delta = 1e-2;
    let mut near = Vec::new();
    for _ in 0..8 {
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let p = loop_holonomy(&BaseDirection::from_angle(phi))?;
        let q = loop_holonomy(&BaseDirection::from_angle(phi + delta))?;
        near.push(p * q.transpose());
    }
    let square = square_loop_holonomy(1e-2)?;
    near.push(square);
    for word in words.iter().take(8) {
        near.push(word * square * word.transpose());
    }
    let so4 = near.iter().map(so4_defect).fold(so4, f64::max);
    let mut logs: Vec<Vector6<f64>> = near.iter().map(|m| skew_coords(&log_near_identity(m))).collect();
    for a in 0..near.len() {
        for b in (a + 1)..near.len() {
            let comm = near[a] * near[b] * near[a].transpose() * near[b].transpose();
            logs.push(skew_coords(&log_near_identity(&comm)));
        }
    }
    let mut lie = nalgebra::DMatrix::zeros(logs.len(), 6);
    for (row, l) in logs.iter().enumerate() {
        let n = l.norm();
        if n > 0.0 {
            lie.set_row(row, &(l / n).transpose());
        }
    }
    let mut sv: Vec<f64> = lie.singular_values().iter().copied().collect();
    sv.sort_by(|p, q| q.total_cmp(p));
    let top = sv.first().copied().unwrap_or(0.0);
    let lie_rank = sv.iter().filter(|&&s| s > 1e-6 * top).count();

    Ok(HolonomyEvidence {
        words: words.len(),
        so4_defect: so4,
        fixed_vector_margin,
        plane_angle,
        lie_singular_values: sv,
        lie_rank,
    })
}

/// How far `R^∇` at `γ(t)` fails to map the transported plane
/// `σ₁(t) = P_t span{1, X}` into `σ₂(t) = P_t span{i, Y}`: the largest
/// `σ₁(t)`-component of `R^∇(e)` over the transported basis `e` of `σ₁(t)`.
pub fn splitting_defect(dir: &BaseDirection, t: f64) -> Result<f64> {
    let x = dir.require_unit()?;
    let s = exp_q(x, -t);
    let sigma1 = [parallel_transport(dir, Quat::ONE, t)?, parallel_transport(dir, x, t)?];
    let mut worst: f64 = 0.0;
    for e in sigma1 {
        let img = r_nabla_at(s, e);
        let within = sigma1.iter().map(|f| img.inner(*f).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(within);
    }
    Ok(worst)
}
