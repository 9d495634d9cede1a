//! Linear-algebra and calculus tools behind the rigidity arguments: the
//! invariant splitting of a skew endomorphism of `R^4`, proportionality of
//! rotation rates, a comparison integrator, clutching parity and kernels of
//! odd-dimensional skew matrices.

use nalgebra::{DMatrix, DVector, Matrix4, Schur, Vector4};

use crate::error::{Error, Result};
use crate::quat::{linear_map_matrix, Quat};

/// Tolerance of the skew-symmetry check, relative to `max(1, ‖M‖)`.
pub const SKEW_TOL: f64 = 1e-12;

/// Rates closer than this are treated as coincident.
pub const RATE_TOL: f64 = 1e-9;

/// Relative tolerance of [`lambda_ratio`].
pub const RATIO_TOL: f64 = 1e-6;

/// A skew-symmetric endomorphism of `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewEndo(DMatrix<f64>);

impl SkewEndo {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        let defect = (&m + m.transpose()).amax();
        if defect > SKEW_TOL * m.amax().max(1.0) {
            return Err(Error::NotSkew { defect });
        }
        Ok(SkewEndo(m))
    }

    /// Matrix of a linear map of `H` in the basis `(1, i, j, k)`.
    pub fn from_quat_map(f: impl Fn(Quat) -> Quat) -> Result<Self> {
        let m = linear_map_matrix(f);
        Self::new(DMatrix::from_iterator(4, 4, m.iter().copied()))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Operator norm.
    pub fn norm(&self) -> f64 {
        self.0.singular_values().max()
    }
}

/// Two orthogonal invariant planes with oriented frames `(V_i, W_i)` and
/// rates `F_i = ⟨R V_i, W_i⟩`, so that `R V_i = F_i W_i` and `R W_i = -F_i V_i`.
///
/// Each frame is oriented so that `F_i ≤ 0`; planes are ordered by `|F_1| ≥ |F_2|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitResult {
    pub plane1: [Vector4<f64>; 2],
    pub plane2: [Vector4<f64>; 2],
    pub f1: f64,
    pub f2: f64,
}

impl SplitResult {
    /// `Σ F_i (W_i V_iᵀ - V_i W_iᵀ)`.
    pub fn reconstruct(&self) -> Matrix4<f64> {
        let gen = |p: &[Vector4<f64>; 2]| p[1] * p[0].transpose() - p[0] * p[1].transpose();
        gen(&self.plane1) * self.f1 + gen(&self.plane2) * self.f2
    }

    pub fn plane1_quats(&self) -> [Quat; 2] {
        self.plane1.map(to_quat)
    }

    pub fn plane2_quats(&self) -> [Quat; 2] {
        self.plane2.map(to_quat)
    }
}

fn to_quat(v: Vector4<f64>) -> Quat {
    Quat::new(v[0], v[1], v[2], v[3])
}

/// Splits `R^4` into two orthogonal `R`-invariant planes using the real Schur
/// form of `R`, which is block diagonal for a skew matrix.
pub fn invariant_splitting(r: &SkewEndo) -> Result<SplitResult> {
    if r.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: r.dim() });
    }
    let m = Matrix4::from_iterator(r.matrix().iter().copied());
    let scale = m.amax();
    if scale < 1e-12 {
        return Err(Error::ZeroEndomorphism);
    }
    let (q, t) = Schur::new(m).unpack();
    let tol = 1e-10 * scale;
    let (first, second) = if t[(1, 0)].abs() > tol {
        ([0, 1], [2, 3])
    } else if t[(2, 1)].abs() > tol {
        ([1, 2], [0, 3])
    } else {
        ([2, 3], [0, 1])
    };
    let frame = |idx: [usize; 2]| -> ([Vector4<f64>; 2], f64) {
        let p: Vector4<f64> = q.column(idx[0]).into();
        let w: Vector4<f64> = q.column(idx[1]).into();
        let rate = (m * p).dot(&w);
        if rate > 0.0 {
            ([w, p], -rate)
        } else {
            ([p, w], rate)
        }
    };
    let (mut plane1, mut f1) = frame(first);
    let (mut plane2, mut f2) = frame(second);
    if f2.abs() > f1.abs() {
        std::mem::swap(&mut plane1, &mut plane2);
        std::mem::swap(&mut f1, &mut f2);
    }
    if (f1.abs() - f2.abs()).abs() <= RATE_TOL * scale.max(1.0) {
        return Err(Error::NonUnique { rate1: f1, rate2: f2 });
    }
    Ok(SplitResult { plane1, plane2, f1, f2 })
}

/// The constant `λ` with `F1 = λ F2` at every sample.
pub fn lambda_ratio(f1: &[f64], f2: &[f64]) -> Result<f64> {
    if f1.len() != f2.len() {
        return Err(Error::LengthMismatch { left: f1.len(), right: f2.len() });
    }
    if f1.is_empty() {
        return Err(Error::EmptySamples);
    }
    if let Some(index) = f2.iter().position(|v| v.abs() < 1e-12) {
        return Err(Error::FlatBundle { index });
    }
    let ratios: Vec<f64> = f1.iter().zip(f2).map(|(a, b)| a / b).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max_deviation = ratios.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
    if max_deviation > RATIO_TOL * mean.abs().max(1.0) {
        return Err(Error::NotProportional { max_deviation });
    }
    Ok(mean)
}

/// Supremum over `[0, T]` of the solution of `f' = |f| √k_max`, `f(0) = 0`,
/// which dominates every `f` with `f'² ≤ f² k` and `f(0) = 0`.
pub fn vanishing_oracle(k_max: f64, t_end: f64) -> f64 {
    vanishing_oracle_from(0.0, k_max, t_end)
}

/// As [`vanishing_oracle`] with initial value `f0`; classical Runge-Kutta with step at most `1e-3`.
pub fn vanishing_oracle_from(f0: f64, k_max: f64, t_end: f64) -> f64 {
    let rate = k_max.max(0.0).sqrt();
    let rhs = |f: f64| f.abs() * rate;
    let steps = ((t_end / 1e-3).ceil() as usize).max(1);
    let h = t_end / steps as f64;
    let mut f = f0;
    let mut sup = f.abs();
    for _ in 0..steps {
        let k1 = rhs(f);
        let k2 = rhs(f + 0.5 * h * k1);
        let k3 = rhs(f + 0.5 * h * k2);
        let k4 = rhs(f + h * k3);
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        sup = sup.max(f.abs());
    }
    sup
}

/// A bundle glued by the clutching pair `(k1, k2)` is trivial iff `k1 ≡ k2 (mod 2)`.
pub fn clutching_trivial(k1: i64, k2: i64) -> bool {
    (k1 - k2).rem_euclid(2) == 0
}

/// Unit vector in the kernel of a skew endomorphism of odd dimension.
/// Returns the first basis vector for the zero matrix.
pub fn skew_kernel(r: &SkewEndo) -> Result<DVector<f64>> {
    let n = r.dim();
    if n.is_multiple_of(2) {
        return Err(Error::EvenDimension { n });
    }
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    if r.matrix().amax() == 0.0 {
        return Ok(e1);
    }
    let svd = r.matrix().clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (idx, _) = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty");
    let x: DVector<f64> = v_t.row(idx).transpose();
    Ok(x.normalize())
}
