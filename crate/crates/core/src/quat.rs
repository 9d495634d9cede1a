//! Real quaternions `w + x i + y j + z k`.
//!
//! Everything here is plain `f64` value arithmetic. The inner product is the
//! real one, `<p, q> = Re(p conj(q))`, under which `{1, i, j, k}` is
//! orthonormal and `S^3` is the unit sphere.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use nalgebra::Matrix4;

use crate::error::{Error, Result};

/// Tolerance on `| |s| - 1 |` accepted by operations that require a unit quaternion.
pub const UNIT_TOL: f64 = 1e-9;

/// Drift of `|q|^2` from 1 beyond which composite results are renormalized.
pub const RENORM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Default)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Purely imaginary quaternion `x i + y j + z k`, an element of `sp(1)`.
#[derive(Clone, Copy, PartialEq, Default, Debug)]
pub struct ImQuat {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quat = Quat::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quat = Quat::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quat = Quat::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quat = Quat::new(0.0, 0.0, 0.0, 1.0);

    /// Basis `(1, i, j, k)` in the coefficient order used by matrices in this crate.
    pub const BASIS: [Quat; 4] = [Quat::ONE, Quat::I, Quat::J, Quat::K];

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quat::new(w, 0.0, 0.0, 0.0)
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Quat::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn re(self) -> f64 {
        self.w
    }

    pub fn im(self) -> ImQuat {
        ImQuat::new(self.x, self.y, self.z)
    }

    /// The imaginary part kept as a quaternion.
    pub fn im_part(self) -> Quat {
        Quat::new(0.0, self.x, self.y, self.z)
    }

    pub fn inner(self, other: Quat) -> f64 {
        inner(self, other)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse; the zero quaternion maps to non-finite values.
    pub fn inverse(self) -> Self {
        self.conj() / self.norm_sqr()
    }

    pub fn normalized(self) -> Self {
        self / self.norm()
    }

    pub fn is_unit(self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Checks `| |self| - 1 | <= UNIT_TOL`.
    pub fn require_unit(self) -> Result<Self> {
        let norm = self.norm();
        if (norm - 1.0).abs() > UNIT_TOL || !norm.is_finite() {
            return Err(Error::NonUnitQuaternion { norm });
        }
        Ok(self)
    }

    /// Pulls a nominally unit quaternion back onto `S^3` once `|q|^2` has
    /// drifted by more than [`RENORM_TOL`].
    pub fn renormalized(self) -> Self {
        if (1.0 - self.norm_sqr()).abs() > RENORM_TOL {
            self.normalized()
        } else {
            self
        }
    }

    /// Component along `span{j, k}`.
    pub fn jk_part(self) -> Quat {
        Quat::new(0.0, 0.0, self.y, self.z)
    }

    pub fn max_abs_diff(self, other: Quat) -> f64 {
        let d = self - other;
        d.w.abs().max(d.x.abs()).max(d.y.abs()).max(d.z.abs())
    }

    pub fn approx_eq(self, other: Quat, tol: f64) -> bool {
        (self - other).norm() <= tol
    }
}

impl ImQuat {
    pub const I: ImQuat = ImQuat::new(1.0, 0.0, 0.0);
    pub const J: ImQuat = ImQuat::new(0.0, 1.0, 0.0);
    pub const K: ImQuat = ImQuat::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        ImQuat { x, y, z }
    }

    pub fn to_quat(self) -> Quat {
        Quat::new(0.0, self.x, self.y, self.z)
    }

    pub fn norm(self) -> f64 {
        self.to_quat().norm()
    }
}

impl From<ImQuat> for Quat {
    fn from(v: ImQuat) -> Quat {
        v.to_quat()
    }
}

/// Hamilton product.
pub fn mul(p: Quat, q: Quat) -> Quat {
    Quat::new(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )
}

/// Real inner product `Re(p conj(q))`.
pub fn inner(p: Quat, q: Quat) -> f64 {
    p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z
}

/// Commutator `pq - qp`.
pub fn bracket(p: Quat, q: Quat) -> Quat {
    p * q - q * p
}

/// `exp(t X)` for imaginary `X`; equals `cos t + X sin t` when `|X| = 1`.
pub fn exp_im(x: ImQuat, t: f64) -> Quat {
    let n = x.norm();
    if n == 0.0 {
        return Quat::ONE;
    }
    let angle = t * n;
    let s = angle.sin() / n;
    Quat::new(angle.cos(), x.x * s, x.y * s, x.z * s)
}

/// `exp_im` for an imaginary quaternion stored as a [`Quat`]; the real part is ignored.
pub fn exp_q(x: Quat, t: f64) -> Quat {
    exp_im(x.im(), t)
}

/// Adjoint action `Ad_s v = s v s^{-1}` for unit `s`.
pub fn ad(s: Quat, v: Quat) -> Result<Quat> {
    let s = s.require_unit()?;
    Ok(ad_unchecked(s, v))
}

/// `s v conj(s)`; callers guarantee `|s| = 1`.
pub(crate) fn ad_unchecked(s: Quat, v: Quat) -> Quat {
    s * v * s.conj()
}

/// Matrix of a real-linear map `H -> H` in the basis `(1, i, j, k)`.
pub fn linear_map_matrix(f: impl Fn(Quat) -> Quat) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for (col, e) in Quat::BASIS.iter().enumerate() {
        let img = f(*e).to_array();
        for row in 0..4 {
            m[(row, col)] = img[row];
        }
    }
    m
}

/// Applies a 4x4 matrix (basis `(1, i, j, k)`) to a quaternion.
pub fn apply_matrix(m: &Matrix4<f64>, q: Quat) -> Quat {
    let v = m * nalgebra::Vector4::from(q.to_array());
    Quat::new(v[0], v[1], v[2], v[3])
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, rhs: Quat) -> Quat {
        mul(self, rhs)
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    fn mul(self, rhs: f64) -> Quat {
        Quat::new(self.w * rhs, self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Quat> for f64 {
    type Output = Quat;
    fn mul(self, rhs: Quat) -> Quat {
        rhs * self
    }
}

impl Div<f64> for Quat {
    type Output = Quat;
    fn div(self, rhs: f64) -> Quat {
        Quat::new(self.w / rhs, self.x / rhs, self.y / rhs, self.z / rhs)
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, rhs: Quat) -> Quat {
        Quat::new(self.w + rhs.w, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, rhs: Quat) -> Quat {
        Quat::new(self.w - rhs.w, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl AddAssign for Quat {
    fn add_assign(&mut self, rhs: Quat) {
        *self = *self + rhs;
    }
}

impl SubAssign for Quat {
    fn sub_assign(&mut self, rhs: Quat) {
        *self = *self - rhs;
    }
}

impl fmt::Debug for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+.6e} {:+.6e}i {:+.6e}j {:+.6e}k)", self.w, self.x, self.y, self.z)
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
