//! The total space `M̄ = S^3 x H x S^3 x S^3 x S^3 x S^3`, the free action of
//! `Ḡ = S^3 x S^3 x S^3 x S^3 x S^1` on it, and the Riemannian submersion
//! `M̄ -> M ≅ (S^1\S^3) x H`.
//!
//! Points are written `(a, v, x, b, c, y)`. Every `S^3` factor carries the
//! unit-round metric and the `H` factor is flat, so tangent vectors are six
//! quaternions and the metric is the sum of the factor-wise inner products.
//! The group acts by
//!
//! ```text
//! (g1, g2, s, t, σ) * (a, v, x, b, c, y)
//!     = (g1 a s⁻¹, g2 v s⁻¹, x s⁻¹, g1 b t⁻¹, g2 c t⁻¹, σ y t⁻¹)
//! ```
//!
//! and the quotient map to `(S^1\S^3) x H` is
//! `(a, v, x, b, c, y) ↦ ([y b⁻¹ a x⁻¹], x a⁻¹ b c⁻¹ v x⁻¹)`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quat::{ad_unchecked, Quat, UNIT_TOL};

/// Radius below which [`horizontal_field`] refuses to evaluate.
pub const R_MIN: f64 = 1e-8;

/// Relative singular-value cutoff for rank decisions on the vertical space.
pub const RANK_TOL: f64 = 1e-8;

/// Tolerance for factor-wise tangency checks.
pub const TANGENCY_TOL: f64 = 1e-9;

pub const VERTICAL_DIM: usize = 13;
pub const HORIZONTAL_DIM: usize = 6;

/// A point `(a, v, x, b, c, y)` of the total space; all factors but `v` are unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TotalPoint {
    pub a: Quat,
    pub v: Quat,
    pub x: Quat,
    pub b: Quat,
    pub c: Quat,
    pub y: Quat,
}

impl TotalPoint {
    pub fn new(a: Quat, v: Quat, x: Quat, b: Quat, c: Quat, y: Quat) -> Result<Self> {
        let p = TotalPoint { a, v, x, b, c, y };
        p.validate()?;
        Ok(p)
    }

    /// The base point `q̄₀ = (1, 0, 1, 1, 1, 1)`.
    pub const fn q0() -> Self {
        TotalPoint { a: Quat::ONE, v: Quat::ZERO, x: Quat::ONE, b: Quat::ONE, c: Quat::ONE, y: Quat::ONE }
    }

    pub fn validate(&self) -> Result<()> {
        for s in self.spheres() {
            s.require_unit()?;
        }
        Ok(())
    }

    /// The five `S^3` coordinates in the order `a, x, b, c, y`.
    pub fn spheres(&self) -> [Quat; 5] {
        [self.a, self.x, self.b, self.c, self.y]
    }

    /// Distance `r = |v|` from the zero section.
    pub fn radius(&self) -> f64 {
        self.v.norm()
    }

    /// Coordinates in slot order `(a, v, x, b, c, y)`.
    pub fn slots(&self) -> [Quat; 6] {
        [self.a, self.v, self.x, self.b, self.c, self.y]
    }

    pub fn from_slots(s: [Quat; 6]) -> Self {
        TotalPoint { a: s[0], v: s[1], x: s[2], b: s[3], c: s[4], y: s[5] }
    }

    fn renormalized(self) -> Self {
        TotalPoint {
            a: self.a.renormalized(),
            v: self.v,
            x: self.x.renormalized(),
            b: self.b.renormalized(),
            c: self.c.renormalized(),
            y: self.y.renormalized(),
        }
    }

    /// Moves along the product geodesic with initial velocity `u` for time `tau`:
    /// great circles on the sphere factors, a straight line on `H`.
    pub fn geodesic(&self, u: &TotalTangent, tau: f64) -> TotalPoint {
        let mut out = self.slots();
        for (slot, coord) in out.iter_mut().enumerate() {
            let vel = u.0[slot];
            if slot == 1 {
                *coord += vel * tau;
                continue;
            }
            let speed = vel.norm();
            if speed > 0.0 {
                let angle = speed * tau;
                *coord = *coord * angle.cos() + vel * (angle.sin() / speed);
            }
        }
        TotalPoint::from_slots(out)
    }
}

/// Tangent vector `(Ta, Tv, Tx, Tb, Tc, Ty)` at some [`TotalPoint`].
///
/// The point is not stored; operations that need it take it explicitly and
/// check factor-wise tangency.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TotalTangent(pub [Quat; 6]);

impl TotalTangent {
    pub const ZERO: TotalTangent = TotalTangent([Quat::ZERO; 6]);

    pub fn new(ta: Quat, tv: Quat, tx: Quat, tb: Quat, tc: Quat, ty: Quat) -> Self {
        TotalTangent([ta, tv, tx, tb, tc, ty])
    }

    /// Euclidean dot product of the 24 coordinates; equals the metric on tangent vectors.
    pub fn dot(&self, other: &TotalTangent) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(p, q)| p.inner(*q)).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs_diff(&self, other: &TotalTangent) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(p, q)| p.max_abs_diff(*q)).fold(0.0, f64::max)
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_iterator(24, self.0.iter().flat_map(|q| q.to_array()))
    }

    pub fn from_slice(c: &[f64]) -> Self {
        let mut out = [Quat::ZERO; 6];
        for (k, q) in out.iter_mut().enumerate() {
            *q = Quat::new(c[4 * k], c[4 * k + 1], c[4 * k + 2], c[4 * k + 3]);
        }
        TotalTangent(out)
    }

    /// Largest factor-wise tangency defect `|<T_f, f>|` relative to `max(1, |T_f|)`.
    pub fn tangency_defect(&self, p: &TotalPoint) -> f64 {
        let coords = p.slots();
        (0..6)
            .filter(|&slot| slot != 1)
            .map(|slot| {
                let t = self.0[slot];
                t.inner(coords[slot]).abs() / t.norm().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn require_tangent(&self, p: &TotalPoint) -> Result<()> {
        let defect = self.tangency_defect(p);
        if defect > TANGENCY_TOL {
            return Err(Error::MismatchedBasepoint { defect });
        }
        Ok(())
    }
}

impl Add for TotalTangent {
    type Output = TotalTangent;
    fn add(self, rhs: TotalTangent) -> TotalTangent {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        TotalTangent(out)
    }
}

impl Sub for TotalTangent {
    type Output = TotalTangent;
    fn sub(self, rhs: TotalTangent) -> TotalTangent {
        self + (-rhs)
    }
}

impl Neg for TotalTangent {
    type Output = TotalTangent;
    fn neg(self) -> TotalTangent {
        TotalTangent(self.0.map(|q| -q))
    }
}

impl Mul<f64> for TotalTangent {
    type Output = TotalTangent;
    fn mul(self, rhs: f64) -> TotalTangent {
        TotalTangent(self.0.map(|q| q * rhs))
    }
}

/// Element `(g1, g2, s, t, σ)` of `Ḡ`; `σ` lies in the circle `{e^{iθ}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub g1: Quat,
    pub g2: Quat,
    pub s: Quat,
    pub t: Quat,
    pub sigma: Quat,
}

impl GroupElement {
    pub fn new(g1: Quat, g2: Quat, s: Quat, t: Quat, sigma: Quat) -> Result<Self> {
        let g = GroupElement { g1, g2, s, t, sigma };
        g.validate()?;
        Ok(g)
    }

    pub const fn identity() -> Self {
        GroupElement { g1: Quat::ONE, g2: Quat::ONE, s: Quat::ONE, t: Quat::ONE, sigma: Quat::ONE }
    }

    pub fn validate(&self) -> Result<()> {
        for q in [self.g1, self.g2, self.s, self.t, self.sigma] {
            q.require_unit()?;
        }
        if self.sigma.y.abs() > UNIT_TOL || self.sigma.z.abs() > UNIT_TOL {
            return Err(Error::NonUnitQuaternion { norm: self.sigma.norm() });
        }
        Ok(())
    }

    /// Group product `self * other`, so that `act(gh, p) = act(g, act(h, p))`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            g1: (self.g1 * other.g1).renormalized(),
            g2: (self.g2 * other.g2).renormalized(),
            s: (self.s * other.s).renormalized(),
            t: (self.t * other.t).renormalized(),
            sigma: (self.sigma * other.sigma).renormalized(),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            g1: self.g1.conj(),
            g2: self.g2.conj(),
            s: self.s.conj(),
            t: self.t.conj(),
            sigma: self.sigma.conj(),
        }
    }
}

/// Applies `g` to `p`.
pub fn act(g: &GroupElement, p: &TotalPoint) -> Result<TotalPoint> {
    g.validate()?;
    p.validate()?;
    let si = g.s.conj();
    let ti = g.t.conj();
    Ok(TotalPoint {
        a: g.g1 * p.a * si,
        v: g.g2 * p.v * si,
        x: p.x * si,
        b: g.g1 * p.b * ti,
        c: g.g2 * p.c * ti,
        y: g.sigma * p.y * ti,
    }
    .renormalized())
}

/// Product metric: sum of the six factor-wise inner products.
pub fn metric(p: &TotalPoint, u: &TotalTangent, w: &TotalTangent) -> Result<f64> {
    u.require_tangent(p)?;
    w.require_tangent(p)?;
    Ok(u.dot(w))
}

/// The 13 action fields at `p`, ordered `g1 (i,j,k)`, `g2 (i,j,k)`, `s (i,j,k)`,
/// `t (i,j,k)`, `σ (i)`. They span the vertical space, including on the zero section.
pub fn action_fields(p: &TotalPoint) -> [TotalTangent; VERTICAL_DIM] {
    let z = Quat::ZERO;
    let gens = [Quat::I, Quat::J, Quat::K];
    let mut out = [TotalTangent::ZERO; VERTICAL_DIM];
    for (k, &e) in gens.iter().enumerate() {
        out[k] = TotalTangent::new(e * p.a, z, z, e * p.b, z, z);
        out[3 + k] = TotalTangent::new(z, e * p.v, z, z, e * p.c, z);
        out[6 + k] = TotalTangent::new(-(p.a * e), -(p.v * e), -(p.x * e), z, z, z);
        out[9 + k] = TotalTangent::new(z, z, z, -(p.b * e), -(p.c * e), -(p.y * e));
    }
    out[12] = TotalTangent::new(z, z, z, z, z, Quat::I * p.y);
    out
}

fn columns(fields: &[TotalTangent]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(24, fields.len());
    for (col, f) in fields.iter().enumerate() {
        m.set_column(col, &f.to_dvector());
    }
    m
}

/// Numerical rank of a set of tangent vectors under the relative cutoff [`RANK_TOL`].
pub fn numerical_rank(fields: &[TotalTangent]) -> usize {
    let sv = columns(fields).singular_values();
    let largest = sv.max();
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * largest).count()
}

/// Spanning set of the vertical space `V_p`; errors if its rank is not 13.
pub fn vertical_basis(p: &TotalPoint) -> Result<[TotalTangent; VERTICAL_DIM]> {
    p.validate()?;
    let fields = action_fields(p);
    let rank = numerical_rank(&fields);
    if rank < VERTICAL_DIM {
        return Err(Error::RankDeficient { rank, expected: VERTICAL_DIM });
    }
    Ok(fields)
}

/// Orthogonal projector onto the vertical space at a point, cached as an
/// orthonormal basis from an SVD of the action fields.
#[derive(Clone, Debug)]
pub struct VerticalProjector {
    basis: DMatrix<f64>,
}

impl VerticalProjector {
    pub fn new(p: &TotalPoint) -> Result<Self> {
        let fields = vertical_basis(p)?;
        let svd = columns(&fields).svd(true, false);
        let u = svd.u.expect("requested U");
        let largest = svd.singular_values.max();
        let keep: Vec<usize> =
            (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > RANK_TOL * largest).collect();
        if keep.len() < VERTICAL_DIM {
            return Err(Error::RankDeficient { rank: keep.len(), expected: VERTICAL_DIM });
        }
        let basis = u.select_columns(&keep);
        Ok(VerticalProjector { basis })
    }

    pub fn vertical(&self, w: &TotalTangent) -> TotalTangent {
        let coeffs = self.basis.tr_mul(&w.to_dvector());
        let proj = &self.basis * coeffs;
        TotalTangent::from_slice(proj.as_slice())
    }

    pub fn horizontal(&self, w: &TotalTangent) -> TotalTangent {
        *w - self.vertical(w)
    }
}

pub fn project_vertical(p: &TotalPoint, w: &TotalTangent) -> Result<TotalTangent> {
    w.require_tangent(p)?;
    Ok(VerticalProjector::new(p)?.vertical(w))
}

pub fn project_horizontal(p: &TotalPoint, w: &TotalTangent) -> Result<TotalTangent> {
    w.require_tangent(p)?;
    Ok(VerticalProjector::new(p)?.horizontal(w))
}

/// The horizontal field `𝔛(A, B)` written in polar form `v = r·dir` with `|dir| = 1`.
///
/// The `v` coordinate of `p` is ignored. The expression is polynomial in `r`,
/// so it is also defined for `r <= 0`: at `r = 0` it is the limit of horizontal
/// vectors along the ray `dir`, and for `r < 0` it equals
/// `𝔛_{(|r|, -dir)}(A, -B)`.
pub(crate) fn horizontal_field_polar(p: &TotalPoint, r: f64, dir: Quat, a_dir: Quat, b_vec: Quat) -> TotalTangent {
    let TotalPoint { a, x, b, c, y, .. } = *p;
    let im_b = b_vec.im_part();
    let yi = y.conj();
    let by = b * yi;
    let cy = c * yi;
    let shifted = a_dir - im_b * r;
    TotalTangent::new(
        ad_unchecked(by, shifted) * a,
        ad_unchecked(cy, b_vec) * dir,
        x * (ad_unchecked(a.conj() * by, -shifted) - ad_unchecked(dir.conj() * cy, im_b) * r),
        b * ad_unchecked(yi, -shifted),
        -(c * ad_unchecked(yi, im_b)) * r,
        a_dir * y,
    )
}

/// Horizontal vector `𝔛_p(A, B)` for `A ∈ span{j, k}`, `B ∈ H`, valid off the zero section.
pub fn horizontal_field(p: &TotalPoint, a_dir: Quat, b_vec: Quat) -> Result<TotalTangent> {
    p.validate()?;
    let r = p.radius();
    if r <= R_MIN {
        return Err(Error::ZeroRadius { radius: r });
    }
    Ok(horizontal_field_polar(p, r, p.v / r, a_dir, b_vec))
}

/// Horizontal space at `q̄₀`: `(A, B, -A, -A, 0, A)`.
pub fn horizontal_at_q0(a_dir: Quat, b_vec: Quat) -> TotalTangent {
    TotalTangent::new(a_dir, b_vec, -a_dir, -a_dir, Quat::ZERO, a_dir)
}

/// A point of the base `S^1\S^3`, i.e. a left coset `S^1 q`.
///
/// The stored representative is canonical: writing `q = z1 + z2 j` with
/// `z1, z2 ∈ span{1, i}`, the one of larger modulus (ties go to `z1`) is
/// rotated onto the positive real axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasePoint {
    rep: Quat,
}

impl BasePoint {
    pub fn new(q: Quat) -> Result<Self> {
        let q = q.require_unit()?;
        Ok(BasePoint { rep: canonicalize(q) })
    }

    /// `q₀ = [1]`.
    pub fn q0() -> Self {
        BasePoint { rep: Quat::ONE }
    }

    pub fn rep(&self) -> Quat {
        self.rep
    }

    /// Invariant of the coset: `conj(q) i q`, a unit imaginary quaternion.
    pub fn hopf(&self) -> Quat {
        self.rep.conj() * Quat::I * self.rep
    }

    /// Compares cosets through [`BasePoint::hopf`], which is continuous and
    /// independent of the representative.
    pub fn approx_eq(&self, other: &BasePoint, tol: f64) -> bool {
        self.hopf().approx_eq(other.hopf(), tol)
    }

    /// Phase `e^{iφ}` with `q = e^{iφ} · rep` when `q` represents this coset.
    pub fn phase_of(&self, q: Quat) -> Quat {
        q * self.rep.conj()
    }
}

fn canonicalize(q: Quat) -> Quat {
    let (m1, m2) = (q.w.hypot(q.x), q.y.hypot(q.z));
    let phase = if m1 >= m2 { q.x.atan2(q.w) } else { q.z.atan2(q.y) };
    let rot = Quat::new((-phase).cos(), (-phase).sin(), 0.0, 0.0);
    (rot * q).renormalized()
}

/// Quotient map `M̄ -> (S^1\S^3) x H`.
pub fn to_base(p: &TotalPoint) -> Result<(BasePoint, Quat)> {
    p.validate()?;
    let TotalPoint { a, v, x, b, c, y } = *p;
    let q = y * b.conj() * a * x.conj();
    let fiber = x * a.conj() * b * c.conj() * v * x.conj();
    Ok((BasePoint::new(q.renormalized())?, fiber))
}

/// A point of `M̄` over `([q], v)`: `(q, q v, 1, 1, 1, 1)`.
pub fn lift(base: &BasePoint, v: Quat) -> TotalPoint {
    let q = base.rep();
    TotalPoint { a: q, v: q * v, x: Quat::ONE, b: Quat::ONE, c: Quat::ONE, y: Quat::ONE }
}

/// Isometric `S^3` action on `(S^1\S^3) x H`: `s ⋆ ([a], v) = ([a s⁻¹], s v s⁻¹)`.
pub fn isometry_star(s: Quat, base: &BasePoint, v: Quat) -> Result<(BasePoint, Quat)> {
    let s = s.require_unit()?;
    let moved = BasePoint::new((base.rep() * s.conj()).renormalized())?;
    Ok((moved, ad_unchecked(s, v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{exp_q, inner};

    const TOL: f64 = 1e-12;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quat {
        Quat::new(w, x, y, z)
    }

    #[test]
    fn identity_action_is_trivial() {
        let p = TotalPoint::new(
            q(0.5, 0.5, 0.5, 0.5),
            q(1.0, -2.0, 0.3, 0.0),
            q(0.0, 1.0, 0.0, 0.0),
            q(0.6, 0.0, 0.8, 0.0),
            q(0.0, 0.0, 0.0, 1.0),
            q(0.8, 0.0, 0.0, -0.6),
        )
        .unwrap();
        let out = act(&GroupElement::identity(), &p).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn s_factor_substitution() {
        let s = q(0.6, 0.0, 0.0, 0.8);
        let g = GroupElement::new(Quat::ONE, Quat::ONE, s, Quat::ONE, Quat::ONE).unwrap();
        let out = act(&g, &TotalPoint::q0()).unwrap();
        assert!(out.a.approx_eq(s.conj(), TOL));
        assert!(out.v.approx_eq(Quat::ZERO, TOL));
        assert!(out.x.approx_eq(s.conj(), TOL));
        for f in [out.b, out.c, out.y] {
            assert!(f.approx_eq(Quat::ONE, TOL));
        }
    }

    #[test]
    fn sigma_must_lie_in_circle() {
        let err = GroupElement::new(Quat::ONE, Quat::ONE, Quat::ONE, Quat::ONE, Quat::J);
        assert!(err.is_err());
    }

    #[test]
    fn metric_examples() {
        let p = TotalPoint::q0();
        let u = horizontal_at_q0(Quat::J, Quat::ZERO);
        let w = horizontal_at_q0(Quat::K, Quat::ZERO);
        assert_eq!(metric(&p, &u, &u).unwrap(), 4.0);
        assert_eq!(metric(&p, &u, &w).unwrap(), 0.0);
        let fv = TotalTangent::new(Quat::ZERO, q(1.0, 2.0, 0.0, 0.0), Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO);
        let fw = TotalTangent::new(Quat::ZERO, q(0.5, 0.0, 3.0, 1.0), Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO);
        assert_eq!(metric(&p, &fv, &fw).unwrap(), inner(q(1.0, 2.0, 0.0, 0.0), q(0.5, 0.0, 3.0, 1.0)));
    }

    #[test]
    fn metric_rejects_non_tangent() {
        let p = TotalPoint::q0();
        let bad = TotalTangent::new(Quat::ONE, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO);
        assert!(matches!(metric(&p, &bad, &bad), Err(Error::MismatchedBasepoint { .. })));
    }

    #[test]
    fn vertical_fields_at_q0() {
        let fields = vertical_basis(&TotalPoint::q0()).unwrap();
        let g1_i = TotalTangent::new(Quat::I, Quat::ZERO, Quat::ZERO, Quat::I, Quat::ZERO, Quat::ZERO);
        let sigma = TotalTangent::new(Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::I);
        assert!(fields.contains(&g1_i));
        assert!(fields.contains(&sigma));
        assert_eq!(numerical_rank(&fields), 13);
    }

    #[test]
    fn projections_at_q0() {
        let p = TotalPoint::q0();
        let h = horizontal_at_q0(q(0.0, 0.0, 0.3, -1.2), q(0.7, 0.1, -0.4, 2.0));
        assert!(project_horizontal(&p, &h).unwrap().max_abs_diff(&h) < 1e-12);
        let v = TotalTangent::new(Quat::I, Quat::ZERO, Quat::ZERO, Quat::I, Quat::ZERO, Quat::ZERO);
        assert!(project_vertical(&p, &v).unwrap().max_abs_diff(&v) < 1e-12);
        assert_eq!(project_vertical(&p, &TotalTangent::ZERO).unwrap().norm(), 0.0);
    }

    #[test]
    fn horizontal_field_at_all_ones() {
        let ones = TotalPoint::new(Quat::ONE, Quat::ONE, Quat::ONE, Quat::ONE, Quat::ONE, Quat::ONE).unwrap();
        let h = horizontal_field(&ones, Quat::J, Quat::I).unwrap();
        let expected = TotalTangent::new(Quat::J - Quat::I, Quat::I, -Quat::J, -Quat::J + Quat::I, -Quat::I, Quat::J);
        assert!(h.max_abs_diff(&expected) < TOL);
    }

    #[test]
    fn horizontal_field_refuses_zero_section() {
        let err = horizontal_field(&TotalPoint::q0(), Quat::J, Quat::ZERO).unwrap_err();
        assert!(matches!(err, Error::ZeroRadius { .. }));
    }

    #[test]
    fn horizontal_at_q0_examples() {
        assert_eq!(
            horizontal_at_q0(Quat::J, Quat::ZERO),
            TotalTangent::new(Quat::J, Quat::ZERO, -Quat::J, -Quat::J, Quat::ZERO, Quat::J)
        );
        let v = q(1.0, 2.0, 3.0, 4.0);
        assert_eq!(
            horizontal_at_q0(Quat::ZERO, v),
            TotalTangent::new(Quat::ZERO, v, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO)
        );
        assert_eq!(horizontal_at_q0(Quat::ZERO, Quat::ZERO).norm(), 0.0);
    }

    #[test]
    fn polar_field_matches_limit_at_q0() {
        let h = horizontal_field_polar(&TotalPoint::q0(), 0.0, Quat::ONE, Quat::K, q(0.1, 0.2, 0.3, 0.4));
        assert!(h.max_abs_diff(&horizontal_at_q0(Quat::K, q(0.1, 0.2, 0.3, 0.4))) < TOL);
    }

    #[test]
    fn base_of_q0() {
        let (base, v) = to_base(&TotalPoint::q0()).unwrap();
        assert!(base.approx_eq(&BasePoint::q0(), TOL));
        assert_eq!(v, Quat::ZERO);
    }

    #[test]
    fn soul_geodesic_has_period_pi() {
        let x = q(0.0, 0.0, 0.6, 0.8);
        let curve = |t: f64| {
            let e = exp_q(x, t / 4.0);
            TotalPoint::new(e, Quat::ZERO, e.conj(), e.conj(), Quat::ONE, e).unwrap()
        };
        for t in [0.3, 1.1, 2.0] {
            let (base, _) = to_base(&curve(t)).unwrap();
            let expected = BasePoint::new(exp_q(x, t)).unwrap();
            assert!(base.approx_eq(&expected, 1e-12));
        }
        let (start, _) = to_base(&curve(0.0)).unwrap();
        let (end, _) = to_base(&curve(std::f64::consts::PI)).unwrap();
        assert!(start.approx_eq(&end, 1e-12));
        let (mid, _) = to_base(&curve(std::f64::consts::FRAC_PI_2)).unwrap();
        assert!(!start.approx_eq(&mid, 1e-3));
    }

    #[test]
    fn canonical_representative_is_idempotent() {
        let b = BasePoint::new(q(0.1, -0.7, 0.7, 0.1).normalized()).unwrap();
        let again = BasePoint::new(b.rep()).unwrap();
        assert!(b.rep().approx_eq(again.rep(), 1e-15));
        let rotated = BasePoint::new(q(0.6, 0.8, 0.0, 0.0) * b.rep()).unwrap();
        assert!(rotated.rep().approx_eq(b.rep(), 1e-12));
    }

    #[test]
    fn isometry_star_examples() {
        let base = BasePoint::new(q(0.5, 0.5, 0.5, 0.5)).unwrap();
        let v = q(0.3, 1.0, -2.0, 0.5);
        let (b1, v1) = isometry_star(Quat::ONE, &base, v).unwrap();
        assert!(b1.approx_eq(&base, TOL) && v1.approx_eq(v, TOL));

        let rot = q(0.8, 0.6, 0.0, 0.0);
        let (b2, v2) = isometry_star(rot, &BasePoint::q0(), v).unwrap();
        assert!(b2.approx_eq(&BasePoint::q0(), TOL));
        assert!(v2.approx_eq(rot * v * rot.conj(), TOL));

        let s = q(0.1, 0.7, -0.1, 0.7).normalized();
        let (b3, v3) = isometry_star(s, &BasePoint::q0(), Quat::ZERO).unwrap();
        assert!(b3.approx_eq(&BasePoint::new(s.conj()).unwrap(), TOL));
        assert_eq!(v3, Quat::ZERO);

        assert!(isometry_star(q(2.0, 0.0, 0.0, 0.0), &base, v).is_err());
    }

    #[test]
    fn lift_round_trips() {
        let base = BasePoint::new(q(0.1, 0.2, 0.3, 0.4).normalized()).unwrap();
        let v = q(-1.0, 0.5, 0.25, 2.0);
        let (b, w) = to_base(&lift(&base, v)).unwrap();
        assert!(b.approx_eq(&base, TOL));
        assert!(w.approx_eq(v, TOL));
    }
}
