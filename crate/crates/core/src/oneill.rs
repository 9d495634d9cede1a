//! O'Neill A-tensor of the submersion `M̄ -> M`, ambient curvature of `M̄`,
//! and the curvatures of `M` that follow from `k = k̄ + 3|A|²`.

use crate::biquotient::{horizontal_at_q0, horizontal_field_polar, TotalPoint, TotalTangent, VerticalProjector, R_MIN};
use crate::error::{Error, Result};
use crate::quat::{bracket, Quat};

/// Value of the A-tensor: a vertical vector at the evaluation point.
pub type ATensorValue = TotalTangent;

/// Central-difference step used by [`a_tensor_numeric`].
pub const FD_STEP: f64 = 1e-5;

/// Relative size of the vertical part above which an input counts as non-horizontal.
const HORIZONTAL_TOL: f64 = 1e-7;

/// `A((0, V, 0, 0, 0, 0), (0, W, 0, 0, 0, 0))` at `q̄₀`, extended bilinearly to all `V, W`.
pub fn a_tensor_fiber_q0(v: Quat, w: Quat) -> ATensorValue {
    let r_hat = (w * v.conj()).im_part();
    let l_hat = (v.conj() * w).im_part();
    let s = (r_hat * 3.0 - l_hat).jk_part() * 0.25;
    TotalTangent::new(-r_hat + s, Quat::ZERO, r_hat - l_hat - s, r_hat - s, -r_hat, s)
}

/// `A((X, 0, -X, -X, 0, X), (A, 0, -A, -A, 0, A))` at `q̄₀` for `X, A ∈ span{j, k}`.
pub fn a_tensor_base_q0(x: Quat, a: Quat) -> ATensorValue {
    let br = bracket(x, a);
    TotalTangent::new(br * -2.5, Quat::ZERO, br * 3.5, br * 1.5, Quat::ZERO, br * -0.5)
}

/// A-tensor by differentiating a horizontal extension of `w` along the
/// geodesic through `p` with velocity `u`, then taking the vertical part.
pub fn a_tensor_numeric(p: &TotalPoint, u: &TotalTangent, w: &TotalTangent) -> Result<ATensorValue> {
    a_tensor_numeric_with_step(p, u, w, FD_STEP)
}

/// [`a_tensor_numeric`] with an explicit step; central differences at `h` and
/// `h/2` combined by one Richardson level.
///
/// Off the zero section the extension is `τ ↦ 𝔛_{c(τ)}(A, B)`. On it, the
/// extension uses the polar form of `𝔛` along the ray in direction `u_v`
/// (or `1` if `u` has no fiber part), which is smooth through `r = 0`.
pub fn a_tensor_numeric_with_step(p: &TotalPoint, u: &TotalTangent, w: &TotalTangent, h: f64) -> Result<ATensorValue> {
    p.validate()?;
    u.require_tangent(p)?;
    w.require_tangent(p)?;
    let proj = VerticalProjector::new(p)?;
    for t in [u, w] {
        let vertical_norm = proj.vertical(t).norm();
        if vertical_norm > HORIZONTAL_TOL * t.norm().max(1.0) {
            return Err(Error::NotHorizontal { vertical_norm });
        }
    }

    let r0 = p.radius();
    let on_zero_section = r0 <= R_MIN;
    if !on_zero_section && r0 < 10.0 * h {
        return Err(Error::StepTooSmall { radius: r0 });
    }
    let uv = u.0[1];
    let ray = if uv.norm() > 0.0 { uv.normalized() } else { Quat::ONE };
    let polar = |tau: f64| -> (f64, Quat) {
        if on_zero_section {
            (tau * uv.norm(), ray)
        } else {
            let v = p.v + uv * tau;
            let r = v.norm();
            (r, v / r)
        }
    };

    let (a_dir, b_vec) = solve_horizontal_params(p, polar(0.0), w)?;
    let field = |tau: f64| {
        let (r, dir) = polar(tau);
        horizontal_field_polar(&p.geodesic(u, tau), r, dir, a_dir, b_vec)
    };
    let central = |step: f64| (field(step) - field(-step)) * (0.5 / step);
    let d_h = central(h);
    let d_half = central(0.5 * h);
    let extrapolated = (d_half * 4.0 - d_h) * (1.0 / 3.0);
    Ok(proj.vertical(&extrapolated))
}

/// Finds `(A, B)` with `𝔛(A, B) = w` in the polar chart `(r, dir)` at `p`.
fn solve_horizontal_params(p: &TotalPoint, (r, dir): (f64, Quat), w: &TotalTangent) -> Result<(Quat, Quat)> {
    use nalgebra::{DMatrix, DVector};

    let params: [(Quat, Quat); 6] = [
        (Quat::J, Quat::ZERO),
        (Quat::K, Quat::ZERO),
        (Quat::ZERO, Quat::ONE),
        (Quat::ZERO, Quat::I),
        (Quat::ZERO, Quat::J),
        (Quat::ZERO, Quat::K),
    ];
    let mut m = DMatrix::zeros(24, 6);
    for (col, (a_dir, b_vec)) in params.iter().enumerate() {
        let f = horizontal_field_polar(p, r, dir, *a_dir, *b_vec);
        m.set_column(col, &f.to_dvector());
    }
    let rhs: DVector<f64> = w.to_dvector();
    let coeffs =
        m.clone().svd(true, true).solve(&rhs, 1e-12).map_err(|_| Error::RankDeficient { rank: 0, expected: 6 })?;
    let residual = (&m * &coeffs - &rhs).norm();
    if residual > 1e-8 * rhs.norm().max(1.0) {
        return Err(Error::NotHorizontal { vertical_norm: residual });
    }
    let a_dir = Quat::new(0.0, 0.0, coeffs[0], coeffs[1]);
    let b_vec = Quat::new(coeffs[2], coeffs[3], coeffs[4], coeffs[5]);
    Ok((a_dir, b_vec))
}

/// Unnormalized sectional curvature `<R̄(u, w) w, u>` of `M̄`.
///
/// Each round factor contributes `|[ξ, η]|² / 4` with `ξ, η` the
/// left-translates of the factor components to the identity; `H` is flat.
pub fn kbar(p: &TotalPoint, u: &TotalTangent, w: &TotalTangent) -> Result<f64> {
    u.require_tangent(p)?;
    w.require_tangent(p)?;
    let coords = p.slots();
    let total = (0..6)
        .filter(|&slot| slot != 1)
        .map(|slot| {
            let inv = coords[slot].conj();
            let xi = inv * u.0[slot];
            let eta = inv * w.0[slot];
            bracket(xi, eta).norm_sqr() / 4.0
        })
        .sum();
    Ok(total)
}

/// Unnormalized curvature of `M` on the plane spanned by the projections of
/// the horizontal vectors `u, w`, via `k̄ + 3|A|²` with the numeric A-tensor.
pub fn oneill_sectional(p: &TotalPoint, u: &TotalTangent, w: &TotalTangent) -> Result<f64> {
    let a = a_tensor_numeric(p, u, w)?;
    Ok(kbar(p, u, w)? + 3.0 * a.norm_sqr())
}

/// Fiber curvature `k^f(V, W) = 3|A(V̄, W̄)|²` at `q₀`.
pub fn kf_via_a(v: Quat, w: Quat) -> f64 {
    3.0 * a_tensor_fiber_q0(v, w).norm_sqr()
}

/// Fiber curvature at `q₀` as an explicit quartic in the coefficients of
/// `V = a + bi + cj + dk` and `W = x + yi + zj + wk`.
#[rustfmt::skip]
pub fn kf_polynomial(v: Quat, w: Quat) -> f64 {
    let (a, b, c, d) = (v.w, v.x, v.y, v.z);
    let (x, y, z, w) = (w.w, w.x, w.y, w.z);
    6.0*x*x*c*c + 6.0*z*z*a*a + 6.0*x*x*d*d + 6.0*w*w*a*a + 21.0*d*d*z*z + 21.0*c*c*w*w
        + 9.0*z*z*b*b + 9.0*w*w*b*b + 9.0*y*y*d*d + 9.0*y*y*c*c + 9.0*b*b*x*x + 9.0*a*a*y*y
        - 42.0*d*z*c*w - 18.0*w*b*y*d - 18.0*y*c*z*b - 18.0*b*x*a*y
        - 12.0*a*y*d*z + 12.0*a*y*c*w - 12.0*b*x*c*w + 12.0*b*x*d*z - 12.0*x*c*z*a - 12.0*x*d*w*a
}

/// Normalized curvature of the soul on the plane spanned by `x, a ∈ span{j, k}`
/// (tangent directions at `q₀`), from the horizontal lifts `(X, 0, -X, -X, 0, X)`.
pub fn soul_sectional_curvature(x: Quat, a: Quat) -> Result<f64> {
    let p = TotalPoint::q0();
    let u = horizontal_at_q0(x, Quat::ZERO);
    let w = horizontal_at_q0(a, Quat::ZERO);
    let area = u.norm_sqr() * w.norm_sqr() - u.dot(&w).powi(2);
    if area <= f64::EPSILON * u.norm_sqr() * w.norm_sqr() {
        return Err(Error::ZeroVector);
    }
    let k = kbar(&p, &u, &w)? + 3.0 * a_tensor_base_q0(x, a).norm_sqr();
    Ok(k / area)
}

/// Curvature of the soul in the default basis `{j, k}`; equals 16.
pub fn soul_curvature() -> f64 {
    soul_sectional_curvature(Quat::J, Quat::K).expect("j and k are independent")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn fiber(v: Quat) -> TotalTangent {
        TotalTangent::new(Quat::ZERO, v, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO)
    }

    #[test]
    fn fiber_closed_form_examples() {
        let expected = TotalTangent::new(-Quat::I, Quat::ZERO, Quat::ZERO, Quat::I, -Quat::I, Quat::ZERO);
        assert!(a_tensor_fiber_q0(Quat::ONE, Quat::I).max_abs_diff(&expected) < TOL);
        let expected = TotalTangent::new(-Quat::I, Quat::ZERO, Quat::I * 2.0, Quat::I, -Quat::I, Quat::ZERO);
        assert!(a_tensor_fiber_q0(Quat::J, Quat::K).max_abs_diff(&expected) < TOL);
        let v = Quat::new(0.3, -0.2, 1.5, 0.9);
        assert!(a_tensor_fiber_q0(v, v).norm() < TOL);
    }

    #[test]
    fn base_closed_form_examples() {
        let expected =
            TotalTangent::new(Quat::I * -5.0, Quat::ZERO, Quat::I * 7.0, Quat::I * 3.0, Quat::ZERO, -Quat::I);
        assert!(a_tensor_base_q0(Quat::J, Quat::K).max_abs_diff(&expected) < TOL);
        assert_eq!(a_tensor_base_q0(Quat::J, Quat::J).norm(), 0.0);
        assert!(a_tensor_base_q0(Quat::K, Quat::J).max_abs_diff(&(-expected)) < TOL);
    }

    #[test]
    fn numeric_reproduces_fiber_example() {
        let a = a_tensor_numeric(&TotalPoint::q0(), &fiber(Quat::ONE), &fiber(Quat::I)).unwrap();
        let expected = a_tensor_fiber_q0(Quat::ONE, Quat::I);
        assert!(a.max_abs_diff(&expected) < 1e-6, "{a:?}");
    }

    #[test]
    fn numeric_reproduces_base_example() {
        let u = horizontal_at_q0(Quat::J, Quat::ZERO);
        let w = horizontal_at_q0(Quat::K, Quat::ZERO);
        let a = a_tensor_numeric(&TotalPoint::q0(), &u, &w).unwrap();
        assert!(a.max_abs_diff(&a_tensor_base_q0(Quat::J, Quat::K)) < 1e-6, "{a:?}");
    }

    #[test]
    fn numeric_rejects_vertical_input() {
        let vertical = TotalTangent::new(Quat::I, Quat::ZERO, Quat::ZERO, Quat::I, Quat::ZERO, Quat::ZERO);
        let w = horizontal_at_q0(Quat::K, Quat::ZERO);
        let err = a_tensor_numeric(&TotalPoint::q0(), &vertical, &w).unwrap_err();
        assert!(matches!(err, Error::NotHorizontal { .. }));
    }

    #[test]
    fn kbar_examples() {
        let p = TotalPoint::q0();
        let uj = TotalTangent::new(Quat::J, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO);
        let uk = TotalTangent::new(Quat::K, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO, Quat::ZERO);
        assert!((kbar(&p, &uj, &uk).unwrap() - 1.0).abs() < TOL);
        assert_eq!(kbar(&p, &fiber(Quat::new(1.0, 2.0, 3.0, 4.0)), &fiber(Quat::I)).unwrap(), 0.0);
        let u = horizontal_at_q0(Quat::J, Quat::ZERO);
        let w = horizontal_at_q0(Quat::K, Quat::ZERO);
        assert!((kbar(&p, &u, &w).unwrap() - 4.0).abs() < TOL);
    }

    #[test]
    fn fiber_curvature_spot_values() {
        for (v, w, expected) in [(Quat::ONE, Quat::I, 9.0), (Quat::ONE, Quat::J, 6.0), (Quat::J, Quat::K, 21.0)] {
            assert!((kf_polynomial(v, w) - expected).abs() < TOL);
            assert!((kf_via_a(v, w) - expected).abs() < TOL);
        }
        let v = Quat::new(0.4, 0.1, -0.9, 0.3);
        assert!(kf_via_a(v, v).abs() < 1e-24);
        assert!(kf_polynomial(v, v * -2.5).abs() < 1e-12);
    }

    #[test]
    fn soul_curvature_is_sixteen() {
        assert!((soul_curvature() - 16.0).abs() < 1e-12);
        let u = horizontal_at_q0(Quat::J, Quat::ZERO);
        let w = horizontal_at_q0(Quat::K, Quat::ZERO);
        assert!((3.0 * a_tensor_base_q0(Quat::J, Quat::K).norm_sqr() - 252.0).abs() < TOL);
        assert!((u.norm_sqr() * w.norm_sqr() - 16.0).abs() < TOL);
        let doubled = soul_sectional_curvature(Quat::J * 2.0, Quat::K * 2.0).unwrap();
        assert!((doubled - 16.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_soul_plane_is_an_error() {
        assert!(soul_sectional_curvature(Quat::J, Quat::J * 3.0).is_err());
    }
}
