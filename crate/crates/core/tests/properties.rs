use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4};
use proptest::prelude::*;

use soulcheck_core::biquotient::{
    act, horizontal_field, metric, numerical_rank, to_base, vertical_basis, GroupElement,
};
use soulcheck_core::normal_bundle::{nabla_at, nabla_q0, parallel_transport, r_nabla, splitting_defect, BaseTangent};
use soulcheck_core::oneill::{kf_polynomial, kf_via_a};
use soulcheck_core::quat::{ad, exp_im, exp_q, ImQuat};
use soulcheck_core::rigidity::{clutching_trivial, invariant_splitting, skew_kernel, vanishing_oracle};
use soulcheck_core::soul_inequality::{
    classify_zero, ddkf, in_assembled, in_general, in_poly, plucker, sos, ZeroClass,
};
use soulcheck_core::{BaseDirection, Quat, SkewEndo, TotalPoint, TotalTangent};

fn quat_in(scale: f64) -> impl Strategy<Value = Quat> {
    prop::array::uniform4(-scale..scale).prop_map(Quat::from_array)
}

fn ball() -> impl Strategy<Value = Quat> {
    quat_in(1.0).prop_map(|q| if q.norm() > 1.0 { q / q.norm() } else { q })
}

fn unit() -> impl Strategy<Value = Quat> {
    quat_in(1.0).prop_filter("nonzero", |q| q.norm() > 1e-3).prop_map(|q| q / q.norm())
}

fn im_unit() -> impl Strategy<Value = ImQuat> {
    prop::array::uniform3(-1.0..1.0f64)
        .prop_filter("nonzero", |c| c.iter().map(|v| v * v).sum::<f64>() > 1e-6)
        .prop_map(|c| {
            let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            ImQuat::new(c[0] / n, c[1] / n, c[2] / n)
        })
}

fn direction() -> impl Strategy<Value = BaseDirection> {
    (0.0..2.0 * PI).prop_map(BaseDirection::from_angle)
}

fn circle() -> impl Strategy<Value = Quat> {
    (0.0..2.0 * PI).prop_map(|t: f64| Quat::new(t.cos(), t.sin(), 0.0, 0.0))
}

fn total_point() -> impl Strategy<Value = TotalPoint> {
    (unit(), quat_in(2.0), unit(), unit(), unit(), circle(), unit()).prop_map(|(a, v, x, b, c, s, y)| {
        // mix the circle factor into y so that y covers S^3
        TotalPoint::new(a, v, x, b, c, (s * y).normalized()).expect("unit slots")
    })
}

fn tangent_at(p: &TotalPoint, raw: [Quat; 6]) -> TotalTangent {
    let slots = p.slots();
    let mut out = [Quat::ZERO; 6];
    for k in 0..6 {
        out[k] = if k == 1 { raw[k] } else { slots[k] * raw[k].im_part() };
    }
    TotalTangent(out)
}

fn group_element() -> impl Strategy<Value = GroupElement> {
    (unit(), unit(), unit(), unit(), circle())
        .prop_map(|(g1, g2, s, t, sigma)| GroupElement::new(g1, g2, s, t, sigma).expect("valid"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_multiplicative(p in quat_in(10.0), q in quat_in(10.0)) {
        let lhs = (p * q).norm();
        let rhs = p.norm() * q.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn inner_is_real_part_of_product(p in quat_in(3.0), q in quat_in(3.0)) {
        prop_assert!((p.inner(q) - (p * q.conj()).re()).abs() <= 1e-12);
        prop_assert!((p.inner(q) - (p.conj() * q).re()).abs() <= 1e-12);
    }

    #[test]
    fn ad_is_isometry_fixing_one(s in unit(), u in quat_in(2.0), v in quat_in(2.0)) {
        let au = ad(s, u).unwrap();
        let av = ad(s, v).unwrap();
        prop_assert!((au.inner(av) - u.inner(v)).abs() <= 1e-12 * u.norm().max(1.0) * v.norm().max(1.0));
        prop_assert!(ad(s, Quat::ONE).unwrap().approx_eq(Quat::ONE, 1e-12));
    }

    #[test]
    fn exp_is_one_parameter_group(x in im_unit(), s in -5.0..5.0f64, t in -5.0..5.0f64) {
        prop_assert!((exp_im(x, s) * exp_im(x, t)).approx_eq(exp_im(x, s + t), 1e-12));
    }

    #[test]
    fn vertical_space_has_rank_13(p in total_point(), zero in any::<bool>()) {
        let p = if zero { TotalPoint { v: Quat::ZERO, ..p } } else { p };
        prop_assert!(vertical_basis(&p).is_ok());
    }

    #[test]
    fn horizontal_space_has_rank_6(p in total_point()) {
        prop_assume!(p.radius() > 0.1);
        let mut fields = Vec::new();
        for a in [Quat::J, Quat::K] {
            fields.push(horizontal_field(&p, a, Quat::ZERO).unwrap());
        }
        for b in Quat::BASIS {
            fields.push(horizontal_field(&p, Quat::ZERO, b).unwrap());
        }
        prop_assert_eq!(numerical_rank(&fields), 6);
    }

    #[test]
    fn action_preserves_metric(
        g in group_element(),
        p in total_point(),
        ru in prop::array::uniform6(quat_in(1.0)),
        rw in prop::array::uniform6(quat_in(1.0)),
    ) {
        let u = tangent_at(&p, ru);
        let w = tangent_at(&p, rw);
        let h = 1e-5;
        let push = |t: &TotalTangent| -> TotalTangent {
            let fwd = act(&g, &p.geodesic(t, h)).unwrap().slots();
            let bwd = act(&g, &p.geodesic(t, -h)).unwrap().slots();
            let mut out = [Quat::ZERO; 6];
            for k in 0..6 {
                out[k] = (fwd[k] - bwd[k]) * (0.5 / h);
            }
            TotalTangent(out)
        };
        let before = metric(&p, &u, &w).unwrap();
        let after = push(&u).dot(&push(&w));
        prop_assert!((before - after).abs() <= 1e-6, "{} vs {}", before, after);
    }

    #[test]
    fn quotient_map_is_orbit_invariant(g in group_element(), p in total_point()) {
        let (base, v) = to_base(&p).unwrap();
        let (base_g, v_g) = to_base(&act(&g, &p).unwrap()).unwrap();
        prop_assert!(base.approx_eq(&base_g, 1e-9));
        prop_assert!(v.approx_eq(v_g, 1e-9 * v.norm().max(1.0)));
    }

    #[test]
    fn fiber_curvature_identity(v in ball(), w in ball(), lambda in -3.0..3.0f64) {
        prop_assert!((kf_polynomial(v, w) - kf_via_a(v, w)).abs() <= 1e-9);
        prop_assert!(kf_polynomial(v, w) >= -1e-12);
        prop_assert!(kf_polynomial(v, v * lambda).abs() <= 1e-12);
    }

    #[test]
    fn fiber_curvature_isotropy_invariant(v in ball(), w in ball(), e in circle()) {
        let rot = |q: Quat| e * q * e.conj();
        prop_assert!((kf_polynomial(rot(v), rot(w)) - kf_polynomial(v, w)).abs() <= 1e-9);
    }

    #[test]
    fn transport_is_isometry(dir in direction(), v in quat_in(2.0), w in quat_in(2.0), t in -7.0..7.0f64) {
        let pv = parallel_transport(&dir, v, t).unwrap();
        let pw = parallel_transport(&dir, w, t).unwrap();
        prop_assert!((pv.inner(pw) - v.inner(w)).abs() <= 1e-12 * v.norm().max(1.0) * w.norm().max(1.0) * 4.0);
    }

    #[test]
    fn connection_is_metric(s in unit(), x in direction(), v in quat_in(2.0), w in quat_in(2.0)) {
        let tangent = BaseTangent::at_q0(x.quat()).push(s);
        let nv = nabla_at(s, &tangent, v).unwrap();
        let nw = nabla_at(s, &tangent, w).unwrap();
        prop_assert!((nv.inner(w) + v.inner(nw)).abs() <= 1e-12 * v.norm().max(1.0) * w.norm().max(1.0) * 4.0);
    }

    #[test]
    fn curvature_is_commutator_of_connection(dir in direction(), v in quat_in(2.0)) {
        let x = dir.quat();
        let y = dir.complement();
        // second covariant derivatives of the constant section along normal coordinate
        // fields: difference forms composed, plus the flat derivative of the inner
        // difference form along the outer direction
        let bracket = x * y - y * x;
        let second = nabla_q0(x, nabla_q0(y, v)) - nabla_q0(y, nabla_q0(x, v))
            - bracket * v * 1.5
            + v * bracket * 0.5;
        prop_assert!((second * 4.0).approx_eq(r_nabla(v), 1e-12 * v.norm().max(1.0) * 64.0));
    }

    #[test]
    fn curvature_maps_sigma1_to_sigma2(dir in direction(), n in 0usize..=31) {
        let t = (n as f64 * 0.1).min(PI);
        prop_assert!(splitting_defect(&dir, t).unwrap() <= 1e-9);
    }

    #[test]
    fn assembly_matches_polynomial(v in ball(), w in ball()) {
        prop_assert!((in_assembled(v, w).in_value - in_poly(v, w)).abs() <= 1e-9);
    }

    #[test]
    fn inequality_is_nonnegative(dir in direction(), v in ball(), w in ball()) {
        prop_assert!(in_general(&dir, v, w) >= -1e-9);
    }

    #[test]
    fn dependent_pairs_vanish(v in quat_in(2.0), lambda in -3.0..3.0f64) {
        // the expanded quartic cancels up to rounding only
        let scale = 4000.0 * v.norm_sqr() * (v * lambda).norm_sqr();
        prop_assert!(in_poly(v, v * lambda).abs() <= 1e-14 * scale.max(1e-300));
    }

    #[test]
    fn published_certificate_residual(v in ball(), w in ball()) {
        let b = plucker(v, w)[1];
        prop_assert!((sos(v, w) - in_poly(v, w) - 28.0 * b * b).abs() <= 1e-9);
    }

    #[test]
    fn isotropy_equivariance(dir in direction(), v in ball(), w in ball(), e in circle()) {
        let rot = |q: Quat| e * q * e.conj();
        let moved = BaseDirection::new(rot(dir.quat())).unwrap();
        prop_assert!((in_general(&moved, rot(v), rot(w)) - in_general(&dir, v, w)).abs() <= 1e-9);
    }

    #[test]
    fn second_derivative_vanishes_on_invariant_planes(
        dir in direction(),
        coeffs in prop::array::uniform4(-1.0..1.0f64),
        t in 0.0..PI,
        second in any::<bool>(),
    ) {
        let x = dir.quat();
        let (e1, e2) = if second { (Quat::I, dir.complement()) } else { (Quat::ONE, x) };
        let v = e1 * coeffs[0] + e2 * coeffs[1];
        let w = e1 * coeffs[2] + e2 * coeffs[3];
        // transported fields pulled back to q₀
        let pull = |q: Quat| exp_q(x, 0.25 * t) * q * exp_q(x, -0.75 * t);
        prop_assert!(ddkf(&dir, pull(v), pull(w)).abs() <= 1e-12);
    }

    #[test]
    fn zeros_lie_on_known_locus(v in ball(), w in ball()) {
        if in_poly(v, w) <= 1e-12 {
            let class = classify_zero(&BaseDirection::j(), v, w);
            prop_assert!(class != ZeroClass::Unexplained);
        }
    }

    #[test]
    fn splitting_reconstructs(entries in prop::array::uniform6(-3.0..3.0f64)) {
        let mut m = Matrix4::zeros();
        let idx = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for (&(r, c), &e) in idx.iter().zip(entries.iter()) {
            m[(r, c)] = e;
            m[(c, r)] = -e;
        }
        let skew = SkewEndo::new(DMatrix::from_iterator(4, 4, m.iter().copied())).unwrap();
        if let Ok(s) = invariant_splitting(&skew) {
            prop_assert!((s.reconstruct() - m).amax() <= 1e-9);
            prop_assert!(s.f1 <= 0.0 && s.f2 <= 0.0 && s.f1.abs() >= s.f2.abs());
        }
    }

    #[test]
    fn skew_kernel_residual(n in prop::sample::select(vec![1usize, 3, 5, 7, 9, 11]), seed in any::<u64>()) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let a = DMatrix::from_fn(n, n, |_, _| next());
        let m = &a - a.transpose();
        let skew = SkewEndo::new(m.clone()).unwrap();
        let x = skew_kernel(&skew).unwrap();
        prop_assert!((x.norm() - 1.0).abs() <= 1e-12);
        prop_assert!((&m * &x).norm() <= 1e-10 * skew.norm().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn vanishing_oracle_is_zero(k in 0.0..1e3f64, t in 0.01..100.0f64) {
        prop_assert_eq!(vanishing_oracle(k, t), 0.0);
    }

    #[test]
    fn clutching_parity_symmetries(k1 in -1000i64..1000, k2 in -1000i64..1000) {
        prop_assert_eq!(clutching_trivial(k1, k2), clutching_trivial(k2, k1));
        prop_assert_eq!(clutching_trivial(k1, k2), clutching_trivial(k1 + 2, k2));
    }
}
