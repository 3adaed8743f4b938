//! Region geometry of the scalar inequality `v'' + a v >= b v'^q`.
//!
//! For `q <= 2` the admissible set is the open epigraph `y > F(x)` of a
//! four-piece curve; for `q > 2` it is the set where the quadratic
//! `f(eps)` below is positive at `eps = 1`, and invariance is carried by the
//! curve `F2` through the initial point.

use serde::{Deserialize, Serialize};

use super::{OdiError, OdiParams, Result};

/// Constants of the sub-quadratic boundary curve `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubQuadraticConstants {
    pub alpha: f64,
    /// Velocity at which the two branches of the region test switch.
    pub v1_threshold: f64,
    pub x1: f64,
    pub x2: f64,
    pub plateau: f64,
}

pub fn sub_quadratic_constants(params: &OdiParams) -> Result<SubQuadraticConstants> {
    let (a, b, q) = (params.a(), params.b(), params.q());
    if q > 2.0 {
        return Err(OdiError::WrongBranch { q, branch: "sub-quadratic (q <= 2)" });
    }
    let ratio = 4.0 * a / (b * b * q);
    let denom = 2.0 * q - 2.0;
    let plateau = ratio.powf(1.0 / denom);
    // (2-q)/(2q-2) is exactly zero at q = 2 and powf(0) returns 1.
    let alpha = 2.0 * a / (b * q) * ratio.powf((2.0 - q) / denom);
    let x2 = b / (2.0 * a) * ratio.powf(q / denom);
    Ok(SubQuadraticConstants { alpha, v1_threshold: plateau, x1: -alpha / a, x2, plateau })
}

/// The continuous four-piece boundary `F`; the admissible region is `y > F(x)`.
pub fn boundary_f(consts: &SubQuadraticConstants, params: &OdiParams, x: f64) -> f64 {
    let (a, b, q) = (params.a(), params.b(), params.q());
    if x <= consts.x1 {
        0.0
    } else if x < 0.0 {
        (2.0 * (a * x + consts.alpha) / b).max(0.0).powf(1.0 / q)
    } else if x <= consts.x2 {
        consts.plateau
    } else {
        (2.0 * a * x / b).powf(1.0 / q)
    }
}

/// One-sided slopes `(F'(x-), F'(x+))`. They differ only at the three kinks;
/// the right slope at `x1` is `+inf`.
pub fn boundary_f_slope(consts: &SubQuadraticConstants, params: &OdiParams, x: f64) -> (f64, f64) {
    let (a, b, q) = (params.a(), params.b(), params.q());
    // On both curved pieces F' = 2a/(bq) * F^(1-q).
    let curved = |y: f64| 2.0 * a / (b * q) * y.powf(1.0 - q);
    let piece = |x: f64, right: bool| -> f64 {
        let on_left_flat = if right { x < consts.x1 } else { x <= consts.x1 };
        let on_concave = if right { x < 0.0 } else { x <= 0.0 };
        let on_plateau = if right { x < consts.x2 } else { x <= consts.x2 };
        if on_left_flat {
            0.0
        } else if on_concave {
            curved((2.0 * (a * x + consts.alpha) / b).max(0.0).powf(1.0 / q))
        } else if on_plateau {
            0.0
        } else {
            curved((2.0 * a * x / b).powf(1.0 / q))
        }
    };
    (piece(x, false), piece(x, true))
}

/// Membership in the open sub-quadratic region `{v1 > 0, v1 > F(v0)}`.
///
/// Comparisons are exact binary64. On the plateau the test is `v1 > plateau`
/// directly, so the corner `(0, plateau)` is rejected regardless of how
/// `alpha` rounds.
pub fn in_region_sub_quadratic(params: &OdiParams, v0: f64, v1: f64) -> Result<bool> {
    let c = sub_quadratic_constants(params)?;
    if !(v1 > 0.0) || !v0.is_finite() || !v1.is_finite() {
        return Ok(false);
    }
    let (a, b, q) = (params.a(), params.b(), params.q());
    let inside = if v0 <= c.x1 {
        true
    } else if v0 < 0.0 {
        a * v0 + c.alpha < 0.5 * b * v1.powf(q)
    } else if v0 <= c.x2 {
        v1 > c.plateau
    } else {
        a * v0 < 0.5 * b * v1.powf(q)
    };
    Ok(inside)
}

/// `f(eps) = eps b q v1^(q-2) (eps b v1^q - a v0) - a`.
pub fn epsilon_polynomial(params: &OdiParams, v0: f64, v1: f64, eps: f64) -> f64 {
    let (a, b, q) = (params.a(), params.b(), params.q());
    eps * b * q * v1.powf(q - 2.0) * (eps * b * v1.powf(q) - a * v0) - a
}

/// Smallest admissible `eps`: the positive root of `f`, which lies in `(0, 1)`
/// because `f(0) = -a < 0` and `f(1) > 0` on the admissible set.
pub fn epsilon_min(params: &OdiParams, v0: f64, v1: f64) -> Result<f64> {
    let (a, b, q) = (params.a(), params.b(), params.q());
    if q <= 2.0 {
        return Err(OdiError::WrongBranch { q, branch: "super-quadratic (q > 2)" });
    }
    if !(v1 > 0.0) {
        return Err(OdiError::InvalidParameter(format!("v1 must be positive, got {v1}")));
    }
    let f1 = epsilon_polynomial(params, v0, v1, 1.0);
    if !(f1 > 0.0) {
        return Err(OdiError::ConditionViolated { f1 });
    }
    // f(eps) = qa * eps^2 + qb * eps + qc
    let qa = b * b * q * v1.powf(2.0 * q - 2.0);
    let qb = -a * b * q * v1.powf(q - 2.0) * v0;
    let qc = -a;
    let disc = qb * qb - 4.0 * qa * qc;
    let root = if qb >= 0.0 {
        // Avoid cancellation in -qb + sqrt(disc).
        2.0 * qc / (-qb - disc.sqrt())
    } else {
        (-qb + disc.sqrt()) / (2.0 * qa)
    };
    Ok(root)
}

/// `F2(x) = ((a x + A) / (eps b))^(1/q)`, the invariant curve through the
/// initial point when `A = eps b v1^q - a v0`.
pub fn boundary_f2(params: &OdiParams, epsilon: f64, a_shift: f64, x: f64) -> Result<f64> {
    let s = params.a() * x + a_shift;
    if !(s > 0.0) {
        return Err(OdiError::Domain { value: s });
    }
    Ok((s / (epsilon * params.b())).powf(1.0 / params.q()))
}

/// `F2'(x) = a / (eps b q F2(x)^(q-1))`.
pub fn boundary_f2_slope(params: &OdiParams, epsilon: f64, a_shift: f64, x: f64) -> Result<f64> {
    let y = boundary_f2(params, epsilon, a_shift, x)?;
    Ok(params.a() / (epsilon * params.b() * params.q() * y.powf(params.q() - 1.0)))
}

/// Membership in `{v1 > 0, f(1) > 0}`.
pub fn in_region_super_quadratic(params: &OdiParams, v0: f64, v1: f64) -> Result<bool> {
    let q = params.q();
    if q <= 2.0 {
        return Err(OdiError::WrongBranch { q, branch: "super-quadratic (q > 2)" });
    }
    if !(v1 > 0.0) || !v0.is_finite() || !v1.is_finite() {
        return Ok(false);
    }
    Ok(epsilon_polynomial(params, v0, v1, 1.0) > 0.0)
}

/// Lower edge of the super-quadratic admissible set over `v0 = x`: the unique
/// `y > 0` with `f(1; x, y) = 0`. Found by bracketing and bisection.
pub fn admissible_boundary_super_quadratic(params: &OdiParams, x: f64) -> Result<f64> {
    let q = params.q();
    if q <= 2.0 {
        return Err(OdiError::WrongBranch { q, branch: "super-quadratic (q > 2)" });
    }
    if !x.is_finite() {
        return Err(OdiError::InvalidParameter(format!("x must be finite, got {x}")));
    }
    let g = |y: f64| epsilon_polynomial(params, x, y, 1.0);
    let mut hi = 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(OdiError::InvalidParameter(format!("no boundary point above x = {x}")));
        }
    }
    let mut lo = 0.0;
    // g(0+) = -a, and g has a single sign change on (0, inf).
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(a: f64, b: f64, q: f64) -> OdiParams {
        OdiParams::new(a, b, q).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn constants_for_figure_parameters() {
        let c = sub_quadratic_constants(&p(1.0, 2.0, 1.5)).unwrap();
        // alpha = (2/3)^(3/2) = 0.5443310539518174 (closed form)
        assert!(rel(c.alpha, 0.544_331_053_951_817_4) < 1e-13);
        assert!(rel(c.v1_threshold, 2.0 / 3.0) < 1e-15);
        assert!(rel(c.x2, 0.544_331_053_951_817_4) < 1e-13);
        assert!(rel(c.x1, -0.544_331_053_951_817_4) < 1e-13);
        assert_eq!(c.plateau, c.v1_threshold);
    }

    #[test]
    fn alpha_at_q_two() {
        let c = sub_quadratic_constants(&p(1.0, 2.0, 2.0)).unwrap();
        assert_eq!(c.alpha, 0.5);
    }

    #[test]
    fn wrong_branch_rejected() {
        assert!(matches!(
            sub_quadratic_constants(&p(1.0, 1.0, 2.5)),
            Err(OdiError::WrongBranch { .. })
        ));
        assert!(in_region_sub_quadratic(&p(1.0, 1.0, 2.5), 0.0, 1.0).is_err());
        assert!(in_region_super_quadratic(&p(1.0, 1.0, 1.5), 0.0, 1.0).is_err());
        assert!(epsilon_min(&p(1.0, 1.0, 2.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn boundary_f_pieces() {
        let pr = p(1.0, 2.0, 1.5);
        let c = sub_quadratic_constants(&pr).unwrap();
        assert_eq!(boundary_f(&c, &pr, c.x1), 0.0);
        assert_eq!(boundary_f(&c, &pr, -10.0), 0.0);
        assert!(rel(boundary_f(&c, &pr, 0.0), 2.0 / 3.0) < 1e-15);
        assert!(rel(boundary_f(&c, &pr, 2.0), 2f64.powf(2.0 / 3.0)) < 1e-15);
        assert!(rel(boundary_f(&c, &pr, 2.0), 1.587_401_051_968_199_4) < 1e-15);
    }

    #[test]
    fn boundary_f_continuity_at_kinks() {
        let pr = p(1.0, 2.0, 1.5);
        let c = sub_quadratic_constants(&pr).unwrap();
        let (a, b, q) = (pr.a(), pr.b(), pr.q());
        let left_at_zero = (2.0 * c.alpha / b).powf(1.0 / q);
        let right_at_x2 = (2.0 * a * c.x2 / b).powf(1.0 / q);
        assert!(rel(left_at_zero, c.plateau) < 1e-12);
        assert!(rel(right_at_x2, c.plateau) < 1e-12);
    }

    #[test]
    fn slopes_at_kinks() {
        let pr = p(1.0, 2.0, 1.5);
        let c = sub_quadratic_constants(&pr).unwrap();
        let (l, r) = boundary_f_slope(&c, &pr, c.x1);
        assert_eq!(l, 0.0);
        assert!(r.is_infinite());
        let (l, r) = boundary_f_slope(&c, &pr, 0.0);
        assert!(l > 0.0);
        assert_eq!(r, 0.0);
        let (l, r) = boundary_f_slope(&c, &pr, c.x2);
        assert_eq!(l, 0.0);
        assert!(r > 0.0);
    }

    #[test]
    fn slope_matches_finite_difference() {
        let pr = p(1.0, 2.0, 1.5);
        let c = sub_quadratic_constants(&pr).unwrap();
        for &x in &[-0.3, 1.0, 3.7] {
            let h = 1e-6;
            let fd = (boundary_f(&c, &pr, x + h) - boundary_f(&c, &pr, x - h)) / (2.0 * h);
            let (l, r) = boundary_f_slope(&c, &pr, x);
            assert_eq!(l, r);
            assert!(rel(r, fd) < 1e-6, "x={x} slope={r} fd={fd}");
        }
    }

    #[test]
    fn sub_region_examples() {
        let pr = p(1.0, 2.0, 1.5);
        assert!(in_region_sub_quadratic(&pr, 0.0, 1.0).unwrap());
        assert!(!in_region_sub_quadratic(&pr, 0.0, 2.0 / 3.0).unwrap());
        assert!(!in_region_sub_quadratic(&pr, 0.0, -1.0).unwrap());
        assert!(!in_region_sub_quadratic(&pr, 100.0, 0.1).unwrap());
        // far left every positive velocity is admissible
        assert!(in_region_sub_quadratic(&pr, -1.0, 1e-3).unwrap());
    }

    #[test]
    fn epsilon_examples() {
        let pr = p(1.0, 1.0, 2.5);
        assert!(rel(epsilon_polynomial(&pr, 0.0, 1.0, 1.0), 1.5) < 1e-15);
        let eps = epsilon_min(&pr, 0.0, 1.0).unwrap();
        assert!(rel(eps, (1.0f64 / 2.5).sqrt()) < 1e-15);
        assert!(rel(eps, 0.632_455_532_033_675_9) < 1e-15);
        let pr3 = p(1.0, 1.0, 3.0);
        assert_eq!(
            epsilon_min(&pr3, 1.0, 1.0),
            Err(OdiError::ConditionViolated { f1: -1.0 })
        );
    }

    #[test]
    fn f2_examples() {
        let pr = p(1.0, 1.0, 2.5);
        let eps = epsilon_min(&pr, 0.0, 1.0).unwrap();
        let a_shift = eps * 1.0 - 0.0;
        assert!(rel(boundary_f2(&pr, eps, a_shift, 0.0).unwrap(), 1.0) < 1e-15);
        // ((1 + eps)/eps)^(0.4)
        let expected = ((1.0 + eps) / eps).powf(0.4);
        assert!(rel(boundary_f2(&pr, eps, a_shift, 1.0).unwrap(), expected) < 1e-15);
        assert!(rel(expected, 1.461_24) < 1e-5);
        let h = 1e-5;
        let fd = (boundary_f2(&pr, eps, a_shift, h).unwrap()
            - boundary_f2(&pr, eps, a_shift, -h).unwrap())
            / (2.0 * h);
        let slope = boundary_f2_slope(&pr, eps, a_shift, 0.0).unwrap();
        assert!(rel(slope, 1.0 / (eps * 2.5)) < 1e-14);
        assert!(rel(fd, slope) < 1e-6);
        assert!(matches!(
            boundary_f2(&pr, eps, a_shift, -1.0),
            Err(OdiError::Domain { .. })
        ));
    }

    #[test]
    fn super_region_examples() {
        let pr = p(1.0, 1.0, 2.5);
        assert!(in_region_super_quadratic(&pr, 0.0, 1.0).unwrap());
        assert!(!in_region_super_quadratic(&pr, 10.0, 1.0).unwrap());
        assert!(!in_region_super_quadratic(&pr, 0.0, 0.0).unwrap());
    }

    #[test]
    fn admissible_boundary_is_root() {
        let pr = p(1.0, 1.0, 2.5);
        for &x in &[-2.0, 0.0, 0.5, 3.0] {
            let y = admissible_boundary_super_quadratic(&pr, x).unwrap();
            // parametric form of the same curve: x = y^q - a / (b^2 q y^(q-2))
            let x_back = y.powf(2.5) - 1.0 / (2.5 * y.powf(0.5));
            assert!((x_back - x).abs() < 1e-9, "x={x} back={x_back}");
        }
    }

    proptest! {
        #[test]
        fn continuity_random(a in 0.05f64..20.0, b in 0.05f64..20.0, q in 1.01f64..=2.0) {
            let pr = p(a, b, q);
            let c = sub_quadratic_constants(&pr).unwrap();
            let left_zero = (2.0 * (a * 0.0 + c.alpha) / b).powf(1.0 / q);
            let right_x2 = (2.0 * a * c.x2 / b).powf(1.0 / q);
            prop_assert!((left_zero - c.plateau).abs() <= 1e-12 * c.plateau);
            prop_assert!((right_x2 - c.plateau).abs() <= 1e-12 * c.plateau);
        }

        #[test]
        fn anchoring_random(a in 0.1f64..10.0, b in 0.1f64..10.0, q in 2.05f64..5.0,
                            v0 in -5.0f64..5.0, v1 in 0.05f64..5.0) {
            let pr = p(a, b, q);
            prop_assume!(in_region_super_quadratic(&pr, v0, v1).unwrap());
            let eps = epsilon_min(&pr, v0, v1).unwrap();
            prop_assert!(eps > 0.0 && eps < 1.0);
            let f = epsilon_polynomial(&pr, v0, v1, eps);
            // relative to the size of the terms that cancel
            let scale = a + (eps * b * q * v1.powf(q - 2.0) * (eps * b * v1.powf(q)).abs())
                + (eps * b * q * v1.powf(q - 2.0) * (a * v0).abs());
            prop_assert!(f.abs() <= 1e-10 * scale);
            let a_shift = eps * b * v1.powf(q) - a * v0;
            prop_assert!(a_shift > 0.0);
            let y = boundary_f2(&pr, eps, a_shift, v0).unwrap();
            // a*v0 + A cancels; the error is amplified by |a v0| / (eps b v1^q).
            let amplification = 1.0 + (a * v0).abs() / (eps * b * v1.powf(q));
            prop_assert!((y - v1).abs() <= 1e-13 * amplification * v1);
        }

        #[test]
        fn monotone_sub_region(v0 in -3.0f64..5.0, v1 in 0.01f64..4.0, bump in 0.0f64..3.0) {
            let pr = p(1.0, 2.0, 1.5);
            if in_region_sub_quadratic(&pr, v0, v1).unwrap() {
                prop_assert!(in_region_sub_quadratic(&pr, v0, v1 + bump).unwrap());
            }
        }
    }
}
