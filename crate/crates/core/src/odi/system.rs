//! The coupled inequality `U'' + aU >= V'^p`, `V'' + aV >= U'^q` with `1 < p <= q`.

use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, InitialData};
use super::{OdiError, Result, SystemParams};

/// Initial positions and velocities `(U0, V0, U1, V1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemData {
    pub u0: f64,
    pub v0: f64,
    pub u1: f64,
    pub v1: f64,
}

/// `f_p(x) = H(x) (alpha a x)^(1/p)` with `alpha = 1 + 1/(ap)` and `H(0) = 1`.
pub fn boundary_fp(a: f64, p: f64, x: f64) -> f64 {
    let alpha = 1.0 + 1.0 / (a * p);
    heaviside_power(alpha * a, p, x)
}

fn heaviside_power(scale: f64, exponent: f64, x: f64) -> f64 {
    if x >= 0.0 {
        (scale * x).powf(1.0 / exponent)
    } else {
        0.0
    }
}

/// Derivative of `x -> (scale x)^(1/e)` for `x > 0`, zero for `x < 0`.
pub fn boundary_fp_slope(scale: f64, exponent: f64, x: f64) -> f64 {
    if x > 0.0 {
        scale / exponent * (scale * x).powf(1.0 / exponent - 1.0)
    } else {
        0.0
    }
}

impl SystemParams {
    /// Face `y = f_p(x)` of the invariant product region in the `(U, V')` plane.
    pub fn boundary_p(&self, x: f64) -> f64 {
        heaviside_power(self.alpha_sys() * self.a(), self.p(), x)
    }

    /// Face `t = f_q(z)` in the `(V, U')` plane. Uses the same `alpha`.
    pub fn boundary_q(&self, z: f64) -> f64 {
        heaviside_power(self.alpha_sys() * self.a(), self.q(), z)
    }
}

pub fn in_region_system(sp: &SystemParams, d: &SystemData) -> bool {
    let k = sp.a() + 1.0 / sp.p();
    d.u1 > 1.0
        && d.v1 > 1.0
        && d.u0 * d.v0 >= d.u1 * d.v1
        && d.u1.powf(sp.q()) >= k * d.v0
        && d.v1.powf(sp.p()) >= k * d.u0
}

/// Certificate for `W = U + V`:
/// `W'(t) >= ((U1+V1)^(1-p) - (p-1)/(1+ap) 2^(1-p) t)^(1/(1-p))`.
///
/// For the projected PDE system pass the eigenvalue as `a` and
/// `Some(sup phi)` as `phi_sup`; the certificate then carries the factor
/// bounding `|u_t + v_t|_{L^1}` from below.
pub fn certify_system(
    sp: &SystemParams,
    d: &SystemData,
    phi_sup: Option<f64>,
) -> Result<Certificate> {
    for x in [d.u0, d.v0, d.u1, d.v1] {
        if !x.is_finite() {
            return Err(OdiError::InvalidParameter(format!("initial data must be finite: {d:?}")));
        }
    }
    let l1_factor = match phi_sup {
        Some(s) if s > 0.0 && s.is_finite() => Some(1.0 / s),
        Some(s) => {
            return Err(OdiError::InvalidParameter(format!("sup of phi must be positive, got {s}")))
        }
        None => None,
    };
    if !in_region_system(sp, d) {
        return Err(OdiError::NotCertified(format!(
            "system data {d:?} violates U1, V1 > 1, U0 V0 >= U1 V1 or the growth conditions"
        )));
    }
    let p = sp.p();
    let slope = (p - 1.0) * sp.beta_sys() * 2f64.powf(1.0 - p);
    let initial = InitialData::System { u0: d.u0, v0: d.v0, u1: d.u1, v1: d.v1 };
    Ok(Certificate::system(*sp, initial, d.u1 + d.v1, slope, l1_factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odi::rate_envelope;

    fn data(u0: f64, v0: f64, u1: f64, v1: f64) -> SystemData {
        SystemData { u0, v0, u1, v1 }
    }

    #[test]
    fn region_examples() {
        let sp = SystemParams::new(1.0, 1.5, 2.0).unwrap();
        assert!(in_region_system(&sp, &data(4.0, 4.0, 4.0, 4.0)));
        assert!(!in_region_system(&sp, &data(1.0, 1.0, 2.0, 2.0)));
        assert!(!in_region_system(&sp, &data(4.0, 4.0, 1.0, 4.0)));
    }

    #[test]
    fn certificate_example() {
        let sp = SystemParams::new(1.0, 1.5, 2.0).unwrap();
        let c = certify_system(&sp, &data(4.0, 4.0, 4.0, 4.0), None).unwrap();
        assert!((c.t_star - 2.5).abs() < 1e-14);
        assert_eq!(rate_envelope(&c, 0.0).unwrap(), 8.0);
        let expected = |t: f64| (8f64.powf(-0.5) - 0.2 * 2f64.powf(-0.5) * t).powf(-2.0);
        for &t in &[0.5, 1.0, 2.0, 2.4] {
            let v = rate_envelope(&c, t).unwrap();
            assert!((v - expected(t)).abs() < 1e-12 * expected(t));
        }
        assert_eq!(c.epsilon, None);
        assert_eq!(c.l1_factor, None);
        let c = certify_system(&sp, &data(4.0, 4.0, 4.0, 4.0), Some(0.5)).unwrap();
        assert_eq!(c.l1_factor, Some(2.0));
    }

    #[test]
    fn symmetric_p_equals_q() {
        let sp = SystemParams::new(1.0, 2.0, 2.0).unwrap();
        assert!(certify_system(&sp, &data(4.0, 4.0, 4.0, 4.0), None).is_ok());
    }

    #[test]
    fn not_certified() {
        let sp = SystemParams::new(1.0, 1.5, 2.0).unwrap();
        assert!(matches!(
            certify_system(&sp, &data(1.0, 1.0, 2.0, 2.0), None),
            Err(OdiError::NotCertified(_))
        ));
    }

    #[test]
    fn fp_examples() {
        assert_eq!(boundary_fp(1.0, 1.5, 0.0), 0.0);
        assert_eq!(boundary_fp(1.0, 1.5, -5.0), 0.0);
        let v = boundary_fp(1.0, 1.5, 3.0);
        assert!((v - 5f64.powf(2.0 / 3.0)).abs() < 1e-14);
        assert!((v - 2.924_017_738_212_866).abs() < 1e-14);
        let sp = SystemParams::new(1.0, 1.5, 2.0).unwrap();
        assert_eq!(sp.boundary_p(3.0), v);
        // growth conditions read as membership in the two faces
        assert!(4.0 >= sp.boundary_q(4.0) && 4.0 >= sp.boundary_p(4.0));
    }
}
