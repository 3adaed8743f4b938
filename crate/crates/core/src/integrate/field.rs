use std::fmt;
use std::sync::Arc;

use crate::odi::{OdiParams, SystemParams};

type EvalFn = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;

/// A first-order vector field `y' = f(t, y)`.
#[derive(Clone)]
pub struct Field {
    dimension: usize,
    label: String,
    eval: Arc<EvalFn>,
}

impl Field {
    pub fn new<F>(dimension: usize, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self { dimension, label: label.into(), eval: Arc::new(eval) }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.eval)(t, y, dy)
    }

    pub fn derivative(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let mut dy = vec![0.0; self.dimension];
        self.eval(t, y, &mut dy);
        dy
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("dimension", &self.dimension)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// Equality case `v'' = b|v'|^q - a v` as the planar system `(x, y) = (v, v')`.
pub fn extremal_scalar_field(params: &OdiParams) -> Field {
    let (a, b, q) = (params.a(), params.b(), params.q());
    Field::new(2, format!("v'' = {b}|v'|^{q} - {a} v"), move |_, s, ds| {
        ds[0] = s[1];
        ds[1] = b * s[1].abs().powf(q) - a * s[0];
    })
}

/// Equality case of the coupled system over `(U, U', V, V')`:
/// `U'' = |V'|^p - aU`, `V'' = |U'|^q - aV`.
pub fn extremal_system_field(sp: &SystemParams) -> Field {
    let (a, p, q) = (sp.a(), sp.p(), sp.q());
    Field::new(4, format!("U'' = |V'|^{p} - {a}U, V'' = |U'|^{q} - {a}V"), move |_, s, ds| {
        ds[0] = s[1];
        ds[1] = s[3].abs().powf(p) - a * s[0];
        ds[2] = s[3];
        ds[3] = s[1].abs().powf(q) - a * s[2];
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_field_values() {
        let f = extremal_scalar_field(&OdiParams::new(1.0, 2.0, 1.5).unwrap());
        assert_eq!(f.derivative(0.0, &[0.0, 1.0]), vec![1.0, 2.0]);
        let d = f.derivative(0.0, &[0.5, 2.0 / 3.0]);
        assert!((d[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((d[1] - (2.0 * (2.0f64 / 3.0).powf(1.5) - 0.5)).abs() < 1e-15);
        assert!((d[1] - 0.5887).abs() < 1e-4);
        let f = extremal_scalar_field(&OdiParams::new(1.0, 1.0, 2.5).unwrap());
        assert_eq!(f.derivative(0.0, &[1.0, 1.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn system_field_values() {
        let f = extremal_system_field(&SystemParams::new(1.0, 1.5, 2.0).unwrap());
        assert_eq!(f.derivative(0.0, &[4.0, 4.0, 4.0, 4.0]), vec![4.0, 4.0, 4.0, 12.0]);
        assert_eq!(f.derivative(0.0, &[0.0, 1.0, 0.0, 1.0]), vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(f.dimension(), 4);
    }
}
