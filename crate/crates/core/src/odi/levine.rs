//! The comparison region `v1 > v0 > s0` for the equality case `g(s) = C|s|^q`.

use super::{OdiError, Result};

/// `s0 = ((λ + 1)/C)^(1/(q-1))`.
pub fn levine_threshold(lambda: f64, growth: f64, q: f64) -> Result<f64> {
    if !(lambda > 0.0 && growth > 0.0 && q > 1.0) {
        return Err(OdiError::InvalidParameter(format!(
            "need lambda > 0, C > 0, q > 1; got {lambda}, {growth}, {q}"
        )));
    }
    Ok(((lambda + 1.0) / growth).powf(1.0 / (q - 1.0)))
}

pub fn levine_region(lambda: f64, growth: f64, q: f64, v0: f64, v1: f64) -> Result<bool> {
    let s0 = levine_threshold(lambda, growth, q)?;
    Ok(v1 > v0 && v0 > s0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(levine_threshold(1.0, 1.0, 2.0).unwrap(), 2.0);
        assert!(levine_region(1.0, 1.0, 2.0, 3.0, 4.0).unwrap());
        assert!(!levine_region(1.0, 1.0, 2.0, 1.0, 4.0).unwrap());
        assert!(!levine_region(1.0, 1.0, 2.0, 3.0, 3.0).unwrap());
        assert!(levine_region(0.0, 1.0, 2.0, 3.0, 4.0).is_err());
    }
}
