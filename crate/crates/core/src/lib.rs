//! Finite-time blow-up certificates for the differential inequality
//! `v'' + a v >= b v'^q`, a coupled system of such inequalities, and the
//! semilinear wave problems that reduce to them through an eigenfunction
//! projection.
//!
//! - [`odi`] decides membership in the admissible regions and builds
//!   [`odi::Certificate`]s with an upper bound on the blow-up time and a lower
//!   envelope for the growing derivative.
//! - [`integrate`] integrates the equality-case fields with an adaptive
//!   Dormand-Prince pair and checks the certificates numerically.
//! - [`spectral`] is a sine-Galerkin solver on `(0, pi)` for the wave,
//!   wave-system, hyperbolic-elliptic and hyperbolic-parabolic problems.
//! - [`cli`] backs the `blowup` binary.
//!
//! ```
//! use blowup::odi::{certify_scalar, rate_envelope, OdiParams};
//!
//! let params = OdiParams::new(1.0, 2.0, 1.5)?;
//! let cert = certify_scalar(&params, 0.0, 1.0)?;
//! assert!((cert.t_star - 2.0).abs() < 1e-12);
//! assert!((rate_envelope(&cert, 1.0)? - 4.0).abs() < 1e-12);
//! # Ok::<(), blowup::odi::OdiError>(())
//! ```

pub mod cli;
pub mod format;
pub mod integrate;
pub mod odi;
pub mod spectral;
