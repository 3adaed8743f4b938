//! Certify initial data for `v'' + a v >= b v'^q` on both sides of `q = 2`.
//!
//! Run with `cargo run --example certify_scalar`.

use blowup::odi::{certify_scalar, epsilon_min, rate_envelope, OdiError, OdiParams};

fn main() -> Result<(), OdiError> {
    let sub = OdiParams::new(1.0, 2.0, 1.5)?;
    let cert = certify_scalar(&sub, 0.0, 1.0)?;
    println!("q = 1.5, (v0, v1) = (0, 1): t* = {:.6}", cert.t_star);
    for t in [0.0, 0.5, 1.0, 1.5] {
        println!("  v'({t}) >= {:.6}", rate_envelope(&cert, t)?);
    }

    let sup = OdiParams::new(1.0, 1.0, 3.0)?;
    let eps = epsilon_min(&sup, 0.0, 2.0)?;
    let cert = certify_scalar(&sup, 0.0, 2.0)?;
    println!("q = 3, (v0, v1) = (0, 2): epsilon = {eps:.6}, t* = {:.6}", cert.t_star);

    match certify_scalar(&sub, 0.0, 0.5) {
        Err(e @ OdiError::NotCertified(_)) => println!("(0, 0.5): {e}"),
        other => println!("(0, 0.5): unexpected {other:?}"),
    }
    Ok(())
}
