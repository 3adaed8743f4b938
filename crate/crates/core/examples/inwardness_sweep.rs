//! Sample the region boundaries and report the smallest inward component of
//! the equality-case field. Non-negative means the region is invariant.
//!
//! Run with `cargo run --example inwardness_sweep`.

use blowup::integrate::boundary_inwardness;
use blowup::odi::{certify_scalar, certify_system, OdiParams, SystemData, SystemParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for q in [1.2, 1.5, 2.0, 2.5, 4.0] {
        let params = OdiParams::new(1.0, 1.0, q)?;
        let cert = certify_scalar(&params, 1.0, 1e3)?;
        let r = boundary_inwardness(&cert.region, &cert.params, 2000, (-3.0, 10.0))?;
        println!("scalar q = {q}: min inward = {:.3e} at x = {:.4} ({} samples)", r.min_inward, r.argmin_x, r.samples);
    }
    let sp = SystemParams::new(1.0, 1.5, 2.0)?;
    let cert = certify_system(&sp, &SystemData { u0: 4.0, v0: 4.0, u1: 4.0, v1: 4.0 }, None)?;
    let r = boundary_inwardness(&cert.region, &cert.params, 2000, (0.0, 10.0))?;
    println!("system p = 1.5, q = 2: min inward = {:.3e} ({} counted, {} skipped)", r.min_inward, r.samples, r.skipped);
    Ok(())
}
