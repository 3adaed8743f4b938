//! Certify the coupled inequality and check `U' + V'` against its envelope.
//!
//! Run with `cargo run --example system_blowup`.

use blowup::integrate::{check_envelope, extremal_system_field, integrate_ivp, IntegratorOptions};
use blowup::odi::{certify_system, SystemData, SystemParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sp = SystemParams::new(1.0, 1.5, 2.0)?;
    let d = SystemData { u0: 4.0, v0: 4.0, u1: 4.0, v1: 4.0 };
    let cert = certify_system(&sp, &d, None)?;
    println!("t* = {:.6}", cert.t_star);
    let opts = IntegratorOptions::with_horizon(cert.t_star);
    let traj = integrate_ivp(&extremal_system_field(&sp), &[d.u0, d.u1, d.v0, d.v1], &opts)?;
    let report = check_envelope(&traj, &cert, 0.02, &opts)?;
    println!(
        "passed = {}, blow-up at {:?}, worst margin {:.3e} over {} steps",
        report.passed, report.t_blowup, report.worst_margin, report.checked
    );
    Ok(())
}
