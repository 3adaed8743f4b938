//! Fit the blow-up time and exponent from the tail of `v'' = v'^q`, whose
//! derivative blows up like `(T - t)^(-1/(q-1))`.
//!
//! Run with `cargo run --example blowup_rate_fit`.

use blowup::integrate::{detect_blowup, extremal_scalar_field, integrate_ivp, IntegratorOptions};
use blowup::odi::OdiParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = IntegratorOptions::with_horizon(10.0);
    for q in [1.5, 2.0, 3.0] {
        let params = OdiParams::new(1e-12, 1.0, q)?;
        let traj = integrate_ivp(&extremal_scalar_field(&params), &[0.0, 1.0], &opts)?;
        let fit = detect_blowup(&traj, &opts, None)?;
        // From v'(0) = 1 the exact time is 1/(q-1).
        println!(
            "q = {q}: T = {:.8} (exact {:.8}), exponent = {:.5} (exact {:.5})",
            fit.t_est,
            1.0 / (q - 1.0),
            fit.exponent_est,
            1.0 / (q - 1.0)
        );
    }
    Ok(())
}
