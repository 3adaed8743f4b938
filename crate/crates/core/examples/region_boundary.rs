//! Print the sub-quadratic boundary `F` with its kinks, as CSV.
//!
//! Run with `cargo run --example region_boundary > boundary.csv`.

use blowup::odi::{boundary_f, sub_quadratic_constants, OdiError, OdiParams};

fn main() -> Result<(), OdiError> {
    let params = OdiParams::new(1.0, 2.0, 1.5)?;
    let c = sub_quadratic_constants(&params)?;
    eprintln!(
        "x1 = {:.6}, x2 = {:.6}, plateau = {:.6}, alpha = {:.6}",
        c.x1, c.x2, c.plateau, c.alpha
    );
    println!("x,y");
    let n = 60;
    for i in 0..=n {
        let x = -2.0 + 5.0 * i as f64 / n as f64;
        println!("{x},{}", boundary_f(&c, &params, x));
    }
    Ok(())
}
