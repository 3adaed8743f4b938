//! Compare the classical wedge `{v1 > max(v0, s0)}` with the admissible
//! region by seeded sampling, and print witnesses that only we certify.
//!
//! Run with `cargo run --example levine_comparison`.

use blowup::cli::levine_comparison;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for q in [1.5, 2.0, 3.0] {
        let cmp = levine_comparison(1.0, 1.0, q, 5000, 0, 3)?;
        println!(
            "q = {q}: s0 = {:.4}, wedge in ours {}/{}, ours outside wedge {}/{}",
            cmp.s0,
            cmp.levine_in_ours.count,
            cmp.levine_in_ours.total,
            cmp.ours_not_levine.count,
            cmp.ours_not_levine.total
        );
        for w in &cmp.witnesses {
            println!("  witness ({}, {})", w.v0, w.v1);
        }
    }
    Ok(())
}
