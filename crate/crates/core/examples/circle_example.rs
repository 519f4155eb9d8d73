//! The two-point circle example: global center, the antipode hit, and the
//! local center reached with an oversized step.
//!
//!     cargo run --example circle_example [out_dir]

use geomean::experiments::run_circle_example;
use std::f64::consts::PI;

fn main() -> geomean::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/circle".into());
    let report = run_circle_example(out.as_ref())?;
    for s in &report.scenarios {
        println!(
            "{:<22} t = {:<8.5} final theta = {:>8.5} pi  (expected {:>7.4} pi)  {:?}",
            s.name,
            s.t,
            s.final_theta / PI,
            s.expected_theta / PI,
            s.status
        );
    }
    println!("wrote traces and circle_f2.svg to {out}");
    Ok(())
}
