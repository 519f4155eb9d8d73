//! Fast and slow data configurations on the 2-sphere: four points in a cross
//! versus two doubled points, with t = 1.
//!
//!     cargo run --example sphere_configs [out_dir]

use geomean::experiments::{run_sphere_configs, DEFAULT_SEED};
use std::f64::consts::PI;

fn main() -> geomean::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/sphere".into());
    let rhos = [0.35 * PI, 0.47 * PI];
    let report = run_sphere_configs(&rhos, 1.0, DEFAULT_SEED, out.as_ref())?;
    for r in &report.runs {
        println!(
            "{:<5} rho = {:.2} pi: {:>3} iterations to d < 1e-6, fitted q = {:.4}",
            r.config.name(),
            r.rho_over_pi,
            r.iterations_to_1e6.unwrap_or(usize::MAX),
            r.empirical_q.unwrap_or(f64::NAN)
        );
    }
    println!("plot: {out}/sphere_configs.svg");
    Ok(())
}
