//! One gradient step with t in (0, 1] never leaves a ball that contains the
//! data, and iterates that enter the data hull stay there.
//!
//!     cargo run --release --example tethering [trials]

use geomean::geocheck::{hull_trap_check, tethering_check};
use geomean::manifolds::ManifoldSpace;

fn main() -> geomean::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let spaces = [
        ManifoldSpace::sphere(2, 1.0)?,
        ManifoldSpace::sphere(3, 1.0)?,
        ManifoldSpace::so3(),
        ManifoldSpace::real_projective(2, 1.0)?,
    ];
    for space in &spaces {
        let t = tethering_check(space, n, &[0.1, 0.5, 1.0], 11);
        let h = hull_trap_check(space, n / 10, 11);
        println!(
            "{:?} dim {}: {} exits in {} trials (min relative margin {:.2e}); hull trap violations {}/{}",
            space.kind(),
            space.dim(),
            t.violations,
            t.trials,
            t.min_margin,
            h.violations,
            h.trials
        );
    }
    Ok(())
}
