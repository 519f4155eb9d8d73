//! Monte Carlo check that spherical secants dominate their planar
//! counterparts, plus agreement of the closed form with a numerical oracle.
//!
//!     cargo run --release --example comparison_check [trials]

use geomean::geocheck::{comparison_check, oracle_agreement};
use geomean::manifolds::ManifoldSpace;

fn main() -> geomean::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    for space in [ManifoldSpace::sphere(2, 1.0)?, ManifoldSpace::sphere(2, 4.0)?, ManifoldSpace::hyperbolic(2, -1.0)?] {
        let r = comparison_check(&space, n, 7);
        let a = oracle_agreement(&space, n.min(1000), 7);
        println!(
            "{:?} kappa={:>4}: {} violations in {} trials (min margin {:.3e}){}; oracle max diff {:.2e}",
            space.kind(),
            space.kappa(),
            r.violations,
            r.trials,
            r.min_margin,
            if r.exploratory { " [exploratory]" } else { "" },
            a.max_abs_diff
        );
    }
    Ok(())
}
