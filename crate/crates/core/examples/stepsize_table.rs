//! Step sizes guaranteeing that the iterates stay in a ball, for the
//! reference sphere and hyperbolic examples.
//!
//!     cargo run --example stepsize_table

use geomean::experiments::stepsize_table;
use geomean::frechet::PExponent;
use geomean::manifolds::ManifoldSpace;
use geomean::stepsize::{resolve, StepPolicy};

fn main() -> geomean::Result<()> {
    for r in stepsize_table()?.rows {
        let flag = if r.pass { "" } else { "  <- differs from the reference value" };
        println!("{:<12} {:<44} {:.6} ({}){flag}", r.quantity, r.inputs, r.value, r.reference_value);
    }

    // Resolving policies for a concrete dataset radius.
    let s2 = ManifoldSpace::sphere(2, 1.0)?;
    let h2 = ManifoldSpace::hyperbolic(2, -1.0)?;
    for (space, rho) in [(s2, 0.4 * std::f64::consts::PI), (h2, 0.5)] {
        for policy in [StepPolicy::ConjectureOptimal, StepPolicy::SpreadCompromise { start_at_o: true }] {
            match resolve(policy, &space.constants(), rho, PExponent::TWO) {
                Ok(r) => println!("{:?} rho={rho:.4} {:<10} t = {:.6}, stays in radius {:.4}", space.kind(), policy.name(), r.t, r.stay_ball_radius),
                Err(e) => println!("{:?} rho={rho:.4} {:<10} not applicable: {e}", space.kind(), policy.name()),
            }
        }
    }
    Ok(())
}
