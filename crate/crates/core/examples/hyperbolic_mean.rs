//! Centers of mass in the hyperbolic plane with the spread-compromise step,
//! and the predicted linear rate against the observed one.

use geomean::frechet::{Ball, PExponent, WeightedDataset};
use geomean::geocheck::{random_weights, trial_rng};
use geomean::manifolds::ManifoldSpace;
use geomean::solver::{descend, rate_envelope_check, SolverConfig};
use geomean::stepsize::StepPolicy;

fn main() -> geomean::Result<()> {
    let h2 = ManifoldSpace::hyperbolic(2, -1.0)?;
    let o = h2.origin();
    let rho = 0.5;
    let mut rng = trial_rng(5, 0);
    let pts: Vec<_> = (0..8).map(|_| h2.random_in_ball(&o, rho, &mut rng)).collect();
    let w = random_weights(pts.len(), &mut rng);
    let ds = WeightedDataset::new(h2, pts, w, Ball::new(o.clone(), rho))?;
    let cfg = SolverConfig::new(PExponent::TWO, StepPolicy::SpreadCompromise { start_at_o: true }).with_grad_tol(1e-13);
    let trace = descend(&ds, &cfg)?;
    let env = rate_envelope_check(&ds, &trace, PExponent::TWO, 1e-7)?;
    println!("t = {:.4} ({}), {} iterations, {:?}", trace.step.t, trace.step.preconditions, trace.iterations(), trace.status);
    println!(
        "predicted q = {:.4}, fitted q = {:.4}, bound violations {}",
        env.estimate.map_or(f64::NAN, |e| e.q),
        trace.empirical_rate(&h2).unwrap_or(f64::NAN),
        env.violations
    );
    println!("final point (hyperboloid) {:?}", trace.final_point().as_slice());
    Ok(())
}
