//! Averaging noisy rotations: the Karcher mean on SO(3) with the conjecture
//! step size, compared against the true rotation.

use geomean::frechet::{PExponent, WeightedDataset};
use geomean::geocheck::trial_rng;
use geomean::solver::{descend, enclosing_ball, SolverConfig};
use geomean::stepsize::StepPolicy;
use geomean::manifolds::ManifoldSpace;

fn main() -> geomean::Result<()> {
    let so3 = ManifoldSpace::so3();
    let truth = so3.rotation([1.0, 2.0, 2.0], 0.8)?;
    let mut rng = trial_rng(3, 0);
    let samples: Vec<_> = (0..25).map(|_| so3.random_in_ball(&truth, 0.4, &mut rng)).collect();
    let ball = enclosing_ball(&so3, &samples)?;
    let ds = WeightedDataset::uniform(so3, samples, ball)?;
    for p in [2.0, 3.0] {
        let cfg = SolverConfig::new(PExponent::new(p)?, StepPolicy::ConjectureOptimal);
        let trace = descend(&ds, &cfg)?;
        println!(
            "p = {p}: t = {:.4}, {} iterations, {:?}, distance to truth {:.4} rad",
            trace.step.t,
            trace.iterations(),
            trace.status,
            so3.distance(trace.final_point(), &truth)
        );
    }
    Ok(())
}
