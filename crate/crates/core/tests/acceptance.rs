//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use geomean::experiments::{angle_diff, circle_dataset, fd_eigenvalues_at_o, run_circle_example, run_sphere_configs, stepsize_table, SphereConfig};
use geomean::frechet::{fd_hessian_quadratic_form, hessian_bounds_on_ball, hessian_radial_bounds, Ball, PExponent, WeightedDataset};
use geomean::geocheck::{comparison_check, hull_trap_check, oracle_agreement, random_ball, random_dataset, random_strictly_inside, sampling_radius, tethering_check, trial_rng};
use geomean::manifolds::{ManifoldSpace, Point};
use geomean::solver::{descend, one_step, rate_envelope_check, SolverConfig, Status, Trace};
use geomean::stepsize::{rate_estimate, StepPolicy};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Mutex;
use std::time::Instant;

const SEED: u64 = 20_240_601;

/// Descent-inequality tallies from every trace run by the suite.
#[derive(Default)]
struct DescentTally {
    traces: usize,
    checked: usize,
    violations: usize,
    min_slack: f64,
}

static DESCENT: Mutex<DescentTally> = Mutex::new(DescentTally {
    traces: 0,
    checked: 0,
    violations: 0,
    min_slack: f64::INFINITY,
});

fn tally(trace: &Trace) {
    let mut d = DESCENT.lock().unwrap();
    d.traces += 1;
    d.checked += trace.descent.checked;
    d.violations += trace.descent.violations;
    if trace.descent.checked > 0 {
        d.min_slack = d.min_slack.min(trace.descent.min_slack);
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn circle_exactness() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let report = run_circle_example(dir.path()).unwrap();
    let err = |name: &str| report.scenarios.iter().find(|s| s.name == name).unwrap().abs_error;
    let finals = [err("global_w01_t1"), err("global_w025_t1"), err("local_w025_t11_6")];
    let finals_ok = finals.iter().all(|e| *e <= 1e-10);

    let ds = circle_dataset(0.1).unwrap();
    let x1 = ds.points()[0].clone();
    let y = one_step(&ds, PExponent::TWO, &x1, 25.0 / 18.0).unwrap();
    let anti_err = angle_diff(ds.space().circle_angle(&y).unwrap(), -3.0 * PI / 5.0);
    let trace = descend(&ds, &SolverConfig::constant(25.0 / 18.0).with_start(x1)).unwrap();
    let aborted = matches!(trace.status, Status::CutLocus { .. });

    for (w1, t) in [(0.1, 1.0), (0.25, 1.0), (0.25, 11.0 / 6.0)] {
        let ds = circle_dataset(w1).unwrap();
        tally(&descend(&ds, &SolverConfig::constant(t).with_start(ds.points()[0].clone())).unwrap());
    }
    outcome(
        finals_ok && anti_err <= 1e-12 && aborted,
        format!(
            "final errors {:.1e} {:.1e} {:.1e}; antipode error {anti_err:.1e}; cut-locus abort {aborted}",
            finals[0], finals[1], finals[2]
        ),
    )
}

fn stepsize_rows() -> Outcome {
    let table = stepsize_table().unwrap();
    let detail = table
        .rows
        .iter()
        .map(|r| format!("{}={:.4}/{}{}", r.quantity.replace(' ', ""), r.value, r.reference_value, if r.pass { "" } else { "(x)" }))
        .collect::<Vec<_>>()
        .join(" ");
    outcome(table.all_pass(), detail)
}

fn comparison() -> Outcome {
    let s2 = ManifoldSpace::sphere(2, 1.0).unwrap();
    let r = comparison_check(&s2, 10_000, SEED);
    let a = oracle_agreement(&s2, 1000, SEED);
    let used = r.trials - r.skipped;
    outcome(
        r.violations == 0 && used >= 9_900 && a.max_abs_diff <= 1e-8 && a.compared >= 990,
        format!(
            "{} violations / {used} triangles (min margin {:.1e}); oracle max diff {:.1e} on {} instances",
            r.violations, r.min_margin, a.max_abs_diff, a.compared
        ),
    )
}

fn tethering() -> Outcome {
    let spaces = [
        ManifoldSpace::sphere(2, 1.0).unwrap(),
        ManifoldSpace::sphere(3, 1.0).unwrap(),
        ManifoldSpace::so3(),
        ManifoldSpace::real_projective(2, 1.0).unwrap(),
    ];
    let grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, s) in spaces.iter().enumerate() {
        let t = tethering_check(s, 10_000, &grid, SEED + i as u64);
        let h = hull_trap_check(s, 1000, SEED + i as u64);
        let ok = t.violations == 0 && t.skipped < 100 && h.violations == 0 && h.skipped < 100;
        pass &= ok;
        parts.push(format!(
            "{:?}{}: exits {}/{} hull {}/{} (skipped {})",
            s.kind(),
            s.dim(),
            t.violations,
            t.trials - t.skipped,
            h.violations,
            h.trials - h.skipped,
            h.skipped
        ));
    }
    outcome(pass, parts.join("; "))
}

fn hessian_sandwich() -> Outcome {
    let spaces = [
        ManifoldSpace::sphere(2, 1.0).unwrap(),
        ManifoldSpace::sphere(3, 2.0).unwrap(),
        ManifoldSpace::so3(),
        ManifoldSpace::real_projective(2, 1.0).unwrap(),
        ManifoldSpace::hyperbolic(2, -1.0).unwrap(),
        ManifoldSpace::hyperbolic(3, -0.5).unwrap(),
        ManifoldSpace::circle(1.0).unwrap(),
        ManifoldSpace::euclidean(3).unwrap(),
    ];
    let tol = 1e-4;
    let mut worst = f64::INFINITY;
    let mut failures = 0usize;
    let mut samples = 0usize;
    for (si, space) in spaces.iter().enumerate() {
        let geom = space.constants();
        let limit = if geom.upper_delta > 0.0 { PI / geom.upper_delta.sqrt() } else { f64::INFINITY };
        let d_max = 0.95 * space.inj().min(limit).min(4.0);
        let h = geomean::frechet::default_fd_step(space);
        let results: Vec<(f64, f64)> = (0..1000u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(SEED + 100 + si as u64, i);
                let x = space.random_point(&mut rng);
                let u = space.random_unit_tangent(&x, &mut rng);
                // Single point, p = 2: bounds of the Hessian of d^2/2.
                let d = rng.gen_range(0.01..d_max);
                let xi = space.random_at_distance(&x, d, &mut rng);
                let ds1 = WeightedDataset::uniform(*space, vec![xi], Ball::new(x.clone(), 2.0 * d)).unwrap();
                let b = hessian_radial_bounds(&geom, space.distance(&x, &ds1.points()[0])).unwrap();
                let q = fd_hessian_quadratic_form(&ds1, PExponent::TWO, &x, &u, h).unwrap();
                let m1 = (q - b.lower).min(b.upper - q);
                // Several points, p in {2, 3, 4}.
                let ball = Ball::new(x.clone(), rng.gen_range(0.05..d_max));
                let n = rng.gen_range(1..=5);
                let ds = random_dataset(space, &ball, n, &mut rng).unwrap();
                let mut m2 = f64::INFINITY;
                for p in [2.0, 3.0, 4.0] {
                    let p = PExponent::new(p).unwrap();
                    let b = hessian_bounds_on_ball(&ds, p, &x, 0.0).unwrap();
                    let q = fd_hessian_quadratic_form(&ds, p, &x, &u, h).unwrap();
                    m2 = m2.min((q - b.lower).min(b.upper - q));
                }
                (m1, m2)
            })
            .collect();
        for (m1, m2) in results {
            samples += 1;
            worst = worst.min(m1).min(m2);
            failures += usize::from(m1 < -tol || m2 < -tol);
        }
    }
    let mut eig_err: f64 = 0.0;
    for rho in [PI / 4.0, 0.35 * PI, 0.47 * PI] {
        for c in [SphereConfig::Cross, SphereConfig::Pair] {
            let fd = fd_eigenvalues_at_o(&c.dataset(rho).unwrap()).unwrap();
            let pr = c.predicted_eigenvalues(rho);
            eig_err = eig_err.max((fd[0] - pr[0]).abs()).max((fd[1] - pr[1]).abs());
        }
    }
    outcome(
        failures == 0 && eig_err <= 1e-5,
        format!("{failures} of {samples} samples outside bounds (worst margin {worst:.1e}); eigenvalue error {eig_err:.1e}"),
    )
}

fn random_rate_run(space: &ManifoldSpace, i: u64) -> Option<(usize, usize, bool)> {
    let mut rng = trial_rng(SEED + 200, i);
    let rho = if space.kappa() > 0.0 {
        rng.gen_range(0.05..1.0) * space.r_cx() / 3.0
    } else {
        rng.gen_range(0.05..1.0)
    };
    let ball = Ball::new(space.random_point(&mut rng), rho);
    let n = rng.gen_range(2..=8);
    let ds = random_dataset(space, &ball, n, &mut rng).ok()?;
    let x0 = random_strictly_inside(space, &ball, &mut rng);
    let cfg = SolverConfig::new(PExponent::TWO, StepPolicy::SpreadCompromise { start_at_o: false })
        .with_start(x0)
        .with_grad_tol(1e-13)
        .with_max_iters(5000);
    let trace = descend(&ds, &cfg).ok()?;
    tally(&trace);
    let env = rate_envelope_check(&ds, &trace, PExponent::TWO, 1e-7).ok()?;
    Some((env.checked, env.violations, env.anchor.is_some() && trace.status == Status::Converged))
}

fn rate_bound() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for space in [ManifoldSpace::sphere(2, 1.0).unwrap(), ManifoldSpace::hyperbolic(2, -1.0).unwrap()] {
        let runs: Vec<_> = (0..100u64).map(|i| random_rate_run(&space, i)).collect();
        let done: Vec<_> = runs.iter().flatten().collect();
        let checked: usize = done.iter().map(|r| r.0).sum();
        let violations: usize = done.iter().map(|r| r.1).sum();
        let anchored = done.iter().filter(|r| r.2).count();
        pass &= done.len() == 100 && anchored == 100 && violations == 0;
        parts.push(format!("{:?}: {violations} violations over {checked} iterates, {anchored}/100 anchored", space.kind()));
    }
    // Euclidean, p = 2, t = 1/H = 1: alpha = 1, q = 0, one step.
    let r3 = ManifoldSpace::euclidean(3).unwrap();
    let mut rng = trial_rng(SEED + 300, 0);
    let ball = random_ball(&r3, sampling_radius(&r3), &mut rng);
    let ds = random_dataset(&r3, &ball, 6, &mut rng).unwrap();
    let trace = descend(&ds, &SolverConfig::new(PExponent::TWO, StepPolicy::ConjectureOptimal)).unwrap();
    tally(&trace);
    let q = rate_estimate(1.0, 1.0, trace.step.t, 1.0).unwrap().q;
    let one = trace.status == Status::Converged && trace.iterations() == 1 && q == 0.0;
    pass &= one;
    parts.push(format!("Euclidean: {} iteration(s), q = {q}", trace.iterations()));
    outcome(pass, parts.join("; "))
}

fn config_ordering() -> Outcome {
    let rhos = [0.35 * PI, 0.41 * PI, 0.47 * PI];
    let mut pass = true;
    let mut shown = String::new();
    for seed in SEED..SEED + 10 {
        let dir = tempfile::tempdir().unwrap();
        let r = run_sphere_configs(&rhos, 1.0, seed, dir.path()).unwrap();
        let its = |c| rhos.map(|rho| r.run(c, rho).unwrap().iterations_to_1e6.unwrap_or(usize::MAX));
        let (cross, pair) = (its(SphereConfig::Cross), its(SphereConfig::Pair));
        let increasing = |v: [usize; 3]| v.windows(2).all(|w| w[0] < w[1]);
        pass &= pair[2] > cross[2] && increasing(cross) && increasing(pair) && cross[2] != usize::MAX;
        if seed == SEED {
            shown = format!("seed {seed}: cross {cross:?}, pair {pair:?}");
        }
        for c in [SphereConfig::Cross, SphereConfig::Pair] {
            for rho in rhos {
                let ds = c.dataset(rho).unwrap();
                let start: Point = r.run(c, rho).unwrap().start.clone();
                tally(&descend(&ds, &SolverConfig::constant(1.0).with_start(start).with_grad_tol(1e-13)).unwrap());
            }
        }
    }
    outcome(pass, format!("{shown}; 10 seeds checked"))
}

/// Extra descent-monitor coverage: random constant steps t in (0, 1] on the
/// positively curved spaces and in the hyperbolic plane.
fn descent_sweep() {
    let spaces = [
        ManifoldSpace::sphere(2, 1.0).unwrap(),
        ManifoldSpace::sphere(3, 1.0).unwrap(),
        ManifoldSpace::so3(),
        ManifoldSpace::real_projective(2, 1.0).unwrap(),
        ManifoldSpace::hyperbolic(2, -1.0).unwrap(),
    ];
    for (si, space) in spaces.iter().enumerate() {
        let traces: Vec<Trace> = (0..200u64)
            .into_par_iter()
            .filter_map(|i| {
                let mut rng = trial_rng(SEED + 400 + si as u64, i);
                let ball = random_ball(space, sampling_radius(space), &mut rng);
                let ds = random_dataset(space, &ball, rng.gen_range(1..=6), &mut rng).ok()?;
                let x0 = random_strictly_inside(space, &ball, &mut rng);
                let t = 1.0 - rng.gen::<f64>();
                descend(&ds, &SolverConfig::constant(t).with_start(x0).with_max_iters(500)).ok()
            })
            .collect();
        traces.iter().for_each(tally);
    }
}

fn descent_inequality() -> Outcome {
    descent_sweep();
    let d = DESCENT.lock().unwrap();
    outcome(
        d.violations == 0 && d.checked > 0,
        format!("{} violations over {} checked steps in {} traces (min slack {:.1e})", d.violations, d.checked, d.traces, d.min_slack),
    )
}

/// Name, runtime budget in seconds, check.
type Criterion = (&'static str, f64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 circle example exactness", 1.0, circle_exactness),
        ("2 step-size table", 5.0, stepsize_rows),
        ("3 secant comparison", 30.0, comparison),
        ("4 tethering and hull trap", 60.0, tethering),
        ("5 Hessian bound sandwich", f64::INFINITY, hessian_sandwich),
        ("6 linear rate bound", f64::INFINITY, rate_bound),
        ("7 cross vs pair configurations", f64::INFINITY, config_ordering),
        ("8 descent inequality", f64::INFINITY, descent_inequality),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = o.pass && secs < budget;
        failed += usize::from(!pass);
        let budget_note = if budget.is_finite() { format!(" (budget {budget} s)") } else { String::new() };
        println!(
            "{} criterion {name}: {} [{secs:.2} s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
