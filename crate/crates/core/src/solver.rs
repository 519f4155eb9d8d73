//! Constant step-size Riemannian gradient descent with runtime monitors.
//!
//! `x^{k+1} = exp_{x^k}(-t grad f_p(x^k))`. Alongside the iteration the
//! solver records whether each iterate (and, sampled, each connecting
//! geodesic) stays in a monitor ball, whether the cost decreases, and whether
//! the descent inequality `f(x+) <= f(x) - t (1 - H t / 2) |grad|^2` holds.

use crate::error::{Error, Result};
use crate::frechet::{cost, gradient, hessian_bound_for_diameter, hessian_bounds_on_ball, Ball, PExponent, WeightedDataset};
use crate::manifolds::{ManifoldSpace, Point};
use crate::stepsize::{rate_estimate, resolve, RateEstimate, ResolvedStep, StepPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Relative slack when testing ball membership of an iterate.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Absolute slack of the monotone-cost monitor.
pub const MONOTONE_TOL: f64 = 1e-12;
/// Absolute slack of the descent-inequality monitor.
pub const DESCENT_TOL: f64 = 1e-10;
/// Iterations of the geodesic 1-center estimator.
pub const MINIMAL_BALL_ITERS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub p: PExponent,
    pub policy: StepPolicy,
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Ball whose membership is monitored. Defaults to `B(o, r)` with `r` the
    /// stay radius of the resolved policy.
    pub monitor_ball: Option<Ball>,
    /// Interior points sampled on each step's geodesic.
    pub record_substeps: usize,
    /// Defaults to the dataset's ball center.
    pub start: Option<Point>,
}

impl SolverConfig {
    pub fn new(p: PExponent, policy: StepPolicy) -> Self {
        SolverConfig {
            p,
            policy,
            grad_tol: 1e-10,
            max_iters: 10_000,
            monitor_ball: None,
            record_substeps: 16,
            start: None,
        }
    }

    pub fn constant(t: f64) -> Self {
        Self::new(PExponent::TWO, StepPolicy::UserConstant { t })
    }

    pub fn with_start(mut self, x: Point) -> Self {
        self.start = Some(x);
        self
    }

    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.max_iters = n;
        self
    }

    pub fn with_grad_tol(mut self, tol: f64) -> Self {
        self.grad_tol = tol;
        self
    }

    pub fn with_monitor_ball(mut self, ball: Ball) -> Self {
        self.monitor_ball = Some(ball);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(Error::Config(format!("grad_tol {} must be positive", self.grad_tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterRecord {
    pub k: usize,
    pub point: Point,
    pub cost: f64,
    /// NaN when the gradient is undefined (cut-locus abort).
    pub grad_norm: f64,
    pub dist_to_o: f64,
    /// Step applied after this record; 0 for the last one.
    pub step_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts {
    pub monotone_cost: bool,
    pub stayed_in_ball: bool,
    pub continuously_stayed: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Converged,
    /// The gradient at iterate `k` is undefined because data point `index`
    /// lies in its cut locus.
    CutLocus { k: usize, index: usize },
    MaxIterations,
}

impl Status {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Converged => 0,
            Status::CutLocus { .. } => 2,
            Status::MaxIterations => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DescentCheck {
    /// Steps where the hypotheses held and the inequality was tested.
    pub checked: usize,
    pub violations: usize,
    /// Smallest slack `rhs - lhs` over the tested steps.
    pub min_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub iterates: Vec<IterRecord>,
    pub verdicts: Verdicts,
    pub status: Status,
    pub step: ResolvedStep,
    pub monitor_ball: Ball,
    /// Hessian bound on the monitor ball, if it lies within the injectivity radius.
    pub monitor_hessian_bound: Option<f64>,
    pub descent: DescentCheck,
    /// Steps that left the monitor ball in between, although the endpoint is inside.
    pub excursions: usize,
    /// Whether `rho <= r_cx`, which makes the minimizer in the ball unique.
    pub uniqueness_certified: bool,
}

impl Trace {
    pub fn final_point(&self) -> &Point {
        &self.iterates.last().expect("trace has at least one record").point
    }

    pub fn final_cost(&self) -> f64 {
        self.iterates.last().expect("trace has at least one record").cost
    }

    /// Number of updates performed.
    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn dist_to_final(&self, space: &ManifoldSpace) -> Vec<f64> {
        let f = self.final_point();
        self.iterates.iter().map(|r| space.distance(&r.point, f)).collect()
    }

    /// First index with `d(x^k, x_final) < eps`.
    pub fn iterations_to(&self, space: &ManifoldSpace, eps: f64) -> Option<usize> {
        self.dist_to_final(space).iter().position(|d| *d < eps)
    }

    /// Least-squares fit of `d(x^k, xbar) ~ C q^(k/2)` over the tail of the
    /// trace where distances are above rounding level. `None` if fewer than
    /// three usable points.
    pub fn empirical_rate(&self, space: &ManifoldSpace) -> Option<f64> {
        let d = self.dist_to_final(space);
        // Near the end d(x^k, x_final) is dominated by the error of x_final itself.
        let floor = d.iter().copied().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
        let floor = (1e3 * floor).max(1e-12);
        let pts: Vec<(f64, f64)> = d
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > floor)
            .map(|(k, v)| (k as f64, v.ln()))
            .collect();
        let tail = &pts[pts.len().saturating_sub(20)..];
        if tail.len() < 3 {
            return None;
        }
        let n = tail.len() as f64;
        let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
        let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some((2.0 * sxy / sxx).exp())
    }

    /// Internal consistency of the recorded verdicts; used before traces are
    /// written out.
    pub fn check_invariants(&self) -> Result<()> {
        for w in self.iterates.windows(2) {
            if w[1].k <= w[0].k {
                return Err(Error::Precondition("iteration indices not increasing".into()));
            }
            if self.verdicts.monotone_cost && w[1].cost > w[0].cost + MONOTONE_TOL {
                return Err(Error::Precondition("monotone verdict contradicts the costs".into()));
            }
        }
        if self.verdicts.converged != (self.status == Status::Converged) {
            return Err(Error::Precondition("converged verdict contradicts the status".into()));
        }
        Ok(())
    }
}

fn inside(space: &ManifoldSpace, ball: &Ball, x: &Point) -> bool {
    space.distance(&ball.center, x) < ball.radius * (1.0 + MEMBERSHIP_TOL)
}

/// One update `exp_x(-t grad f_p(x))`.
pub fn one_step(ds: &WeightedDataset, p: PExponent, x: &Point, t: f64) -> Result<Point> {
    let g = gradient(ds, p, x)?;
    Ok(ds.space().exp_map(&g.scaled(-t)))
}

/// Runs gradient descent. A cut-locus hit ends the run with
/// [`Status::CutLocus`]; other errors (bad configuration, unmet policy
/// preconditions) are returned.
pub fn descend(ds: &WeightedDataset, cfg: &SolverConfig) -> Result<Trace> {
    cfg.validate()?;
    let space = ds.space();
    let geom = space.constants();
    let o = &ds.ball().center;
    let step = resolve(cfg.policy, &geom, ds.ball().radius, cfg.p)?;
    let t = step.t;
    let monitor = cfg
        .monitor_ball
        .clone()
        .unwrap_or_else(|| Ball::new(o.clone(), step.stay_ball_radius));
    let reach = monitor.radius + space.distance(&monitor.center, o) + ds.ball().radius;
    let monitor_hessian_bound = if reach < geom.inj {
        hessian_bound_for_diameter(&geom, reach, cfg.p).ok()
    } else {
        None
    };

    let mut x = match &cfg.start {
        Some(s) => {
            space.validate(s)?;
            s.clone()
        }
        None => o.clone(),
    };
    let mut iterates = Vec::new();
    let mut verdicts = Verdicts {
        monotone_cost: true,
        stayed_in_ball: inside(space, &monitor, &x),
        continuously_stayed: inside(space, &monitor, &x),
        converged: false,
    };
    let mut descent = DescentCheck {
        checked: 0,
        violations: 0,
        min_slack: f64::INFINITY,
    };
    let mut excursions = 0;
    let mut status = Status::MaxIterations;
    let mut fx = cost(ds, cfg.p, &x);

    for k in 0..=cfg.max_iters {
        let g = match gradient(ds, cfg.p, &x) {
            Ok(g) => g,
            Err(Error::DataCutLocus { index, .. }) => {
                iterates.push(IterRecord {
                    k,
                    dist_to_o: space.distance(o, &x),
                    point: x,
                    cost: fx,
                    grad_norm: f64::NAN,
                    step_used: 0.0,
                });
                status = Status::CutLocus { k, index };
                break;
            }
            Err(e) => return Err(e),
        };
        let gn = space.norm(&g);
        let done = gn <= cfg.grad_tol;
        let last = done || k == cfg.max_iters;
        iterates.push(IterRecord {
            k,
            point: x.clone(),
            cost: fx,
            grad_norm: gn,
            dist_to_o: space.distance(o, &x),
            step_used: if last { 0.0 } else { t },
        });
        if done {
            status = Status::Converged;
            verdicts.converged = true;
            break;
        }
        if last {
            break;
        }

        let v = g.scaled(-t);
        let next = space.exp_map(&v);
        let end_inside = inside(space, &monitor, &next);
        let m = cfg.record_substeps;
        let path_inside = (1..=m).all(|s| inside(space, &monitor, &space.geodesic(&v, s as f64 / (m + 1) as f64)));
        verdicts.stayed_in_ball &= end_inside;
        verdicts.continuously_stayed &= end_inside && path_inside;
        if end_inside && !path_inside {
            excursions += 1;
        }

        let f_next = cost(ds, cfg.p, &next);
        if f_next > fx + MONOTONE_TOL {
            verdicts.monotone_cost = false;
        }
        if let Some(h) = monitor_hessian_bound {
            let starts_inside = inside(space, &monitor, &x);
            if starts_inside && end_inside && path_inside && t < 2.0 / h {
                let rhs = fx - gn * gn * t * (1.0 - h * t / 2.0);
                let slack = rhs - f_next;
                descent.checked += 1;
                descent.min_slack = descent.min_slack.min(slack);
                if slack < -DESCENT_TOL {
                    descent.violations += 1;
                }
            }
        }
        x = next;
        fx = f_next;
    }

    Ok(Trace {
        iterates,
        verdicts,
        status,
        step,
        monitor_ball: monitor,
        monitor_hessian_bound,
        descent,
        excursions,
        uniqueness_certified: ds.uniqueness_certified(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEnvelope {
    /// Reference iterate `k'` the bound was anchored at, if any qualified.
    pub anchor: Option<usize>,
    pub estimate: Option<RateEstimate>,
    /// Iterates compared against `K q^((k - k')/2)`.
    pub checked: usize,
    pub violations: usize,
    /// Largest ratio `d(x^k, xbar) / (K q^((k - k')/2))`.
    pub worst_ratio: f64,
}

/// Checks the linear-rate bound on a converged trace, with `xbar` the final
/// iterate. For each anchor `k'` the region is the smallest ball around
/// `xbar` containing the tail `x^{k'}, x^{k'+1}, ...`; the first anchor whose
/// ball gives a positive lower Hessian bound and admits the step is used.
/// Iterates closer than `floor` to `xbar` are not compared: there the cost
/// gap is below rounding level.
pub fn rate_envelope_check(ds: &WeightedDataset, trace: &Trace, p: PExponent, floor: f64) -> Result<RateEnvelope> {
    let space = ds.space();
    let d = trace.dist_to_final(space);
    let xbar = trace.final_point();
    let f_bar = trace.final_cost();
    let t = trace.step.t;
    let mut out = RateEnvelope {
        anchor: None,
        estimate: None,
        checked: 0,
        violations: 0,
        worst_ratio: 0.0,
    };
    let r_cx = space.r_cx();
    for k0 in 0..d.len() {
        let r = d[k0..].iter().copied().fold(0.0, f64::max);
        if r > r_cx {
            continue;
        }
        let Ok(b) = hessian_bounds_on_ball(ds, p, xbar, r) else {
            continue;
        };
        let gap = (trace.iterates[k0].cost - f_bar).max(0.0);
        let Ok(est) = rate_estimate(b.lower, b.upper, t, gap) else {
            continue;
        };
        out.anchor = Some(k0);
        out.estimate = Some(est);
        for (j, dk) in d[k0..].iter().enumerate() {
            if *dk <= floor {
                continue;
            }
            let bound = est.bound(j);
            out.checked += 1;
            let ratio = if bound > 0.0 { dk / bound } else { f64::INFINITY };
            out.worst_ratio = out.worst_ratio.max(ratio);
            if *dk > bound * (1.0 + 1e-9) {
                out.violations += 1;
            }
        }
        break;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultistartReport {
    pub all_agree: bool,
    /// Largest pairwise distance between the final points.
    pub spread: f64,
    pub finals: Vec<Point>,
}

/// Runs [`descend`] from `n_starts` uniform random starts in the data ball.
/// Start `i` uses its own generator seeded from `(seed, i)`, so results do not
/// depend on scheduling.
pub fn multistart_uniqueness(ds: &WeightedDataset, cfg: &SolverConfig, n_starts: usize, seed: u64) -> Result<MultistartReport> {
    let space = ds.space();
    let ball = ds.ball();
    let finals = (0..n_starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let x0 = space.random_in_ball(&ball.center, ball.radius, &mut rng);
            let trace = descend(ds, &cfg.clone().with_start(x0))?;
            Ok(trace.final_point().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut spread: f64 = 0.0;
    for (i, a) in finals.iter().enumerate() {
        for b in &finals[i + 1..] {
            spread = spread.max(space.distance(a, b));
        }
    }
    Ok(MultistartReport {
        all_agree: spread <= 10.0 * cfg.grad_tol,
        spread,
        finals,
    })
}

/// Fixed-step Karcher mean iteration, used to seed the 1-center search.
fn karcher_seed(space: &ManifoldSpace, points: &[Point]) -> Result<Point> {
    let mut x = points[0].clone();
    let w = 1.0 / points.len() as f64;
    for _ in 0..100 {
        let mut v = crate::manifolds::TangentVector::zero(&x);
        for p in points {
            v.vec += space.log_map(&x, p)?.vec * w;
        }
        if space.norm(&v) < 1e-14 {
            break;
        }
        x = space.exp_map(&v);
    }
    Ok(x)
}

/// Approximate minimal enclosing ball: from the Karcher mean, repeatedly
/// move a fraction `1/(k+1)` of the way toward the farthest point.
pub fn minimal_ball_estimate(space: &ManifoldSpace, points: &[Point]) -> Result<Ball> {
    minimal_ball_estimate_with(space, points, MINIMAL_BALL_ITERS)
}

pub fn minimal_ball_estimate_with(space: &ManifoldSpace, points: &[Point], iters: usize) -> Result<Ball> {
    if points.is_empty() {
        return Err(Error::InvalidDataset("no points".into()));
    }
    let r_cx = space.r_cx();
    for (i, a) in points.iter().enumerate() {
        space.validate(a)?;
        for b in &points[i + 1..] {
            let d = space.distance(a, b);
            if d >= 2.0 * r_cx {
                return Err(Error::Precondition(format!(
                    "points {d} apart exceed twice the convexity radius {r_cx}"
                )));
            }
        }
    }
    let farthest = |c: &Point| -> (usize, f64) {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, space.distance(c, p)))
            .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc })
    };
    let mut center = karcher_seed(space, points)?;
    let mut best = (center.clone(), farthest(&center).1);
    for k in 1..=iters {
        let (i, _) = farthest(&center);
        let v = space.log_map(&center, &points[i])?;
        center = space.exp_map(&v.scaled(1.0 / (k as f64 + 1.0)));
        let r = farthest(&center).1;
        if r < best.1 {
            best = (center.clone(), r);
        }
    }
    Ok(Ball::new(best.0, best.1))
}

/// A ball that strictly contains all points, suitable for a dataset.
pub fn enclosing_ball(space: &ManifoldSpace, points: &[Point]) -> Result<Ball> {
    let b = minimal_ball_estimate(space, points)?;
    let r = b.radius * (1.0 + 1e-9) + 1e-12;
    Ok(Ball::new(b.center, r))
}
