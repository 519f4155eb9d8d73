//! Geometric verification oracles.
//!
//! Monte Carlo checks draw every trial from its own ChaCha stream
//! `(seed, trial)`, so reports are reproducible and independent of thread
//! scheduling. Runs on spaces of negative curvature are flagged exploratory:
//! they report, they never assert.

use crate::error::{Error, Result};
use crate::frechet::{gradient, Ball, PExponent, WeightedDataset};
use crate::kernels::{secant_euclid, secant_sphere, Curvature, SecantProblem};
use crate::manifolds::{ManifoldSpace, Point, SpaceKind, TangentVector};
use crate::solver::{descend, SolverConfig};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

/// Slack of the comparison inequality `z >= z~ - COMPARISON_TOL`.
pub const COMPARISON_TOL: f64 = 1e-12;
/// Relative slack of ball membership in the tethering check.
pub const TETHER_TOL: f64 = 1e-12;
/// Width at which the secant bisection stops, relative to the side length.
const BISECTION_TOL: f64 = 1e-13;

/// Per-trial generator.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub trials: usize,
    pub violations: usize,
    pub min_margin: f64,
    pub seed: u64,
    /// Trials dropped because the sampled configuration was degenerate.
    pub skipped: usize,
    /// True when the inequality is not expected to hold (negative curvature).
    pub exploratory: bool,
}

impl CheckReport {
    fn from_margins(suite: &str, seed: u64, exploratory: bool, tol: f64, margins: &[Option<f64>]) -> Self {
        let used: Vec<f64> = margins.iter().flatten().copied().collect();
        CheckReport {
            suite: suite.into(),
            trials: margins.len(),
            violations: used.iter().filter(|m| **m < -tol).count(),
            min_margin: used.iter().copied().fold(f64::INFINITY, f64::min),
            seed,
            skipped: margins.len() - used.len(),
            exploratory,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Radius cap for random balls: the convexity radius, or (where it is
/// infinite) two curvature-normalized units.
pub fn sampling_radius(space: &ManifoldSpace) -> f64 {
    let r = space.r_cx();
    if r.is_finite() {
        r
    } else if space.kappa() < 0.0 {
        2.0 / (-space.kappa()).sqrt()
    } else {
        2.0
    }
}

/// A ball with uniformly random center and radius uniform in `(0, r_max]`.
pub fn random_ball<R: Rng + ?Sized>(space: &ManifoldSpace, r_max: f64, rng: &mut R) -> Ball {
    let center = space.random_point(rng);
    let radius = r_max * (1.0 - rng.gen::<f64>());
    Ball::new(center, radius)
}

/// Uniform point strictly inside `ball`.
pub fn random_strictly_inside<R: Rng + ?Sized>(space: &ManifoldSpace, ball: &Ball, rng: &mut R) -> Point {
    loop {
        let p = space.random_in_ball(&ball.center, ball.radius, rng);
        if space.distance(&ball.center, &p) < ball.radius {
            return p;
        }
    }
}

/// Flat Dirichlet weights.
pub fn random_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1) + 1e-300).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// `n` uniform points in `ball` with Dirichlet weights.
pub fn random_dataset<R: Rng + ?Sized>(space: &ManifoldSpace, ball: &Ball, n: usize, rng: &mut R) -> Result<WeightedDataset> {
    let pts = (0..n).map(|_| random_strictly_inside(space, ball, rng)).collect();
    WeightedDataset::new(*space, pts, random_weights(n, rng), ball.clone())
}

// --- secants ------------------------------------------------------------

/// Triangle `x y1 y2` and a secant from `x` at angle `alpha1` off `x y1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleInstance {
    pub space: ManifoldSpace,
    pub x: Point,
    pub y1: Point,
    pub y2: Point,
    pub alpha1: f64,
}

impl TriangleInstance {
    /// Side lengths and angles; fails if a vertex coincides with `x`.
    pub fn problem(&self) -> Result<SecantProblem> {
        let s = &self.space;
        let alpha = s.angle_at(&self.x, &self.y1, &self.y2)?;
        if !(self.alpha1 >= 0.0 && self.alpha1 <= alpha) {
            return Err(Error::Precondition(format!(
                "alpha1 = {} outside [0, {alpha}]",
                self.alpha1
            )));
        }
        Ok(SecantProblem::new(
            s.distance(&self.x, &self.y1),
            s.distance(&self.x, &self.y2),
            self.alpha1,
            alpha - self.alpha1,
        ))
    }

    /// Closed-form secant length in the space's own curvature.
    pub fn secant_formula(&self) -> Result<f64> {
        let prob = self.problem()?;
        match self.space.kind() {
            SpaceKind::Euclidean => secant_euclid(&prob),
            SpaceKind::Sphere | SpaceKind::So3 | SpaceKind::RealProjective => {
                secant_sphere(&prob, Curvature(self.space.kappa()))
            }
            other => Err(Error::Config(format!("no closed-form secant for {other:?}"))),
        }
    }

    /// The planar comparison value with the same `b, c, alpha1, alpha2`.
    pub fn secant_planar(&self) -> Result<f64> {
        secant_euclid(&self.problem()?)
    }
}

/// Secant length found geometrically: walk `m(s)` along the minimal geodesic
/// `y1 -> y2` and bisect on the side of the launched geodesic that `m(s)` is
/// on, i.e. on the sign of `angle(y1, x, m(s)) - alpha1`.
pub fn secant_by_intersection(tri: &TriangleInstance) -> Result<f64> {
    let s = &tri.space;
    if s.distance(&tri.x, &tri.y1) == 0.0 {
        return Ok(0.0);
    }
    let side = s.log_map(&tri.y1, &tri.y2)?;
    let a = s.norm(&side);
    if a == 0.0 {
        return Err(Error::NoIntersection("y1 = y2".into()));
    }
    let alpha = s.angle_at(&tri.x, &tri.y1, &tri.y2)?;
    if !(tri.alpha1 >= 0.0 && tri.alpha1 <= alpha) {
        return Err(Error::NoIntersection(format!(
            "alpha1 = {} outside [0, {alpha}]",
            tri.alpha1
        )));
    }
    let m = |u: f64| s.geodesic(&side, u);
    let phi = |u: f64| -> Result<f64> {
        let p = m(u);
        if s.distance(&tri.x, &p) == 0.0 {
            return Ok(tri.alpha1);
        }
        s.angle_at(&tri.x, &tri.y1, &p)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        if (hi - lo) * a <= BISECTION_TOL * a.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi(mid)? < tri.alpha1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(s.distance(&tri.x, &m(0.5 * (lo + hi))))
}

/// A random triangle inside a random ball of radius at most `r_max`, with
/// `alpha1` uniform in `[0, alpha]`. `None` for a degenerate draw.
pub fn random_triangle<R: Rng + ?Sized>(space: &ManifoldSpace, r_max: f64, rng: &mut R) -> Option<TriangleInstance> {
    let ball = random_ball(space, r_max, rng);
    let x = random_strictly_inside(space, &ball, rng);
    let y1 = random_strictly_inside(space, &ball, rng);
    let y2 = random_strictly_inside(space, &ball, rng);
    let alpha = space.angle_at(&x, &y1, &y2).ok()?;
    let alpha1 = alpha * rng.gen::<f64>();
    Some(TriangleInstance {
        space: *space,
        x,
        y1,
        y2,
        alpha1,
    })
}

/// Secant length on `space` by the closed form where one exists, otherwise
/// by geodesic intersection.
fn secant_on_space(tri: &TriangleInstance) -> Result<f64> {
    match tri.space.kind() {
        SpaceKind::Hyperbolic => secant_by_intersection(tri),
        _ => tri.secant_formula(),
    }
}

/// Monte Carlo test of `z >= z~`: the secant on a positively curved space is
/// at least the planar secant with the same two sides and angles. On
/// hyperbolic space the run is exploratory (the inequality reverses).
pub fn comparison_check(space: &ManifoldSpace, n_trials: usize, seed: u64) -> CheckReport {
    let r_max = sampling_radius(space);
    let margins: Vec<Option<f64>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let tri = random_triangle(space, r_max, &mut rng)?;
            let z = secant_on_space(&tri).ok()?;
            let zt = tri.secant_planar().ok()?;
            Some(z - zt)
        })
        .collect();
    CheckReport::from_margins("comparison", seed, space.kappa() < 0.0, COMPARISON_TOL, &margins)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleAgreement {
    pub trials: usize,
    pub compared: usize,
    pub max_abs_diff: f64,
}

/// Largest disagreement between the closed-form secant and the intersection
/// oracle over random triangles.
pub fn oracle_agreement(space: &ManifoldSpace, n_trials: usize, seed: u64) -> OracleAgreement {
    let r_max = sampling_radius(space);
    let diffs: Vec<Option<f64>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let tri = random_triangle(space, r_max, &mut rng)?;
            let a = tri.secant_formula().ok()?;
            let b = secant_by_intersection(&tri).ok()?;
            Some((a - b).abs())
        })
        .collect();
    let used: Vec<f64> = diffs.iter().flatten().copied().collect();
    OracleAgreement {
        trials: n_trials,
        compared: used.len(),
        max_abs_diff: used.iter().copied().fold(0.0, f64::max),
    }
}

// --- convex combinations -------------------------------------------------

/// `exp_x(t sum_i w_i log_x(x_i))`.
pub fn convex_combination(space: &ManifoldSpace, x: &Point, points: &[Point], weights: &[f64], t: f64) -> Result<Point> {
    if points.len() != weights.len() || points.is_empty() {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} points",
            weights.len(),
            points.len()
        )));
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(0.0..=1.0).contains(w)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Precondition(format!("t = {t} outside [0, 1]")));
    }
    let mut v = TangentVector::zero(x);
    for (p, w) in points.iter().zip(weights) {
        v.vec += space.log_map(x, p)?.vec * *w;
    }
    Ok(space.exp_map(&v.scaled(t)))
}

// --- hull membership -----------------------------------------------------

/// Chart centered at `center` that maps geodesics to straight lines: central
/// (gnomonic) projection for positive curvature, the Klein model for negative
/// curvature, the identity for flat space. Images are tangent vectors at
/// `center` in ambient coordinates.
#[derive(Debug, Clone)]
pub struct GeodesicChart {
    space: ManifoldSpace,
    center: Point,
}

impl GeodesicChart {
    pub fn new(space: ManifoldSpace, center: Point) -> Self {
        GeodesicChart { space, center }
    }

    pub fn map(&self, y: &Point) -> Result<DVector<f64>> {
        let c = self.center.coords();
        let v = y.coords();
        match self.space.kind() {
            SpaceKind::Euclidean => Ok(v - c),
            SpaceKind::Hyperbolic => {
                let r2 = -1.0 / self.space.kappa();
                let ip = -(-c[0] * v[0] + c.rows(1, c.len() - 1).dot(&v.rows(1, v.len() - 1)));
                Ok(v * (r2 / ip) - c)
            }
            SpaceKind::Circle | SpaceKind::Sphere | SpaceKind::So3 | SpaceKind::RealProjective => {
                let mut ip = c.dot(v);
                let mut v = v.clone();
                if self.space.is_quotient() && ip < 0.0 {
                    v.neg_mut();
                    ip = -ip;
                }
                if ip <= 1e-12 {
                    return Err(Error::ChartDomain(format!(
                        "point at angle {} from the chart center",
                        ip.acos()
                    )));
                }
                Ok(v / ip - c)
            }
        }
    }
}

/// Vertices, a query point and optionally the chart center (default: the
/// estimated minimal enclosing ball center of all points).
#[derive(Debug, Clone)]
pub struct HullQuery {
    pub space: ManifoldSpace,
    pub vertices: Vec<Point>,
    pub query: Point,
    pub center: Option<Point>,
}

/// Minimum-norm point of the convex hull of `pts` (Wolfe's algorithm).
pub fn min_norm_point(pts: &[DVector<f64>]) -> DVector<f64> {
    let scale = pts.iter().map(|p| p.norm_squared()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-14 * scale;
    let start = (0..pts.len())
        .min_by(|&a, &b| pts[a].norm_squared().total_cmp(&pts[b].norm_squared()))
        .expect("at least one point");
    let mut s: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];
    let combine = |s: &[usize], l: &[f64]| -> DVector<f64> {
        let mut x = DVector::zeros(pts[0].len());
        for (i, w) in s.iter().zip(l) {
            x += &pts[*i] * *w;
        }
        x
    };
    let mut x = pts[start].clone();
    for _ in 0..10 * pts.len() + 100 {
        let (j, best) = (0..pts.len())
            .map(|i| (i, x.dot(&pts[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one point");
        if best >= x.norm_squared() - tol || s.contains(&j) {
            return x;
        }
        s.push(j);
        lambda.push(0.0);
        loop {
            let mu = affine_min_norm(pts, &s);
            if mu.iter().all(|m| *m > 1e-15) {
                lambda = mu;
                x = combine(&s, &lambda);
                break;
            }
            let theta = s
                .iter()
                .enumerate()
                .filter(|(k, _)| mu[*k] <= 1e-15)
                .map(|(k, _)| lambda[k] / (lambda[k] - mu[k]))
                .fold(1.0, f64::min);
            for k in 0..s.len() {
                lambda[k] = (1.0 - theta) * lambda[k] + theta * mu[k];
            }
            let mut k = 0;
            while k < s.len() {
                if lambda[k] <= 1e-15 {
                    s.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            x = combine(&s, &lambda);
            if s.len() == 1 {
                break;
            }
        }
    }
    x
}

/// Affine coefficients (summing to 1) of the minimum-norm point of the affine
/// hull of `pts[s]`.
fn affine_min_norm(pts: &[DVector<f64>], s: &[usize]) -> Vec<f64> {
    let m = s.len();
    let mut kkt = DMatrix::zeros(m + 1, m + 1);
    for a in 0..m {
        for b in 0..m {
            kkt[(a, b)] = pts[s[a]].dot(&pts[s[b]]);
        }
        kkt[(a, m)] = 1.0;
        kkt[(m, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(m + 1);
    rhs[m] = 1.0;
    let sol = kkt
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|v| v.iter().all(|c| c.is_finite()))
        .unwrap_or_else(|| {
            kkt.svd(true, true)
                .solve(&rhs, 1e-14)
                .unwrap_or_else(|_| DVector::from_element(m + 1, 1.0 / m as f64))
        });
    sol.rows(0, m).iter().copied().collect()
}

/// Euclidean convex-hull membership of `q` among `vertices`, with absolute
/// tolerance `tol` on the distance to the hull.
pub fn euclidean_hull_contains(vertices: &[DVector<f64>], q: &DVector<f64>, tol: f64) -> bool {
    let shifted: Vec<DVector<f64>> = vertices.iter().map(|v| v - q).collect();
    min_norm_point(&shifted).norm() <= tol
}

/// Whether `query` lies in the geodesic convex hull of `vertices`.
pub fn hull_membership(q: &HullQuery) -> Result<bool> {
    if q.vertices.is_empty() {
        return Err(Error::InvalidDataset("empty vertex set".into()));
    }
    let center = match &q.center {
        Some(c) => c.clone(),
        None => {
            let mut all = q.vertices.clone();
            all.push(q.query.clone());
            crate::solver::minimal_ball_estimate(&q.space, &all)?.center
        }
    };
    let chart = GeodesicChart::new(q.space, center);
    let verts = q.vertices.iter().map(|v| chart.map(v)).collect::<Result<Vec<_>>>()?;
    let image = chart.map(&q.query)?;
    let scale = verts.iter().map(|v| v.norm()).fold(image.norm(), f64::max);
    Ok(euclidean_hull_contains(&verts, &image, 1e-10 * (1.0 + scale)))
}

// --- tethering and hull trap ---------------------------------------------

/// Checks that `x -> exp_x(-t grad f_2(x))` maps `B(o, rho)` into itself for
/// random balls (radius up to the convexity radius), data, weights,
/// `x in B(o, rho)` and every `t` in `t_grid`. Margins are `rho - d(o, image)`.
pub fn tethering_check(space: &ManifoldSpace, n_trials: usize, t_grid: &[f64], seed: u64) -> CheckReport {
    let r_max = sampling_radius(space);
    let margins: Vec<Option<f64>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let ball = random_ball(space, r_max, &mut rng);
            let n = rng.gen_range(1..=8);
            let ds = random_dataset(space, &ball, n, &mut rng).ok()?;
            let x = random_strictly_inside(space, &ball, &mut rng);
            let g = gradient(&ds, PExponent::TWO, &x).ok()?;
            let worst = t_grid
                .iter()
                .map(|t| {
                    let y = space.exp_map(&g.scaled(-t));
                    ball.radius - space.distance(&ball.center, &y)
                })
                .fold(f64::INFINITY, f64::min);
            Some(worst / ball.radius)
        })
        .collect();
    let mut r = CheckReport::from_margins("tethering", seed, space.kappa() < 0.0, TETHER_TOL, &margins);
    r.violations = margins.iter().flatten().filter(|m| **m <= -TETHER_TOL).count();
    r
}

/// Once an iterate (p = 2, step `t in (0, 1]`) enters the convex hull of the
/// data it never leaves. Margin per trial: 0 if the property held, -1 if a
/// later iterate left the hull.
pub fn hull_trap_check(space: &ManifoldSpace, n_trials: usize, seed: u64) -> CheckReport {
    let r_max = sampling_radius(space);
    let margins: Vec<Option<f64>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let ball = random_ball(space, r_max, &mut rng);
            let n = rng.gen_range(3..=6);
            let ds = random_dataset(space, &ball, n, &mut rng).ok()?;
            let x0 = random_strictly_inside(space, &ball, &mut rng);
            let t = 1.0 - rng.gen::<f64>();
            let cfg = SolverConfig::constant(t).with_start(x0).with_max_iters(60).with_grad_tol(1e-9);
            let trace = descend(&ds, &cfg).ok()?;
            let mut entered = false;
            for rec in &trace.iterates {
                let q = HullQuery {
                    space: *space,
                    vertices: ds.points().to_vec(),
                    query: rec.point.clone(),
                    center: Some(ball.center.clone()),
                };
                let inside = hull_membership(&q).ok()?;
                if entered && !inside {
                    return Some(-1.0);
                }
                entered |= inside;
            }
            Some(0.0)
        })
        .collect();
    CheckReport::from_margins("hull", seed, space.kappa() < 0.0, 0.5, &margins)
}
