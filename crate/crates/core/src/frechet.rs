//! The weighted L^p objective `f_p(x) = (1/p) sum_i w_i d(x, x_i)^p`, its
//! gradient, and Hessian bounds.

use crate::error::{Error, Result};
use crate::kernels::{b_lower, c_upper};
use crate::manifolds::{ManifoldSpace, Point, SpaceConstants, TangentVector};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Weights summing to 1 within this tolerance are renormalized; others are rejected.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent(f64);

impl PExponent {
    pub const TWO: PExponent = PExponent(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 2.0) {
            return Err(Error::InvalidExponent(p));
        }
        Ok(PExponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2.0
    }

    /// `d^(p-2)`, with the `p = 2` case equal to 1 even at `d = 0`.
    pub fn radial_factor(self, d: f64) -> f64 {
        if self.is_two() {
            1.0
        } else {
            d.powf(self.0 - 2.0)
        }
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        PExponent::new(p)
    }
}

impl From<PExponent> for f64 {
    fn from(p: PExponent) -> f64 {
        p.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Self {
        Ball { center, radius }
    }

    pub fn contains(&self, space: &ManifoldSpace, x: &Point) -> bool {
        space.distance(&self.center, x) < self.radius
    }
}

/// Data points with weights and a ball `B(o, rho)` certified to contain them.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDataset {
    space: ManifoldSpace,
    points: Vec<Point>,
    weights: Vec<f64>,
    ball: Ball,
}

fn check_weights(weights: &[f64], n: usize) -> Result<Vec<f64>> {
    if weights.len() != n {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {n} points",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && (0.0..=1.0).contains(*w))) {
        return Err(Error::InvalidWeights(format!("weight {w} outside [0, 1]")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    Ok(weights.iter().map(|w| w / sum).collect())
}

impl WeightedDataset {
    pub fn new(space: ManifoldSpace, points: Vec<Point>, weights: Vec<f64>, ball: Ball) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDataset("no data points".into()));
        }
        let weights = check_weights(&weights, points.len())?;
        for p in points.iter().chain(std::iter::once(&ball.center)) {
            space.validate(p)?;
        }
        if !(ball.radius > 0.0 && ball.radius.is_finite()) {
            return Err(Error::InvalidDataset(format!("ball radius {}", ball.radius)));
        }
        for (i, p) in points.iter().enumerate() {
            let d = space.distance(&ball.center, p);
            if d >= ball.radius {
                return Err(Error::InvalidDataset(format!(
                    "point {i} at distance {d} is not inside the ball of radius {}",
                    ball.radius
                )));
            }
        }
        Ok(WeightedDataset {
            space,
            points,
            weights,
            ball,
        })
    }

    /// Equal weights.
    pub fn uniform(space: ManifoldSpace, points: Vec<Point>, ball: Ball) -> Result<Self> {
        let n = points.len().max(1);
        Self::new(space, points, vec![1.0 / n as f64; n], ball)
    }

    pub fn space(&self) -> &ManifoldSpace {
        &self.space
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether the ball radius is within the convexity radius, so that the
    /// minimizer in the ball is unique.
    pub fn uniqueness_certified(&self) -> bool {
        self.ball.radius <= self.space.r_cx()
    }

    pub fn to_file(&self) -> DatasetFile {
        DatasetFile {
            space: self.space,
            points: self.points.clone(),
            weights: Some(self.weights.clone()),
            ball: Some(self.ball.clone()),
        }
    }
}

/// On-disk dataset. Missing weights mean equal weights; a missing ball has
/// to be supplied by the caller (e.g. from a minimal enclosing ball).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub space: ManifoldSpace,
    pub points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<Ball>,
}

impl DatasetFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses and re-projects points that are within 1e-9 of the model.
    pub fn parse(text: &str) -> Result<Self> {
        let mut f: DatasetFile = serde_json::from_str(text)?;
        let fix = |p: &Point| f.space.point_with_tol(p.as_slice(), 1e-9);
        f.points = f.points.iter().map(fix).collect::<Result<_>>()?;
        if let Some(b) = &f.ball {
            let c = fix(&b.center)?;
            f.ball = Some(Ball::new(c, b.radius));
        }
        Ok(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn into_dataset(self, fallback_ball: impl FnOnce(&ManifoldSpace, &[Point]) -> Result<Ball>) -> Result<WeightedDataset> {
        let ball = match self.ball {
            Some(b) => b,
            None => fallback_ball(&self.space, &self.points)?,
        };
        match self.weights {
            Some(w) => WeightedDataset::new(self.space, self.points, w, ball),
            None => WeightedDataset::uniform(self.space, self.points, ball),
        }
    }
}

pub fn cost(ds: &WeightedDataset, p: PExponent, x: &Point) -> f64 {
    let pv = p.value();
    ds.points
        .iter()
        .zip(&ds.weights)
        .map(|(xi, w)| w * ds.space.distance(x, xi).powf(pv))
        .sum::<f64>()
        / pv
}

/// `grad f_p(x) = -sum_i w_i d(x, x_i)^(p-2) log_x(x_i)`.
pub fn gradient(ds: &WeightedDataset, p: PExponent, x: &Point) -> Result<TangentVector> {
    let mut g = TangentVector::zero(x);
    for (i, (xi, w)) in ds.points.iter().zip(&ds.weights).enumerate() {
        if *w == 0.0 {
            continue;
        }
        let v = ds.space.log_map(x, xi).map_err(|e| match e {
            Error::CutLocus { distance, .. } => Error::DataCutLocus { index: i, distance },
            other => other,
        })?;
        let d = ds.space.norm(&v);
        g.vec -= &v.vec * (w * p.radial_factor(d));
    }
    Ok(g)
}

/// Eigenvalue bounds for the Hessian of `x -> d(x, y)^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds at distance `d`: `[b_Delta(d), c_delta(d)]`. Valid only for
/// `d < min(inj, pi/sqrt(Delta))`; beyond that the squared distance need not
/// even be differentiable.
pub fn hessian_radial_bounds(geom: &SpaceConstants, d: f64) -> Result<RadialBounds> {
    let limit = geom.inj.min(crate::kernels::Curvature(geom.upper_delta).conjugate_radius());
    if !(d >= 0.0 && d < limit) {
        return Err(Error::Domain {
            function: "hessian_radial_bounds",
            value: d,
            reason: "requires d(x, y) < min(inj, pi/sqrt(Delta))",
        });
    }
    Ok(RadialBounds {
        lower: b_lower(geom.upper_delta.into(), d)?,
        upper: c_upper(geom.delta.into(), d)?,
    })
}

/// Bounds for the Hessian of `x -> d(x, y)^p / p`:
/// `d^(p-2) [min(p-1, b_Delta(d)), max(p-1, c_delta(d))]`.
pub fn hessian_radial_bounds_p(geom: &SpaceConstants, d: f64, p: PExponent) -> Result<RadialBounds> {
    let b = hessian_radial_bounds(geom, d)?;
    let f = p.radial_factor(d);
    let pm1 = p.value() - 1.0;
    Ok(RadialBounds {
        lower: f * pm1.min(b.lower),
        upper: f * pm1.max(b.upper),
    })
}

/// Eigenvalue bounds for the Hessian of `f_p` on the ball `B(center, r)`,
/// summing the per-point radial bounds over the distance range
/// `[d_i - r, d_i + r]` of each data point.
pub fn hessian_bounds_on_ball(ds: &WeightedDataset, p: PExponent, center: &Point, r: f64) -> Result<RadialBounds> {
    let geom = ds.space.constants();
    let pm1 = p.value() - 1.0;
    let (mut lower, mut upper) = (0.0, 0.0);
    for (xi, w) in ds.points.iter().zip(&ds.weights) {
        let d = ds.space.distance(center, xi);
        let far = hessian_radial_bounds(&geom, d + r)?;
        lower += w * p.radial_factor((d - r).max(0.0)) * pm1.min(far.lower);
        upper += w * p.radial_factor(d + r) * pm1.max(far.upper);
    }
    Ok(RadialBounds { lower, upper })
}

/// `diam^(p-2) max(p-1, c_delta(diam))`: an upper bound for the Hessian of
/// `f_p` on any set whose points are within `diam` of all the data.
pub fn hessian_bound_for_diameter(geom: &SpaceConstants, diam: f64, p: PExponent) -> Result<f64> {
    let c = c_upper(geom.delta.into(), diam)?;
    Ok(p.radial_factor(diam) * (p.value() - 1.0).max(c))
}

/// `H = (2 rho)^(p-2) max(p-1, c_delta(2 rho))` on `B(o, rho)`, `rho <= r_cx`.
pub fn uniform_hessian_bound(geom: &SpaceConstants, rho: f64, p: PExponent) -> Result<f64> {
    check_radius(geom, rho, geom.r_cx, "uniform_hessian_bound")?;
    hessian_bound_for_diameter(geom, 2.0 * rho, p)
}

pub(crate) fn check_radius(geom: &SpaceConstants, rho: f64, bound: f64, what: &str) -> Result<()> {
    let _ = geom;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Precondition(format!("{what}: radius {rho} must be positive")));
    }
    if rho > bound * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "{what}: radius {rho} exceeds the admissible bound {bound}"
        )));
    }
    Ok(())
}

pub fn default_fd_step(space: &ManifoldSpace) -> f64 {
    1e-4 * space.inj().min(1.0)
}

/// Central second difference of `f_p` along the geodesic through `x` with
/// unit velocity `u`.
pub fn fd_hessian_quadratic_form(ds: &WeightedDataset, p: PExponent, x: &Point, u: &TangentVector, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("finite-difference step {h}")));
    }
    let inj = ds.space.inj();
    for (i, xi) in ds.points.iter().enumerate() {
        let d = ds.space.distance(x, xi);
        if d > inj - 2.0 * h {
            return Err(Error::DataCutLocus { index: i, distance: d });
        }
    }
    let fwd = ds.space.exp_map(&u.scaled(h));
    let bwd = ds.space.exp_map(&u.scaled(-h));
    let f0 = cost(ds, p, x);
    Ok((cost(ds, p, &fwd) - 2.0 * f0 + cost(ds, p, &bwd)) / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn circle_ds(w: (f64, f64)) -> WeightedDataset {
        let s = ManifoldSpace::circle(1.0).unwrap();
        let a = 2.0 * PI / 5.0;
        let pts = vec![s.circle_point(a).unwrap(), s.circle_point(-a).unwrap()];
        let ball = Ball::new(s.circle_point(0.0).unwrap(), a * (1.0 + 1e-12));
        WeightedDataset::new(s, pts, vec![w.0, w.1], ball).unwrap()
    }

    pub(crate) fn cross(rho: f64) -> WeightedDataset {
        let s = ManifoldSpace::sphere(2, 1.0).unwrap();
        let o = s.origin();
        let pts = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
            .iter()
            .map(|&(a, b)| s.exp_map(&TangentVector::new(o.clone(), DVector::from_vec(vec![0.0, a * rho, b * rho]))))
            .collect();
        WeightedDataset::uniform(s, pts, Ball::new(o, rho * (1.0 + 1e-12))).unwrap()
    }

    #[test]
    fn exponent_validation() {
        assert!(PExponent::new(1.5).is_err());
        assert!(PExponent::new(f64::INFINITY).is_err());
        assert!(PExponent::new(f64::NAN).is_err());
        assert_eq!(PExponent::new(3.0).unwrap().value(), 3.0);
        assert_eq!(PExponent::TWO.radial_factor(0.0), 1.0);
        assert_eq!(PExponent::new(3.0).unwrap().radial_factor(0.0), 0.0);
    }

    #[test]
    fn weights_are_checked() {
        let s = ManifoldSpace::euclidean(1).unwrap();
        let pts = vec![Point::from(vec![0.0]), Point::from(vec![1.0])];
        let ball = Ball::new(Point::from(vec![0.5]), 1.0);
        let ds = WeightedDataset::new(s, pts.clone(), vec![0.3, 0.7 + 5e-10], ball.clone()).unwrap();
        assert_abs_diff_eq!(ds.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        for bad in [vec![0.3, 0.6], vec![-0.1, 1.1], vec![1.0]] {
            assert!(matches!(
                WeightedDataset::new(s, pts.clone(), bad, ball.clone()),
                Err(Error::InvalidWeights(_))
            ));
        }
        let small = Ball::new(Point::from(vec![0.0]), 0.5);
        assert!(matches!(
            WeightedDataset::uniform(s, pts, small),
            Err(Error::InvalidDataset(_))
        ));
    }

    #[test]
    fn cost_examples() {
        let ds = circle_ds((0.1, 0.9));
        let x = ds.space().circle_point(0.0).unwrap();
        assert_abs_diff_eq!(cost(&ds, PExponent::TWO, &x), 0.5 * (2.0 * PI / 5.0).powi(2), epsilon = 1e-14);
        let ds = cross(FRAC_PI_4);
        let o = ds.ball().center.clone();
        assert_abs_diff_eq!(cost(&ds, PExponent::TWO, &o), FRAC_PI_4.powi(2) / 2.0, epsilon = 1e-14);
        let x1 = ds.points()[0].clone();
        let single = WeightedDataset::uniform(*ds.space(), vec![x1.clone()], Ball::new(x1.clone(), 0.1)).unwrap();
        for p in [2.0, 3.0, 7.5] {
            assert_eq!(cost(&single, PExponent::new(p).unwrap(), &x1), 0.0);
        }
    }

    #[test]
    fn gradient_examples() {
        let ds = cross(FRAC_PI_4);
        let g = gradient(&ds, PExponent::TWO, &ds.ball().center).unwrap();
        assert!(g.vec.norm() < 1e-15);

        let ds = circle_ds((0.1, 0.9));
        let x1 = ds.points()[0].clone();
        let g = gradient(&ds, PExponent::TWO, &x1).unwrap();
        assert_abs_diff_eq!(ds.space().norm(&g), 18.0 * PI / 25.0, epsilon = 1e-14);
        // Descent direction moves toward theta_2 (clockwise from x_1).
        let y = ds.space().exp_map(&g.scaled(-0.01));
        assert!(ds.space().circle_angle(&y).unwrap() < 2.0 * PI / 5.0);

        let s = ManifoldSpace::euclidean(2).unwrap();
        let pts = vec![Point::from(vec![1.0, 0.0]), Point::from(vec![0.0, 2.0])];
        let ds = WeightedDataset::new(s, pts, vec![0.25, 0.75], Ball::new(Point::from(vec![0.0, 0.0]), 3.0)).unwrap();
        let x = Point::from(vec![0.5, 0.5]);
        let g = gradient(&ds, PExponent::TWO, &x).unwrap();
        assert_abs_diff_eq!(g.vec[0], 0.5 - 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(g.vec[1], 0.5 - 1.5, epsilon = 1e-15);
    }

    #[test]
    fn gradient_reports_offending_index() {
        let s = ManifoldSpace::sphere(2, 1.0).unwrap();
        let pts = vec![Point::from(vec![0.0, 1.0, 0.0]), Point::from(vec![-1.0, 0.0, 0.0])];
        let ds = WeightedDataset::uniform(s, pts, Ball::new(Point::from(vec![-1.0, 0.0, 0.0]), 3.0)).unwrap();
        let err = gradient(&ds, PExponent::TWO, &s.origin()).unwrap_err();
        assert!(matches!(err, Error::DataCutLocus { index: 1, .. }));
    }

    #[test]
    fn radial_bound_examples() {
        let s2 = ManifoldSpace::sphere(2, 1.0).unwrap().constants();
        let b = hessian_radial_bounds(&s2, PI / 2.0).unwrap();
        assert_abs_diff_eq!(b.lower, 0.0, epsilon = 1e-15);
        assert_eq!(b.upper, 1.0);
        assert!(hessian_radial_bounds(&s2, PI).is_err());
        let r2 = ManifoldSpace::euclidean(2).unwrap().constants();
        assert_eq!(hessian_radial_bounds(&r2, 17.0).unwrap(), RadialBounds { lower: 1.0, upper: 1.0 });
        let h2 = ManifoldSpace::hyperbolic(2, -1.0).unwrap().constants();
        let b = hessian_radial_bounds(&h2, 2.0 * PI / 3.0).unwrap();
        assert_eq!(b.lower, 1.0);
        assert_abs_diff_eq!(b.upper, 2.158894624271852, epsilon = 1e-12);
    }

    #[test]
    fn uniform_bound_examples() {
        let s2 = ManifoldSpace::sphere(2, 1.0).unwrap().constants();
        for rho in [0.1, 0.7, PI / 2.0] {
            assert_eq!(uniform_hessian_bound(&s2, rho, PExponent::TWO).unwrap(), 1.0);
        }
        assert_abs_diff_eq!(uniform_hessian_bound(&s2, 0.5, PExponent::new(4.0).unwrap()).unwrap(), 3.0, epsilon = 1e-15);
        assert!(uniform_hessian_bound(&s2, 1.6, PExponent::TWO).is_err());
        let h2 = ManifoldSpace::hyperbolic(2, -1.0).unwrap().constants();
        assert_abs_diff_eq!(uniform_hessian_bound(&h2, PI / 3.0, PExponent::TWO).unwrap(), 2.158894624271852, epsilon = 1e-12);
    }

    #[test]
    fn fd_hessian_cross_config() {
        let rho = FRAC_PI_4;
        let ds = cross(rho);
        let o = ds.ball().center.clone();
        let u = ds.space().log_map(&o, &ds.points()[0]).unwrap();
        let u = u.scaled(1.0 / ds.space().norm(&u));
        let q = fd_hessian_quadratic_form(&ds, PExponent::TWO, &o, &u, 1e-4).unwrap();
        // (rho cot rho + 1) / 2 at rho = pi/4
        assert_abs_diff_eq!(q, 0.5 * (rho / rho.tan() + 1.0), epsilon = 1e-5);
        assert_abs_diff_eq!(q, 0.8926990816987241, epsilon = 1e-5);
    }

    #[test]
    fn ball_bounds_contain_fd_values() {
        let rho = 0.35 * PI;
        let ds = cross(rho);
        let o = ds.ball().center.clone();
        let b = hessian_bounds_on_ball(&ds, PExponent::TWO, &o, 0.0).unwrap();
        // At o every point sits at distance rho: [rho cot rho, 1].
        assert_abs_diff_eq!(b.lower, rho / rho.tan(), epsilon = 1e-14);
        assert_abs_diff_eq!(b.upper, 1.0, epsilon = 1e-14);
        let u = TangentVector::new(o.clone(), DVector::from_vec(vec![0.0, 0.6, 0.8]));
        let q = fd_hessian_quadratic_form(&ds, PExponent::TWO, &o, &u, 1e-4).unwrap();
        assert!(q >= b.lower - 1e-6 && q <= b.upper + 1e-6);
        let wide = hessian_bounds_on_ball(&ds, PExponent::TWO, &o, 0.1).unwrap();
        assert!(wide.lower < b.lower && wide.upper == 1.0);
    }

    #[test]
    fn fd_hessian_euclidean_is_identity() {
        let s = ManifoldSpace::euclidean(3).unwrap();
        let pts = vec![Point::from(vec![1.0, 0.0, 0.0]), Point::from(vec![0.0, -2.0, 1.0])];
        let ds = WeightedDataset::uniform(s, pts, Ball::new(Point::from(vec![0.0; 3]), 5.0)).unwrap();
        let x = Point::from(vec![0.3, 0.1, -0.2]);
        let u = TangentVector::new(x.clone(), DVector::from_vec(vec![0.6, 0.0, 0.8]));
        let q = fd_hessian_quadratic_form(&ds, PExponent::TWO, &x, &u, 1e-4).unwrap();
        assert_abs_diff_eq!(q, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn dataset_json_roundtrip() {
        let ds = circle_ds((0.1, 0.9));
        let text = serde_json::to_string(&ds.to_file()).unwrap();
        assert!(text.contains("\"ball\":{\"center\""));
        let back = DatasetFile::parse(&text).unwrap().into_dataset(|_, _| unreachable!()).unwrap();
        assert_eq!(back.len(), 2);
        assert_abs_diff_eq!(back.weights()[1], 0.9, epsilon = 1e-15);

        let bare = r#"{"space":{"kind":"euclidean","dim":1},"points":[[0.0],[2.0]]}"#;
        let ds = DatasetFile::parse(bare)
            .unwrap()
            .into_dataset(|_, _| Ok(Ball::new(Point::from(vec![1.0]), 1.5)))
            .unwrap();
        assert_eq!(ds.weights(), &[0.5, 0.5]);
    }
}
