//! Constant-curvature model spaces in extrinsic coordinates.
//!
//! * Euclidean space `R^n`: plain vectors.
//! * Sphere `S^n` of curvature `k > 0`: unit vectors of `R^{n+1}`; lengths are
//!   the unit-sphere angle scaled by `1/sqrt(k)`.
//! * Circle: a one dimensional sphere. Its sectional curvature bounds are
//!   taken as zero (it is flat) while its injectivity radius stays finite.
//! * Real projective space `RP^n`: unit vectors of `R^{n+1}` modulo `x ~ -x`.
//! * `SO(3)`: unit quaternions modulo sign, with the rotation-angle metric.
//!   Under that metric it is `RP^3` of curvature 1/4.
//! * Hyperbolic space `H^n` of curvature `k < 0`: the upper sheet of the
//!   hyperboloid `<x, x>_L = -1/|k|` in Minkowski space `R^{1,n}`.
//!
//! Tangent vectors are stored in ambient coordinates and their metric norm
//! is the ambient (Euclidean or Minkowski) norm of the stored vector.

use crate::error::{Error, Result};
use crate::kernels::Curvature;
use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative width of the band below the injectivity radius in which
/// [`ManifoldSpace::log_map`] reports a cut-locus error.
pub const CUT_LOCUS_TOL: f64 = 1e-9;

/// Tolerance on the representation constraint of a freshly built point.
pub const POINT_TOL: f64 = 1e-12;

/// Tolerance on tangency of a tangent vector.
pub const TANGENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Euclidean,
    Sphere,
    Hyperbolic,
    Circle,
    So3,
    RealProjective,
}

/// A point in the ambient coordinates of its space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: DVector<f64>,
}

impl Point {
    /// Wraps raw coordinates. No validation: use [`ManifoldSpace::point`].
    pub fn from_coords(coords: DVector<f64>) -> Self {
        Point { coords }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point {
            coords: DVector::from_vec(v),
        }
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords.as_slice().to_vec()
    }
}

/// A tangent vector together with its base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: Point,
    pub vec: DVector<f64>,
}

impl TangentVector {
    pub fn new(base: Point, vec: DVector<f64>) -> Self {
        TangentVector { base, vec }
    }

    pub fn zero(base: &Point) -> Self {
        TangentVector {
            vec: DVector::zeros(base.len()),
            base: base.clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        TangentVector {
            base: self.base.clone(),
            vec: &self.vec * s,
        }
    }
}

/// Lower and upper bounds on the sectional curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBounds {
    /// Lower bound, written `delta` in the Hessian estimates.
    pub lower: Curvature,
    /// Upper bound, written `Delta`.
    pub upper: Curvature,
}

impl CurvatureBounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        CurvatureBounds {
            lower: Curvature(lower),
            upper: Curvature(upper),
        }
    }

    pub fn constant(k: f64) -> Self {
        Self::new(k, k)
    }
}

/// Closed-form geometric constants of a space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceConstants {
    pub inj: f64,
    pub r_cx: f64,
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub upper_delta: f64,
}

impl SpaceConstants {
    /// Constants of a hypothetical space known only through its curvature
    /// bounds, with the injectivity radius assumed not to bind.
    pub fn from_bounds(delta: f64, upper_delta: f64) -> Self {
        SpaceConstants {
            inj: f64::INFINITY,
            r_cx: 0.5 * Curvature(upper_delta).conjugate_radius(),
            delta,
            upper_delta,
        }
    }
}

/// Serialized form `{"kind", "dim", "kappa"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceDescriptor", into = "SpaceDescriptor")]
pub struct ManifoldSpace {
    kind: SpaceKind,
    dim: usize,
    kappa: f64,
}

#[derive(Clone, Copy)]
enum Model {
    Flat,
    /// Unit sphere scaled by `radius`; `quotient` identifies antipodes.
    Spherical { radius: f64, quotient: bool },
    /// Hyperboloid `<x, x>_L = -radius^2`.
    Hyperboloid { radius: f64 },
}

impl TryFrom<SpaceDescriptor> for ManifoldSpace {
    type Error = Error;

    fn try_from(d: SpaceDescriptor) -> Result<Self> {
        let dim = || {
            d.dim
                .ok_or_else(|| Error::Parse(format!("space {:?} needs \"dim\"", d.kind)))
        };
        match d.kind {
            SpaceKind::Euclidean => ManifoldSpace::euclidean(dim()?),
            SpaceKind::Sphere => ManifoldSpace::sphere(dim()?, d.kappa.unwrap_or(1.0)),
            SpaceKind::Hyperbolic => ManifoldSpace::hyperbolic(dim()?, d.kappa.unwrap_or(-1.0)),
            SpaceKind::Circle => ManifoldSpace::circle(d.kappa.unwrap_or(1.0)),
            SpaceKind::So3 => Ok(ManifoldSpace::so3()),
            SpaceKind::RealProjective => {
                ManifoldSpace::real_projective(dim()?, d.kappa.unwrap_or(1.0))
            }
        }
    }
}

impl From<ManifoldSpace> for SpaceDescriptor {
    fn from(s: ManifoldSpace) -> Self {
        SpaceDescriptor {
            kind: s.kind,
            dim: Some(s.dim),
            kappa: Some(s.kappa),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    Ok(())
}

fn check_kappa(kappa: f64, positive: bool) -> Result<()> {
    let ok = kappa.is_finite() && if positive { kappa > 0.0 } else { kappa < 0.0 };
    if !ok {
        return Err(Error::Config(format!(
            "curvature {kappa} must be finite and {}",
            if positive { "positive" } else { "negative" }
        )));
    }
    Ok(())
}

fn minkowski(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    -u[0] * v[0] + u.rows(1, u.len() - 1).dot(&v.rows(1, v.len() - 1))
}

/// Angle between two unit vectors, accurate near 0 and near pi.
fn unit_angle(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    2.0 * (x - y).norm().atan2((x + y).norm())
}

fn canonicalize(mut v: DVector<f64>) -> DVector<f64> {
    if let Some(first) = v.iter().copied().find(|c| *c != 0.0) {
        if first < 0.0 {
            v.neg_mut();
        }
    }
    v
}

impl ManifoldSpace {
    pub fn euclidean(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(ManifoldSpace {
            kind: SpaceKind::Euclidean,
            dim,
            kappa: 0.0,
        })
    }

    pub fn sphere(dim: usize, kappa: f64) -> Result<Self> {
        check_dim(dim)?;
        check_kappa(kappa, true)?;
        Ok(ManifoldSpace {
            kind: SpaceKind::Sphere,
            dim,
            kappa,
        })
    }

    pub fn hyperbolic(dim: usize, kappa: f64) -> Result<Self> {
        check_dim(dim)?;
        check_kappa(kappa, false)?;
        Ok(ManifoldSpace {
            kind: SpaceKind::Hyperbolic,
            dim,
            kappa,
        })
    }

    /// Circle of radius `1/sqrt(kappa)`.
    pub fn circle(kappa: f64) -> Result<Self> {
        check_kappa(kappa, true)?;
        Ok(ManifoldSpace {
            kind: SpaceKind::Circle,
            dim: 1,
            kappa,
        })
    }

    /// Rotation group with the rotation-angle metric (curvature 1/4).
    pub fn so3() -> Self {
        ManifoldSpace {
            kind: SpaceKind::So3,
            dim: 3,
            kappa: 0.25,
        }
    }

    pub fn real_projective(dim: usize, kappa: f64) -> Result<Self> {
        check_dim(dim)?;
        check_kappa(kappa, true)?;
        Ok(ManifoldSpace {
            kind: SpaceKind::RealProjective,
            dim,
            kappa,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Manifold dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The curvature parameter the space was built with.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            SpaceKind::Euclidean => self.dim,
            SpaceKind::Circle => 2,
            SpaceKind::So3 => 4,
            SpaceKind::Sphere | SpaceKind::Hyperbolic | SpaceKind::RealProjective => self.dim + 1,
        }
    }

    fn model(&self) -> Model {
        match self.kind {
            SpaceKind::Euclidean => Model::Flat,
            SpaceKind::Sphere | SpaceKind::Circle => Model::Spherical {
                radius: 1.0 / self.kappa.sqrt(),
                quotient: false,
            },
            SpaceKind::So3 | SpaceKind::RealProjective => Model::Spherical {
                radius: 1.0 / self.kappa.sqrt(),
                quotient: true,
            },
            SpaceKind::Hyperbolic => Model::Hyperboloid {
                radius: 1.0 / (-self.kappa).sqrt(),
            },
        }
    }

    /// True for spaces whose points are sign classes `{x, -x}`.
    pub fn is_quotient(&self) -> bool {
        matches!(self.kind, SpaceKind::So3 | SpaceKind::RealProjective)
    }

    /// Sectional curvature bounds used by the Hessian estimates.
    pub fn curvature_bounds(&self) -> CurvatureBounds {
        match self.kind {
            SpaceKind::Euclidean | SpaceKind::Circle => CurvatureBounds::constant(0.0),
            _ => CurvatureBounds::constant(self.kappa),
        }
    }

    pub fn inj(&self) -> f64 {
        match self.model() {
            Model::Flat | Model::Hyperboloid { .. } => f64::INFINITY,
            Model::Spherical { radius, quotient } => {
                if quotient {
                    PI * radius / 2.0
                } else {
                    PI * radius
                }
            }
        }
    }

    /// Convexity radius `min(inj, pi/sqrt(Delta)) / 2`.
    pub fn r_cx(&self) -> f64 {
        let upper = self.curvature_bounds().upper;
        0.5 * self.inj().min(upper.conjugate_radius())
    }

    pub fn constants(&self) -> SpaceConstants {
        let b = self.curvature_bounds();
        SpaceConstants {
            inj: self.inj(),
            r_cx: self.r_cx(),
            delta: b.lower.0,
            upper_delta: b.upper.0,
        }
    }

    /// A fixed base point: the origin, the first basis vector, the identity
    /// quaternion, or the hyperboloid vertex.
    pub fn origin(&self) -> Point {
        let mut v = DVector::zeros(self.ambient_dim());
        match self.model() {
            Model::Flat => {}
            Model::Spherical { .. } => v[0] = 1.0,
            Model::Hyperboloid { radius } => v[0] = radius,
        }
        Point { coords: v }
    }

    /// Validates raw coordinates and returns a (canonical) point.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        self.point_with_tol(coords, POINT_TOL)
    }

    /// As [`point`](Self::point) but accepts a looser constraint violation and
    /// re-projects. Used for coordinates read from files.
    pub fn point_with_tol(&self, coords: &[f64], tol: f64) -> Result<Point> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                actual: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let v = DVector::from_column_slice(coords);
        match self.model() {
            Model::Flat => {}
            Model::Spherical { .. } => {
                let n = v.norm();
                if (n - 1.0).abs() > tol {
                    return Err(Error::InvalidPoint(format!(
                        "expected a unit vector, norm is {n}"
                    )));
                }
            }
            Model::Hyperboloid { radius } => {
                let q = minkowski(&v, &v);
                let r2 = radius * radius;
                // <x,x>_L cancels: its rounding error grows like |x|^2.
                if (q + r2).abs() > tol * (r2 + v.norm_squared()) || v[0] <= 0.0 {
                    return Err(Error::InvalidPoint(format!(
                        "expected <x,x>_L = {} on the upper sheet, got {q}",
                        -r2
                    )));
                }
            }
        }
        Ok(self.project(v))
    }

    /// Nearest point of the model to an ambient vector.
    pub fn project(&self, v: DVector<f64>) -> Point {
        let coords = match self.model() {
            Model::Flat => v,
            Model::Spherical { quotient, .. } => {
                let u = &v / v.norm();
                if quotient {
                    canonicalize(u)
                } else {
                    u
                }
            }
            Model::Hyperboloid { radius } => {
                let mut u = v;
                let spatial = u.rows(1, u.len() - 1).norm_squared();
                u[0] = (radius * radius + spatial).sqrt();
                u
            }
        };
        Point { coords }
    }

    /// Checks the representation constraint of an existing point.
    pub fn validate(&self, x: &Point) -> Result<()> {
        self.point(x.as_slice()).map(|_| ())
    }

    /// Ambient inner product restricted to the tangent space at any base.
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        match self.model() {
            Model::Hyperboloid { .. } => minkowski(u, v),
            _ => u.dot(v),
        }
    }

    pub fn norm(&self, v: &TangentVector) -> f64 {
        self.vec_norm(&v.vec)
    }

    fn vec_norm(&self, v: &DVector<f64>) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Orthogonal projection of an ambient vector onto the tangent space at `x`.
    pub fn to_tangent(&self, x: &Point, v: &DVector<f64>) -> TangentVector {
        let xv = &x.coords;
        let vec = match self.model() {
            Model::Flat => v.clone(),
            Model::Spherical { .. } => v - xv * xv.dot(v),
            Model::Hyperboloid { radius } => v + xv * (minkowski(xv, v) / (radius * radius)),
        };
        TangentVector::new(x.clone(), vec)
    }

    /// Checks that `v` is tangent at its base point.
    pub fn validate_tangent(&self, v: &TangentVector) -> Result<()> {
        if v.vec.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                actual: v.vec.len(),
            });
        }
        let xv = &v.base.coords;
        let normal = match self.model() {
            Model::Flat => 0.0,
            Model::Spherical { .. } => xv.dot(&v.vec),
            Model::Hyperboloid { radius } => minkowski(xv, &v.vec) / radius,
        };
        if normal.abs() > TANGENT_TOL * (1.0 + v.vec.norm()) {
            return Err(Error::InvalidTangent(format!(
                "normal component {normal:e}"
            )));
        }
        Ok(())
    }

    /// Geodesic distance.
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        let (a, b) = (&x.coords, &y.coords);
        match self.model() {
            Model::Flat => (a - b).norm(),
            Model::Spherical { radius, quotient } => {
                let angle = if quotient {
                    unit_angle(a, b).min(unit_angle(a, &-b))
                } else {
                    unit_angle(a, b)
                };
                radius * angle
            }
            Model::Hyperboloid { radius } => {
                let d = a - b;
                let chord = minkowski(&d, &d).max(0.0).sqrt();
                2.0 * radius * (chord / (2.0 * radius)).asinh()
            }
        }
    }

    /// Exponential map. The result is re-projected onto the model.
    pub fn exp_map(&self, v: &TangentVector) -> Point {
        let x = &v.base.coords;
        match self.model() {
            Model::Flat => Point {
                coords: x + &v.vec,
            },
            Model::Spherical { radius, .. } => {
                let n = v.vec.norm();
                if n == 0.0 {
                    return v.base.clone();
                }
                let theta = n / radius;
                let y = x * theta.cos() + &v.vec * (theta.sin() / n);
                self.project(y)
            }
            Model::Hyperboloid { radius } => {
                let n = self.vec_norm(&v.vec);
                if n == 0.0 {
                    return v.base.clone();
                }
                let theta = n / radius;
                let y = x * theta.cosh() + &v.vec * (radius * theta.sinh() / n);
                self.project(y)
            }
        }
    }

    /// Inverse of the exponential map. Fails inside the cut-locus band
    /// `d(x, y) >= inj * (1 - CUT_LOCUS_TOL)`.
    pub fn log_map(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        let a = &x.coords;
        match self.model() {
            Model::Flat => Ok(TangentVector::new(x.clone(), &y.coords - a)),
            Model::Spherical { radius, quotient } => {
                let b = if quotient && a.dot(&y.coords) < 0.0 {
                    -&y.coords
                } else {
                    y.coords.clone()
                };
                let angle = unit_angle(a, &b);
                let d = radius * angle;
                let inj = self.inj();
                if d >= inj * (1.0 - CUT_LOCUS_TOL) {
                    return Err(Error::CutLocus { distance: d, inj });
                }
                let u = &b - a * a.dot(&b);
                let un = u.norm();
                if un == 0.0 || angle == 0.0 {
                    return Ok(TangentVector::zero(x));
                }
                Ok(TangentVector::new(x.clone(), u * (d / un)))
            }
            Model::Hyperboloid { radius } => {
                let d = self.distance(x, y);
                if d == 0.0 {
                    return Ok(TangentVector::zero(x));
                }
                let b = &y.coords;
                let u = b + a * (minkowski(a, b) / (radius * radius));
                let un = self.vec_norm(&u);
                if un == 0.0 {
                    return Ok(TangentVector::zero(x));
                }
                Ok(TangentVector::new(x.clone(), u * (d / un)))
            }
        }
    }

    /// Point at parameter `t` of the geodesic `s -> exp_x(s v)`.
    pub fn geodesic(&self, v: &TangentVector, t: f64) -> Point {
        self.exp_map(&v.scaled(t))
    }

    /// Angle at `x` between the geodesics to `y` and to `z`.
    pub fn angle_at(&self, x: &Point, y: &Point, z: &Point) -> Result<f64> {
        let u = self.log_map(x, y)?;
        let v = self.log_map(x, z)?;
        let nu = self.norm(&u);
        let nv = self.norm(&v);
        if nu == 0.0 || nv == 0.0 {
            return Err(Error::Domain {
                function: "angle_at",
                value: nu.min(nv),
                reason: "angle undefined at a coincident vertex",
            });
        }
        let cos = self.inner(&u.vec, &v.vec) / (nu * nv);
        // Same atan2 trick as for points: accurate near 0 and pi.
        let a = &u.vec / nu;
        let b = &v.vec / nv;
        let diff = self.vec_norm(&(&a - &b));
        let sum = self.vec_norm(&(&a + &b));
        let angle = 2.0 * diff.atan2(sum);
        debug_assert!((angle.cos() - cos).abs() < 1e-8);
        Ok(angle)
    }

    /// Point on the circle at unit-circle angle `theta`.
    pub fn circle_point(&self, theta: f64) -> Result<Point> {
        if self.kind != SpaceKind::Circle {
            return Err(Error::Config("circle_point needs a circle".into()));
        }
        Ok(Point::from(vec![theta.cos(), theta.sin()]))
    }

    /// Unit-circle angle of a circle point, in `(-pi, pi]`.
    pub fn circle_angle(&self, x: &Point) -> Result<f64> {
        if self.kind != SpaceKind::Circle {
            return Err(Error::Config("circle_angle needs a circle".into()));
        }
        let a = x.coords[1].atan2(x.coords[0]);
        Ok(if a <= -PI { a + 2.0 * PI } else { a })
    }

    /// Unit quaternion `(w, x, y, z)` of the rotation by `angle` about `axis`.
    pub fn rotation(&self, axis: [f64; 3], angle: f64) -> Result<Point> {
        if self.kind != SpaceKind::So3 {
            return Err(Error::Config("rotation needs SO(3)".into()));
        }
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == 0.0 {
            return Err(Error::InvalidPoint("zero rotation axis".into()));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        let q = DVector::from_vec(vec![c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n]);
        Ok(self.project(q))
    }

    // --- sampling -------------------------------------------------------

    /// A random point. Uniform on compact spaces; for noncompact spaces a
    /// point within distance 2 (in curvature-normalized units) of the origin.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self.model() {
            Model::Spherical { .. } => {
                let v = DVector::from_fn(self.ambient_dim(), |_, _| rng.sample(StandardNormal));
                self.project(v)
            }
            Model::Flat | Model::Hyperboloid { .. } => {
                let scale = if self.kappa == 0.0 {
                    1.0
                } else {
                    1.0 / (-self.kappa).sqrt()
                };
                let o = self.origin();
                let r = rng.gen_range(0.0..2.0 * scale);
                self.random_at_distance(&o, r, rng)
            }
        }
    }

    /// Uniformly distributed unit tangent vector at `x`.
    pub fn random_unit_tangent<R: Rng + ?Sized>(&self, x: &Point, rng: &mut R) -> TangentVector {
        loop {
            let v: DVector<f64> =
                DVector::from_fn(self.ambient_dim(), |_, _| rng.sample(StandardNormal));
            let t = self.to_tangent(x, &v);
            let n = self.norm(&t);
            if n > 1e-8 {
                return t.scaled(1.0 / n);
            }
        }
    }

    /// Point at distance `r` from `x` in a uniformly random direction.
    pub fn random_at_distance<R: Rng + ?Sized>(&self, x: &Point, r: f64, rng: &mut R) -> Point {
        let u = self.random_unit_tangent(x, rng);
        self.exp_map(&u.scaled(r))
    }

    /// Point distributed uniformly (Riemannian volume) in the open ball
    /// `B(center, radius)`, by inverting the radial distribution in geodesic
    /// polar coordinates. `radius` must not exceed the injectivity radius.
    pub fn random_in_ball<R: Rng + ?Sized>(&self, center: &Point, radius: f64, rng: &mut R) -> Point {
        let kappa = Curvature(self.kappa);
        let n = self.dim;
        let total = radial_mass(kappa, n, radius);
        let target = rng.gen::<f64>() * total;
        let (mut lo, mut hi) = (0.0, radius);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if radial_mass(kappa, n, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.random_at_distance(center, 0.5 * (lo + hi), rng)
    }
}

/// Unnormalized radial volume `int_0^r sn_k(s)^(n-1) ds`.
fn radial_mass(kappa: Curvature, n: usize, r: f64) -> f64 {
    let k = kappa.0;
    let s = kappa.sqrt_abs();
    match n {
        1 => r,
        2 => {
            if k > 0.0 {
                (1.0 - (s * r).cos()) / k
            } else if k < 0.0 {
                ((s * r).cosh() - 1.0) / -k
            } else {
                r * r / 2.0
            }
        }
        3 => {
            if k > 0.0 {
                (r - (2.0 * s * r).sin() / (2.0 * s)) / (2.0 * k)
            } else if k < 0.0 {
                ((2.0 * s * r).sinh() / (2.0 * s) - r) / (-2.0 * k)
            } else {
                r * r * r / 3.0
            }
        }
        _ => {
            // Composite Simpson rule.
            let m = 256;
            let h = r / m as f64;
            let f = |x: f64| {
                let v = if k > 0.0 {
                    (s * x).sin() / s
                } else if k < 0.0 {
                    (s * x).sinh() / s
                } else {
                    x
                };
                v.powi(n as i32 - 1)
            };
            let mut acc = f(0.0) + f(r);
            for i in 1..m {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(i as f64 * h);
            }
            acc * h / 3.0
        }
    }
}
