//! Scalar comparison kernels of constant-curvature geometry.
//!
//! `sn`, `ct`, `b_lower` and `c_upper` are the functions that bound the
//! Hessian of the squared distance in a space whose sectional curvature is
//! pinched between two constants. `secant_sphere` and `secant_euclid` give
//! the length of a cevian from a triangle vertex on the unit sphere and in the
//! plane respectively, for the same two sides and split angle.
//!
//! Every kernel returns [`Error::Domain`] rather than a NaN when its argument
//! leaves the region where the formula is meaningful.
//!
//! The flat branch of `sn` is the Jacobi-field sine `sn_0(l) = l`. Some
//! printed tables give `1/l` for this branch; that value is inconsistent with
//! the other two branches (it is the flat branch of `ct`) and is not used here.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Below this value of `sqrt(|kappa|) * l` the `x cot x` / `x coth x` forms
/// switch to their Taylor series.
const SERIES_THRESHOLD: f64 = 1e-4;

/// Sectional curvature, in units of 1/length^2.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Curvature(pub f64);

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    /// `sqrt(|kappa|)`.
    pub fn sqrt_abs(self) -> f64 {
        self.0.abs().sqrt()
    }

    /// Length beyond which the comparison space has conjugate points,
    /// `pi / sqrt(kappa)` for positive curvature and infinity otherwise.
    pub fn conjugate_radius(self) -> f64 {
        if self.0 > 0.0 {
            PI / self.0.sqrt()
        } else {
            f64::INFINITY
        }
    }
}

impl From<f64> for Curvature {
    fn from(k: f64) -> Self {
        Curvature(k)
    }
}

fn check_finite(function: &'static str, kappa: Curvature, l: f64) -> Result<()> {
    if !kappa.0.is_finite() {
        return Err(Error::Domain {
            function,
            value: kappa.0,
            reason: "curvature must be finite",
        });
    }
    if !l.is_finite() {
        return Err(Error::Domain {
            function,
            value: l,
            reason: "length must be finite",
        });
    }
    Ok(())
}

fn check_nonnegative(function: &'static str, l: f64) -> Result<()> {
    if l < 0.0 {
        return Err(Error::Domain {
            function,
            value: l,
            reason: "length must be nonnegative",
        });
    }
    Ok(())
}

fn check_below_conjugate(function: &'static str, kappa: Curvature, l: f64) -> Result<()> {
    if kappa.0 > 0.0 && kappa.0.sqrt() * l >= PI {
        return Err(Error::Domain {
            function,
            value: l,
            reason: "sqrt(kappa) * l must be below pi",
        });
    }
    Ok(())
}

/// Generalized sine: `sin(sqrt(k) l)/sqrt(k)`, `l`, or `sinh(sqrt(-k) l)/sqrt(-k)`.
pub fn sn(kappa: Curvature, l: f64) -> Result<f64> {
    check_finite("sn", kappa, l)?;
    check_nonnegative("sn", l)?;
    let s = kappa.sqrt_abs();
    Ok(if kappa.0 > 0.0 {
        (s * l).sin() / s
    } else if kappa.0 < 0.0 {
        (s * l).sinh() / s
    } else {
        l
    })
}

/// Generalized cotangent: `sqrt(k) cot(sqrt(k) l)`, `1/l`, or `sqrt(-k) coth(sqrt(-k) l)`.
pub fn ct(kappa: Curvature, l: f64) -> Result<f64> {
    check_finite("ct", kappa, l)?;
    if l <= 0.0 {
        return Err(Error::Domain {
            function: "ct",
            value: l,
            reason: "length must be positive",
        });
    }
    check_below_conjugate("ct", kappa, l)?;
    let s = kappa.sqrt_abs();
    Ok(if kappa.0 > 0.0 {
        s / (s * l).tan()
    } else if kappa.0 < 0.0 {
        s / (s * l).tanh()
    } else {
        1.0 / l
    })
}

/// Lower Hessian kernel `b_k(l)`: `sqrt(k) l cot(sqrt(k) l)` for `k >= 0`, `1` for `k < 0`.
///
/// Equals 1 at `l = 0` and, for positive curvature, decreases to 0 at
/// `l = pi / (2 sqrt(k))`.
pub fn b_lower(kappa: Curvature, l: f64) -> Result<f64> {
    check_finite("b_lower", kappa, l)?;
    check_nonnegative("b_lower", l)?;
    check_below_conjugate("b_lower", kappa, l)?;
    if kappa.0 <= 0.0 {
        return Ok(1.0);
    }
    let x = kappa.0.sqrt() * l;
    if x < SERIES_THRESHOLD {
        let x2 = x * x;
        return Ok(1.0 - x2 / 3.0 - x2 * x2 / 45.0);
    }
    Ok(x / x.tan())
}

/// Upper Hessian kernel `c_k(l)`: `1` for `k >= 0`, `sqrt(-k) l coth(sqrt(-k) l)` for `k < 0`.
pub fn c_upper(kappa: Curvature, l: f64) -> Result<f64> {
    check_finite("c_upper", kappa, l)?;
    check_nonnegative("c_upper", l)?;
    if kappa.0 >= 0.0 {
        return Ok(1.0);
    }
    let x = kappa.sqrt_abs() * l;
    if x < SERIES_THRESHOLD {
        let x2 = x * x;
        return Ok(1.0 + x2 / 3.0 - x2 * x2 / 45.0);
    }
    Ok(x / x.tanh())
}

/// Two sides from a common vertex and the split of the vertex angle by a
/// secant through that vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecantProblem {
    /// Length of the side towards `y1`.
    pub b: f64,
    /// Length of the side towards `y2`.
    pub c: f64,
    /// Angle between the secant and the side towards `y1`.
    pub alpha1: f64,
    /// Angle between the secant and the side towards `y2`.
    pub alpha2: f64,
}

impl SecantProblem {
    pub fn new(b: f64, c: f64, alpha1: f64, alpha2: f64) -> Self {
        SecantProblem { b, c, alpha1, alpha2 }
    }

    /// Full vertex angle `alpha1 + alpha2`.
    pub fn alpha(&self) -> f64 {
        self.alpha1 + self.alpha2
    }

    fn validate(&self, function: &'static str) -> Result<()> {
        for &(v, what) in &[
            (self.b, "side b must be finite and nonnegative"),
            (self.c, "side c must be finite and nonnegative"),
            (self.alpha1, "alpha1 must be finite and nonnegative"),
            (self.alpha2, "alpha2 must be finite and nonnegative"),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain {
                    function,
                    value: v,
                    reason: what,
                });
            }
        }
        let alpha = self.alpha();
        // A few ulps of slack so that alpha1 = pi - alpha2 computed in floating
        // point is still accepted.
        if alpha > PI * (1.0 + 4.0 * f64::EPSILON) {
            return Err(Error::Domain {
                function,
                value: alpha,
                reason: "alpha1 + alpha2 must not exceed pi",
            });
        }
        Ok(())
    }
}

const ANGLE_EPS: f64 = 1e-14;

/// Shared handling of the vertex-angle edge cases. `Some(z)` is a resolved
/// length, `None` means the generic formula applies.
fn degenerate_secant(prob: &SecantProblem) -> Result<Option<f64>> {
    let alpha = prob.alpha();
    if alpha <= ANGLE_EPS {
        return Err(Error::DegenerateSecant("vertex angle is zero"));
    }
    if PI - alpha <= ANGLE_EPS {
        if prob.alpha1 <= ANGLE_EPS || prob.alpha2 <= ANGLE_EPS {
            return Err(Error::DegenerateSecant(
                "straight vertex angle with the secant along a side",
            ));
        }
        // x lies on the geodesic y1 y2; the secant meets it at x.
        return Ok(Some(0.0));
    }
    if prob.alpha1 <= ANGLE_EPS {
        return Ok(Some(prob.b));
    }
    if prob.alpha2 <= ANGLE_EPS {
        return Ok(Some(prob.c));
    }
    Ok(None)
}

/// Length of the geodesic secant on the sphere of curvature `kappa > 0`.
///
/// Solves `cot z = (cot b sin a2 + cot c sin a1) / sin(a1 + a2)` in the unit
/// sphere gauge. The relation is multiplied through by `sin b sin c` and
/// evaluated with `atan2`, so `b = 0`, `c = 0` and `b, c` near `pi/2` need no
/// special handling.
pub fn secant_sphere(prob: &SecantProblem, kappa: Curvature) -> Result<f64> {
    prob.validate("secant_sphere")?;
    if !(kappa.0 > 0.0) || !kappa.0.is_finite() {
        return Err(Error::Domain {
            function: "secant_sphere",
            value: kappa.0,
            reason: "curvature must be positive",
        });
    }
    let scale = kappa.0.sqrt();
    let b = prob.b * scale;
    let c = prob.c * scale;
    if b >= PI || c >= PI {
        return Err(Error::Domain {
            function: "secant_sphere",
            value: b.max(c),
            reason: "sides must be shorter than pi / sqrt(kappa)",
        });
    }
    if let Some(z) = degenerate_secant(prob)? {
        return Ok(z);
    }
    let (sb, cb) = b.sin_cos();
    let (sc, cc) = c.sin_cos();
    let num = sb * sc * prob.alpha().sin();
    let den = cb * sc * prob.alpha2.sin() + sb * cc * prob.alpha1.sin();
    let z = num.atan2(den);
    Ok(z / scale)
}

/// Length of the planar secant `b c sin(a1 + a2) / (b sin a1 + c sin a2)`.
pub fn secant_euclid(prob: &SecantProblem) -> Result<f64> {
    prob.validate("secant_euclid")?;
    if let Some(z) = degenerate_secant(prob)? {
        return Ok(z);
    }
    let num = prob.b * prob.c * prob.alpha().sin();
    let den = prob.b * prob.alpha1.sin() + prob.c * prob.alpha2.sin();
    if den == 0.0 {
        if num == 0.0 {
            // b = c = 0: the triangle has collapsed onto x.
            return Ok(0.0);
        }
        return Err(Error::DegenerateSecant("zero denominator"));
    }
    Ok(num / den)
}
