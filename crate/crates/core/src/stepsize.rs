//! Constant step-size rules and the linear-rate predictor.
//!
//! Every resolver takes [`SpaceConstants`], so the rules can be evaluated for
//! an actual space (`space.constants()`) or for bare curvature bounds
//! (`SpaceConstants::from_bounds`).

use crate::error::{Error, Result};
use crate::frechet::{check_radius, hessian_bound_for_diameter, uniform_hessian_bound, PExponent};
use crate::kernels::{c_upper, sn, Curvature};
use crate::manifolds::SpaceConstants;
use serde::{Deserialize, Serialize};

/// Grid size of the initial scan in [`exit_time`].
pub const EXIT_GRID: usize = 4096;
/// Width at which the golden-section refinement stops.
pub const EXIT_REFINE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepPolicy {
    UserConstant { t: f64 },
    /// `t = 1/H` with `H = (2 rho)^(p-2) max(p-1, c_delta(2 rho))`. Not proven
    /// to keep the iterates in the ball in general; the solver monitors check it.
    ConjectureOptimal,
    /// `t = 1/((p-1)(2 rho)^(p-2))`, for constant curvature `k >= 0`.
    ConstantCurvatureOptimal,
    /// Spread compromise: data in `B(o, rho)` with `rho <= r_cx/3`
    /// (`r_cx/2` when starting at `o`), iterates stay in `B(o, 3 rho)` (`2 rho`).
    SpreadCompromise { start_at_o: bool },
    /// Exit-time compromise for `p = 2`, analysing the larger ball `B(o, rho')`.
    ExitTimeCompromise { rho_prime: f64 },
}

impl StepPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            StepPolicy::UserConstant { .. } => "constant",
            StepPolicy::ConjectureOptimal => "conjecture",
            StepPolicy::ConstantCurvatureOptimal => "constant-curvature",
            StepPolicy::SpreadCompromise { .. } => "spread",
            StepPolicy::ExitTimeCompromise { .. } => "exit-time",
        }
    }
}

/// A policy with its step-size worked out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedStep {
    pub policy: StepPolicy,
    pub t: f64,
    /// Upper end of the admissible constant steps and whether it is included.
    pub t_max: f64,
    pub t_max_inclusive: bool,
    /// Radius of the ball the iterates are guaranteed (or conjectured) to stay in.
    pub stay_ball_radius: f64,
    /// Hessian bound `H` on the stay ball, when the policy defines one.
    pub hessian_bound: Option<f64>,
    pub preconditions: String,
}

impl ResolvedStep {
    pub fn admits(&self, t: f64) -> bool {
        t > 0.0 && if self.t_max_inclusive { t <= self.t_max } else { t < self.t_max }
    }
}

/// `t = 1/H_{B(o,rho),p}`; exactly 1 for `p = 2` and `delta >= 0`.
pub fn resolve_conjecture(geom: &SpaceConstants, rho: f64, p: PExponent) -> Result<f64> {
    Ok(1.0 / uniform_hessian_bound(geom, rho, p)?)
}

fn resolve_constant_curvature(geom: &SpaceConstants, rho: f64, p: PExponent) -> Result<f64> {
    if geom.delta != geom.upper_delta || geom.delta < 0.0 {
        return Err(Error::Precondition(format!(
            "constant-curvature rule needs constant curvature >= 0, got [{}, {}]",
            geom.delta, geom.upper_delta
        )));
    }
    check_radius(geom, rho, geom.r_cx, "constant-curvature rule")?;
    Ok(1.0 / ((p.value() - 1.0) * p.radial_factor(2.0 * rho)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadCompromise {
    /// `1/H`, the step with the best guaranteed rate.
    pub t_delta_rho: f64,
    /// `2/H`; admissible steps are `(0, t_max_exclusive)`.
    pub t_max_exclusive: f64,
    pub stay_ball_radius: f64,
    pub hessian_bound: f64,
}

pub fn resolve_spread_compromise(geom: &SpaceConstants, rho: f64, p: PExponent, start_at_o: bool) -> Result<SpreadCompromise> {
    let (bound, diam, stay) = if start_at_o {
        (geom.r_cx / 2.0, 3.0 * rho, 2.0 * rho)
    } else {
        (geom.r_cx / 3.0, 4.0 * rho, 3.0 * rho)
    };
    check_radius(geom, rho, bound, "spread compromise")?;
    let h = hessian_bound_for_diameter(geom, diam, p)?;
    Ok(SpreadCompromise {
        t_delta_rho: 1.0 / h,
        t_max_exclusive: 2.0 / h,
        stay_ball_radius: stay,
        hessian_bound: h,
    })
}

/// Scalar exit-time bounds for a point at distance `r` from `o`.
#[derive(Debug, Clone, Copy)]
pub struct ExitBounds {
    geom: SpaceConstants,
    rho: f64,
    rho_prime: f64,
    c_prime: f64,
}

impl ExitBounds {
    pub fn new(geom: &SpaceConstants, rho: f64, rho_prime: f64) -> Result<Self> {
        check_radius(geom, rho_prime, geom.r_cx, "exit time (rho')")?;
        if !(rho > 0.0 && rho < rho_prime) {
            return Err(Error::Precondition(format!(
                "exit time needs 0 < rho < rho', got rho = {rho}, rho' = {rho_prime}"
            )));
        }
        Ok(ExitBounds {
            geom: *geom,
            rho,
            rho_prime,
            c_prime: c_upper(Curvature(geom.delta), rho_prime)?,
        })
    }

    /// `(rho' - rho) / (2 rho)`.
    pub fn t_in(&self) -> f64 {
        (self.rho_prime - self.rho) / (2.0 * self.rho)
    }

    /// `(2/c_delta(rho')) r (r - rho) sn_Delta(r - rho) / sn_Delta(r + rho)`.
    pub fn t_out1(&self, r: f64) -> f64 {
        let k = Curvature(self.geom.upper_delta);
        let (rho, c) = (self.rho, self.c_prime);
        let num = sn(k, r - rho).unwrap_or(0.0);
        let den = sn(k, r + rho).unwrap_or(f64::NAN);
        2.0 / c * r * (r - rho) * num / den
    }

    /// `(rho' - r) / (rho + r)`.
    pub fn t_out2(&self, r: f64) -> f64 {
        (self.rho_prime - r) / (self.rho + r)
    }

    fn envelope(&self, r: f64) -> f64 {
        self.t_out1(r).max(self.t_out2(r))
    }

    /// `inf_{r in [rho, rho')} max(t_out1(r), t_out2(r))` and its minimizer.
    /// `t_out1` increases from 0 and `t_out2` decreases to 0, so the envelope
    /// is unimodal: a grid scan brackets the minimum and golden-section
    /// search refines it.
    pub fn outer_infimum(&self) -> (f64, f64) {
        let (a, b) = (self.rho, self.rho_prime);
        let h = (b - a) / EXIT_GRID as f64;
        let mut best = (f64::INFINITY, a);
        for i in 0..EXIT_GRID {
            let r = a + i as f64 * h;
            let v = self.envelope(r);
            if v < best.0 {
                best = (v, r);
            }
        }
        let mut lo = (best.1 - h).max(a);
        let mut hi = (best.1 + h).min(b);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (self.envelope(x1), self.envelope(x2));
        while hi - lo > EXIT_REFINE_TOL {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = self.envelope(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = self.envelope(x2);
            }
        }
        let r = 0.5 * (lo + hi);
        let v = self.envelope(r);
        if v < best.0 {
            (v, r)
        } else {
            best
        }
    }

    pub fn t_exit(&self) -> f64 {
        self.t_in().min(self.outer_infimum().0)
    }
}

/// Largest step for which no iterate can leave `B(o, rho')` (for `p = 2`,
/// data in `B(o, rho)`, `rho < rho' <= r_cx`). Always positive.
pub fn exit_time(geom: &SpaceConstants, rho: f64, rho_prime: f64) -> Result<f64> {
    Ok(ExitBounds::new(geom, rho, rho_prime)?.t_exit())
}

/// `t* = min(t_exit, 1/c_delta(rho' + rho))`; admissible steps are
/// `(0, 2 t*) ∩ (0, t_exit]`.
pub fn resolve_exit_compromise(geom: &SpaceConstants, rho: f64, rho_prime: f64) -> Result<f64> {
    let t_exit = exit_time(geom, rho, rho_prime)?;
    let c = c_upper(Curvature(geom.delta), rho_prime + rho)?;
    Ok(t_exit.min(1.0 / c))
}

/// Largest `rho` in `(0, rho')` for which the exit time does not bind, i.e.
/// `t_exit >= 1/c_delta(rho + rho')`, found by bisection.
pub fn exit_nonbinding_radius(geom: &SpaceConstants, rho_prime: f64) -> Result<f64> {
    let binds = |rho: f64| -> Result<bool> {
        let t_exit = exit_time(geom, rho, rho_prime)?;
        Ok(t_exit < 1.0 / c_upper(Curvature(geom.delta), rho_prime + rho)?)
    };
    let (mut lo, mut hi) = (1e-9 * rho_prime, rho_prime * (1.0 - 1e-9));
    if binds(lo)? {
        return Err(Error::NoIntersection("exit time binds for every radius".into()));
    }
    if !binds(hi)? {
        return Ok(hi);
    }
    while hi - lo > 1e-12 * rho_prime {
        let mid = 0.5 * (lo + hi);
        if binds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Resolves a policy for data in `B(o, rho)`.
pub fn resolve(policy: StepPolicy, geom: &SpaceConstants, rho: f64, p: PExponent) -> Result<ResolvedStep> {
    let r = match policy {
        StepPolicy::UserConstant { t } => {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("step size {t} must be positive")));
            }
            ResolvedStep {
                policy,
                t,
                t_max: t,
                t_max_inclusive: true,
                stay_ball_radius: rho,
                hessian_bound: None,
                preconditions: "none".into(),
            }
        }
        StepPolicy::ConjectureOptimal => {
            let h = uniform_hessian_bound(geom, rho, p)?;
            ResolvedStep {
                policy,
                t: 1.0 / h,
                t_max: 1.0 / h,
                t_max_inclusive: true,
                stay_ball_radius: rho,
                hessian_bound: Some(h),
                preconditions: format!("rho <= r_cx = {}", geom.r_cx),
            }
        }
        StepPolicy::ConstantCurvatureOptimal => {
            let t = resolve_constant_curvature(geom, rho, p)?;
            ResolvedStep {
                policy,
                t,
                t_max: t,
                t_max_inclusive: true,
                stay_ball_radius: rho,
                hessian_bound: Some(1.0 / t),
                preconditions: format!("constant curvature >= 0, rho <= r_cx = {}", geom.r_cx),
            }
        }
        StepPolicy::SpreadCompromise { start_at_o } => {
            let s = resolve_spread_compromise(geom, rho, p, start_at_o)?;
            let frac = if start_at_o { "r_cx/2, x0 = o" } else { "r_cx/3" };
            ResolvedStep {
                policy,
                t: s.t_delta_rho,
                t_max: s.t_max_exclusive,
                t_max_inclusive: false,
                stay_ball_radius: s.stay_ball_radius,
                hessian_bound: Some(s.hessian_bound),
                preconditions: format!("rho <= {frac}"),
            }
        }
        StepPolicy::ExitTimeCompromise { rho_prime } => {
            if !p.is_two() {
                return Err(Error::Precondition("exit-time rule is for p = 2 only".into()));
            }
            let t_exit = exit_time(geom, rho, rho_prime)?;
            let t_star = resolve_exit_compromise(geom, rho, rho_prime)?;
            let (t_max, inclusive) = if 2.0 * t_star <= t_exit {
                (2.0 * t_star, false)
            } else {
                (t_exit, true)
            };
            ResolvedStep {
                policy,
                t: t_star,
                t_max,
                t_max_inclusive: inclusive,
                stay_ball_radius: rho_prime,
                hessian_bound: Some(c_upper(Curvature(geom.delta), rho_prime + rho)?),
                preconditions: format!("rho < rho' <= r_cx = {}, p = 2", geom.r_cx),
            }
        }
    };
    Ok(r)
}

/// Linear-rate data: `d(x^k, xbar) <= K q^((k - k')/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub h_s: f64,
    #[serde(rename = "H_s")]
    pub upper_h_s: f64,
    pub alpha: f64,
    pub q: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl RateEstimate {
    /// Predicted distance bound `k` steps after the reference iterate.
    pub fn bound(&self, k: usize) -> f64 {
        self.k * self.q.powf(k as f64 / 2.0)
    }
}

/// `alpha = t H`, `q = 1 - alpha (1 - alpha/2) (h/H) (1 + h/H)`,
/// `K = sqrt(2 f_gap / h)`.
pub fn rate_estimate(h: f64, upper_h: f64, t: f64, f_gap: f64) -> Result<RateEstimate> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!(
            "lower Hessian bound {h} must be positive; shrink the region"
        )));
    }
    if !(upper_h >= h && upper_h.is_finite()) {
        return Err(Error::Precondition(format!("need 0 < h <= H, got h = {h}, H = {upper_h}")));
    }
    let alpha = t * upper_h;
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Precondition(format!("need 0 < t < 2/H, got t H = {alpha}")));
    }
    if !(f_gap >= 0.0) {
        return Err(Error::Precondition(format!("cost gap {f_gap} is negative")));
    }
    let ratio = h / upper_h;
    let q = (1.0 - alpha * (1.0 - alpha / 2.0) * ratio * (1.0 + ratio)).max(0.0);
    Ok(RateEstimate {
        h_s: h,
        upper_h_s: upper_h,
        alpha,
        q,
        k: (2.0 * f_gap / h).sqrt(),
    })
}
