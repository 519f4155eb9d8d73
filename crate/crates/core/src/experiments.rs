//! Scripted experiments behind the CLI: the circle example, the two sphere
//! configurations, the step-size table, and `mean` on a dataset file.
//!
//! Everything written here is a pure function of the inputs and the seed, so
//! repeated runs produce identical files.

use crate::error::{Error, Result};
use crate::frechet::{cost, default_fd_step, Ball, DatasetFile, PExponent, WeightedDataset};
use crate::geocheck::trial_rng;
use crate::io::{write_json, write_plot_csv, write_svg, write_trace_csv, Plot, PlotSeries};
use crate::manifolds::{ManifoldSpace, Point, SpaceConstants, SpaceKind, TangentVector};
use crate::solver::{descend, enclosing_ball, one_step, rate_envelope_check, SolverConfig, Status, Trace};
use crate::stepsize::{exit_nonbinding_radius, resolve_conjecture, resolve_exit_compromise, resolve_spread_compromise, StepPolicy};
use nalgebra::DVector;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

// ---------------------------------------------------------------- circle

#[derive(Debug, Clone, Serialize)]
pub struct CircleScenario {
    pub name: String,
    pub weights: [f64; 2],
    pub t: f64,
    pub start_theta: f64,
    pub expected_theta: f64,
    /// Angle of the first iterate.
    pub first_theta: f64,
    /// Angle of the last iterate.
    pub final_theta: f64,
    pub abs_error: f64,
    pub status: Status,
    pub iterations: usize,
    pub stayed_in_ball: bool,
    pub trace_csv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleReport {
    pub theta_data: [f64; 2],
    pub scenarios: Vec<CircleScenario>,
    pub note: String,
}

/// Two points at `theta = +-2 pi/5` on the unit circle, ball centred at 0.
pub fn circle_dataset(w1: f64) -> Result<WeightedDataset> {
    let s = ManifoldSpace::circle(1.0)?;
    let th = 2.0 * PI / 5.0;
    let pts = vec![s.circle_point(th)?, s.circle_point(-th)?];
    let ball = Ball::new(s.circle_point(0.0)?, th * (1.0 + 1e-12));
    WeightedDataset::new(s, pts, vec![w1, 1.0 - w1], ball)
}

pub fn run_circle_example(out: &Path) -> Result<CircleReport> {
    std::fs::create_dir_all(out)?;
    let th = 2.0 * PI / 5.0;
    let scripted = [
        ("global_w01_t1", 0.1, 1.0, -8.0 * PI / 25.0),
        ("antipode_w01_t25_18", 0.1, 25.0 / 18.0, -3.0 * PI / 5.0),
        ("global_w025_t1", 0.25, 1.0, -PI / 5.0),
        ("local_w025_t11_6", 0.25, 11.0 / 6.0, -7.0 * PI / 10.0),
    ];
    let mut scenarios = Vec::new();
    for (name, w1, t, expected) in scripted {
        let ds = circle_dataset(w1)?;
        let s = *ds.space();
        let x0 = ds.points()[0].clone();
        let first = one_step(&ds, PExponent::TWO, &x0, t)?;
        let trace = descend(&ds, &SolverConfig::constant(t).with_start(x0).with_max_iters(1000))?;
        trace.check_invariants()?;
        let file = format!("circle_{name}.csv");
        write_trace_csv(&out.join(&file), &trace, &s)?;
        // On a cut-locus abort the antipode is the point reached, not a record.
        let final_theta = if matches!(trace.status, Status::CutLocus { .. }) && trace.iterations() == 0 {
            s.circle_angle(&first)?
        } else {
            s.circle_angle(trace.final_point())?
        };
        scenarios.push(CircleScenario {
            name: name.into(),
            weights: [w1, 1.0 - w1],
            t,
            start_theta: th,
            expected_theta: expected,
            first_theta: s.circle_angle(&first)?,
            final_theta,
            abs_error: angle_diff(final_theta, expected),
            status: trace.status,
            iterations: trace.iterations(),
            stayed_in_ball: trace.verdicts.stayed_in_ball,
            trace_csv: file,
        });
    }

    // f_2 over (-pi, pi] with the geodesic distance on the circle.
    let n = 720;
    let thetas: Vec<f64> = (1..=n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect();
    let mut series = Vec::new();
    for (label, w1) in [("w=(0.1,0.9)", 0.1), ("w=(1/4,3/4)", 0.25)] {
        let ds = circle_dataset(w1)?;
        let ys = thetas
            .iter()
            .map(|th| Ok(cost(&ds, PExponent::TWO, &ds.space().circle_point(*th)?)))
            .collect::<Result<Vec<_>>>()?;
        series.push(PlotSeries::new(label, thetas.clone(), ys)?);
    }
    let plot = Plot {
        title: "f_2 on the circle".into(),
        x_label: "theta".into(),
        y_label: "f_2(theta)".into(),
        y_log: false,
        series,
    };
    write_plot_csv(&out.join("circle_f2.csv"), &plot)?;
    write_svg(&out.join("circle_f2.svg"), &plot)?;

    let report = CircleReport {
        theta_data: [th, -th],
        scenarios,
        note: "f_2 is evaluated with the geodesic distance min(|theta - theta_i|, 2pi - |theta - theta_i|); \
               the branch for theta - theta_i < -pi therefore adds 2pi, which puts the local minimizer of the \
               w=(1/4,3/4) curve at -7pi/10"
            .into(),
    };
    write_json(&out.join("circle_report.json"), &report)?;
    Ok(report)
}

/// Distance between two angles modulo `2 pi`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

// ---------------------------------------------------------------- sphere configurations

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereConfig {
    /// `+-e1, +-e2` directions at distance `rho` from `o`.
    Cross,
    /// Two antipodal-about-`o` points, each counted twice.
    Pair,
}

impl SphereConfig {
    pub fn name(self) -> &'static str {
        match self {
            SphereConfig::Cross => "cross",
            SphereConfig::Pair => "pair",
        }
    }

    pub fn dataset(self, rho: f64) -> Result<WeightedDataset> {
        if !(rho > 0.0 && rho < FRAC_PI_2) {
            return Err(Error::Precondition(format!("configuration radius {rho} must lie in (0, pi/2)")));
        }
        let s = ManifoldSpace::sphere(2, 1.0)?;
        let o = s.origin();
        let dirs: &[(f64, f64)] = match self {
            SphereConfig::Cross => &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)],
            SphereConfig::Pair => &[(1.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (-1.0, 0.0)],
        };
        let pts = dirs
            .iter()
            .map(|&(a, b)| s.exp_map(&TangentVector::new(o.clone(), DVector::from_vec(vec![0.0, a * rho, b * rho]))))
            .collect();
        WeightedDataset::uniform(s, pts, Ball::new(o, rho * (1.0 + 1e-12)))
    }

    /// Hessian eigenvalues of `f_2` at `o` along `e1` and `e2`.
    pub fn predicted_eigenvalues(self, rho: f64) -> [f64; 2] {
        let rc = rho / rho.tan();
        match self {
            SphereConfig::Cross => [0.5 * (rc + 1.0); 2],
            SphereConfig::Pair => [1.0, rc],
        }
    }
}

/// Finite-difference Hessian quadratic forms of `f_2` at `o` along `e1`, `e2`.
pub fn fd_eigenvalues_at_o(ds: &WeightedDataset) -> Result<[f64; 2]> {
    let s = ds.space();
    let o = s.origin();
    let h = default_fd_step(s);
    let mut out = [0.0; 2];
    for (i, v) in out.iter_mut().enumerate() {
        let mut u = DVector::zeros(3);
        u[i + 1] = 1.0;
        *v = crate::frechet::fd_hessian_quadratic_form(ds, PExponent::TWO, &o, &TangentVector::new(o.clone(), u), h)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigRun {
    pub config: SphereConfig,
    pub rho: f64,
    pub rho_over_pi: f64,
    pub start: Point,
    pub status: Status,
    pub iterations: usize,
    /// First `k` with `d(x^k, o) < 1e-6`.
    pub iterations_to_1e6: Option<usize>,
    pub final_distance: f64,
    pub empirical_q: Option<f64>,
    pub predicted_eigenvalues: [f64; 2],
    pub fd_eigenvalues: [f64; 2],
    pub max_eigen_error: f64,
    pub trace_csv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SphereConfigsReport {
    pub t: f64,
    pub seed: u64,
    pub start_distribution: String,
    pub runs: Vec<ConfigRun>,
}

impl SphereConfigsReport {
    pub fn run(&self, config: SphereConfig, rho: f64) -> Option<&ConfigRun> {
        self.runs.iter().find(|r| r.config == config && r.rho == rho)
    }
}

/// The minimizer is `o` by symmetry, so `d(x^k, xbar)` is the recorded
/// distance to `o`. Both configurations at a given `rho` start from the same
/// seeded point, uniform in `B(o, rho)`.
pub fn run_sphere_configs(rho_list: &[f64], t: f64, seed: u64, out: &Path) -> Result<SphereConfigsReport> {
    std::fs::create_dir_all(out)?;
    let mut runs = Vec::new();
    let mut series = Vec::new();
    for (j, &rho) in rho_list.iter().enumerate() {
        let mut rng = trial_rng(seed, j as u64);
        let s = ManifoldSpace::sphere(2, 1.0)?;
        let start = s.random_in_ball(&s.origin(), rho, &mut rng);
        for config in [SphereConfig::Cross, SphereConfig::Pair] {
            let ds = config.dataset(rho)?;
            let cfg = SolverConfig::constant(t)
                .with_start(start.clone())
                .with_grad_tol(1e-13)
                .with_max_iters(20_000);
            let trace = descend(&ds, &cfg)?;
            trace.check_invariants()?;
            let file = format!("sphere_{}_rho{:.4}pi.csv", config.name(), rho / PI);
            write_trace_csv(&out.join(&file), &trace, &s)?;
            let d: Vec<f64> = trace.iterates.iter().map(|r| r.dist_to_o).collect();
            let predicted = config.predicted_eigenvalues(rho);
            let fd = fd_eigenvalues_at_o(&ds)?;
            series.push(PlotSeries::new(
                format!("{} rho={:.2}pi", config.name(), rho / PI),
                (0..d.len()).map(|k| k as f64).collect(),
                d.clone(),
            )?);
            runs.push(ConfigRun {
                config,
                rho,
                rho_over_pi: rho / PI,
                start: start.clone(),
                status: trace.status,
                iterations: trace.iterations(),
                iterations_to_1e6: d.iter().position(|v| *v < 1e-6),
                final_distance: *d.last().expect("non-empty trace"),
                empirical_q: trace.empirical_rate(&s),
                predicted_eigenvalues: predicted,
                fd_eigenvalues: fd,
                max_eigen_error: (predicted[0] - fd[0]).abs().max((predicted[1] - fd[1]).abs()),
                trace_csv: file,
            });
        }
    }
    let plot = Plot {
        title: format!("Distance to the center, t = {t}"),
        x_label: "iteration k".into(),
        y_label: "d(x^k, xbar)".into(),
        y_log: true,
        series,
    };
    write_plot_csv(&out.join("sphere_configs.csv"), &plot)?;
    write_svg(&out.join("sphere_configs.svg"), &plot)?;
    let report = SphereConfigsReport {
        t,
        seed,
        start_distribution: "uniform in B(o, rho) (Riemannian volume), one start per rho shared by both configurations".into(),
        runs,
    };
    write_json(&out.join("sphere_configs.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------- step-size table

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub quantity: String,
    pub inputs: String,
    pub value: f64,
    pub reference_value: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepsizeTable {
    pub rows: Vec<TableRow>,
}

impl StepsizeTable {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn row(quantity: &str, inputs: &str, value: f64, reference_value: f64, tolerance: f64) -> TableRow {
    let abs_error = (value - reference_value).abs();
    TableRow {
        quantity: quantity.into(),
        inputs: inputs.into(),
        value,
        reference_value,
        abs_error,
        tolerance,
        pass: abs_error <= tolerance,
    }
}

/// Computes the reference step-size examples. Rows that disagree with the
/// reference value are reported as failing, not adjusted.
pub fn stepsize_table() -> Result<StepsizeTable> {
    let rp = FRAC_PI_2;
    let sph = SpaceConstants::from_bounds(0.0, 1.0);
    let hyp = SpaceConstants::from_bounds(-1.0, 0.0);
    let hyp_space = ManifoldSpace::hyperbolic(2, -1.0)?.constants();
    let two = PExponent::TWO;
    let rows = vec![
        row("r1 / r_cx", "delta=0, Delta=1, rho'=pi/2", exit_nonbinding_radius(&sph, rp)? / rp, 0.0303, 1e-3),
        row("t*", "delta=0, Delta=1, rho'=pi/2, rho=rho'/3", resolve_exit_compromise(&sph, rp / 3.0, rp)?, 0.3965, 1e-3),
        row("t*", "delta=0, Delta=1, rho'=pi/2, rho=0.9 rho'", resolve_exit_compromise(&sph, 0.9 * rp, rp)?, 0.0353, 1e-3),
        row("t*", "delta=0, Delta=1, rho'=pi/2, rho=0.99 rho'", resolve_exit_compromise(&sph, 0.99 * rp, rp)?, 0.0033, 5e-4),
        row("r2 / rho'", "delta=-1, Delta=0, rho'=pi/2", exit_nonbinding_radius(&hyp, rp)? / rp, 0.1950, 1e-3),
        row("t*", "delta=-1, Delta=0, rho'=pi/2, rho=rho'/3", resolve_exit_compromise(&hyp, rp / 3.0, rp)?, 0.3022, 1e-3),
        row(
            "t_delta,rho",
            "delta=-1, rho=pi/6 (spread compromise)",
            resolve_spread_compromise(&hyp_space, PI / 6.0, two, false)?.t_delta_rho,
            0.4632,
            1e-3,
        ),
    ];
    Ok(StepsizeTable { rows })
}

pub fn run_stepsize_table(out: &Path) -> Result<StepsizeTable> {
    let table = stepsize_table()?;
    write_json(&out.join("stepsize_table.json"), &table)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(out.join("stepsize_table.csv"))?;
    w.write_record(["quantity", "inputs", "value", "reference_value", "abs_error", "tolerance", "pass"])?;
    for r in &table.rows {
        w.write_record([
            r.quantity.clone(),
            r.inputs.clone(),
            crate::io::fmt_num(r.value),
            crate::io::fmt_num(r.reference_value),
            crate::io::fmt_num(r.abs_error),
            crate::io::fmt_num(r.tolerance),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(table)
}

// ---------------------------------------------------------------- mean

/// Parses a policy name as used on the command line.
pub fn parse_policy(name: &str, t: Option<f64>, rho_prime: Option<f64>) -> Result<StepPolicy> {
    Ok(match name {
        "constant" => StepPolicy::UserConstant {
            t: t.ok_or_else(|| Error::Config("policy constant needs --t".into()))?,
        },
        "conjecture" => StepPolicy::ConjectureOptimal,
        "constant-curvature" => StepPolicy::ConstantCurvatureOptimal,
        "spread" => StepPolicy::SpreadCompromise { start_at_o: false },
        "spread-at-o" => StepPolicy::SpreadCompromise { start_at_o: true },
        "exit-time" => StepPolicy::ExitTimeCompromise {
            rho_prime: rho_prime.ok_or_else(|| Error::Config("policy exit-time needs --rho-prime".into()))?,
        },
        other => return Err(Error::Config(format!("unknown policy {other:?}"))),
    })
}

#[derive(Debug, Clone)]
pub struct MeanOptions {
    pub p: PExponent,
    pub policy: StepPolicy,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub out: PathBuf,
}

impl MeanOptions {
    pub fn new(p: PExponent, policy: StepPolicy, out: impl Into<PathBuf>) -> Self {
        MeanOptions {
            p,
            policy,
            max_iters: 10_000,
            grad_tol: 1e-10,
            out: out.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanSummary {
    pub space: SpaceKind,
    pub policy: String,
    pub p: f64,
    pub t: f64,
    pub ball: Ball,
    pub uniqueness_certified: bool,
    pub status: Status,
    pub iterations: usize,
    pub final_point: Point,
    pub final_cost: f64,
    pub verdicts: crate::solver::Verdicts,
    pub descent_violations: usize,
    pub predicted_q: Option<f64>,
    pub empirical_q: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Debug)]
pub struct MeanOutcome {
    pub exit_code: i32,
    pub summary: Option<MeanSummary>,
    pub message: String,
}

/// Exit code for an error raised while loading or checking inputs.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) | Error::Domain { .. } | Error::NoIntersection(_) => 4,
        Error::CutLocus { .. } | Error::DataCutLocus { .. } => 2,
        _ => 1,
    }
}

fn load_dataset(path: &Path) -> Result<WeightedDataset> {
    let file = DatasetFile::load(path)?;
    file.into_dataset(enclosing_ball)
}

fn run_mean(ds: &WeightedDataset, opts: &MeanOptions) -> Result<(Trace, MeanSummary)> {
    let space = *ds.space();
    let rho = ds.ball().radius;
    if rho > space.r_cx() {
        return Err(Error::Precondition(format!(
            "ball radius rho = {rho} exceeds the convexity radius r_cx = {}",
            space.r_cx()
        )));
    }
    if opts.policy == StepPolicy::ConjectureOptimal {
        // Surfaces the conjecture's own bound in the error message.
        resolve_conjecture(&space.constants(), rho, opts.p)?;
    }
    let cfg = SolverConfig::new(opts.p, opts.policy)
        .with_max_iters(opts.max_iters)
        .with_grad_tol(opts.grad_tol);
    let trace = descend(ds, &cfg)?;
    trace.check_invariants()?;

    let mut notes = Vec::new();
    let predicted_q = if trace.status == Status::Converged {
        rate_envelope_check(ds, &trace, opts.p, 1e-7)?.estimate.map(|e| e.q)
    } else {
        None
    };
    if trace.status == Status::Converged && trace.iterations() <= 1 {
        notes.push(format!("converged in {} iteration(s)", trace.iterations()));
    }
    if !trace.verdicts.stayed_in_ball {
        notes.push("an iterate left the monitor ball".into());
    }
    if trace.descent.violations > 0 {
        notes.push(format!("{} descent-inequality violations", trace.descent.violations));
    }
    let summary = MeanSummary {
        space: space.kind(),
        policy: opts.policy.name().into(),
        p: opts.p.value(),
        t: trace.step.t,
        ball: ds.ball().clone(),
        uniqueness_certified: trace.uniqueness_certified,
        status: trace.status,
        iterations: trace.iterations(),
        final_point: trace.final_point().clone(),
        final_cost: trace.final_cost(),
        verdicts: trace.verdicts,
        descent_violations: trace.descent.violations,
        predicted_q,
        empirical_q: trace.empirical_rate(&space),
        notes,
    };
    Ok((trace, summary))
}

/// Loads a dataset, runs the solver, and writes `trace.csv` and
/// `summary.json` into `opts.out`. Exit codes: 0 converged, 1 unreadable
/// input, 2 cut-locus abort, 3 iteration limit, 4 unmet precondition.
pub fn mean_command(path: &Path, opts: &MeanOptions) -> MeanOutcome {
    let fail = |e: Error| MeanOutcome {
        exit_code: error_exit_code(&e),
        summary: None,
        message: e.to_string(),
    };
    let ds = match load_dataset(path) {
        Ok(ds) => ds,
        Err(e) => return MeanOutcome { exit_code: 1, summary: None, message: e.to_string() },
    };
    let (trace, summary) = match run_mean(&ds, opts) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let written = write_trace_csv(&opts.out.join("trace.csv"), &trace, ds.space())
        .and_then(|_| write_json(&opts.out.join("summary.json"), &summary));
    if let Err(e) = written {
        return MeanOutcome { exit_code: 1, summary: Some(summary), message: e.to_string() };
    }
    let message = match trace.status {
        Status::Converged => format!("converged after {} iterations, t = {}", summary.iterations, summary.t),
        Status::CutLocus { k, index } => format!("aborted at iteration {k}: data point {index} is in the cut locus"),
        Status::MaxIterations => format!("no convergence within {} iterations", opts.max_iters),
    };
    MeanOutcome {
        exit_code: trace.status.exit_code(),
        summary: Some(summary),
        message,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_scenarios() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_circle_example(dir.path()).unwrap();
        let by = |n: &str| r.scenarios.iter().find(|s| s.name == n).unwrap();
        assert!(by("global_w01_t1").abs_error < 1e-10);
        assert!(by("global_w025_t1").abs_error < 1e-10);
        let local = by("local_w025_t11_6");
        assert!(local.abs_error < 1e-10);
        assert!(!local.stayed_in_ball);
        let anti = by("antipode_w01_t25_18");
        assert!(matches!(anti.status, Status::CutLocus { .. }));
        assert!(angle_diff(anti.first_theta, -3.0 * PI / 5.0) < 1e-12);
        assert!(dir.path().join("circle_f2.svg").exists());
    }

    #[test]
    fn angle_diff_wraps() {
        assert_abs_diff_eq!(angle_diff(PI - 0.1, -PI + 0.1), 0.2, epsilon = 1e-14);
        assert_eq!(angle_diff(1.0, 1.0), 0.0);
    }

    #[test]
    fn config_eigenvalues() {
        for rho in [PI / 4.0, 0.35 * PI, 0.47 * PI] {
            for c in [SphereConfig::Cross, SphereConfig::Pair] {
                let fd = fd_eigenvalues_at_o(&c.dataset(rho).unwrap()).unwrap();
                let pr = c.predicted_eigenvalues(rho);
                assert_abs_diff_eq!(fd[0], pr[0], epsilon = 1e-5);
                assert_abs_diff_eq!(fd[1], pr[1], epsilon = 1e-5);
            }
        }
        // rho cot rho at 0.47 pi; oracle: python math.
        assert_abs_diff_eq!(SphereConfig::Pair.predicted_eigenvalues(0.47 * PI)[1], 0.13957493179652636, epsilon = 1e-15);
    }

    #[test]
    fn policy_names_round_trip() {
        for n in ["conjecture", "constant-curvature", "spread", "exit-time"] {
            let p = parse_policy(n, None, Some(1.0)).unwrap();
            assert_eq!(p.name(), n);
        }
        assert!(parse_policy("constant", None, None).is_err());
        assert!(parse_policy("newton", None, None).is_err());
    }

    #[test]
    fn euclidean_mean_one_step() {
        let dir = tempfile::tempdir().unwrap();
        let s = ManifoldSpace::euclidean(2).unwrap();
        let pts = vec![s.point(&[0.0, 0.0]).unwrap(), s.point(&[2.0, 1.0]).unwrap(), s.point(&[1.0, -3.0]).unwrap()];
        let file = DatasetFile { space: s, points: pts, weights: None, ball: None };
        let path = dir.path().join("data.json");
        file.save(&path).unwrap();
        let out = mean_command(&path, &MeanOptions::new(PExponent::TWO, StepPolicy::UserConstant { t: 1.0 }, dir.path()));
        assert_eq!(out.exit_code, 0, "{}", out.message);
        let s = out.summary.unwrap();
        assert_eq!(s.iterations, 1);
        assert!(s.notes.iter().any(|n| n.contains("1 iteration")));
        assert_abs_diff_eq!(s.final_point.as_slice()[0], 1.0, epsilon = 1e-14);
    }
}
