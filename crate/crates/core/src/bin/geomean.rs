//! Command-line front end.

use clap::{Args, Parser, Subcommand, ValueEnum};
use geomean::experiments::{self, MeanOptions, DEFAULT_SEED};
use geomean::frechet::PExponent;
use geomean::geocheck::{comparison_check, hull_trap_check, oracle_agreement, tethering_check, CheckReport};
use geomean::manifolds::ManifoldSpace;
use geomean::stepsize::resolve;
use geomean::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "geomean", version, about = "Riemannian L^p centers of mass by constant step-size gradient descent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the center of mass of a dataset file.
    Mean {
        dataset: PathBuf,
        #[command(flatten)]
        step: StepArgs,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        grad_tol: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Resolve a step-size policy, or print the reference examples when no --rho is given.
    Stepsize {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        step: StepArgs,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The scripted two-point example on the circle.
    CircleExample {
        #[arg(long, default_value = "out/circle")]
        out: PathBuf,
    },
    /// Cross and pair configurations on the 2-sphere.
    SphereConfigs {
        /// Radii as multiples of pi.
        #[arg(long, value_delimiter = ',', default_values_t = [0.35, 0.41, 0.47])]
        rho: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out/sphere")]
        out: PathBuf,
    },
    /// Monte Carlo checks of the geometric inequalities.
    Check {
        suite: Suite,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Comparison,
    Tethering,
    Hull,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceName {
    Euclidean,
    Sphere,
    Hyperbolic,
    Circle,
    So3,
    Rp,
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long, value_enum, default_value = "sphere")]
    space: SpaceName,
    /// Curvature; defaults to 1 (or -1 for hyperbolic space).
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

impl SpaceArgs {
    fn build(&self) -> Result<ManifoldSpace> {
        let k = self.kappa;
        match self.space {
            SpaceName::Euclidean => ManifoldSpace::euclidean(self.dim),
            SpaceName::Sphere => ManifoldSpace::sphere(self.dim, k.unwrap_or(1.0)),
            SpaceName::Hyperbolic => ManifoldSpace::hyperbolic(self.dim, k.unwrap_or(-1.0)),
            SpaceName::Circle => ManifoldSpace::circle(k.unwrap_or(1.0)),
            SpaceName::So3 => Ok(ManifoldSpace::so3()),
            SpaceName::Rp => ManifoldSpace::real_projective(self.dim, k.unwrap_or(1.0)),
        }
    }
}

#[derive(Args)]
struct StepArgs {
    /// constant, conjecture, constant-curvature, spread, spread-at-o or exit-time.
    #[arg(long, default_value = "conjecture")]
    policy: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Step for the constant policy.
    #[arg(long)]
    t: Option<f64>,
    /// Outer radius for the exit-time policy.
    #[arg(long)]
    rho_prime: Option<f64>,
}

/// `GEOMEAN_SEED` takes precedence over `--seed`.
fn seed(flag: Option<u64>) -> Result<u64> {
    match std::env::var("GEOMEAN_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("GEOMEAN_SEED={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag.unwrap_or(DEFAULT_SEED)),
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Mean { dataset, step, max_iters, grad_tol, out } => {
            let p = PExponent::new(step.p)?;
            let policy = experiments::parse_policy(&step.policy, step.t, step.rho_prime)?;
            let mut opts = MeanOptions::new(p, policy, out);
            opts.max_iters = max_iters;
            opts.grad_tol = grad_tol;
            let outcome = experiments::mean_command(&dataset, &opts);
            if let Some(s) = &outcome.summary {
                print_json(s)?;
            }
            eprintln!("{}", outcome.message);
            Ok(outcome.exit_code)
        }
        Command::Stepsize { space, step, rho, out } => match rho {
            None => {
                let table = match &out {
                    Some(dir) => {
                        std::fs::create_dir_all(dir)?;
                        experiments::run_stepsize_table(dir)?
                    }
                    None => experiments::stepsize_table()?,
                };
                for r in &table.rows {
                    println!(
                        "{:<12} {:<44} {:>10.6} reference {:>7.4} err {:.2e} {}",
                        r.quantity,
                        r.inputs,
                        r.value,
                        r.reference_value,
                        r.abs_error,
                        if r.pass { "ok" } else { "MISMATCH" }
                    );
                }
                Ok(0)
            }
            Some(rho) => {
                let space = space.build()?;
                let policy = experiments::parse_policy(&step.policy, step.t, step.rho_prime)?;
                let r = resolve(policy, &space.constants(), rho, PExponent::new(step.p)?)?;
                print_json(&r)?;
                Ok(0)
            }
        },
        Command::CircleExample { out } => {
            print_json(&experiments::run_circle_example(&out)?)?;
            Ok(0)
        }
        Command::SphereConfigs { rho, t, seed: s, out } => {
            let rhos: Vec<f64> = rho.iter().map(|r| r * PI).collect();
            let report = experiments::run_sphere_configs(&rhos, t, seed(s)?, &out)?;
            for r in &report.runs {
                println!(
                    "{:<5} rho={:.2}pi  iterations to 1e-6: {:>5}  eigenvalues fd {:.6} {:.6} predicted {:.6} {:.6}",
                    r.config.name(),
                    r.rho_over_pi,
                    r.iterations_to_1e6.map_or("-".into(), |k| k.to_string()),
                    r.fd_eigenvalues[0],
                    r.fd_eigenvalues[1],
                    r.predicted_eigenvalues[0],
                    r.predicted_eigenvalues[1],
                );
            }
            Ok(0)
        }
        Command::Check { suite, space, trials, seed: s, out } => {
            let space = space.build()?;
            let seed = seed(s)?;
            let report: CheckReport = match suite {
                Suite::Comparison => {
                    let agree = oracle_agreement(&space, trials.min(1000), seed);
                    eprintln!(
                        "oracle agreement: {} of {} compared, max |diff| = {:.3e}",
                        agree.compared, agree.trials, agree.max_abs_diff
                    );
                    comparison_check(&space, trials, seed)
                }
                Suite::Tethering => tethering_check(&space, trials, &[0.25, 0.5, 0.75, 1.0], seed),
                Suite::Hull => hull_trap_check(&space, trials, seed),
            };
            if let Some(dir) = out {
                geomean::io::write_json(&dir.join(format!("check_{}.json", report.suite)), &report)?;
            }
            print_json(&report)?;
            Ok(if report.passed() { 0 } else { 5 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(experiments::error_exit_code(&e) as u8)
        }
    }
}
