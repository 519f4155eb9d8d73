//! Weighted L^p centers of mass on constant-curvature spaces by constant
//! step-size Riemannian gradient descent, with step-size rules that keep the
//! iterates inside a ball around the data and monitors that check it.
//!
//! ```
//! use geomean::frechet::{Ball, WeightedDataset};
//! use geomean::manifolds::ManifoldSpace;
//! use geomean::solver::{descend, SolverConfig};
//!
//! let s2 = ManifoldSpace::sphere(2, 1.0)?;
//! let pts = vec![s2.point(&[1.0, 0.0, 0.0])?, s2.point(&[0.0, 1.0, 0.0])?];
//! let ds = WeightedDataset::uniform(s2, pts, Ball::new(s2.point(&[1.0, 1.0, 0.0].map(|v: f64| v / 2f64.sqrt()))?, 0.8))?;
//! let trace = descend(&ds, &SolverConfig::constant(1.0))?;
//! assert!(trace.verdicts.converged && trace.verdicts.stayed_in_ball);
//! # Ok::<(), geomean::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kernels;
pub mod manifolds;
pub mod frechet;
pub mod stepsize;
pub mod solver;
pub mod geocheck;
pub mod io;
pub mod experiments;

pub use error::{Error, Result};
pub use frechet::{Ball, PExponent, WeightedDataset};
pub use manifolds::{ManifoldSpace, Point, TangentVector};
pub use solver::{descend, SolverConfig, Trace};
pub use stepsize::StepPolicy;
