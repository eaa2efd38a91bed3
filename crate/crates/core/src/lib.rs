//! Exact-arithmetic toolkit for dissipative measurable systems presented as
//! integer-indexed towers over a wandering set.
//!
//! The crate is organised bottom-up:
//!
//! - [`measure`]: dyadic subsets of the unit fiber, step-function densities and
//!   exact integration.
//! - [`tower`]: tower systems (level densities plus the unit level shift), the
//!   level address codec of the mixing/non-Kitai construction, leveled sets.
//! - [`conditions`]: witness search and horizon-bounded verdicts for the
//!   mixing, hypercyclic, Kitai and Gethner–Shapiro shift-like conditions.
//! - [`shift`]: weighted backward shifts induced by tower systems and the
//!   coordinate-norm criteria for backward shifts on sequence spaces.
//! - [`lp`]: composition-operator orbits of simple functions, L^p norms and the
//!   Fréchet metric of convergence in measure.
//!
//! Every quantity is an exact [`Rational`]; floating point only appears in
//! display helpers.

pub mod conditions;
pub mod error;
pub mod lp;
pub mod measure;
pub mod rational;
pub mod sample;
pub mod shift;
pub mod tower;

pub use error::{Error, Result};
pub use measure::{DyadicInterval, DyadicSet, SetOp, StepFunction};
pub use rational::Rational;
pub use tower::{LevelAddress, LeveledSet, TowerSystem};

/// Version tag written into every JSON report.
pub const REPORT_SCHEMA: &str = "towerdyn.report/v1";
