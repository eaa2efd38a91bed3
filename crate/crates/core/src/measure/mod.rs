//! Exact set algebra and integration over dyadic subsets of the unit fiber.
//!
//! Fibers are modelled as `[0, 1)`; every set is a finite union of half-open
//! intervals with power-of-two denominators, and every density is a
//! [`StepFunction`] with dyadic breakpoints, so all measures are exact rationals.

mod dyadic;
mod step;

pub use dyadic::{DyadicInterval, DyadicSet, SetOp};
pub use step::{merged_breakpoints, StepFunction};

use crate::rational::Rational;

pub fn combine(a: &DyadicSet, b: &DyadicSet, op: SetOp) -> DyadicSet {
    a.combine(b, op)
}

pub fn lebesgue(s: &DyadicSet) -> Rational {
    s.lebesgue()
}

pub fn integrate(d: &StepFunction, s: &DyadicSet) -> Rational {
    d.integrate(s)
}
