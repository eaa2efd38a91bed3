//! Seeded random generators for property suites and the CLI's randomized runs.

use std::ops::RangeInclusive;

use rand::Rng;

use crate::measure::{DyadicInterval, DyadicSet, StepFunction};
use crate::rational::{self, Rational};
use crate::tower::LeveledSet;

pub fn below<R: Rng>(rng: &mut R, n: u64) -> u64 {
    rng.gen_range(0..n)
}

/// Random union of cells of the `2^-r` grid, each kept with probability 1/2.
pub fn dyadic_set<R: Rng>(rng: &mut R, r: u32) -> DyadicSet {
    let cells = 1u64 << r;
    DyadicSet::from_intervals((1..=cells).filter(|_| rng.gen_bool(0.5)).map(|j| cell(r, j)))
}

/// Random subset of `[0,1)` at resolution `2^-r` whose complement has measure `< 2^-r·max_holes`,
/// built by removing at most `max_holes` cells.
pub fn dyadic_set_with_holes<R: Rng>(rng: &mut R, r: u32, max_holes: u64) -> DyadicSet {
    let cells = 1u64 << r;
    let holes = rng.gen_range(0..=max_holes.min(cells));
    let mut s = DyadicSet::unit();
    for _ in 0..holes {
        let j = rng.gen_range(1..=cells);
        s = s.difference(&DyadicSet::grid_cell(r, j));
    }
    s
}

fn cell(r: u32, j: u64) -> DyadicInterval {
    DyadicSet::grid_cell(r, j).intervals()[0].clone()
}

/// Random positive step function with breakpoints on the `2^-r` grid and
/// values in `{1/8, …, 4}`.
pub fn step_function<R: Rng>(rng: &mut R, r: u32) -> StepFunction {
    let cells = 1u64 << r;
    let mut bps = vec![Rational::from_integer(0.into())];
    for j in 1..cells {
        if rng.gen_bool(0.3) {
            bps.push(rational::ratio(j as i64, cells as i64));
        }
    }
    let vals = bps.iter().map(|_| rational::ratio(rng.gen_range(1..=32), 8)).collect();
    StepFunction::new(bps, vals).expect("valid by construction")
}

/// Random leveled set with up to `max_levels` parts on positions in `range`.
pub fn leveled_set<R: Rng>(rng: &mut R, range: RangeInclusive<i64>, max_levels: usize, r: u32) -> LeveledSet {
    let mut s = LeveledSet::empty();
    let k = rng.gen_range(1..=max_levels);
    for _ in 0..k {
        let p = rng.gen_range(range.clone());
        s.insert(p, dyadic_set(rng, r));
    }
    s
}

/// Random small rational in `[-max, max]` with denominator dividing `den`.
pub fn coefficient<R: Rng>(rng: &mut R, max: i64, den: i64) -> Rational {
    rational::ratio(rng.gen_range(-max * den..=max * den), den)
}
