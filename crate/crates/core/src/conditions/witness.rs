//! Exact witness search by fractional piece discarding.
//!
//! On the common refinement of the relevant densities every piece has constant
//! densities, so both the budget `μ(A∖B)` and the objective are linear in the
//! measure kept from each piece. Discarding pieces in decreasing order of
//! objective-per-budget (a fractional knapsack) is then optimal, with at most
//! one piece split.

use std::cmp::Ordering;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{merged_breakpoints, DyadicInterval, DyadicSet, StepFunction};
use crate::rational::{self, Rational};
use crate::tower::{LeveledSet, TowerSystem};

/// Bits used when a split point must be rounded down to a dyadic rational.
pub const SPLIT_BITS: u32 = 48;

/// A witness set `B ⊆ A` for one step `n`, with its exact defects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessTriple {
    pub n: i64,
    #[serde(rename = "B")]
    pub b: LeveledSet,
    /// `μ(A∖B)`
    #[serde(with = "rational::as_num_den")]
    pub defect_a: Rational,
    /// `μ(f^{-n}(B))`
    #[serde(with = "rational::as_num_den")]
    pub defect_back: Rational,
    /// `μ(f^{n}(B))`
    #[serde(with = "rational::as_num_den")]
    pub defect_fwd: Rational,
}

impl WitnessTriple {
    pub fn max_defect(&self) -> Rational {
        self.defect_a.clone().max(self.defect_back.clone()).max(self.defect_fwd.clone())
    }

    /// The minimized quantity `μ(f^{-n}B) + μ(f^{n}B)`.
    pub fn objective(&self) -> Rational {
        &self.defect_back + &self.defect_fwd
    }
}

/// A refinement piece of `A` with its budget density and objective density.
#[derive(Clone, Debug)]
pub(crate) struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    pub budget: Rational,
    pub score: Rational,
}

/// Pieces of `a` on the refinement of `base` and `scores`; `score_at` maps a point
/// to the objective density there.
pub(crate) fn refine_pieces<F>(a: &DyadicSet, base: &StepFunction, extra: &[&StepFunction], score_at: F) -> Vec<Piece>
where
    F: Fn(&Rational) -> Rational,
{
    let mut fns: Vec<&StepFunction> = vec![base];
    fns.extend_from_slice(extra);
    let cuts = merged_breakpoints(&fns, &[a]);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (x, y) = (&w[0], &w[1]);
        let inside = a.intervals().iter().any(|iv| iv.lo() <= x && y <= iv.hi());
        if inside {
            out.push(Piece { lo: x.clone(), hi: y.clone(), budget: base.value_at(x).clone(), score: score_at(x) });
        }
    }
    out
}

/// Removes pieces in decreasing `score/budget` order (ties: lower fiber first)
/// until the budget `eps` is spent; returns the removed set.
pub(crate) fn greedy_discard(mut pieces: Vec<Piece>, eps: &Rational) -> DyadicSet {
    pieces.sort_by(|p, q| {
        let lhs = &p.score * &q.budget;
        let rhs = &q.score * &p.budget;
        match rhs.cmp(&lhs) {
            Ordering::Equal => p.lo.cmp(&q.lo),
            o => o,
        }
    });
    let mut left = eps.clone();
    let mut removed = Vec::new();
    for p in pieces {
        if !left.is_positive() {
            break;
        }
        let cost = &p.budget * (&p.hi - &p.lo);
        if cost <= left {
            left -= cost;
            removed.push(DyadicInterval::new(p.lo, p.hi).expect("refinement piece"));
        } else {
            let exact = &left / &p.budget;
            let len = if rational::is_dyadic(&exact) { exact } else { rational::dyadic_floor(&exact, SPLIT_BITS) };
            if len.is_positive() {
                let hi = &p.lo + len;
                removed.push(DyadicInterval::new(p.lo, hi).expect("split inside piece"));
            }
            break;
        }
    }
    DyadicSet::from_intervals(removed)
}

/// Fiber of `a` at level `m`; errors if `a` has parts on other levels.
pub(crate) fn fiber_at(a: &LeveledSet, m: i64) -> Result<DyadicSet> {
    if a.iter().any(|(p, _)| p != m) {
        return Err(Error::NotInLevel(m));
    }
    Ok(a.get(m).cloned().unwrap_or_default())
}

pub(crate) fn check_eps(eps: &Rational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange { name: "epsilon", reason: format!("{eps} must be > 0") });
    }
    Ok(())
}

/// Exact defects of a chosen `B` (fiber at level `m`) for step `n`.
pub fn evaluate_triple(sys: &TowerSystem, m: i64, a: &DyadicSet, b: &DyadicSet, n: i64) -> WitnessTriple {
    WitnessTriple {
        n,
        b: LeveledSet::single(m, b.clone()),
        defect_a: sys.density(m).integrate(&a.difference(b)),
        defect_back: sys.density(m - n).integrate(b),
        defect_fwd: sys.density(m + n).integrate(b),
    }
}

/// `B ⊆ A` minimizing `μ(f^{-n}B) + μ(f^{n}B)` subject to `μ(A∖B) ≤ ε`.
///
/// Exact whenever the split length `budget/d_m` is dyadic, which holds for every
/// system whose level-`m` density takes power-of-two values; otherwise the
/// split point is rounded down to a multiple of `2^-SPLIT_BITS`.
pub fn optimal_witness(sys: &TowerSystem, m: i64, a: &LeveledSet, n: i64, eps: &Rational) -> Result<WitnessTriple> {
    check_eps(eps)?;
    let fiber = fiber_at(a, m)?;
    let (dm, db, df) = (sys.density(m), sys.density(m - n), sys.density(m + n));
    let pieces = refine_pieces(&fiber, &dm, &[&db, &df], |x| db.value_at(x) + df.value_at(x));
    let removed = greedy_discard(pieces, eps);
    let b = fiber.difference(&removed);
    Ok(evaluate_triple(sys, m, &fiber, &b, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, pow2, ratio};
    use crate::sample;
    use crate::tower::LevelAddress;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive search over every union of `2^-r` cells inside `A`, grouped by
    /// density triple (cells with equal triples are interchangeable).
    fn brute_force(sys: &TowerSystem, m: i64, a: &DyadicSet, n: i64, eps: &Rational, r: u32) -> Rational {
        let (dm, db, df) = (sys.density(m), sys.density(m - n), sys.density(m + n));
        let mut groups: Vec<(Rational, Rational, u64)> = Vec::new(); // (budget, objective, count) per cell
        let w = pow2(-(r as i64));
        for j in 1..=(1u64 << r) {
            let c = DyadicSet::grid_cell(r, j);
            if !c.is_subset(a) {
                continue;
            }
            let x = c.intervals()[0].lo().clone();
            let key = (dm.value_at(&x) * &w, (db.value_at(&x) + df.value_at(&x)) * &w);
            match groups.iter_mut().find(|g| g.0 == key.0 && g.1 == key.1) {
                Some(g) => g.2 += 1,
                None => groups.push((key.0, key.1, 1)),
            }
        }
        let total_obj: Rational = groups.iter().map(|g| &g.1 * int(g.2 as i64)).sum();
        let mut best: Option<Rational> = None;
        let mut counts = vec![0u64; groups.len()];
        loop {
            let spent: Rational = groups.iter().zip(&counts).map(|(g, k)| &g.0 * int(*k as i64)).sum();
            if &spent <= eps {
                let saved: Rational = groups.iter().zip(&counts).map(|(g, k)| &g.1 * int(*k as i64)).sum();
                let obj = &total_obj - saved;
                if best.as_ref().is_none_or(|b| &obj < b) {
                    best = Some(obj);
                }
            }
            let mut i = 0;
            loop {
                if i == counts.len() {
                    return best.expect("B = A is always feasible");
                }
                if counts[i] < groups[i].2 {
                    counts[i] += 1;
                    break;
                }
                counts[i] = 0;
                i += 1;
            }
        }
    }

    fn w() -> LeveledSet {
        LeveledSet::wandering()
    }

    #[test]
    fn bdp_special_level_example() {
        let sys = TowerSystem::bdp();
        let t = optimal_witness(&sys, 0, &w(), 3, &ratio(1, 2)).unwrap();
        assert_eq!(t.b, LeveledSet::single(0, "1/2:1".parse().unwrap()));
        assert_eq!(t.defect_fwd, ratio(1, 4));
        assert_eq!(t.defect_a, ratio(1, 2));
        assert_eq!(t.objective(), brute_force(&sys, 0, &DyadicSet::unit(), 3, &ratio(1, 2), 4));
    }

    #[test]
    fn bdp_block_rates() {
        let sys = TowerSystem::bdp();
        for big_n in 1..=3u32 {
            let start = LevelAddress::Base(big_n as i64).position().unwrap();
            let end = LevelAddress::Base(big_n as i64 + 1).position().unwrap() - 1;
            let eps = pow2(-(big_n as i64));
            for n in start..=end {
                let t = optimal_witness(&sys, 0, &w(), n, &eps).unwrap();
                assert_eq!(t.defect_a, eps);
                assert!(t.defect_fwd <= &eps * (int(1) - &eps), "n={n}");
            }
        }
    }

    #[test]
    fn geometric_discards_uniformly() {
        let sys = TowerSystem::geometric(ratio(1, 2)).unwrap();
        for n in 1..6 {
            let t = optimal_witness(&sys, 0, &w(), n, &ratio(1, 4)).unwrap();
            // all pieces equal: the budget is spent but the ratio is unchanged
            assert_eq!(t.defect_fwd, pow2(-n) * ratio(3, 4));
            assert_eq!(t.defect_back, t.defect_fwd);
        }
    }

    #[test]
    fn identity_like_keeps_full_measure() {
        let sys = TowerSystem::identity_like();
        let t = optimal_witness(&sys, 0, &w(), 7, &ratio(1, 8)).unwrap();
        assert_eq!(t.defect_fwd, ratio(7, 8));
        assert_eq!(t.defect_fwd, sys.measure(&t.b));
    }

    #[test]
    fn errors() {
        let sys = TowerSystem::bdp();
        assert!(optimal_witness(&sys, 0, &w(), 1, &int(0)).is_err());
        assert!(optimal_witness(&sys, 1, &w(), 1, &ratio(1, 2)).is_err());
    }

    #[test]
    fn never_beaten_by_brute_force() {
        let sys = TowerSystem::bdp();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let m = sample::below(&mut rng, 12) as i64 - 2;
            let n = sample::below(&mut rng, 13) as i64 - 6;
            let a = sample::dyadic_set(&mut rng, 4);
            let eps = ratio(1 + sample::below(&mut rng, 16) as i64, 32);
            let t = optimal_witness(&sys, m, &LeveledSet::single(m, a.clone()), n, &eps).unwrap();
            assert!(t.defect_a <= eps);
            assert!(t.b.is_subset(&LeveledSet::single(m, a.clone())));
            assert!(t.objective() <= brute_force(&sys, m, &a, n, &eps, 4));
        }
    }

    #[test]
    fn enlarging_epsilon_never_hurts() {
        let sys = TowerSystem::bdp();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let m = sample::below(&mut rng, 20) as i64 - 5;
            let n = sample::below(&mut rng, 60) as i64 - 30;
            let a = LeveledSet::single(m, sample::dyadic_set(&mut rng, 5));
            let e1 = ratio(1 + sample::below(&mut rng, 32) as i64, 64);
            let e2 = &e1 + ratio(sample::below(&mut rng, 32) as i64, 64);
            let t1 = optimal_witness(&sys, m, &a, n, &e1).unwrap();
            let t2 = optimal_witness(&sys, m, &a, n, &e2).unwrap();
            assert!(t2.objective() <= t1.objective());
        }
    }

    #[test]
    fn non_dyadic_split_is_rounded_down() {
        let sys = TowerSystem::geometric(ratio(3, 4)).unwrap();
        let t = optimal_witness(&sys, 1, &LeveledSet::single(1, DyadicSet::unit()), 2, &ratio(1, 4)).unwrap();
        assert!(t.defect_a <= ratio(1, 4));
        assert!(ratio(1, 4) - &t.defect_a < pow2(-(SPLIT_BITS as i64)));
    }
}
