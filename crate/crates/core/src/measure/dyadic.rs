use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Half-open interval `[lo, hi)` with dyadic endpoints inside `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    lo: Rational,
    hi: Rational,
}

impl DyadicInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        for x in [&lo, &hi] {
            if !rational::is_dyadic(x) || x < &Rational::zero() || x > &Rational::one() {
                return Err(Error::NotDyadic(x.to_string()));
            }
        }
        if lo >= hi {
            return Err(Error::EmptyInterval { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(DyadicInterval { lo, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
    SymmetricDifference,
}

impl SetOp {
    fn keep(self, in_a: bool, in_b: bool) -> bool {
        match self {
            SetOp::Union => in_a || in_b,
            SetOp::Intersect => in_a && in_b,
            SetOp::Difference => in_a && !in_b,
            SetOp::SymmetricDifference => in_a != in_b,
        }
    }
}

/// Finite disjoint union of dyadic half-open intervals, kept canonical: sorted,
/// pairwise disjoint, adjacent intervals merged. The empty list is `∅`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DyadicSet {
    intervals: Vec<DyadicInterval>,
}

impl DyadicSet {
    pub fn empty() -> Self {
        DyadicSet::default()
    }

    /// The whole fiber `[0, 1)`.
    pub fn unit() -> Self {
        DyadicSet { intervals: vec![DyadicInterval { lo: Rational::zero(), hi: Rational::one() }] }
    }

    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        Ok(DyadicSet { intervals: vec![DyadicInterval::new(lo, hi)?] })
    }

    /// Builds the union of arbitrary (possibly overlapping, unsorted) intervals.
    pub fn from_intervals<I: IntoIterator<Item = DyadicInterval>>(it: I) -> Self {
        DyadicSet { intervals: it.into_iter().collect() }.normalize()
    }

    /// The `j`-th cell `[(j-1)/2^n, j/2^n)` of the level-`n` dyadic grid, `1 ≤ j ≤ 2^n`.
    pub fn grid_cell(n: u32, j: u64) -> Self {
        let lo = Rational::new((j - 1).into(), num_bigint::BigInt::one() << n);
        let hi = Rational::new(j.into(), num_bigint::BigInt::one() << n);
        DyadicSet { intervals: vec![DyadicInterval { lo, hi }] }
    }

    /// Sorts, merges overlapping and adjacent intervals.
    pub fn normalize(mut self) -> Self {
        self.intervals.sort();
        let mut out: Vec<DyadicInterval> = Vec::with_capacity(self.intervals.len());
        for iv in self.intervals {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        DyadicSet { intervals: out }
    }

    pub fn intervals(&self) -> &[DyadicInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Sorted endpoints of all intervals.
    pub fn boundaries(&self) -> impl Iterator<Item = &Rational> {
        self.intervals.iter().flat_map(|iv| [&iv.lo, &iv.hi])
    }

    pub fn combine(&self, other: &DyadicSet, op: SetOp) -> DyadicSet {
        let mut cuts: Vec<&Rational> = self.boundaries().chain(other.boundaries()).collect();
        cuts.sort();
        cuts.dedup();
        let (mut ia, mut ib) = (0usize, 0usize);
        let mut out: Vec<DyadicInterval> = Vec::new();
        for w in cuts.windows(2) {
            let (x, y) = (w[0], w[1]);
            while ia < self.intervals.len() && &self.intervals[ia].hi <= x {
                ia += 1;
            }
            while ib < other.intervals.len() && &other.intervals[ib].hi <= x {
                ib += 1;
            }
            let in_a = self.intervals.get(ia).is_some_and(|iv| &iv.lo <= x);
            let in_b = other.intervals.get(ib).is_some_and(|iv| &iv.lo <= x);
            if op.keep(in_a, in_b) {
                match out.last_mut() {
                    Some(last) if &last.hi == x => last.hi = y.clone(),
                    _ => out.push(DyadicInterval { lo: x.clone(), hi: y.clone() }),
                }
            }
        }
        DyadicSet { intervals: out }
    }

    pub fn union(&self, other: &DyadicSet) -> DyadicSet {
        self.combine(other, SetOp::Union)
    }

    pub fn intersect(&self, other: &DyadicSet) -> DyadicSet {
        self.combine(other, SetOp::Intersect)
    }

    pub fn difference(&self, other: &DyadicSet) -> DyadicSet {
        self.combine(other, SetOp::Difference)
    }

    pub fn complement(&self) -> DyadicSet {
        DyadicSet::unit().difference(self)
    }

    pub fn is_subset(&self, other: &DyadicSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &DyadicSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// Lebesgue measure: the sum of interval lengths.
    pub fn lebesgue(&self) -> Rational {
        self.intervals.iter().map(DyadicInterval::length).sum()
    }

    /// Largest `k` such that some endpoint has denominator `2^k`.
    pub fn resolution(&self) -> u64 {
        self.boundaries().filter_map(rational::dyadic_exponent).max().unwrap_or(0)
    }
}

/// Canonical text form `lo1:hi1,lo2:hi2,…` with endpoints rendered as `num/2^k`.
/// The empty set renders as the empty string.
impl fmt::Display for DyadicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|iv| format!("{}:{}", rational::to_dyadic_string(&iv.lo), rational::to_dyadic_string(&iv.hi)))
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for DyadicSet {
    type Err = Error;

    /// Accepts the canonical form plus `""`/`empty` for `∅`. Intervals may be given
    /// in any order and may overlap; the result is normalized.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || t == "empty" || t == "∅" {
            return Ok(DyadicSet::empty());
        }
        let mut ivs = Vec::new();
        for part in t.split(',') {
            let (lo, hi) = part.split_once(':').ok_or_else(|| Error::ParseSet(s.to_string()))?;
            ivs.push(DyadicInterval::new(rational::parse(lo)?, rational::parse(hi)?)?);
        }
        Ok(DyadicSet::from_intervals(ivs))
    }
}

impl serde::Serialize for DyadicSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for DyadicSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
