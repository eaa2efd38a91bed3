use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, int, ratio, Rational};

/// Finitely supported sequence `(x_n)_{n ≥ 1}`; zero entries are dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseSeq(BTreeMap<u64, Rational>);

impl SparseSeq {
    pub fn new<I: IntoIterator<Item = (u64, Rational)>>(it: I) -> Result<Self> {
        let mut m = BTreeMap::new();
        for (n, x) in it {
            if n == 0 {
                return Err(Error::OutOfRange { name: "index", reason: "sequences start at n = 1".into() });
            }
            if !x.is_zero() {
                m.insert(n, x);
            }
        }
        Ok(SparseSeq(m))
    }

    /// `x · e_n`.
    pub fn unit(n: u64, x: Rational) -> Result<Self> {
        SparseSeq::new([(n, x)])
    }

    pub fn get(&self, n: u64) -> Rational {
        self.0.get(&n).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.keys().copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleNorm {
    /// `sup_N |Σ_{n≤N} x_n/n|`
    Abel,
    /// `|x_1| + sup_n |x_{n+1}/(n+1) − x_n/n|`
    Diff,
}

impl fmt::Display for ExampleNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExampleNorm::Abel => "abel",
            ExampleNorm::Diff => "diff",
        })
    }
}

impl FromStr for ExampleNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abel" => Ok(ExampleNorm::Abel),
            "diff" => Ok(ExampleNorm::Diff),
            _ => Err(Error::OutOfRange { name: "norm", reason: format!("unknown norm {s:?}") }),
        }
    }
}

fn scaled(x: &SparseSeq, n: u64) -> Rational {
    x.get(n) / int(n as i64)
}

/// Exact value of the chosen norm; both suprema are attained on the support window.
pub fn example_norm(x: &SparseSeq, which: ExampleNorm) -> Rational {
    match which {
        ExampleNorm::Abel => {
            let mut partial = Rational::zero();
            let mut best = Rational::zero();
            for n in x.support() {
                partial += scaled(x, n);
                best = best.max(partial.abs());
            }
            best
        }
        ExampleNorm::Diff => {
            let candidates: BTreeSet<u64> = x.support().flat_map(|k| [k - 1, k]).filter(|&n| n >= 1).collect();
            let sup = candidates.into_iter().map(|n| (scaled(x, n + 1) - scaled(x, n)).abs()).max().unwrap_or_default();
            x.get(1).abs() + sup
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub n: u64,
    /// `x_n = n·H_n`
    #[serde(with = "rational::as_num_den")]
    pub x_n: Rational,
    /// `‖x_n e_n‖` in the chosen norm.
    #[serde(with = "rational::as_num_den")]
    pub norm: Rational,
    /// `|x_n|/n = H_n`
    #[serde(with = "rational::as_num_den")]
    pub ratio: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub norm: ExampleNorm,
    pub n_max: u64,
    pub rows: Vec<ProbeRow>,
    /// `1 + ⌊log₂ N⌋/2`, an exact lower bound for `H_N`.
    #[serde(with = "rational::as_num_den")]
    pub log_floor: Rational,
    /// Last ratio meets the logarithmic floor, which is unbounded in `N`.
    pub diverges: bool,
}

impl ProbeReport {
    pub fn last(&self) -> &ProbeRow {
        self.rows.last().expect("n_max >= 1")
    }
}

/// Norms of `x_n e_n` for `x_n = n·H_n`, `n ≤ N`. Coordinate projections are
/// bounded by `‖x_n e_n‖`, which grows like `log n`.
///
/// For `n ≥ 2` both norms give `H_n`; the difference norm doubles at `n = 1`
/// because `|x_1|` is counted twice.
pub fn equicontinuity_probe(which: ExampleNorm, n_max: u64) -> Result<ProbeReport> {
    if n_max == 0 {
        return Err(Error::OutOfRange { name: "N", reason: "must be >= 1".into() });
    }
    let mut h = Rational::zero();
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        h += ratio(1, n as i64);
        let x_n = &h * int(n as i64);
        let norm = example_norm(&SparseSeq::unit(n, x_n.clone())?, which);
        rows.push(ProbeRow { n, x_n, norm, ratio: h.clone() });
    }
    let log_floor = int(1) + ratio(rational::floor_log2(n_max) as i64, 2);
    let diverges = rows.last().is_some_and(|r| r.ratio >= log_floor);
    Ok(ProbeReport { norm: which, n_max, rows, log_floor, diverges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_values() {
        for n in 1..20u64 {
            assert_eq!(example_norm(&SparseSeq::unit(n, int(1)).unwrap(), ExampleNorm::Abel), ratio(1, n as i64));
        }
        assert_eq!(example_norm(&SparseSeq::default(), ExampleNorm::Diff), int(0));
        assert_eq!(example_norm(&SparseSeq::default(), ExampleNorm::Abel), int(0));
        let x = SparseSeq::new([(1, int(2)), (2, int(-6))]).unwrap();
        assert_eq!(example_norm(&x, ExampleNorm::Abel), int(2));
        // |2| + max(|−3 − 2|, |0 − (−3)|)
        assert_eq!(example_norm(&x, ExampleNorm::Diff), int(7));
        assert!(SparseSeq::unit(0, int(1)).is_err());
    }

    #[test]
    fn probe_values() {
        let p = equicontinuity_probe(ExampleNorm::Diff, 4).unwrap();
        assert_eq!(p.rows[0].ratio, int(1));
        assert_eq!(p.rows[0].norm, int(2));
        assert_eq!(p.rows[3].norm, ratio(25, 12));
        assert_eq!(p.rows[3].ratio, ratio(25, 12));
        let a = equicontinuity_probe(ExampleNorm::Abel, 4).unwrap();
        assert_eq!(a.rows[0].norm, int(1));
        assert!(equicontinuity_probe(ExampleNorm::Abel, 0).is_err());
    }

    #[test]
    fn harmonic_thousand() {
        let p = equicontinuity_probe(ExampleNorm::Diff, 1000).unwrap();
        assert!(p.last().norm > int(7));
        assert!(p.last().norm < int(8));
        assert!(p.diverges);
    }

    /// Direct evaluation over an explicit window `1..=L+1`.
    fn dense(x: &SparseSeq, which: ExampleNorm, len: u64) -> Rational {
        match which {
            ExampleNorm::Abel => {
                let mut s = Rational::zero();
                let mut b = Rational::zero();
                for n in 1..=len {
                    s += scaled(x, n);
                    b = b.max(s.abs());
                }
                b
            }
            ExampleNorm::Diff => x.get(1).abs() + (1..=len).map(|n| (scaled(x, n + 1) - scaled(x, n)).abs()).max().unwrap(),
        }
    }

    proptest! {
        #[test]
        fn sparse_matches_dense(entries in proptest::collection::vec((1u64..30, -20i64..20), 0..8)) {
            let x = SparseSeq::new(entries.into_iter().map(|(n, v)| (n, int(v)))).unwrap();
            for which in [ExampleNorm::Abel, ExampleNorm::Diff] {
                prop_assert_eq!(example_norm(&x, which), dense(&x, which, 31));
            }
        }

        #[test]
        fn norms_are_seminorms(a in proptest::collection::vec((1u64..12, -9i64..9), 0..5),
                               b in proptest::collection::vec((1u64..12, -9i64..9), 0..5), c in -5i64..5) {
            let x = SparseSeq::new(a.iter().map(|&(n, v)| (n, int(v)))).unwrap();
            let y = SparseSeq::new(b.iter().map(|&(n, v)| (n, int(v)))).unwrap();
            let mut sum: BTreeMap<u64, Rational> = BTreeMap::new();
            for (n, v) in x.0.iter().chain(y.0.iter()) {
                *sum.entry(*n).or_default() += v;
            }
            let s = SparseSeq::new(sum).unwrap();
            let cx = SparseSeq::new(x.0.iter().map(|(n, v)| (*n, v * int(c)))).unwrap();
            for which in [ExampleNorm::Abel, ExampleNorm::Diff] {
                prop_assert!(example_norm(&s, which) <= example_norm(&x, which) + example_norm(&y, which));
                prop_assert_eq!(example_norm(&cx, which), example_norm(&x, which) * int(c.abs()));
            }
        }
    }
}
