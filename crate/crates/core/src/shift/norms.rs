use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_traits::{One, Signed};
use rayon::prelude::*;

use super::weights::{ShiftKind, WeightSeq};
use crate::conditions::{checks::push_csv, CSV_HEADER};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::tower::TowerSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormSource {
    /// `‖e_n‖^p = μ(f^n W)/μ(W)`.
    System(TowerSystem),
    /// `‖e_n‖^p = 1/∏_{j=1}^{n} w_j^p` for `n ≥ 0`, `∏_{j=n+1}^{0} w_j^p` for `n < 0`.
    Weights(WeightSeq),
    /// `‖e_n‖^p = ρ^{|n|}`.
    Geometric(Rational),
    Constant(Rational),
    Periodic(Vec<Rational>),
    Table { values: BTreeMap<i64, Rational>, default: Rational },
}

/// Coordinate norms `‖e_n‖`, stored as exact `p`-th powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormSeq {
    kind: ShiftKind,
    p: Rational,
    source: NormSource,
}

impl NormSeq {
    pub fn new(kind: ShiftKind, p: Rational, source: NormSource) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::OutOfRange { name: "p", reason: format!("{p} must be >= 1") });
        }
        let positive = match &source {
            NormSource::Geometric(r) => r.is_positive(),
            NormSource::Constant(c) => c.is_positive(),
            NormSource::Periodic(v) => !v.is_empty() && v.iter().all(|x| x.is_positive()),
            NormSource::Table { values, default } => default.is_positive() && values.values().all(|x| x.is_positive()),
            NormSource::System(_) | NormSource::Weights(_) => true,
        };
        if !positive {
            return Err(Error::OutOfRange { name: "norms", reason: "every ‖e_n‖ must be > 0".into() });
        }
        Ok(NormSeq { kind, p, source })
    }

    pub fn from_system(sys: &TowerSystem, p: Rational) -> Result<Self> {
        NormSeq::new(ShiftKind::Bilateral, p, NormSource::System(sys.clone()))
    }

    pub fn from_weights(ws: &WeightSeq) -> Result<Self> {
        NormSeq::new(ws.kind(), ws.p().clone(), NormSource::Weights(ws.clone()))
    }

    /// Materializes `f` on `range`; indices outside get `default`.
    pub fn from_fn<F: Fn(i64) -> Rational>(kind: ShiftKind, p: Rational, range: RangeInclusive<i64>, default: Rational, f: F) -> Result<Self> {
        let values = range.map(|n| (n, f(n))).collect();
        NormSeq::new(kind, p, NormSource::Table { values, default })
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn source(&self) -> &NormSource {
        &self.source
    }

    /// `‖e_n‖^p`.
    pub fn pow_p(&self, n: i64) -> Rational {
        match &self.source {
            NormSource::System(sys) => {
                let w = sys.wandering_position();
                sys.level_measure(w + n) / sys.level_measure(w)
            }
            NormSource::Weights(ws) => {
                let mut acc = Rational::one();
                if n >= 0 {
                    for j in 1..=n {
                        acc /= ws.wp(j);
                    }
                } else {
                    for j in n + 1..=0 {
                        acc *= ws.wp(j);
                    }
                }
                acc
            }
            NormSource::Geometric(r) => rational::powi(r, n.unsigned_abs()),
            NormSource::Constant(c) => c.clone(),
            NormSource::Periodic(v) => v[n.rem_euclid(v.len() as i64) as usize].clone(),
            NormSource::Table { values, default } => values.get(&n).unwrap_or(default).clone(),
        }
    }

    /// `‖e_n‖^p` for every `n` in `range`, in order.
    pub fn values(&self, range: RangeInclusive<i64>) -> Vec<Rational> {
        let (lo, hi) = (*range.start(), *range.end());
        if lo > hi {
            return Vec::new();
        }
        match &self.source {
            // e_{n+1} = e_n / w_{n+1} on both sides of 0
            NormSource::Weights(ws) => {
                let mut cur = self.pow_p(lo);
                let mut out = Vec::with_capacity((hi - lo + 1) as usize);
                out.push(cur.clone());
                for n in lo + 1..=hi {
                    cur /= ws.wp(n);
                    out.push(cur.clone());
                }
                out
            }
            _ => range.into_par_iter().map(|n| self.pow_p(n)).collect(),
        }
    }

    /// Positive lower bound on every `‖e_n‖^p`, when the source guarantees one.
    pub fn uniform_floor(&self) -> Option<Rational> {
        match &self.source {
            NormSource::Constant(c) => Some(c.clone()),
            NormSource::Periodic(v) => v.iter().min().cloned(),
            _ => None,
        }
    }

    /// The underlying tower system, directly or through its weights.
    pub fn system(&self) -> Option<&TowerSystem> {
        match &self.source {
            NormSource::System(s) => Some(s),
            NormSource::Weights(ws) => match ws.source() {
                super::weights::WeightSource::System(s) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn to_csv(&self, range: RangeInclusive<i64>) -> String {
        let mut out = String::from(CSV_HEADER);
        for n in range {
            push_csv(&mut out, n, &self.pow_p(n), "norm_p");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::shift::weights_from_system;

    #[test]
    fn system_and_weight_views_agree() {
        for sys in [TowerSystem::bdp(), TowerSystem::geometric(ratio(1, 2)).unwrap()] {
            let a = NormSeq::from_system(&sys, int(1)).unwrap();
            let b = NormSeq::from_weights(&weights_from_system(&sys, int(1)).unwrap()).unwrap();
            for n in -70..=70 {
                assert_eq!(a.pow_p(n), b.pow_p(n), "n={n}");
            }
            let (va, vb) = (a.values(-70..=70), b.values(-70..=70));
            assert_eq!(va, vb);
            for n in -70..=70 {
                assert_eq!(va[(n + 70) as usize], a.pow_p(n));
            }
        }
    }

    #[test]
    fn sources() {
        let g = NormSeq::new(ShiftKind::Bilateral, int(1), NormSource::Geometric(ratio(1, 2))).unwrap();
        assert_eq!(g.pow_p(-3), ratio(1, 8));
        let t = NormSeq::from_fn(ShiftKind::Unilateral, int(1), 1..=5, int(1), |n| ratio(1, n)).unwrap();
        assert_eq!(t.pow_p(4), ratio(1, 4));
        assert_eq!(t.pow_p(9), int(1));
        assert!(NormSeq::new(ShiftKind::Bilateral, int(1), NormSource::Constant(int(0))).is_err());
        assert_eq!(NormSeq::new(ShiftKind::Bilateral, int(1), NormSource::Periodic(vec![int(3), int(2)])).unwrap().uniform_floor(), Some(int(2)));
        assert!(g.to_csv(0..=1).contains("1,1,2,norm_p"));
    }
}
