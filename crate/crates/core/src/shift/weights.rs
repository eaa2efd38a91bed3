use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::conditions::{checks::push_csv, CSV_HEADER};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::tower::TowerSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftKind {
    Bilateral,
    Unilateral,
}

/// Where `w_k^p` comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightSource {
    /// `w_k^p = μ(f^{k-1}W)/μ(f^k W)`.
    System(TowerSystem),
    Constant(Rational),
    /// `w_k^p = pattern[k mod len]`.
    Periodic(Vec<Rational>),
    Table { values: BTreeMap<i64, Rational>, default: Rational },
}

/// Weights of a backward shift, stored as exact `p`-th powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSeq {
    kind: ShiftKind,
    p: Rational,
    source: WeightSource,
}

fn check_p(p: &Rational) -> Result<()> {
    if *p < Rational::one() {
        return Err(Error::OutOfRange { name: "p", reason: format!("{p} must be >= 1") });
    }
    Ok(())
}

fn check_positive(name: &'static str, xs: &[&Rational]) -> Result<()> {
    if xs.iter().any(|x| !x.is_positive()) {
        return Err(Error::OutOfRange { name, reason: "weights must be > 0".into() });
    }
    Ok(())
}

impl WeightSeq {
    pub fn from_system(sys: &TowerSystem, p: Rational) -> Result<Self> {
        check_p(&p)?;
        Ok(WeightSeq { kind: ShiftKind::Bilateral, p, source: WeightSource::System(sys.clone()) })
    }

    pub fn constant(kind: ShiftKind, p: Rational, wp: Rational) -> Result<Self> {
        check_p(&p)?;
        check_positive("weight", &[&wp])?;
        Ok(WeightSeq { kind, p, source: WeightSource::Constant(wp) })
    }

    pub fn periodic(kind: ShiftKind, p: Rational, pattern: Vec<Rational>) -> Result<Self> {
        check_p(&p)?;
        if pattern.is_empty() {
            return Err(Error::OutOfRange { name: "pattern", reason: "empty".into() });
        }
        check_positive("pattern", &pattern.iter().collect::<Vec<_>>())?;
        Ok(WeightSeq { kind, p, source: WeightSource::Periodic(pattern) })
    }

    pub fn table(kind: ShiftKind, p: Rational, values: BTreeMap<i64, Rational>, default: Rational) -> Result<Self> {
        check_p(&p)?;
        let mut all: Vec<&Rational> = values.values().collect();
        all.push(&default);
        check_positive("weight", &all)?;
        Ok(WeightSeq { kind, p, source: WeightSource::Table { values, default } })
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn source(&self) -> &WeightSource {
        &self.source
    }

    /// `w_k^p`.
    pub fn wp(&self, k: i64) -> Rational {
        match &self.source {
            WeightSource::System(sys) => {
                let w = sys.wandering_position();
                sys.level_measure(w + k - 1) / sys.level_measure(w + k)
            }
            WeightSource::Constant(c) => c.clone(),
            WeightSource::Periodic(v) => v[k.rem_euclid(v.len() as i64) as usize].clone(),
            WeightSource::Table { values, default } => values.get(&k).unwrap_or(default).clone(),
        }
    }

    /// `∏_{j=1}^{k} w_j^p` for `k = 1..=h`, by repeated multiplication.
    pub fn forward_products(&self, h: i64) -> Vec<Rational> {
        let mut acc = Rational::one();
        (1..=h)
            .map(|k| {
                acc *= self.wp(k);
                acc.clone()
            })
            .collect()
    }

    /// `∏_{j=-k+1}^{0} w_j^{-p}` for `k = 1..=h`.
    pub fn backward_products(&self, h: i64) -> Vec<Rational> {
        let mut acc = Rational::one();
        (1..=h)
            .map(|k| {
                acc /= self.wp(1 - k);
                acc.clone()
            })
            .collect()
    }

    /// `(min, max)` of `w_k^p` over `range`.
    pub fn bounds(&self, range: RangeInclusive<i64>) -> Option<(Rational, Rational)> {
        let vals: Vec<Rational> = range.map(|k| self.wp(k)).collect();
        Some((vals.iter().min()?.clone(), vals.iter().max()?.clone()))
    }

    /// `index,num,den` of `w_k^p` as CSV with tag `wp`.
    pub fn to_csv(&self, range: RangeInclusive<i64>) -> String {
        let mut out = String::from(CSV_HEADER);
        for k in range {
            push_csv(&mut out, k, &self.wp(k), "wp");
        }
        out
    }
}

/// Weights induced by a tower system on `ℓ^p(ℤ)`.
pub fn weights_from_system(sys: &TowerSystem, p: Rational) -> Result<WeightSeq> {
    WeightSeq::from_system(sys, p)
}

/// Serializable summary of a weight window.
#[derive(Clone, Debug, Serialize)]
pub struct WeightTable {
    pub p: String,
    pub indices: Vec<i64>,
    #[serde(with = "rational::vec_num_den")]
    pub wp: Vec<Rational>,
    #[serde(with = "rational::as_num_den")]
    pub min: Rational,
    #[serde(with = "rational::as_num_den")]
    pub max: Rational,
}

impl WeightSeq {
    pub fn window(&self, range: RangeInclusive<i64>) -> WeightTable {
        let indices: Vec<i64> = range.clone().collect();
        let wp: Vec<Rational> = indices.iter().map(|&k| self.wp(k)).collect();
        let (min, max) = self.bounds(range).unwrap_or_default();
        WeightTable { p: rational::to_num_den(&self.p), indices, wp, min, max }
    }
}
