use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DyadicInterval, DyadicSet};
use crate::rational::{self, Rational};
use crate::tower::{LeveledSet, TowerSystem};

/// One term `a·χ_{(level, set)}` in JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub level: i64,
    pub set: DyadicSet,
    #[serde(with = "rational::as_num_den")]
    pub coeff: Rational,
}

/// Finite linear combination of indicators of leveled dyadic sets.
///
/// Stored canonically: per level, one disjoint set per distinct non-zero value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SimpleFunction {
    levels: BTreeMap<i64, BTreeMap<Rational, DyadicSet>>,
}

impl SimpleFunction {
    pub fn zero() -> Self {
        SimpleFunction::default()
    }

    /// Sums the terms; overlapping supports add up.
    pub fn new<I: IntoIterator<Item = Term>>(terms: I) -> Self {
        let mut by_level: BTreeMap<i64, Vec<(DyadicSet, Rational)>> = BTreeMap::new();
        for t in terms {
            if !t.coeff.is_zero() && !t.set.is_empty() {
                by_level.entry(t.level).or_default().push((t.set, t.coeff));
            }
        }
        let mut levels = BTreeMap::new();
        for (level, terms) in by_level {
            let canon = canonical_level(&terms);
            if !canon.is_empty() {
                levels.insert(level, canon);
            }
        }
        SimpleFunction { levels }
    }

    pub fn term(level: i64, set: DyadicSet, coeff: Rational) -> Self {
        SimpleFunction::new([Term { level, set, coeff }])
    }

    /// `c·χ_S`.
    pub fn indicator(s: &LeveledSet, coeff: Rational) -> Self {
        SimpleFunction::new(s.iter().map(|(level, set)| Term { level, set: set.clone(), coeff: coeff.clone() }))
    }

    pub fn is_zero(&self) -> bool {
        self.levels.is_empty()
    }

    /// Canonical terms, ordered by level then value.
    pub fn terms(&self) -> Vec<Term> {
        self.levels
            .iter()
            .flat_map(|(&level, vals)| vals.iter().map(move |(c, s)| Term { level, set: s.clone(), coeff: c.clone() }))
            .collect()
    }

    pub fn support(&self) -> LeveledSet {
        let mut out = LeveledSet::empty();
        for t in self.terms() {
            out.insert(t.level, t.set);
        }
        out
    }

    pub fn add(&self, other: &SimpleFunction) -> SimpleFunction {
        SimpleFunction::new(self.terms().into_iter().chain(other.terms()))
    }

    pub fn scale(&self, c: &Rational) -> SimpleFunction {
        SimpleFunction::new(self.terms().into_iter().map(|t| Term { coeff: t.coeff * c, ..t }))
    }

    pub fn sub(&self, other: &SimpleFunction) -> SimpleFunction {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    /// `|φ|`.
    pub fn abs(&self) -> SimpleFunction {
        SimpleFunction::new(self.terms().into_iter().map(|t| Term { coeff: t.coeff.abs(), ..t }))
    }

    /// Level shift of every term by `delta`.
    pub fn shift_levels(&self, delta: i64) -> SimpleFunction {
        SimpleFunction { levels: self.levels.iter().map(|(l, v)| (l + delta, v.clone())).collect() }
    }

    /// Value at `(level, x)`.
    pub fn value_at(&self, level: i64, x: &Rational) -> Rational {
        self.levels
            .get(&level)
            .and_then(|vals| {
                vals.iter().find(|(_, s)| s.intervals().iter().any(|iv| iv.lo() <= x && x < iv.hi())).map(|(c, _)| c.clone())
            })
            .unwrap_or_default()
    }

    /// Distinct non-zero values of `φ` with the measure of each level set.
    pub fn distribution(&self, sys: &TowerSystem) -> BTreeMap<Rational, Rational> {
        let mut out: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (&level, vals) in &self.levels {
            let d = sys.density(level);
            for (c, s) in vals {
                *out.entry(c.clone()).or_default() += d.integrate(s);
            }
        }
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let terms: Vec<Term> = serde_json::from_str(s).map_err(|e| Error::ParseSet(format!("simple function: {e}")))?;
        Ok(SimpleFunction::new(terms))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.terms()).expect("terms serialize")
    }
}

/// Splits overlapping sets at every boundary and regroups by summed value.
fn canonical_level(terms: &[(DyadicSet, Rational)]) -> BTreeMap<Rational, DyadicSet> {
    let mut cuts: Vec<Rational> = terms.iter().flat_map(|(s, _)| s.boundaries().cloned()).collect();
    cuts.sort();
    cuts.dedup();
    let mut grouped: BTreeMap<Rational, Vec<DyadicInterval>> = BTreeMap::new();
    for w in cuts.windows(2) {
        let x = &w[0];
        let v: Rational = terms
            .iter()
            .filter(|(s, _)| s.intervals().iter().any(|iv| iv.lo() <= x && x < iv.hi()))
            .map(|(_, c)| c.clone())
            .sum();
        if !v.is_zero() {
            grouped.entry(v).or_default().push(DyadicInterval::new(w[0].clone(), w[1].clone()).expect("dyadic cut"));
        }
    }
    grouped.into_iter().map(|(v, ivs)| (v, DyadicSet::from_intervals(ivs))).collect()
}

impl Serialize for SimpleFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimpleFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(SimpleFunction::new(Vec::<Term>::deserialize(d)?))
    }
}

/// `T_f^n φ = φ ∘ f^n`: since `χ_A ∘ f^n = χ_{f^{-n}(A)}`, every term moves by `-n` levels.
pub fn apply_op(phi: &SimpleFunction, n: i64) -> SimpleFunction {
    phi.shift_levels(-n)
}
