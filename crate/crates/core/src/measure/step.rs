use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::{DyadicInterval, DyadicSet};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Piecewise-constant, strictly positive density on `[0, 1)`.
///
/// Piece `i` covers `[breakpoints[i], breakpoints[i+1])`, with an implicit final
/// breakpoint `1`. Adjacent pieces never carry equal values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFunction {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        let bad = |m: &str| Err(Error::StepFunction(m.to_string()));
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return bad("breakpoints and values must be non-empty and of equal length");
        }
        if !breakpoints[0].is_zero() {
            return bad("first breakpoint must be 0");
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return bad("breakpoints must be strictly increasing");
            }
        }
        if breakpoints.last().is_some_and(|b| b >= &Rational::one()) {
            return bad("breakpoints must lie in [0,1)");
        }
        if let Some(b) = breakpoints.iter().find(|b| !rational::is_dyadic(b)) {
            return Err(Error::NotDyadic(b.to_string()));
        }
        if values.iter().any(|v| !v.is_positive()) {
            return bad("values must be strictly positive");
        }
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<Rational> = Vec::with_capacity(values.len());
        for (b, v) in breakpoints.into_iter().zip(values) {
            if vals.last() != Some(&v) {
                bps.push(b);
                vals.push(v);
            }
        }
        Ok(StepFunction { breakpoints: bps, values: vals })
    }

    pub fn constant(v: Rational) -> Result<Self> {
        StepFunction::new(vec![Rational::zero()], vec![v])
    }

    /// Value `inside` on `[lo, hi)` and `outside` elsewhere.
    pub fn with_window(lo: Rational, hi: Rational, inside: Rational, outside: Rational) -> Result<Self> {
        let mut bps = Vec::new();
        let mut vals = Vec::new();
        if !lo.is_zero() {
            bps.push(Rational::zero());
            vals.push(outside.clone());
        }
        let one = Rational::one();
        let hi_is_one = hi == one;
        bps.push(lo);
        vals.push(inside);
        if !hi_is_one {
            bps.push(hi);
            vals.push(outside);
        }
        StepFunction::new(bps, vals)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    /// `(lo, hi, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, Rational, &Rational)> + '_ {
        let one = Rational::one();
        self.breakpoints.iter().enumerate().map(move |(i, b)| {
            let hi = self.breakpoints.get(i + 1).cloned().unwrap_or_else(|| one.clone());
            (b, hi, &self.values[i])
        })
    }

    /// Value at `x ∈ [0, 1)`.
    pub fn value_at(&self, x: &Rational) -> &Rational {
        let idx = match self.breakpoints.binary_search(x) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        &self.values[idx]
    }

    pub fn min_value(&self) -> &Rational {
        self.values.iter().min().expect("non-empty")
    }

    pub fn max_value(&self) -> &Rational {
        self.values.iter().max().expect("non-empty")
    }

    /// `∫_s d dλ`, summing value × overlap length over the common refinement.
    pub fn integrate(&self, s: &DyadicSet) -> Rational {
        let mut total = Rational::zero();
        let pieces: Vec<_> = self.pieces().collect();
        let mut i = 0usize;
        for iv in s.intervals() {
            while i < pieces.len() && &pieces[i].1 <= iv.lo() {
                i += 1;
            }
            let mut k = i;
            while k < pieces.len() && pieces[k].0 < iv.hi() {
                let lo = pieces[k].0.max(iv.lo());
                let hi = (&pieces[k].1).min(iv.hi());
                total += pieces[k].2 * (hi - lo);
                k += 1;
            }
        }
        total
    }

    /// Integral over the whole fiber.
    pub fn total(&self) -> Rational {
        self.pieces().map(|(lo, hi, v)| v * (hi - lo)).sum()
    }

    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        StepFunction::new(self.breakpoints.clone(), self.values.iter().map(|v| v * c).collect())
    }

    /// Pointwise maximum of two densities.
    pub fn pointwise_max(&self, other: &StepFunction) -> StepFunction {
        let cuts = merged_breakpoints(&[self, other], &[]);
        let values = cuts[..cuts.len() - 1]
            .iter()
            .map(|x| self.value_at(x).max(other.value_at(x)).clone())
            .collect();
        StepFunction::new(cuts[..cuts.len() - 1].to_vec(), values).expect("max of valid step functions")
    }

    /// Piece-wise view restricted to a set: `(interval, value)` for each overlap.
    pub fn restricted_pieces(&self, s: &DyadicSet) -> Vec<(DyadicInterval, Rational)> {
        let mut out = Vec::new();
        for (lo, hi, v) in self.pieces() {
            let piece = DyadicSet::interval(lo.clone(), hi).expect("pieces are non-empty");
            for iv in piece.intersect(s).intervals() {
                out.push((iv.clone(), v.clone()));
            }
        }
        out
    }
}

/// Sorted, deduplicated cut points `0 = x_0 < … < x_k = 1` refining the given
/// step functions and the boundaries of the given sets.
pub fn merged_breakpoints(fns: &[&StepFunction], sets: &[&DyadicSet]) -> Vec<Rational> {
    let mut cuts: Vec<Rational> = vec![Rational::zero(), Rational::one()];
    for f in fns {
        cuts.extend(f.breakpoints.iter().cloned());
    }
    for s in sets {
        cuts.extend(s.boundaries().cloned());
    }
    cuts.sort();
    cuts.dedup();
    cuts
}

/// JSON form: `[["0","2"],["1/2","1/2"]]`, i.e. `(breakpoint, value)` pairs.
#[derive(Serialize, Deserialize)]
struct StepRepr(Vec<(String, String)>);

impl Serialize for StepFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StepRepr(
            self.breakpoints
                .iter()
                .zip(&self.values)
                .map(|(b, v)| (rational::to_dyadic_string(b), rational::to_num_den(v)))
                .collect(),
        )
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let StepRepr(pairs) = StepRepr::deserialize(d)?;
        let mut bps = Vec::new();
        let mut vals = Vec::new();
        for (b, v) in pairs {
            bps.push(rational::parse(&b).map_err(D::Error::custom)?);
            vals.push(rational::parse(&v).map_err(D::Error::custom)?);
        }
        StepFunction::new(bps, vals).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn level_1_1_2() -> StepFunction {
        // value 2 = 2^2/2^1 on the first half, 1/2 = 1/2^1 elsewhere
        StepFunction::with_window(int(0), ratio(1, 2), int(2), ratio(1, 2)).unwrap()
    }

    #[test]
    fn constant_one_integrates_to_lebesgue() {
        let one = StepFunction::constant(int(1)).unwrap();
        let s: DyadicSet = "0:1/4,1/2:5/8".parse().unwrap();
        assert_eq!(one.integrate(&s), s.lebesgue());
    }

    #[test]
    fn special_level_integrates_to_five_quarters() {
        // oracle: 2^2/2^1 · λ([0,1/2)) + 1/2^1 · λ([1/2,1)) = 1 + 1/4
        let d = level_1_1_2();
        let expected = int(4) / int(2) * ratio(1, 2) + ratio(1, 2) * ratio(1, 2);
        assert_eq!(expected, ratio(5, 4));
        assert_eq!(d.integrate(&DyadicSet::unit()), expected);
        assert_eq!(d.total(), expected);
    }

    #[test]
    fn base_level_density() {
        for n in [-3i64, 0, 2, 5] {
            let d = StepFunction::constant(crate::rational::pow2(-n.abs())).unwrap();
            assert_eq!(d.integrate(&DyadicSet::unit()), crate::rational::pow2(-n.abs()));
        }
    }

    #[test]
    fn canonical_merge_and_validation() {
        let d = StepFunction::new(vec![int(0), ratio(1, 2)], vec![int(1), int(1)]).unwrap();
        assert!(d.is_constant());
        assert!(StepFunction::new(vec![ratio(1, 4)], vec![int(1)]).is_err());
        assert!(StepFunction::new(vec![int(0)], vec![int(0)]).is_err());
        assert!(StepFunction::new(vec![int(0), ratio(1, 3)], vec![int(1), int(2)]).is_err());
        let w = StepFunction::with_window(ratio(3, 4), int(1), int(4), int(1)).unwrap();
        assert_eq!(w.breakpoints(), &[int(0), ratio(3, 4)]);
        assert_eq!(w.value_at(&ratio(7, 8)), &int(4));
        assert_eq!(w.value_at(&ratio(3, 4)), &int(4));
        assert_eq!(w.value_at(&ratio(1, 8)), &int(1));
    }

    #[test]
    fn pointwise_max() {
        let a = level_1_1_2();
        let b = StepFunction::with_window(ratio(1, 2), int(1), int(2), ratio(1, 2)).unwrap();
        assert_eq!(a.pointwise_max(&b), StepFunction::constant(int(2)).unwrap());
    }

    #[test]
    fn integrate_is_additive_over_disjoint_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let d = sample::step_function(&mut rng, 4);
            let a = sample::dyadic_set(&mut rng, 6);
            let b = sample::dyadic_set(&mut rng, 6).difference(&a);
            assert_eq!(d.integrate(&a.union(&b)), d.integrate(&a) + d.integrate(&b));
            // independent route: per-interval midpoint evaluation on a fine grid
            let mut slow = Rational::zero();
            for iv in a.intervals() {
                for (lo, hi, v) in d.pieces() {
                    let l = lo.max(iv.lo());
                    let h = (&hi).min(iv.hi());
                    if l < h {
                        slow += v * (h - l);
                    }
                }
            }
            assert_eq!(d.integrate(&a), slow);
        }
    }

    #[test]
    fn json_round_trip() {
        let d = level_1_1_2();
        let js = serde_json::to_string(&d).unwrap();
        assert_eq!(js, r#"[["0","2/1"],["1/2^1","1/2"]]"#);
        let back: StepFunction = serde_json::from_str(&js).unwrap();
        assert_eq!(back, d);
    }
}
