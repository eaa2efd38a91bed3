//! Arbitrary-precision rationals and their text forms.
//!
//! Two renderings are used throughout: `num/den` (always with a denominator,
//! used in reports) and the dyadic form `num/2^k` used by set literals.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// `x^k` for a non-negative integer `k`.
pub fn powi(x: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    let mut base = x.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Exponent `k` with `den = 2^k`, if the reduced denominator is a power of two.
pub fn dyadic_exponent(x: &Rational) -> Option<u64> {
    let d = x.denom();
    if d.is_one() {
        return Some(0);
    }
    let tz = d.trailing_zeros()?;
    if (d >> tz as usize).is_one() {
        Some(tz)
    } else {
        None
    }
}

pub fn is_dyadic(x: &Rational) -> bool {
    dyadic_exponent(x).is_some()
}

/// Largest multiple of `2^-bits` that does not exceed `x`.
pub fn dyadic_floor(x: &Rational, bits: u32) -> Rational {
    let scaled = x * pow2(bits as i64);
    Rational::new(scaled.floor().to_integer(), BigInt::one() << bits)
}

/// `⌊log₂ n⌋` for `n ≥ 1`.
pub fn floor_log2(n: u64) -> u32 {
    63 - n.leading_zeros()
}

/// Renders as `num/den`, always with an explicit denominator.
pub fn to_num_den(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Renders integers bare and dyadic values as `num/2^k`; anything else as `num/den`.
pub fn to_dyadic_string(x: &Rational) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    match dyadic_exponent(x) {
        Some(k) => format!("{}/2^{}", x.numer(), k),
        None => to_num_den(x),
    }
}

/// Parses `a`, `a/b` or `a/2^k` (optionally signed).
pub fn parse(s: &str) -> Result<Rational> {
    let err = || Error::ParseRational(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    match t.split_once('/') {
        None => BigInt::from_str(t).map(Rational::from_integer).map_err(|_| err()),
        Some((n, d)) => {
            let num = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = d.trim();
            let den = if let Some(k) = d.strip_prefix("2^") {
                let k: u32 = k.parse().map_err(|_| err())?;
                BigInt::one() << k
            } else {
                BigInt::from_str(d).map_err(|_| err())?
            };
            if den.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(num, den))
        }
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

/// Rational enclosure `[lo, hi]` of `x^(1/v)` for `x ≥ 0`, of width at most `2^-bits`.
pub fn root_enclosure(x: &Rational, v: u32, bits: u32) -> (Rational, Rational) {
    assert!(v >= 1 && !x.is_negative());
    if v == 1 || x.is_zero() || x.is_one() {
        return (x.clone(), x.clone());
    }
    let mut lo = Rational::zero();
    let mut hi = if x > &Rational::one() { x.clone() } else { Rational::one() };
    let width = pow2(-(bits as i64));
    while &hi - &lo > width {
        let mid: Rational = (&lo + &hi) / int(2);
        if &powi(&mid, v as u64) <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// `x^p` for `x ≥ 0` and rational `p = u/v > 0`, as an enclosure of width ≤ `2^-bits`
/// (exact when `p` is an integer).
pub fn pow_enclosure(x: &Rational, p: &Rational, bits: u32) -> (Rational, Rational) {
    let u = p.numer().to_u64().expect("exponent numerator fits u64");
    let v = p.denom().to_u32().expect("exponent denominator fits u32");
    let base = powi(x, u);
    if v == 1 {
        return (base.clone(), base);
    }
    root_enclosure(&base, v, bits)
}

/// Ceiling of `log₂ n` for `n ≥ 1`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Serde adapter: a [`Rational`] as a `"num/den"` string.
pub mod as_num_den {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_num_den(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod vec_num_den {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&to_num_den(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Serde adapter for `Option<Rational>`.
pub mod opt_num_den {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&to_num_den(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let v = Option::<String>::deserialize(d)?;
        v.map(|s| parse(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse("3/2^2").unwrap(), ratio(3, 4));
        assert_eq!(parse("-1/2").unwrap(), ratio(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn renders() {
        assert_eq!(to_num_den(&int(1)), "1/1");
        assert_eq!(to_dyadic_string(&ratio(3, 8)), "3/2^3");
        assert_eq!(to_dyadic_string(&int(0)), "0");
        assert_eq!(to_dyadic_string(&ratio(1, 3)), "1/3");
    }

    #[test]
    fn dyadic_detection() {
        assert_eq!(dyadic_exponent(&ratio(5, 16)), Some(4));
        assert_eq!(dyadic_exponent(&int(7)), Some(0));
        assert_eq!(dyadic_exponent(&ratio(1, 6)), None);
        assert_eq!(dyadic_floor(&ratio(1, 3), 4), ratio(5, 16));
    }

    #[test]
    fn powers_and_roots() {
        assert_eq!(pow2(-3), ratio(1, 8));
        assert_eq!(powi(&ratio(3, 4), 3), ratio(27, 64));
        let (lo, hi) = root_enclosure(&int(2), 2, 20);
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert!(&hi - &lo <= pow2(-20));
        assert_eq!(floor_log2(9), 3);
        assert_eq!(ceil_log2(9), 4);
        assert_eq!(ceil_log2(8), 3);
    }
}
