use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::simple::SimpleFunction;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::tower::TowerSystem;

/// `‖φ‖_p^p = Σ |a|^p μ({φ = a})`, exact for integer `p ≥ 1`.
pub fn lp_norm_p(sys: &TowerSystem, phi: &SimpleFunction, p: u32) -> Result<Rational> {
    if p == 0 {
        return Err(Error::Exponent("p must be >= 1".into()));
    }
    Ok(phi.distribution(sys).iter().map(|(a, m)| rational::powi(&a.abs(), p as u64) * m).sum())
}

/// Enclosure `[lo, hi]` of `‖φ‖_p^p` for rational `p ≥ 1`; exact (`lo = hi`) when
/// `p` is an integer, otherwise of width at most `μ(supp φ)·2^-bits`.
pub fn lp_norm_p_enclosure(sys: &TowerSystem, phi: &SimpleFunction, p: &Rational, bits: u32) -> Result<(Rational, Rational)> {
    if *p < Rational::one() {
        return Err(Error::Exponent(format!("p = {p} must be >= 1")));
    }
    if p.numer().bits() > 32 || p.denom().bits() > 32 {
        return Err(Error::Exponent(format!("p = {p} too large to evaluate")));
    }
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (a, m) in phi.distribution(sys) {
        let (l, h) = rational::pow_enclosure(&a.abs(), p, bits);
        lo += l * &m;
        hi += h * &m;
    }
    Ok((lo, hi))
}

/// `inf_{ξ>0} μ(|φ−ψ| ≥ ξ) + ξ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Frechet {
    #[serde(with = "rational::as_num_den")]
    pub value: Rational,
    /// Whether some `ξ > 0` reaches the infimum.
    pub attained: bool,
}

/// With distinct values `v_1 > … > v_r > 0` of `g = |φ−ψ|` and `M_i = μ(g ≥ v_i)`,
/// `μ(g ≥ ξ) + ξ` equals `M_i + ξ` on `(v_{i+1}, v_i]`, so the infimum is
/// `min_{0 ≤ i ≤ r} (M_i + v_{i+1})` with `M_0 = 0`, `v_{r+1} = 0`.
pub fn frechet(sys: &TowerSystem, phi: &SimpleFunction, psi: &SimpleFunction) -> Frechet {
    let g = phi.sub(psi).abs();
    let dist = g.distribution(sys);
    let values: Vec<(Rational, Rational)> = dist.into_iter().rev().collect(); // descending v
    let mut cum = Rational::zero();
    let mut inf: Option<Rational> = None;
    // value of the objective at each breakpoint ξ = v_i (right end of its interval)
    let mut at_points: Vec<Rational> = Vec::with_capacity(values.len());
    for i in 0..=values.len() {
        let next = values.get(i).map(|(v, _)| v.clone()).unwrap_or_default();
        let cand = &cum + &next;
        if inf.as_ref().is_none_or(|b| &cand < b) {
            inf = Some(cand);
        }
        if let Some((v, m)) = values.get(i) {
            cum += m;
            at_points.push(&cum + v);
        }
    }
    let value = inf.expect("at least one candidate");
    let attained = at_points.iter().any(|x| *x == value);
    Frechet { value, attained }
}

/// `μ(|φ| ≥ t)`.
pub fn measure_at_least(sys: &TowerSystem, phi: &SimpleFunction, t: &Rational) -> Rational {
    phi.abs().distribution(sys).into_iter().filter(|(v, _)| v >= t).map(|(_, m)| m).sum()
}
