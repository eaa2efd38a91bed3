use num_traits::One;
use serde::Serialize;

use super::norms::NormSeq;
use super::weights::{ShiftKind, WeightSeq, WeightSource};
use crate::conditions::{record_lows, tail_window, Basis, Schedule, Verdict};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::tower::{block_of, LevelAddress};
use crate::REPORT_SCHEMA;

/// Hypothesis on the ambient sequence space that the coordinate-norm criteria rely on.
pub const SPACE_ASSUMPTION: &str =
    "assumed: the space satisfies min(|x_n|, ‖e_n‖) → 0 coordinatewise for every x (not checkable from norm data)";

/// Positions of the levels `I_{n,j}^{2n}` up to `h`, from the codec alone.
pub fn bdp_exceptional_positions(h: i64) -> Vec<i64> {
    let mut out = Vec::new();
    for n in 1..=block_of(h).max(1) {
        for j in 1..=(1u64 << n) {
            match (LevelAddress::Detour { n, j, l: 2 * n }).position() {
                Ok(p) if p <= h => out.push(p),
                _ => break,
            }
        }
    }
    out
}

fn check_horizon(h: i64) -> Result<()> {
    if h < 1 {
        return Err(Error::OutOfRange { name: "horizon", reason: format!("{h} must be >= 1") });
    }
    Ok(())
}

fn records_high(values: &[Rational]) -> Vec<usize> {
    let neg: Vec<Rational> = values.iter().map(|v| -v).collect();
    record_lows(&neg)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    pub schema: &'static str,
    pub p: String,
    pub horizon: i64,
    /// `∏_{j=1}^{k} w_j^p`, `k = 1..=H`
    #[serde(with = "rational::vec_num_den")]
    pub forward: Vec<Rational>,
    /// `∏_{j=-k+1}^{0} w_j^{-p}`, `k = 1..=H`
    #[serde(with = "rational::vec_num_den")]
    pub backward: Vec<Rational>,
    /// `{k ≤ H : ∏_{j=1}^{k} w_j ≤ 1}`
    pub at_most_one: Vec<i64>,
    pub pattern: Option<String>,
    pub mixing: Verdict,
    pub mixing_basis: Basis,
    pub hypercyclic: Verdict,
    pub hypercyclic_basis: Basis,
    /// Record highs of `min(forward, backward)`.
    pub hypercyclic_subsequence: Vec<i64>,
}

/// Product criterion for a bilateral weighted backward shift: mixing iff both
/// products tend to infinity, hypercyclic iff they do along a common subsequence.
pub fn product_criterion(ws: &WeightSeq, horizon: i64, schedule: &Schedule) -> Result<ProductReport> {
    check_horizon(horizon)?;
    if ws.kind() != ShiftKind::Bilateral {
        return Err(Error::OutOfRange { name: "kind", reason: "product criterion needs bilateral weights".into() });
    }
    let forward = ws.forward_products(horizon);
    let backward = ws.backward_products(horizon);
    let one = Rational::one();
    let at_most_one: Vec<i64> = (1..=horizon).filter(|&k| forward[k as usize - 1] <= one).collect();
    let both: Vec<Rational> = forward.iter().zip(&backward).map(|(f, b)| f.clone().min(b.clone())).collect();
    let threshold = schedule.at(horizon).recip();
    let recs = records_high(&both);
    let hypercyclic_subsequence: Vec<i64> = recs.iter().map(|&i| i as i64 + 1).collect();
    let tail_min = tail_window(horizon).map(|k| both[k as usize - 1].clone()).min().unwrap_or_default();

    let bounded = bounded_pattern(ws);
    let bdp_d = matches!(ws.source(), WeightSource::System(s) if s.is_bdp())
        && at_most_one.len() >= 3
        && at_most_one == bdp_exceptional_positions(horizon);
    let pattern = if bdp_d {
        Some("D = positions of I_{n,j}^{2n}; ∏ w_j^p = μ(W)/μ(f^k W) ≤ 1 there for every block".to_string())
    } else {
        bounded.clone()
    };
    let ev = Basis::Evidence { horizon };
    let (mixing, mixing_basis) = if tail_min >= threshold {
        (Verdict::HoldsToHorizon, ev.clone())
    } else if let Some(pat) = pattern.clone().filter(|_| at_most_one.len() >= 3) {
        (Verdict::FailsWithCertificate, Basis::Certificate { detail: pat })
    } else {
        (Verdict::Inconclusive, ev.clone())
    };
    let last = recs.last().map(|&i| both[i].clone()).unwrap_or_default();
    let (hypercyclic, hypercyclic_basis) = if recs.len() >= 2 && last >= threshold {
        (Verdict::HoldsToHorizon, ev.clone())
    } else if let Some(pat) = bounded {
        (Verdict::FailsWithCertificate, Basis::Certificate { detail: pat })
    } else {
        (Verdict::Inconclusive, ev)
    };
    Ok(ProductReport {
        schema: REPORT_SCHEMA,
        p: rational::to_num_den(ws.p()),
        horizon,
        forward,
        backward,
        at_most_one,
        pattern,
        mixing,
        mixing_basis,
        hypercyclic,
        hypercyclic_basis,
        hypercyclic_subsequence,
    })
}

/// Periodic weights whose period product is 1 keep every partial product in a
/// fixed bounded range, so no subsequence of products diverges.
fn bounded_pattern(ws: &WeightSeq) -> Option<String> {
    let period: Vec<Rational> = match ws.source() {
        WeightSource::Constant(c) => vec![c.clone()],
        WeightSource::Periodic(v) => v.clone(),
        _ => return None,
    };
    let prod: Rational = period.iter().product();
    prod.is_one().then(|| format!("periodic weights (period {}) with period product 1: partial products bounded", period.len()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftVerdicts {
    pub schema: &'static str,
    pub kind: ShiftKind,
    pub j: i64,
    pub horizon: i64,
    /// The compared quantity for `n = 1..=H`: `max_{|j|≤J} max(‖e_{j-n}‖^p, ‖e_{j+n}‖^p)`
    /// (bilateral) or `‖e_n‖^p` (unilateral).
    #[serde(with = "rational::vec_num_den")]
    pub values: Vec<Rational>,
    #[serde(with = "rational::as_num_den")]
    pub target: Rational,
    pub hypercyclic: Verdict,
    pub hypercyclic_basis: Basis,
    pub subsequence: Vec<i64>,
    pub mixing: Verdict,
    pub mixing_basis: Basis,
    /// Steps where the compared quantity does not drop below its value at `n = 0`.
    pub obstruction: Vec<i64>,
    pub assumption: &'static str,
}

fn bdp_certificate(ns: &NormSeq, j: i64, obstruction: &[i64], horizon: i64) -> Option<Basis> {
    let is_bdp = ns.system().is_some_and(|s| s.is_bdp());
    (is_bdp && j == 0 && obstruction.len() >= 3 && obstruction == bdp_exceptional_positions(horizon)).then(|| Basis::Certificate {
        detail: "obstruction is D: ‖e_K‖^p = μ(f^K W) ≥ 1 at K = pos(I_{n,j}^{2n}) in every block".into(),
    })
}

fn floor_certificate(ns: &NormSeq) -> Option<Basis> {
    ns.uniform_floor().map(|f| Basis::Certificate { detail: format!("‖e_n‖^p ≥ {} for every n", rational::to_num_den(&f)) })
}

fn verdicts(
    ns: &NormSeq,
    j: i64,
    horizon: i64,
    schedule: &Schedule,
    at_zero: Rational,
    values: Vec<Rational>,
) -> ShiftVerdicts {
    let target = schedule.at(horizon);
    let ev = Basis::Evidence { horizon };
    let recs = record_lows(&values);
    let subsequence: Vec<i64> = recs.iter().map(|&i| i as i64 + 1).collect();
    let last = recs.last().map(|&i| values[i].clone()).unwrap_or_default();
    let obstruction: Vec<i64> = (1..=horizon).filter(|&n| values[n as usize - 1] >= at_zero).collect();
    let tail_max = tail_window(horizon).map(|n| values[n as usize - 1].clone()).max().unwrap_or_default();

    let floor = floor_certificate(ns);
    let (hypercyclic, hypercyclic_basis) = if recs.len() >= 2 && last <= target {
        (Verdict::HoldsToHorizon, ev.clone())
    } else if let Some(b) = floor.clone() {
        (Verdict::FailsWithCertificate, b)
    } else {
        (Verdict::Inconclusive, ev.clone())
    };
    let (mixing, mixing_basis) = if tail_max <= target {
        (Verdict::HoldsToHorizon, ev.clone())
    } else if let Some(b) = floor.or_else(|| bdp_certificate(ns, j, &obstruction, horizon)) {
        (Verdict::FailsWithCertificate, b)
    } else {
        (Verdict::Inconclusive, ev)
    };
    ShiftVerdicts {
        schema: REPORT_SCHEMA,
        kind: ns.kind(),
        j,
        horizon,
        values,
        target,
        hypercyclic,
        hypercyclic_basis,
        subsequence,
        mixing,
        mixing_basis,
        obstruction,
        assumption: SPACE_ASSUMPTION,
    }
}

/// Bilateral criterion on `M(n) = max_{|j|≤J} max(‖e_{j-n}‖^p, ‖e_{j+n}‖^p)`:
/// hypercyclic evidence from record lows of `M` reaching `schedule(H)`,
/// mixing evidence from `M` staying within `schedule(H)` on `[⌈H/2⌉, H]`.
/// Tolerances are compared with `p`-th powers.
pub fn classify_bilateral(ns: &NormSeq, j: i64, horizon: i64, schedule: &Schedule) -> Result<ShiftVerdicts> {
    check_horizon(horizon)?;
    if j < 0 {
        return Err(Error::OutOfRange { name: "J", reason: format!("{j} must be >= 0") });
    }
    let off = horizon + j;
    let e = ns.values(-off..=off);
    let at = |n: i64| &e[(n + off) as usize];
    let m = |n: i64| (-j..=j).map(|i| at(i - n).clone().max(at(i + n).clone())).max().expect("non-empty");
    let values: Vec<Rational> = (1..=horizon).map(m).collect();
    Ok(verdicts(ns, j, horizon, schedule, m(0), values))
}

/// Unilateral criterion on `‖e_n‖^p`, `n ≥ 1`: only `j = 0` matters.
pub fn classify_unilateral(ns: &NormSeq, horizon: i64, schedule: &Schedule) -> Result<ShiftVerdicts> {
    check_horizon(horizon)?;
    let values = ns.values(1..=horizon);
    let at_zero = values.iter().max().cloned().unwrap_or_default();
    Ok(verdicts(ns, 0, horizon, schedule, at_zero, values))
}

/// Kitai verdict for the induced shift: `‖e_n‖^p → 0` as `n → ±∞`.
pub fn shift_kitai(ns: &NormSeq, horizon: i64, schedule: &Schedule) -> Result<(Verdict, Basis)> {
    let v = classify_bilateral(ns, 0, horizon, schedule)?;
    Ok((v.mixing, v.mixing_basis))
}
