use std::fmt;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::certificate::{ksc_failure_certificate, KitaiFailureCertificate, MAX_CERT_BLOCK};
use super::schedule::{tail_window, Schedule};
use super::verdict::{record_lows, Basis, Verdict};
use super::witness::{check_eps, evaluate_triple, fiber_at, greedy_discard, optimal_witness, refine_pieces, WitnessTriple};
use crate::error::{Error, Result};
use crate::measure::{DyadicSet, StepFunction};
use crate::rational::{self, Rational};
use crate::tower::{block_of, LevelAddress, LeveledSet, TowerSystem};
use crate::REPORT_SCHEMA;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    #[serde(rename = "MSC")]
    Msc,
    #[serde(rename = "HSC")]
    Hsc,
    #[serde(rename = "KSC")]
    Ksc,
    #[serde(rename = "GSC")]
    Gsc,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Msc => "MSC",
            Condition::Hsc => "HSC",
            Condition::Ksc => "KSC",
            Condition::Gsc => "GSC",
        })
    }
}

/// Result of one condition checker.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub schema: &'static str,
    pub condition: Condition,
    pub system: String,
    pub level: i64,
    pub horizon: i64,
    pub schedule: String,
    #[serde(with = "rational::opt_num_den", skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Rational>,
    pub triples: Vec<WitnessTriple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsequence: Option<Vec<i64>>,
    /// Tolerance reached by the data: the quantity the verdict compares with `target`.
    #[serde(with = "rational::as_num_den")]
    pub achieved: Rational,
    /// Schedule value at the horizon.
    #[serde(with = "rational::as_num_den")]
    pub target: Rational,
    pub verdict: Verdict,
    pub basis: Basis,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<KitaiFailureCertificate>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    /// `sup_n max(μ(f^{-n}B), μ(f^n B))` over the reported triples.
    pub fn sup_tail(&self) -> Rational {
        self.triples.iter().map(|t| t.defect_back.clone().max(t.defect_fwd.clone())).max().unwrap_or_default()
    }

    /// Defect sequences as CSV rows `n,value_num,value_den,tag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        for t in &self.triples {
            push_csv(&mut out, t.n, &t.defect_a, "defect_a");
            push_csv(&mut out, t.n, &t.defect_back, "defect_back");
            push_csv(&mut out, t.n, &t.defect_fwd, "defect_fwd");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub const CSV_HEADER: &str = "n,value_num,value_den,tag\n";

pub fn push_csv(out: &mut String, n: i64, v: &Rational, tag: &str) {
    let _ = writeln!(out, "{n},{},{},{tag}", v.numer(), v.denom());
}

fn check_horizon(h: i64) -> Result<()> {
    if h < 1 {
        return Err(Error::OutOfRange { name: "horizon", reason: format!("{h} must be >= 1") });
    }
    Ok(())
}

/// Certificate text for systems whose densities do not depend on the level.
fn invariant_failure(sys: &TowerSystem, mu_a: &Rational) -> Option<Basis> {
    (sys.is_shift_invariant() && mu_a.is_positive()).then(|| Basis::Certificate {
        detail: "shift-invariant densities: μ(f^n B) = μ(B) ≥ μ(A) − ε for every n".into(),
    })
}

fn failure_or_inconclusive(sys: &TowerSystem, mu_a: &Rational, horizon: i64) -> (Verdict, Basis) {
    match invariant_failure(sys, mu_a) {
        Some(b) => (Verdict::FailsWithCertificate, b),
        None => (Verdict::Inconclusive, Basis::Evidence { horizon }),
    }
}

fn msc_triples(sys: &TowerSystem, m: i64, a: &LeveledSet, horizon: i64, schedule: &Schedule) -> Result<Vec<WitnessTriple>> {
    (1..=horizon).into_par_iter().map(|n| optimal_witness(sys, m, a, n, &schedule.at(n))).collect()
}

fn base(condition: Condition, sys: &TowerSystem, m: i64, horizon: i64, schedule: &Schedule) -> ConditionReport {
    ConditionReport {
        schema: REPORT_SCHEMA,
        condition,
        system: sys.name().to_string(),
        level: m,
        horizon,
        schedule: schedule.to_string(),
        epsilon: None,
        triples: Vec::new(),
        subsequence: None,
        achieved: Rational::zero(),
        target: schedule.at(horizon),
        verdict: Verdict::Inconclusive,
        basis: Basis::Evidence { horizon },
        certificate: None,
        notes: Vec::new(),
    }
}

/// Per-`n` optimal witnesses at `ε_n = schedule(n)`; holds iff every defect
/// stays within the schedule for all `n ≤ H`.
pub fn check_msc(sys: &TowerSystem, m: i64, a: &LeveledSet, horizon: i64, schedule: &Schedule) -> Result<ConditionReport> {
    check_horizon(horizon)?;
    let triples = msc_triples(sys, m, a, horizon, schedule)?;
    let mut r = base(Condition::Msc, sys, m, horizon, schedule);
    let within = triples.iter().all(|t| t.max_defect() <= schedule.at(t.n));
    r.achieved = triples.iter().filter(|t| tail_window(horizon).contains(&t.n)).map(|t| t.max_defect()).max().unwrap_or_default();
    if within {
        r.verdict = Verdict::HoldsToHorizon;
    } else {
        (r.verdict, r.basis) = failure_or_inconclusive(sys, &sys.measure(a), horizon);
    }
    r.triples = triples;
    Ok(r)
}

/// Records of the per-`n` optimal max-defect form the subsequence `n_k`;
/// holds iff there are at least two and the last is within `schedule(H)`.
pub fn check_hsc(sys: &TowerSystem, m: i64, a: &LeveledSet, horizon: i64, schedule: &Schedule) -> Result<ConditionReport> {
    check_horizon(horizon)?;
    let triples = msc_triples(sys, m, a, horizon, schedule)?;
    let maxes: Vec<Rational> = triples.iter().map(|t| t.max_defect()).collect();
    let recs = record_lows(&maxes);
    let mut r = base(Condition::Hsc, sys, m, horizon, schedule);
    r.achieved = recs.last().map(|&i| maxes[i].clone()).unwrap_or_default();
    if recs.len() >= 2 && r.achieved <= r.target {
        r.verdict = Verdict::HoldsToHorizon;
    } else {
        (r.verdict, r.basis) = failure_or_inconclusive(sys, &sys.measure(a), horizon);
    }
    r.subsequence = Some(recs.iter().map(|&i| triples[i].n).collect());
    r.triples = recs.iter().map(|&i| triples[i].clone()).collect();
    Ok(r)
}

/// Pointwise max of the densities at `m + n`, `1 ≤ |n| ≤ H`.
pub fn window_max_density(sys: &TowerSystem, m: i64, horizon: i64) -> StepFunction {
    (m - horizon..=m + horizon)
        .into_par_iter()
        .filter(|&p| p != m)
        .map(|p| sys.density(p))
        .reduce_with(|x, y| x.pointwise_max(&y))
        .unwrap_or_else(|| sys.density(m))
}

/// A single `B ⊆ A` with `μ(A∖B) ≤ ε`, discarding where the largest shifted
/// density over the window is heaviest relative to `d_m`.
pub fn single_witness(sys: &TowerSystem, m: i64, a: &LeveledSet, eps: &Rational, horizon: i64) -> Result<DyadicSet> {
    check_eps(eps)?;
    let fiber = fiber_at(a, m)?;
    let cost = window_max_density(sys, m, horizon);
    let pieces = refine_pieces(&fiber, &sys.density(m), &[&cost], |x| cost.value_at(x).clone());
    Ok(fiber.difference(&greedy_discard(pieces, eps)))
}

fn single_b_triples(sys: &TowerSystem, m: i64, fiber: &DyadicSet, b: &DyadicSet, horizon: i64) -> Vec<WitnessTriple> {
    (1..=horizon).into_par_iter().map(|n| evaluate_triple(sys, m, fiber, b, n)).collect()
}

/// Searches one witness `B` for all `n ≤ H` at once; the achieved value is
/// `sup_{n ≤ H} max(μ(f^{-n}B), μ(f^n B))`.
pub fn check_ksc(sys: &TowerSystem, m: i64, a: &LeveledSet, eps: &Rational, horizon: i64, schedule: &Schedule) -> Result<ConditionReport> {
    check_horizon(horizon)?;
    let fiber = fiber_at(a, m)?;
    let b = single_witness(sys, m, a, eps, horizon)?;
    let mut r = base(Condition::Ksc, sys, m, horizon, schedule);
    r.epsilon = Some(eps.clone());
    r.triples = single_b_triples(sys, m, &fiber, &b, horizon);
    r.achieved = r.sup_tail();
    let tail_max = r
        .triples
        .iter()
        .filter(|t| tail_window(horizon).contains(&t.n))
        .map(|t| t.defect_back.clone().max(t.defect_fwd.clone()))
        .max()
        .unwrap_or_default();
    let floor = &fiber.lebesgue() - eps / sys.density(m).max_value();
    if floor.is_positive() {
        r.notes.push(format!(
            "every B ⊆ A with μ(A∖B) ≤ ε has fiber measure ≥ {}",
            rational::to_num_den(&floor)
        ));
    }
    if tail_max <= r.target {
        r.verdict = Verdict::HoldsToHorizon;
    } else if sys.is_bdp() && m == 0 {
        let n_max = block_of(horizon).clamp(1, MAX_CERT_BLOCK);
        let cert = ksc_failure_certificate(sys, &LeveledSet::single(0, b.clone()), n_max)?;
        if cert.verified && cert.lambda_c.is_positive() {
            r.verdict = Verdict::FailsWithCertificate;
            r.basis = Basis::Certificate { detail: format!("pigeonhole chain along K_n, n ≤ {n_max}") };
        }
        r.certificate = Some(cert);
    } else {
        (r.verdict, r.basis) = failure_or_inconclusive(sys, &sys.measure(a), horizon);
    }
    Ok(r)
}

/// Single witness `B` plus the greedy subsequence: from `n = 1`, step to the
/// smallest later `n` where both tails are strictly smaller.
pub fn grc_witness(sys: &TowerSystem, m: i64, a: &LeveledSet, eps: &Rational, horizon: i64, schedule: &Schedule) -> Result<ConditionReport> {
    check_horizon(horizon)?;
    let fiber = fiber_at(a, m)?;
    let b = single_witness(sys, m, a, eps, horizon)?;
    let all = single_b_triples(sys, m, &fiber, &b, horizon);
    let mut picked: Vec<usize> = vec![0];
    for (i, t) in all.iter().enumerate().skip(1) {
        let last = &all[*picked.last().expect("non-empty")];
        if t.defect_back < last.defect_back && t.defect_fwd < last.defect_fwd {
            picked.push(i);
        }
    }
    let mut r = base(Condition::Gsc, sys, m, horizon, schedule);
    r.epsilon = Some(eps.clone());
    let last = &all[*picked.last().expect("non-empty")];
    r.achieved = last.defect_back.clone().max(last.defect_fwd.clone());
    if picked.len() >= 2 && r.achieved <= r.target {
        r.verdict = Verdict::HoldsToHorizon;
    } else {
        (r.verdict, r.basis) = failure_or_inconclusive(sys, &sys.measure(a), horizon);
    }
    r.subsequence = Some(picked.iter().map(|&i| all[i].n).collect());
    r.triples = picked.iter().map(|&i| all[i].clone()).collect();
    Ok(r)
}

/// Orbit measures of the wandering set.
#[derive(Clone, Debug, Serialize)]
pub struct KitaiGeneratorReport {
    pub schema: &'static str,
    pub system: String,
    pub horizon: i64,
    pub schedule: String,
    /// `μ(f^n(W))`, `n = 0..=H`
    #[serde(with = "rational::vec_num_den")]
    pub forward: Vec<Rational>,
    /// `μ(f^{-n}(W))`, `n = 0..=H`
    #[serde(with = "rational::vec_num_den")]
    pub backward: Vec<Rational>,
    /// `{1 ≤ n ≤ H : μ(f^n(W)) ≥ 1}`
    pub exceptional: Vec<i64>,
    #[serde(with = "rational::as_num_den")]
    pub achieved: Rational,
    #[serde(with = "rational::as_num_den")]
    pub target: Rational,
    pub verdict: Verdict,
    pub basis: Basis,
}

impl KitaiGeneratorReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        for (n, v) in self.forward.iter().enumerate() {
            push_csv(&mut out, n as i64, v, "mu_fwd");
        }
        for (n, v) in self.backward.iter().enumerate() {
            push_csv(&mut out, -(n as i64), v, "mu_back");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `μ(f^{K}W) ≥ 1` at `K = position of I_{n,1}^{2n}` for each block up to `N`.
pub fn bdp_generator_certificate(sys: &TowerSystem, big_n: u32) -> Result<Vec<(i64, Rational)>> {
    (1..=big_n.max(1))
        .map(|n| {
            let k = LevelAddress::Detour { n, j: 1, l: 2 * n }.position()?;
            Ok((k, sys.level_measure(k)))
        })
        .collect()
}

/// Exact `μ(f^{±n}W)` for `n ≤ H`; holds iff both tails are within `schedule(H)`
/// over the window `[⌈H/2⌉, H]`.
pub fn kitai_generator_check(sys: &TowerSystem, horizon: i64, schedule: &Schedule) -> Result<KitaiGeneratorReport> {
    check_horizon(horizon)?;
    let w = sys.wandering_position();
    let forward: Vec<Rational> = (0..=horizon).into_par_iter().map(|n| sys.level_measure(w + n)).collect();
    let backward: Vec<Rational> = (0..=horizon).into_par_iter().map(|n| sys.level_measure(w - n)).collect();
    let exceptional = (1..=horizon).filter(|&n| forward[n as usize] >= Rational::one()).collect();
    let achieved = tail_window(horizon)
        .map(|n| forward[n as usize].clone().max(backward[n as usize].clone()))
        .max()
        .unwrap_or_default();
    let target = schedule.at(horizon);
    let (verdict, basis) = if achieved <= target {
        (Verdict::HoldsToHorizon, Basis::Evidence { horizon })
    } else if sys.is_bdp() {
        let big_n = block_of(horizon).clamp(1, MAX_CERT_BLOCK);
        let chain = bdp_generator_certificate(sys, big_n)?;
        if chain.iter().all(|(_, v)| *v >= Rational::one()) {
            (
                Verdict::FailsWithCertificate,
                Basis::Certificate { detail: format!("μ(f^K W) = (4^n + 2^n − 1)/4^n ≥ 1 at K = pos(I_{{n,1}}^{{2n}}), checked n ≤ {big_n}") },
            )
        } else {
            (Verdict::Inconclusive, Basis::Evidence { horizon })
        }
    } else {
        failure_or_inconclusive(sys, &forward[0], horizon)
    };
    Ok(KitaiGeneratorReport {
        schema: REPORT_SCHEMA,
        system: sys.name().to_string(),
        horizon,
        schedule: schedule.to_string(),
        forward,
        backward,
        exceptional,
        achieved,
        target,
        verdict,
        basis,
    })
}
