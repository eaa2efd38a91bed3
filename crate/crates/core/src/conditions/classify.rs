use std::fmt;

use serde::Serialize;

use super::checks::{check_hsc, check_ksc, check_msc, grc_witness, kitai_generator_check, Condition, ConditionReport};
use super::schedule::Schedule;
use super::verdict::{Basis, Verdict};
use crate::error::Result;
use crate::rational::{self, ratio, Rational};
use crate::tower::{LeveledSet, SystemKind, TowerSystem};
use crate::REPORT_SCHEMA;

/// Dynamical properties of `T_f`, weakest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Recurrent,
    Hypercyclic,
    WeaklyMixing,
    Mixing,
    Kitai,
}

impl Property {
    pub const ALL: [Property; 5] =
        [Property::Recurrent, Property::Hypercyclic, Property::WeaklyMixing, Property::Mixing, Property::Kitai];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Recurrent => "recurrent",
            Property::Hypercyclic => "hypercyclic",
            Property::WeaklyMixing => "weakly-mixing",
            Property::Mixing => "mixing",
            Property::Kitai => "kitai",
        })
    }
}

/// Known truth values of the four shift-like conditions for a built-in system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub msc: bool,
    pub hsc: bool,
    pub ksc: bool,
    pub gsc: bool,
}

impl ClosedForm {
    fn get(&self, c: Condition) -> bool {
        match c {
            Condition::Msc => self.msc,
            Condition::Hsc => self.hsc,
            Condition::Ksc => self.ksc,
            Condition::Gsc => self.gsc,
        }
    }
}

/// Closed-form evaluator for the named built-in systems.
pub fn closed_form(sys: &TowerSystem) -> Option<ClosedForm> {
    match sys.kind() {
        SystemKind::Bdp => Some(ClosedForm { msc: true, hsc: true, ksc: false, gsc: true }),
        SystemKind::Geometric { .. } => Some(ClosedForm { msc: true, hsc: true, ksc: true, gsc: true }),
        _ if sys.is_shift_invariant() => Some(ClosedForm { msc: false, hsc: false, ksc: false, gsc: false }),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionSummary {
    pub condition: Condition,
    pub verdict: Verdict,
    pub basis: Basis,
    /// What the finite data alone gave.
    pub evidence_verdict: Verdict,
    #[serde(with = "rational::as_num_den")]
    pub achieved: Rational,
    #[serde(with = "rational::as_num_den")]
    pub target: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsequence: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Label {
    pub property: Property,
    pub verdict: Verdict,
    pub basis: Basis,
    pub source: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsReport {
    pub schema: &'static str,
    pub system: String,
    pub horizon: i64,
    pub schedule: String,
    #[serde(with = "rational::as_num_den")]
    pub epsilon: Rational,
    pub conditions: Vec<ConditionSummary>,
    pub generator_verdict: Verdict,
    pub exceptional: Vec<i64>,
    pub labels: Vec<Label>,
}

impl DynamicsReport {
    pub fn label(&self, p: Property) -> &Label {
        self.labels.iter().find(|l| l.property == p).expect("every property labelled")
    }

    pub fn condition(&self, c: Condition) -> &ConditionSummary {
        self.conditions.iter().find(|s| s.condition == c).expect("every condition checked")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn summarize(sys: &TowerSystem, r: &ConditionReport, cf: Option<ClosedForm>) -> ConditionSummary {
    let (verdict, basis) = match cf {
        Some(cf) if cf.get(r.condition) => (Verdict::HoldsToHorizon, Basis::ClosedForm { system: sys.name().to_string() }),
        Some(_) if r.verdict.fails() => (r.verdict, r.basis.clone()),
        Some(_) => (Verdict::FailsWithCertificate, Basis::ClosedForm { system: sys.name().to_string() }),
        None => (r.verdict, r.basis.clone()),
    };
    ConditionSummary {
        condition: r.condition,
        verdict,
        basis,
        evidence_verdict: r.verdict,
        achieved: r.achieved.clone(),
        target: r.target.clone(),
        subsequence: r.subsequence.clone(),
    }
}

/// [`classify_with`] using the block schedule and `ε = 1/4`.
pub fn classify(sys: &TowerSystem, horizon: i64) -> Result<DynamicsReport> {
    classify_with(sys, horizon, &Schedule::Block, &ratio(1, 4))
}

/// Runs every checker on `A = W` and maps verdicts to labels:
/// MSC to mixing, HSC to hypercyclic and recurrent, GSC to weak mixing, KSC to
/// Kitai. Labels are then closed under the implication chain
/// Kitai ⇒ mixing ⇒ weak mixing ⇒ hypercyclic ⇒ recurrent (holds propagate
/// down the chain, failures up).
pub fn classify_with(sys: &TowerSystem, horizon: i64, schedule: &Schedule, eps: &Rational) -> Result<DynamicsReport> {
    let w = LeveledSet::single(sys.wandering_position(), crate::DyadicSet::unit());
    let m = sys.wandering_position();
    let cf = closed_form(sys);
    let reports = [
        check_msc(sys, m, &w, horizon, schedule)?,
        check_hsc(sys, m, &w, horizon, schedule)?,
        check_ksc(sys, m, &w, eps, horizon, schedule)?,
        grc_witness(sys, m, &w, eps, horizon, schedule)?,
    ];
    let conditions: Vec<ConditionSummary> = reports.iter().map(|r| summarize(sys, r, cf)).collect();
    let gen = kitai_generator_check(sys, horizon, schedule)?;
    let labels = derive_labels(&conditions);
    Ok(DynamicsReport {
        schema: REPORT_SCHEMA,
        system: sys.name().to_string(),
        horizon,
        schedule: schedule.to_string(),
        epsilon: eps.clone(),
        conditions,
        generator_verdict: gen.verdict,
        exceptional: gen.exceptional,
        labels,
    })
}

fn derive_labels(conds: &[ConditionSummary]) -> Vec<Label> {
    let find = |c: Condition| conds.iter().find(|s| s.condition == c).expect("condition present");
    let from = |p: Property, s: &ConditionSummary| Label { property: p, verdict: s.verdict, basis: s.basis.clone(), source: s.condition.to_string() };
    let (msc, hsc, ksc, gsc) = (find(Condition::Msc), find(Condition::Hsc), find(Condition::Ksc), find(Condition::Gsc));

    let mut labels = vec![
        if hsc.verdict.holds() { from(Property::Recurrent, hsc) } else { inconclusive(Property::Recurrent, hsc) },
        from(Property::Hypercyclic, hsc),
        if gsc.verdict.holds() || hsc.verdict.fails() { from(Property::WeaklyMixing, gsc) } else { inconclusive(Property::WeaklyMixing, gsc) },
        from(Property::Mixing, msc),
        from(Property::Kitai, ksc),
    ];
    if hsc.verdict.fails() {
        labels[2] = from(Property::WeaklyMixing, hsc);
    }
    // Holds propagate to weaker properties, failures to stronger ones.
    for i in (0..labels.len() - 1).rev() {
        if labels[i + 1].verdict.holds() && !labels[i].verdict.holds() {
            labels[i] = implied(labels[i].property, &labels[i + 1]);
        }
    }
    for i in 1..labels.len() {
        if labels[i - 1].verdict.fails() && !labels[i].verdict.fails() {
            labels[i] = implied(labels[i].property, &labels[i - 1]);
        }
    }
    labels
}

fn inconclusive(p: Property, s: &ConditionSummary) -> Label {
    Label { property: p, verdict: Verdict::Inconclusive, basis: s.basis.clone(), source: format!("{} (no implication)", s.condition) }
}

fn implied(p: Property, by: &Label) -> Label {
    Label { property: p, verdict: by.verdict, basis: by.basis.clone(), source: format!("implied by {}", by.property) }
}
