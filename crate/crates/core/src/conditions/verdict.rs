use std::fmt;

use serde::Serialize;

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsToHorizon,
    FailsWithCertificate,
    Inconclusive,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::HoldsToHorizon
    }

    pub fn fails(self) -> bool {
        self == Verdict::FailsWithCertificate
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsToHorizon => "holds-to-horizon",
            Verdict::FailsWithCertificate => "fails-with-certificate",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// What a verdict rests on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Basis {
    /// Finite data up to `horizon` compared against a tolerance schedule.
    Evidence { horizon: i64 },
    /// Exact limit known for a built-in system.
    ClosedForm { system: String },
    /// An unconditional chain of exact inequalities.
    Certificate { detail: String },
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Evidence { horizon } => write!(f, "evidence at horizon {horizon}"),
            Basis::ClosedForm { system } => write!(f, "closed form ({system})"),
            Basis::Certificate { detail } => write!(f, "certificate ({detail})"),
        }
    }
}

/// Indices where `values` reaches a new strict minimum, starting at the first entry.
pub fn record_lows(values: &[Rational]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        if out.last().is_none_or(|&k| v < &values[k]) {
            out.push(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn records() {
        let v: Vec<Rational> = [5, 3, 3, 4, 1, 2].iter().map(|&x| int(x)).collect();
        assert_eq!(record_lows(&v), vec![0, 1, 4]);
        assert!(record_lows(&[]).is_empty());
        assert_eq!(Verdict::FailsWithCertificate.to_string(), "fails-with-certificate");
        assert_eq!(serde_json::to_string(&Verdict::HoldsToHorizon).unwrap(), "\"holds-to-horizon\"");
    }
}
