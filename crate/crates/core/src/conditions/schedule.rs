use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, pow2, Rational};
use crate::tower::block_of;

/// Tolerance `ε_n` a defect sequence must meet at step `n` for a
/// horizon-bounded "holds" verdict. All schedules decrease to 0 except
/// [`Schedule::Constant`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// `2^{-N}` where `n` lies in the `N`-th block `[n_N, n_{N+1})` of the tower codec.
    Block,
    /// `1/2^{⌊log₂ n⌋}`.
    Dyadic,
    /// `1/⌈log₂(n+2)⌉`.
    InverseLog,
    Constant(#[serde(with = "rational::as_num_den")] Rational),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Block
    }
}

impl Schedule {
    /// Tolerance at step `n` (uses `|n|`; `1` at `n = 0`).
    pub fn at(&self, n: i64) -> Rational {
        let m = n.unsigned_abs();
        match self {
            Schedule::Block => pow2(-(block_of(m as i64) as i64)),
            Schedule::Dyadic if m == 0 => pow2(0),
            Schedule::Dyadic => pow2(-(rational::floor_log2(m) as i64)),
            Schedule::InverseLog => rational::ratio(1, rational::ceil_log2(m + 2) as i64),
            Schedule::Constant(c) => c.clone(),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Block => f.write_str("block"),
            Schedule::Dyadic => f.write_str("dyadic"),
            Schedule::InverseLog => f.write_str("inverse-log"),
            Schedule::Constant(c) => write!(f, "constant:{}", rational::to_num_den(c)),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "block" => Ok(Schedule::Block),
            "dyadic" => Ok(Schedule::Dyadic),
            "inverse-log" => Ok(Schedule::InverseLog),
            other => match other.strip_prefix("constant:") {
                Some(c) => Ok(Schedule::Constant(rational::parse(c)?)),
                None => Err(Error::OutOfRange { name: "schedule", reason: format!("unknown schedule {other:?}") }),
            },
        }
    }
}

/// Steps a horizon verdict is judged on: the upper half `[⌈H/2⌉, H]`.
pub fn tail_window(horizon: i64) -> RangeInclusive<i64> {
    let h = horizon.max(1);
    ((h + 1) / 2).max(1)..=h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn schedules() {
        assert_eq!(Schedule::Block.at(9), ratio(1, 2));
        assert_eq!(Schedule::Block.at(10), ratio(1, 4));
        assert_eq!(Schedule::Block.at(43), ratio(1, 8));
        assert_eq!(Schedule::Block.at(0), ratio(1, 1));
        assert_eq!(Schedule::Dyadic.at(9), ratio(1, 8));
        assert_eq!(Schedule::InverseLog.at(6), ratio(1, 3));
        for s in ["block", "dyadic", "inverse-log", "constant:1/4"] {
            assert_eq!(s.parse::<Schedule>().unwrap().to_string(), s);
        }
        assert!("other".parse::<Schedule>().is_err());
        assert_eq!(tail_window(1), 1..=1);
        assert_eq!(tail_window(10), 5..=10);
        assert_eq!(tail_window(11), 6..=11);
    }
}
