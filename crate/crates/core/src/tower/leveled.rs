use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DyadicSet, SetOp};

/// Finite-measure subset of a tower: a fiber set per level position.
/// Empty fiber sets are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, DyadicSet>", into = "BTreeMap<String, DyadicSet>")]
pub struct LeveledSet {
    parts: BTreeMap<i64, DyadicSet>,
}

impl LeveledSet {
    pub fn empty() -> Self {
        LeveledSet::default()
    }

    pub fn single(position: i64, fiber: DyadicSet) -> Self {
        let mut s = LeveledSet::default();
        s.insert(position, fiber);
        s
    }

    /// The wandering set `W`: the full fiber at position 0.
    pub fn wandering() -> Self {
        LeveledSet::single(0, DyadicSet::unit())
    }

    /// Unions `fiber` into the part at `position`.
    pub fn insert(&mut self, position: i64, fiber: DyadicSet) {
        if fiber.is_empty() {
            return;
        }
        let merged = match self.parts.remove(&position) {
            Some(old) => old.union(&fiber),
            None => fiber,
        };
        self.parts.insert(position, merged);
    }

    pub fn parts(&self) -> &BTreeMap<i64, DyadicSet> {
        &self.parts
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &DyadicSet)> {
        self.parts.iter().map(|(p, s)| (*p, s))
    }

    pub fn get(&self, position: i64) -> Option<&DyadicSet> {
        self.parts.get(&position)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `f^n` applied to the set: every part moves from `p` to `p + n`.
    pub fn push(&self, n: i64) -> LeveledSet {
        LeveledSet { parts: self.parts.iter().map(|(p, s)| (p + n, s.clone())).collect() }
    }

    pub fn combine(&self, other: &LeveledSet, op: SetOp) -> LeveledSet {
        let mut out = LeveledSet::default();
        let empty = DyadicSet::empty();
        let keys: std::collections::BTreeSet<i64> = self.parts.keys().chain(other.parts.keys()).copied().collect();
        for k in keys {
            let a = self.parts.get(&k).unwrap_or(&empty);
            let b = other.parts.get(&k).unwrap_or(&empty);
            out.insert(k, a.combine(b, op));
        }
        out
    }

    pub fn union(&self, other: &LeveledSet) -> LeveledSet {
        self.combine(other, SetOp::Union)
    }

    pub fn intersect(&self, other: &LeveledSet) -> LeveledSet {
        self.combine(other, SetOp::Intersect)
    }

    pub fn difference(&self, other: &LeveledSet) -> LeveledSet {
        self.combine(other, SetOp::Difference)
    }

    pub fn is_subset(&self, other: &LeveledSet) -> bool {
        self.difference(other).is_empty()
    }

    /// The single level supporting the set, if there is exactly one.
    pub fn single_level(&self) -> Option<(i64, &DyadicSet)> {
        if self.parts.len() == 1 {
            self.iter().next()
        } else {
            None
        }
    }

    /// Parses the JSON object form `{"3": "0:1/2", "-1": "1/4:1"}`.
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::ParseSet(format!("{s}: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("string map serializes")
    }
}

impl TryFrom<BTreeMap<String, DyadicSet>> for LeveledSet {
    type Error = Error;

    fn try_from(m: BTreeMap<String, DyadicSet>) -> Result<Self> {
        let mut out = LeveledSet::default();
        for (k, v) in m {
            let p: i64 = k.trim().parse().map_err(|_| Error::ParseSet(format!("level key {k:?}")))?;
            out.insert(p, v);
        }
        Ok(out)
    }
}

impl From<LeveledSet> for BTreeMap<String, DyadicSet> {
    fn from(s: LeveledSet) -> Self {
        s.parts.into_iter().map(|(p, v)| (p.to_string(), v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_examples() {
        let w = LeveledSet::wandering();
        assert_eq!(w.push(1), LeveledSet::single(1, DyadicSet::unit()));
        assert_eq!(w.push(0), w);
        assert_eq!(w.push(5).push(-5), w);
        assert_eq!(w.push(3).push(4), w.push(7));
    }

    #[test]
    fn json_form() {
        let s = LeveledSet::from_json(r#"{"3":"0:1/2","-1":"1/4:1","7":""}"#).unwrap();
        assert_eq!(s.parts().len(), 2);
        assert_eq!(s.get(3).unwrap().to_string(), "0:1/2^1");
        let back = LeveledSet::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(LeveledSet::from_json(r#"{"x":"0:1"}"#).is_err());
        assert!(LeveledSet::from_json(r#"{"0":"0:1/3"}"#).is_err());
    }

    #[test]
    fn set_ops_per_level() {
        let a = LeveledSet::from_json(r#"{"0":"0:1/2","1":"0:1"}"#).unwrap();
        let b = LeveledSet::from_json(r#"{"0":"1/4:1"}"#).unwrap();
        assert_eq!(a.intersect(&b), LeveledSet::from_json(r#"{"0":"1/4:1/2"}"#).unwrap());
        assert_eq!(a.difference(&b), LeveledSet::from_json(r#"{"0":"0:1/4","1":"0:1"}"#).unwrap());
        assert!(a.intersect(&b).is_subset(&a));
        assert!(a.single_level().is_none());
        assert_eq!(b.single_level().unwrap().0, 0);
    }
}
