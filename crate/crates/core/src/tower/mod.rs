//! Invertible dissipative systems as integer-indexed towers.
//!
//! A level is addressed by an integer position; `f` moves every level up by one
//! and is the identity on fibers. Densities are computed on demand from the
//! position, so nothing indexed by `ℤ` is ever materialized.

mod address;
mod leveled;
mod system;

pub use address::{block_of, block_start, LevelAddress};
pub use leveled::LeveledSet;
pub use system::{DefaultRule, SystemDescriptor, SystemKind, TowerSystem};

use crate::error::Result;
use crate::rational::Rational;

pub fn bdp_system() -> TowerSystem {
    TowerSystem::bdp()
}

pub fn geometric_system(ratio: Rational) -> Result<TowerSystem> {
    TowerSystem::geometric(ratio)
}

pub fn push(sys: &TowerSystem, s: &LeveledSet, n: i64) -> LeveledSet {
    sys.push(s, n)
}

pub fn measure(sys: &TowerSystem, s: &LeveledSet) -> Rational {
    sys.measure(s)
}
