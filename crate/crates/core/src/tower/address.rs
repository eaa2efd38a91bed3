use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A level of the mixing/non-Kitai tower: either a base level `I_n` or a detour
/// level `I_{n,j}^l` (`n ≥ 1`, `1 ≤ j ≤ 2^n`, `1 ≤ l ≤ 4n`) inserted between
/// `I_n` and `I_{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LevelAddress {
    Base(i64),
    Detour { n: u32, j: u64, l: u32 },
}

/// Largest block index whose start position fits comfortably in `i64`.
const MAX_BLOCK: u32 = 55;

/// Position of `I_N`: `n_0 = 0`, `n_{N+1} = n_N + 2^N·4N + 1`.
pub fn block_start(big_n: u32) -> Option<i64> {
    let mut pos: i128 = 0;
    for k in 0..big_n {
        pos += (1i128 << k) * 4 * k as i128 + 1;
        if pos > i64::MAX as i128 {
            return None;
        }
    }
    Some(pos as i64)
}

/// Block index `N` with `n_N ≤ p < n_{N+1}`; `0` for `p ≤ 0`.
pub fn block_of(p: i64) -> u32 {
    if p <= 0 {
        return 0;
    }
    let mut big_n = 0u32;
    let mut next: i128 = 1;
    while (p as i128) >= next {
        big_n += 1;
        next += (1i128 << big_n) * 4 * big_n as i128 + 1;
    }
    big_n
}

impl LevelAddress {
    pub fn detour(n: u32, j: u64, l: u32) -> Result<Self> {
        let a = LevelAddress::Detour { n, j, l };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if let LevelAddress::Detour { n, j, l } = *self {
            if n == 0 || n > MAX_BLOCK {
                return Err(Error::Address(format!("block index {n} outside 1..={MAX_BLOCK}")));
            }
            if j == 0 || j > 1u64 << n {
                return Err(Error::Address(format!("j = {j} outside 1..=2^{n}")));
            }
            if l == 0 || l > 4 * n {
                return Err(Error::Address(format!("l = {l} outside 1..={}", 4 * n)));
            }
        }
        Ok(())
    }

    /// Integer position of the level; `f` acts as `p ↦ p + 1`.
    pub fn position(&self) -> Result<i64> {
        self.validate()?;
        match *self {
            LevelAddress::Base(n) if n <= 0 => Ok(n),
            LevelAddress::Base(n) => {
                let big_n = u32::try_from(n).map_err(|_| Error::PositionOverflow)?;
                block_start(big_n).ok_or(Error::PositionOverflow)
            }
            LevelAddress::Detour { n, j, l } => {
                let start = block_start(n).ok_or(Error::PositionOverflow)? as i128;
                let p = start + (j as i128 - 1) * 4 * n as i128 + l as i128;
                i64::try_from(p).map_err(|_| Error::PositionOverflow)
            }
        }
    }

    /// Inverse of [`position`](Self::position); total on `i64`.
    pub fn from_position(p: i64) -> LevelAddress {
        if p <= 0 {
            return LevelAddress::Base(p);
        }
        let big_n = block_of(p);
        let start = block_start(big_n).expect("block of an i64 position fits");
        if p == start {
            return LevelAddress::Base(big_n as i64);
        }
        let offset = (p - start - 1) as u64;
        let per_cell = 4 * big_n as u64;
        LevelAddress::Detour { n: big_n, j: offset / per_cell + 1, l: (offset % per_cell) as u32 + 1 }
    }

    /// `(block, j, l)` ordering key; base levels `n ≤ 0` sort before every block.
    fn order_key(&self) -> (i64, u64, u32) {
        match *self {
            LevelAddress::Base(n) => (n, 0, 0),
            LevelAddress::Detour { n, j, l } => (n as i64, j, l),
        }
    }
}

/// Spatial order `… < I_0 < I_1 < I_{1,1}^1 < … < I_{1,2}^4 < I_2 < …`.
impl Ord for LevelAddress {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for LevelAddress {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LevelAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelAddress::Base(n) => write!(f, "I_{n}"),
            LevelAddress::Detour { n, j, l } => write!(f, "I_{{{n},{j}}}^{l}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Counts levels one by one in spatial order, independent of the closed form.
    fn enumerate_positions(max_block: u32) -> Vec<LevelAddress> {
        let mut out = vec![LevelAddress::Base(0)];
        for n in 1..=max_block {
            out.push(LevelAddress::Base(n as i64));
            for j in 1..=(1u64 << n) {
                for l in 1..=4 * n {
                    out.push(LevelAddress::Detour { n, j, l });
                }
            }
        }
        out
    }

    #[test]
    fn block_starts_match_explicit_count() {
        let levels = enumerate_positions(4);
        let found: Vec<i64> = (1..=4)
            .map(|n| levels.iter().position(|a| *a == LevelAddress::Base(n)).unwrap() as i64)
            .collect();
        assert_eq!(found, vec![1, 10, 43, 140]);
        for (n, p) in found.iter().enumerate() {
            assert_eq!(block_start(n as u32 + 1), Some(*p));
            assert_eq!(LevelAddress::Base(n as i64 + 1).position().unwrap(), *p);
        }
        for (p, a) in levels.iter().enumerate() {
            assert_eq!(a.position().unwrap(), p as i64);
            assert_eq!(LevelAddress::from_position(p as i64), *a);
        }
    }

    #[test]
    fn detour_examples() {
        assert_eq!(LevelAddress::detour(1, 1, 2).unwrap().position().unwrap(), 3);
        assert_eq!(LevelAddress::detour(2, 2, 4).unwrap().position().unwrap(), 22);
        assert!(LevelAddress::detour(1, 3, 1).is_err());
        assert!(LevelAddress::detour(1, 1, 5).is_err());
        assert!(LevelAddress::detour(0, 1, 1).is_err());
    }

    #[test]
    fn codec_round_trip_window() {
        for p in -50..=200 {
            assert_eq!(LevelAddress::from_position(p).position().unwrap(), p);
        }
    }

    #[test]
    fn order_matches_positions() {
        let levels = enumerate_positions(3);
        for w in levels.windows(2) {
            assert!(w[0] < w[1], "{} < {}", w[0], w[1]);
        }
        assert!(LevelAddress::Base(-3) < LevelAddress::Base(0));
    }

    #[test]
    fn extreme_positions() {
        assert_eq!(LevelAddress::from_position(i64::MAX).position().unwrap(), i64::MAX);
        assert!(LevelAddress::Base(60).position().is_err());
    }

    proptest! {
        #[test]
        fn codec_is_order_preserving(a in -1_000_000_000i64..1_000_000_000, b in -1_000_000_000i64..1_000_000_000) {
            let (x, y) = (LevelAddress::from_position(a), LevelAddress::from_position(b));
            prop_assert_eq!(x.position().unwrap(), a);
            prop_assert_eq!(a.cmp(&b), x.cmp(&y));
        }
    }
}
