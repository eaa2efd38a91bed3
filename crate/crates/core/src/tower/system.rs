use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::address::LevelAddress;
use super::leveled::LeveledSet;
use crate::error::{Error, Result};
use crate::measure::{merged_breakpoints, DyadicSet, StepFunction};
use crate::rational::{self, pow2, Rational};

/// Density used for custom-system positions outside the explicit table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefaultRule {
    /// Same step function at every position.
    Constant(StepFunction),
    /// Constant density `ratio^{|p|}` at position `p`.
    Geometric(#[serde(with = "rational::as_num_den")] Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemKind {
    /// The mixing composition operator without Kitai's Criterion: base levels
    /// `I_n` with density `2^{-|n|}` and detour levels `I_{n,j}^l` in between.
    Bdp,
    /// Constant density `ratio^{|n|}` at level `n`.
    Geometric { ratio: Rational },
    Custom { table: BTreeMap<i64, StepFunction>, default: DefaultRule },
}

/// Invertible dissipative system `(X, μ, f)` with `X = ℤ × [0,1)`, `f(p, x) = (p+1, x)`
/// and `μ` given on level `p` by the density [`density(p)`](Self::density).
/// The wandering set `W` is the full fiber at position 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSystem {
    name: String,
    kind: SystemKind,
}

/// Special-piece density of `I_{n,j}^l`: `2^l/2^n` while climbing, `2^{4n-l}/2^n` after.
fn detour_peak(n: u32, l: u32) -> Rational {
    let e = if l <= 2 * n { l as i64 } else { 4 * n as i64 - l as i64 };
    pow2(e - n as i64)
}

impl TowerSystem {
    pub fn bdp() -> Self {
        TowerSystem { name: "bdp".into(), kind: SystemKind::Bdp }
    }

    pub fn geometric(ratio: Rational) -> Result<Self> {
        if !ratio.is_positive() || ratio >= Rational::one() {
            return Err(Error::OutOfRange { name: "ratio", reason: format!("{ratio} not in (0,1)") });
        }
        Ok(TowerSystem { name: format!("geometric({ratio})"), kind: SystemKind::Geometric { ratio } })
    }

    pub fn custom(name: impl Into<String>, table: BTreeMap<i64, StepFunction>, default: DefaultRule) -> Result<Self> {
        if let DefaultRule::Geometric(r) = &default {
            if !r.is_positive() {
                return Err(Error::OutOfRange { name: "default.geometric", reason: format!("{r} must be > 0") });
            }
        }
        Ok(TowerSystem { name: name.into(), kind: SystemKind::Custom { table, default } })
    }

    /// Every level carries Lebesgue measure: `f` is measure preserving.
    pub fn identity_like() -> Self {
        let one = StepFunction::constant(Rational::one()).expect("1 > 0");
        TowerSystem::custom("identity-like", BTreeMap::new(), DefaultRule::Constant(one)).expect("valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn is_bdp(&self) -> bool {
        matches!(self.kind, SystemKind::Bdp)
    }

    /// Position of the wandering set.
    pub fn wandering_position(&self) -> i64 {
        0
    }

    /// True when every level has the same density, so `μ(f^n B) = μ(B)` for all `n`.
    pub fn is_shift_invariant(&self) -> bool {
        matches!(&self.kind, SystemKind::Custom { table, default: DefaultRule::Constant(_) } if table.is_empty())
    }

    pub fn density(&self, p: i64) -> StepFunction {
        match &self.kind {
            SystemKind::Bdp => match LevelAddress::from_position(p) {
                LevelAddress::Base(n) => StepFunction::constant(pow2(-n.abs())).expect("positive"),
                LevelAddress::Detour { n, j, l } => {
                    let cell = DyadicSet::grid_cell(n, j);
                    let iv = &cell.intervals()[0];
                    StepFunction::with_window(iv.lo().clone(), iv.hi().clone(), detour_peak(n, l), pow2(-(n as i64)))
                        .expect("positive densities")
                }
            },
            SystemKind::Geometric { ratio } => {
                StepFunction::constant(rational::powi(ratio, p.unsigned_abs())).expect("positive")
            }
            SystemKind::Custom { table, default } => match table.get(&p) {
                Some(d) => d.clone(),
                None => match default {
                    DefaultRule::Constant(d) => d.clone(),
                    DefaultRule::Geometric(r) => {
                        StepFunction::constant(rational::powi(r, p.unsigned_abs())).expect("positive")
                    }
                },
            },
        }
    }

    /// `μ(f^p(W))`, the total mass of level `p`.
    pub fn level_measure(&self, p: i64) -> Rational {
        self.density(p).total()
    }

    pub fn measure(&self, s: &LeveledSet) -> Rational {
        s.iter().map(|(p, fiber)| self.density(p).integrate(fiber)).sum()
    }

    /// `f^n(s)`.
    pub fn push(&self, s: &LeveledSet, n: i64) -> LeveledSet {
        s.push(n)
    }

    /// Exact bounded-distortion constant over `k_range`: the largest value of
    /// `max(r_B / r_W, r_W / r_B)` with `r_B = μ(f^k B)/μ(B)` over `B ⊆ W`.
    ///
    /// The ratio `r_B` is a weighted average of the per-piece ratios
    /// `d_k/d_0` on the common refinement, so the extremes sit on single pieces.
    /// The grid at `2^{-resolution}` is included in the refinement but cannot
    /// change the result.
    pub fn distortion_constant(&self, k_range: RangeInclusive<i64>, resolution: u32) -> Result<Rational> {
        if k_range.is_empty() {
            return Err(Error::OutOfRange { name: "k_range", reason: "empty range".into() });
        }
        let w = self.wandering_position();
        let d0 = self.density(w);
        let mass_w = d0.total();
        let grid = grid_set(resolution);
        let mut worst = Rational::one();
        for k in k_range {
            let dk = self.density(w + k);
            let avg = dk.total() / &mass_w;
            let cuts = merged_breakpoints(&[&d0, &dk], &[&grid]);
            for x in &cuts[..cuts.len() - 1] {
                let piece = dk.value_at(x) / d0.value_at(x);
                let k_here = if piece > avg { &piece / &avg } else { &avg / &piece };
                if k_here > worst {
                    worst = k_here;
                }
            }
        }
        Ok(worst)
    }

    /// Positions `p` in `range` where `d_{p±1}/d_p` leaves `[1/2, 2]` somewhere,
    /// i.e. where `μ(f^{±1}(B)) ≤ 2μ(B)` can fail.
    pub fn doubling_violations(&self, range: RangeInclusive<i64>) -> Vec<i64> {
        let two = rational::int(2);
        let half = rational::ratio(1, 2);
        range
            .filter(|&p| {
                let (d, next) = (self.density(p), self.density(p + 1));
                let cuts = merged_breakpoints(&[&d, &next], &[]);
                cuts[..cuts.len() - 1].iter().any(|x| {
                    let r = next.value_at(x) / d.value_at(x);
                    r > two || r < half
                })
            })
            .collect()
    }

    pub fn descriptor(&self) -> SystemDescriptor {
        match &self.kind {
            SystemKind::Bdp => SystemDescriptor {
                name: self.name.clone(),
                kind: "bdp".into(),
                parameters: BTreeMap::new(),
                density_table: None,
                default: None,
            },
            SystemKind::Geometric { ratio } => SystemDescriptor {
                name: self.name.clone(),
                kind: "geometric".into(),
                parameters: [("ratio".to_string(), rational::to_num_den(ratio))].into(),
                density_table: None,
                default: None,
            },
            SystemKind::Custom { table, default } => SystemDescriptor {
                name: self.name.clone(),
                kind: "custom".into(),
                parameters: BTreeMap::new(),
                density_table: Some(table.iter().map(|(p, d)| (p.to_string(), d.clone())).collect()),
                default: Some(default.clone()),
            },
        }
    }

    pub fn from_descriptor(d: &SystemDescriptor) -> Result<Self> {
        let sys = match d.kind.as_str() {
            "bdp" => TowerSystem::bdp(),
            "geometric" => {
                let r = d
                    .parameters
                    .get("ratio")
                    .ok_or_else(|| Error::Descriptor("parameters.ratio missing".into()))?;
                TowerSystem::geometric(rational::parse(r)?)?
            }
            "custom" => {
                let default = d.default.clone().ok_or_else(|| Error::Descriptor("default rule missing".into()))?;
                let mut table = BTreeMap::new();
                for (k, v) in d.density_table.iter().flatten() {
                    let p: i64 = k.parse().map_err(|_| Error::Descriptor(format!("density_table key {k:?}")))?;
                    table.insert(p, v.clone());
                }
                TowerSystem::custom(d.name.clone(), table, default)?
            }
            other => return Err(Error::Descriptor(format!("unknown kind {other:?}"))),
        };
        Ok(TowerSystem { name: d.name.clone(), ..sys })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: SystemDescriptor = serde_json::from_str(s).map_err(|e| Error::Descriptor(e.to_string()))?;
        TowerSystem::from_descriptor(&d)
    }
}

fn grid_set(resolution: u32) -> DyadicSet {
    let cells = 1u64 << resolution.min(20);
    if cells == 1 {
        return DyadicSet::unit();
    }
    // alternate cells give every grid point as a boundary
    DyadicSet::from_intervals((1..=cells).step_by(2).map(|j| {
        DyadicSet::grid_cell(resolution.min(20), j).intervals()[0].clone()
    }))
}

/// System descriptor JSON: `{name, kind, parameters, density_table?, default?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    pub name: String,
    pub kind: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_table: Option<BTreeMap<String, StepFunction>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<DefaultRule>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::rational::{int, ratio};
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pos(a: LevelAddress) -> i64 {
        a.position().unwrap()
    }

    /// Two-term formula `s·λ(C∩J) + 2^{-n}·λ(C∖J)` with `C = [0,1)`.
    fn detour_mass_oracle(n: u32, l: u32) -> Rational {
        let s = if l <= 2 * n { pow2(l as i64) / pow2(n as i64) } else { pow2(4 * n as i64 - l as i64) / pow2(n as i64) };
        let cell = pow2(-(n as i64));
        s * &cell + pow2(-(n as i64)) * (Rational::one() - cell)
    }

    #[test]
    fn construction_values() {
        let sys = TowerSystem::bdp();
        assert_eq!(sys.density(0), StepFunction::constant(int(1)).unwrap());
        assert_eq!(sys.level_measure(pos(LevelAddress::detour(1, 1, 2).unwrap())), ratio(5, 4));
        assert_eq!(sys.level_measure(pos(LevelAddress::detour(2, 1, 4).unwrap())), ratio(19, 16));
        assert_eq!(detour_mass_oracle(2, 4), int(16) / int(16) + ratio(3, 16));
        for n in 1..=4u32 {
            for j in 1..=(1u64 << n) {
                for l in 1..=4 * n {
                    let p = pos(LevelAddress::detour(n, j, l).unwrap());
                    assert_eq!(sys.level_measure(p), detour_mass_oracle(n, l));
                }
            }
        }
        for big_n in 0..=10 {
            let p = pos(LevelAddress::Base(big_n));
            assert_eq!(sys.measure(&LeveledSet::wandering().push(p)), pow2(-big_n));
        }
    }

    #[test]
    fn measure_examples() {
        let sys = TowerSystem::bdp();
        assert_eq!(sys.measure(&LeveledSet::empty()), Rational::zero());
        assert_eq!(sys.measure(&LeveledSet::wandering()), Rational::one());
        let half = LeveledSet::from_json(r#"{"3":"0:1/2"}"#).unwrap();
        assert_eq!(sys.measure(&half), Rational::one());
    }

    #[test]
    fn geometric_system() {
        let sys = TowerSystem::geometric(ratio(1, 2)).unwrap();
        assert_eq!(sys.level_measure(3), ratio(1, 8));
        assert_eq!(sys.level_measure(-3), ratio(1, 8));
        assert_eq!(sys.distortion_constant(-20..=20, 4).unwrap(), Rational::one());
        assert!(TowerSystem::geometric(int(1)).is_err());
        assert!(TowerSystem::geometric(int(0)).is_err());
    }

    /// Brute-force distortion: every cell of the 2^-4 grid (finer than all
    /// densities for k ≤ 3) as the test set B.
    fn distortion_oracle(sys: &TowerSystem, ks: RangeInclusive<i64>, r: u32) -> Rational {
        let mut worst = Rational::one();
        let w = LeveledSet::wandering();
        let avg0 = sys.measure(&w);
        for k in ks {
            let avg = sys.measure(&w.push(k)) / &avg0;
            for j in 1..=(1u64 << r) {
                let b = LeveledSet::single(0, DyadicSet::grid_cell(r, j));
                let rb = sys.measure(&b.push(k)) / sys.measure(&b);
                worst = worst.max(&rb / &avg).max(&avg / &rb);
            }
        }
        worst
    }

    #[test]
    fn bdp_distortion() {
        let sys = TowerSystem::bdp();
        let k = sys.distortion_constant(0..=3, 4).unwrap();
        assert_eq!(k, distortion_oracle(&sys, 0..=3, 4));
        // the half of I_{1,1}^2 with density 1/2 against average 5/4
        assert_eq!(k, ratio(5, 2));
        let mut prev = Rational::one();
        for big_n in 1..=4 {
            let end = LevelAddress::Base(big_n).position().unwrap();
            let kn = sys.distortion_constant(0..=end, 4).unwrap();
            assert!(kn >= prev);
            prev = kn;
        }
        assert!(prev > int(4));
        assert!(sys.distortion_constant(3..=2, 4).is_err());
    }

    #[test]
    fn bdp_doubling_bound() {
        let sys = TowerSystem::bdp();
        assert!(sys.doubling_violations(-20..=600).is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let b = sample::leveled_set(&mut rng, -10..=150, 3, 6);
            let mb = sys.measure(&b);
            assert!(sys.measure(&b.push(1)) <= int(2) * &mb);
            assert!(sys.measure(&b.push(-1)) <= int(2) * &mb);
        }
    }

    #[test]
    fn push_measure_two_ways() {
        let sys = TowerSystem::bdp();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let b = sample::leveled_set(&mut rng, -5..=60, 3, 5);
            let n = sample::below(&mut rng, 80) as i64 - 40;
            let direct = sys.measure(&sys.push(&b, n));
            let shifted: Rational = b.iter().map(|(p, s)| sys.density(p + n).integrate(s)).sum();
            assert_eq!(direct, shifted);
            assert_eq!(sys.push(&sys.push(&b, n), -n), b);
        }
    }

    #[test]
    fn descriptor_round_trip() {
        for sys in [TowerSystem::bdp(), TowerSystem::geometric(ratio(3, 4)).unwrap(), TowerSystem::identity_like()] {
            let js = serde_json::to_string(&sys.descriptor()).unwrap();
            assert_eq!(TowerSystem::from_json(&js).unwrap(), sys);
        }
        let custom = r#"{"name":"c","kind":"custom","density_table":{"2":[["0","2"],["1/2","1"]]},"default":{"geometric":"1/2"}}"#;
        let sys = TowerSystem::from_json(custom).unwrap();
        assert_eq!(sys.level_measure(2), ratio(3, 2));
        assert_eq!(sys.level_measure(-2), ratio(1, 4));
        assert!(!sys.is_shift_invariant());
        assert!(TowerSystem::identity_like().is_shift_invariant());
        assert!(TowerSystem::from_json(r#"{"name":"x","kind":"weird"}"#).is_err());
        assert!(TowerSystem::from_json(r#"{"name":"x","kind":"geometric","parameters":{"ratio":"2"}}"#).is_err());
    }
}
