use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DyadicSet;
use crate::rational::{self, pow2, Rational};
use crate::tower::{LevelAddress, LeveledSet, TowerSystem};

/// Largest `N_max` accepted; detour positions beyond it leave `i64`.
pub const MAX_CERT_BLOCK: u32 = 50;

/// One link `λ(C ∩ J_n) ≥ λ(C)/2^n`, `μ(f^{K_n}B) ≥ 2^n λ(C ∩ J_n) ≥ λ(C)` of the chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateStep {
    pub n: u32,
    pub j: u64,
    /// `λ(C ∩ [(j-1)/2^n, j/2^n))`
    #[serde(with = "rational::as_num_den")]
    pub overlap: Rational,
    /// `λ(C)/2^n`
    #[serde(with = "rational::as_num_den")]
    pub pigeonhole_bound: Rational,
    /// Position of `I_{n,j}^{2n}`.
    pub k_n: i64,
    /// `μ(f^{K_n}(B))`, evaluated directly.
    #[serde(with = "rational::as_num_den")]
    pub measure: Rational,
    /// `2^n · overlap`
    #[serde(with = "rational::as_num_den")]
    pub lower_bound: Rational,
    pub holds: bool,
}

/// Witness that no `B ⊆ W` with fiber `C` has `μ(f^k B) → 0`: along the
/// positions `K_n` the image measure stays at least `λ(C)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KitaiFailureCertificate {
    pub fiber: DyadicSet,
    #[serde(with = "rational::as_num_den")]
    pub lambda_c: Rational,
    pub steps: Vec<CertificateStep>,
    pub verified: bool,
}

impl KitaiFailureCertificate {
    /// `max_n μ(f^{K_n}(B))` over the chain.
    pub fn max_measure(&self) -> Rational {
        self.steps.iter().map(|s| s.measure.clone()).max().unwrap_or_default()
    }

    /// `min_n μ(f^{K_n}(B))`; at least `λ(C)` when verified.
    pub fn min_measure(&self) -> Rational {
        self.steps.iter().map(|s| s.measure.clone()).min().unwrap_or_default()
    }

    pub fn positions(&self) -> Vec<i64> {
        self.steps.iter().map(|s| s.k_n).collect()
    }
}

/// Grid cell of width `2^-n` carrying the most of `c` (smallest `j` on ties).
///
/// Only the first, second and last cells touched by each interval can be maximal.
pub fn heaviest_cell(c: &DyadicSet, n: u32) -> (u64, Rational) {
    let scale = pow2(n as i64);
    let cells = 1u64 << n;
    let mut best = (1u64, Rational::default());
    for iv in c.intervals() {
        let first = (iv.lo() * &scale).floor().to_integer().to_u64().expect("cell index") + 1;
        let last = (iv.hi() * &scale).ceil().to_integer().to_u64().expect("cell index");
        for j in [first, first + 1, last] {
            if j < first || j > last || j > cells {
                continue;
            }
            let overlap = overlap_with(c, &(rational::int(j as i64 - 1) / &scale), &(rational::int(j as i64) / &scale));
            if overlap > best.1 || (overlap == best.1 && j < best.0) {
                best = (j, overlap);
            }
        }
    }
    best
}

/// `λ(c ∩ [lo, hi))`.
fn overlap_with(c: &DyadicSet, lo: &Rational, hi: &Rational) -> Rational {
    let mut total = Rational::default();
    for iv in c.intervals() {
        if iv.lo() >= hi {
            break;
        }
        let (a, b) = (iv.lo().max(lo), iv.hi().min(hi));
        if a < b {
            total += b - a;
        }
    }
    total
}

/// Builds and re-verifies the pigeonhole chain for `n = 1..=n_max`.
pub fn ksc_failure_certificate(sys: &TowerSystem, b: &LeveledSet, n_max: u32) -> Result<KitaiFailureCertificate> {
    if !sys.is_bdp() {
        return Err(Error::RequiresBdp("ksc_failure_certificate"));
    }
    if n_max == 0 || n_max > MAX_CERT_BLOCK {
        return Err(Error::OutOfRange { name: "n_max", reason: format!("{n_max} outside 1..={MAX_CERT_BLOCK}") });
    }
    if b.iter().any(|(p, _)| p != 0) {
        return Err(Error::NotInLevel(0));
    }
    let fiber = b.get(0).cloned().unwrap_or_default();
    let lambda_c = fiber.lebesgue();
    let mut steps = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let (j, overlap) = heaviest_cell(&fiber, n);
        let pigeonhole_bound = &lambda_c * pow2(-(n as i64));
        let k_n = LevelAddress::Detour { n, j, l: 2 * n }.position()?;
        let measure = sys.measure(&b.push(k_n));
        let lower_bound = &overlap * pow2(n as i64);
        let holds = overlap >= pigeonhole_bound && measure >= lower_bound && lower_bound >= lambda_c;
        steps.push(CertificateStep { n, j, overlap, pigeonhole_bound, k_n, measure, lower_bound, holds });
    }
    let verified = steps.iter().all(|s| s.holds);
    Ok(KitaiFailureCertificate { fiber, lambda_c, steps, verified })
}
