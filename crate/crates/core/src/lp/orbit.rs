use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use super::metric::lp_norm_p;
use super::simple::{apply_op, SimpleFunction};
use crate::conditions::{ksc_failure_certificate, tail_window, KitaiFailureCertificate};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::tower::{block_of, LeveledSet, TowerSystem};

#[derive(Clone, Debug, Serialize)]
pub struct InverseOrbitReport {
    pub horizon: i64,
    pub p: u32,
    #[serde(with = "rational::as_num_den")]
    pub delta: Rational,
    /// `‖T_f^{-n}(δχ_B)‖_p^p`, `n = 0..=H`
    #[serde(with = "rational::vec_num_den")]
    pub values: Vec<Rational>,
    /// Max of `values` over `[⌈H/2⌉, H]`.
    #[serde(with = "rational::as_num_den")]
    pub tail_max: Rational,
    /// `(K, ‖T_f^{-K}(δχ_B)‖_p^p)` along the certified positions (any size, not bounded by `H`).
    pub witnessed: Vec<(i64, String)>,
    /// `δ^p λ(C)` when the certificate chain verifies.
    #[serde(with = "rational::opt_num_den")]
    pub floor: Option<Rational>,
    pub floor_certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<KitaiFailureCertificate>,
}

impl InverseOrbitReport {
    /// Largest value seen along the certified positions.
    pub fn limsup_evidence(&self) -> Option<Rational> {
        self.witnessed.iter().map(|(_, v)| rational::parse(v).expect("own output")).max()
    }
}

/// Exact `‖T_f^{-n}(δχ_B)‖_p^p = δ^p μ(f^n B)` for `n ≤ H`. On the bdp system,
/// when `B` lies in one level, the Kitai-failure chain certifies the floor
/// `δ^p λ(C)` along the positions `K_n`.
pub fn inverse_orbit_floor(sys: &TowerSystem, b: &LeveledSet, delta: &Rational, p: u32, horizon: i64) -> Result<InverseOrbitReport> {
    if !delta.is_positive() {
        return Err(Error::OutOfRange { name: "delta", reason: format!("{delta} must be > 0") });
    }
    if horizon < 1 {
        return Err(Error::OutOfRange { name: "horizon", reason: format!("{horizon} must be >= 1") });
    }
    let phi = SimpleFunction::indicator(b, delta.clone());
    let norm_at = |n: i64| lp_norm_p(sys, &apply_op(&phi, -n), p);
    let values: Vec<Rational> = (0..=horizon).into_par_iter().map(norm_at).collect::<Result<_>>()?;
    let tail_max = tail_window(horizon).map(|n| values[n as usize].clone()).max().unwrap_or_default();

    let mut report = InverseOrbitReport {
        horizon,
        p,
        delta: delta.clone(),
        values,
        tail_max,
        witnessed: Vec::new(),
        floor: None,
        floor_certified: false,
        certificate: None,
    };
    if let (true, Some((m, _))) = (sys.is_bdp(), b.single_level()) {
        let n_max = block_of(horizon).clamp(8, 20);
        let cert = ksc_failure_certificate(sys, &b.push(-m), n_max)?;
        let dp = rational::powi(delta, p as u64);
        let floor = &dp * &cert.lambda_c;
        let mut ok = cert.verified;
        for step in &cert.steps {
            let k = step.k_n - m;
            let v = norm_at(k)?;
            ok &= v >= floor;
            report.witnessed.push((k, rational::to_num_den(&v)));
        }
        report.floor_certified = ok;
        report.floor = Some(floor);
        report.certificate = Some(cert);
    }
    Ok(report)
}
