//! The constant-weight family `(p, ..., p)` as the order grows.

use nfib_core::charpoly::{characteristic_polynomial, classify_dominance, find_roots};
use nfib_core::ratio::{estimate_ratio_limit, RatioOptions, RatioStatus};
use nfib_core::{Error, ExactComplex, InitialConditions, Recurrence, Result, Scalar};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyRow {
    pub n: usize,
    pub lambda0: f64,
    /// Ratio limit measured on the fundamental sequence.
    pub ratio_estimate: Option<f64>,
    pub ratio_status: RatioStatus,
    /// `p + 1 - λ₀(n)`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyTable {
    pub p: f64,
    pub limit: f64,
    pub rows: Vec<FamilyRow>,
    pub monotone_increasing: bool,
    pub gaps_shrinking: bool,
    pub all_converged: bool,
}

/// Tabulates `λ₀(n)` for `n = n_min..=n_max`. `p` must be a positive real.
pub fn family_table(
    p: &ExactComplex,
    n_min: usize,
    n_max: usize,
    residual_tol: f64,
    tie_tol: f64,
    ratio: &RatioOptions,
) -> Result<FamilyTable> {
    if !p.is_real() || p.re() <= &num_rational::BigRational::from_integer(0.into()) {
        return Err(Error::InvalidParameter("family parameter p must be a positive real"));
    }
    if n_min < 2 || n_max < n_min {
        return Err(Error::InvalidParameter("family orders must satisfy 2 <= n_min <= n_max"));
    }
    let pf = p.to_approx().re;
    let mut rows = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        let rec = Recurrence::new(vec![p.clone(); n])?;
        let roots = find_roots(&characteristic_polynomial(&rec), residual_tol)?;
        let dominance = classify_dominance(&roots, tie_tol);
        let lambda0 = dominance
            .lambda0
            .filter(|_| dominance.is_asymptotically_simple)
            .ok_or(Error::InvalidParameter("family member without a unique dominant root"))?
            .re;
        let estimate = estimate_ratio_limit(&rec, &InitialConditions::fundamental(n), ratio)?;
        rows.push(FamilyRow {
            n,
            lambda0,
            ratio_estimate: estimate.value.map(|v| v.re),
            ratio_status: estimate.status,
            gap: pf + 1.0 - lambda0,
        });
    }
    let monotone_increasing = rows.windows(2).all(|w| w[1].lambda0 > w[0].lambda0);
    let gaps_shrinking = rows.windows(2).all(|w| w[1].gap.abs() < w[0].gap.abs());
    let all_converged = rows.iter().all(|r| r.ratio_status == RatioStatus::Converged);
    Ok(FamilyTable { p: pf, limit: pf + 1.0, rows, monotone_increasing, gaps_shrinking, all_converged })
}
