//! Sufficient criteria for asymptotic simplicity.
//!
//! * Ostrowski: nonnegative weights whose positive entries sit at indices with
//!   gcd 1 give a unique, simple, positive dominant root.
//! * Dubeau: a root `λ` with
//!   `L(λ) = Σ_{j=1}^{n-1} |Σ_{i=j}^{n-1} b_{i+1} / λ^{i+1}| < 1`
//!   is the simple dominant root.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::charpoly::RootSet;
use crate::error::{Error, Result};
use crate::recurrence::Recurrence;
use crate::scalar::{gcd_u64, ApproxComplex, Scalar};

/// Float weights within this fraction of the largest weight count as zero.
pub const WEIGHT_NOISE_REL: f64 = 1e-12;

/// `L(λ)` must fall below `1 - DUBEAU_MARGIN`; values at the boundary (such as
/// `L = 1` at a root tied in modulus) are not certified.
pub const DUBEAU_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "lowercase"))]
pub enum CriterionName {
    Ostrowski,
    Dubeau,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum CriterionStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum CriterionDetail {
    Ostrowski {
        /// 1-based indices `j` with `b_j > 0`.
        positive_indices: Vec<usize>,
        gcd: Option<u64>,
    },
    Dubeau {
        root: ApproxComplex,
        multiplicity: usize,
        lhs: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriterionResult {
    pub name: CriterionName,
    pub status: CriterionStatus,
    pub detail: CriterionDetail,
    /// Why the criterion does not apply.
    pub reason: Option<String>,
    /// The dominant root the criterion certifies, on `Pass`.
    pub implied_lambda0: Option<ApproxComplex>,
}

enum WeightSign {
    Positive,
    Zero,
    Negative,
    NonReal,
}

fn weight_sign<S: Scalar>(w: &S, noise: f64) -> WeightSign {
    if let Some(exact) = w.to_exact() {
        return if !exact.is_real() {
            WeightSign::NonReal
        } else if exact.re().is_zero() {
            WeightSign::Zero
        } else if exact.re().is_negative() {
            WeightSign::Negative
        } else {
            WeightSign::Positive
        };
    }
    let z = w.to_approx();
    if z.im.abs() > noise {
        WeightSign::NonReal
    } else if z.re.abs() <= noise {
        WeightSign::Zero
    } else if z.re < 0.0 {
        WeightSign::Negative
    } else {
        WeightSign::Positive
    }
}

/// Ostrowski's gcd criterion.
pub fn ostrowski_check<S: Scalar>(rec: &Recurrence<S>) -> CriterionResult {
    let max_weight = rec.weights().iter().map(|w| w.to_approx().norm()).fold(0.0, f64::max);
    let noise = WEIGHT_NOISE_REL * max_weight;
    let mut positive_indices = Vec::new();
    let mut reason = None;
    for (i, w) in rec.weights().iter().enumerate() {
        match weight_sign(w, noise) {
            WeightSign::Positive => positive_indices.push(i + 1),
            WeightSign::Zero => {}
            WeightSign::Negative => {
                reason.get_or_insert_with(|| format!("weight b_{} is negative", i + 1));
            }
            WeightSign::NonReal => {
                reason.get_or_insert_with(|| format!("weight b_{} is not real", i + 1));
            }
        }
    }
    if reason.is_some() {
        return CriterionResult {
            name: CriterionName::Ostrowski,
            status: CriterionStatus::NotApplicable,
            detail: CriterionDetail::Ostrowski { positive_indices, gcd: None },
            reason,
            implied_lambda0: None,
        };
    }
    let gcd = positive_indices.iter().map(|&j| j as u64).reduce(gcd_u64);
    let pass = gcd == Some(1);
    let implied_lambda0 = pass.then(|| Complex64::new(positive_root(rec, noise), 0.0));
    CriterionResult {
        name: CriterionName::Ostrowski,
        status: if pass { CriterionStatus::Pass } else { CriterionStatus::Fail },
        detail: CriterionDetail::Ostrowski { positive_indices, gcd },
        reason: None,
        implied_lambda0,
    }
}

/// The unique positive zero of `x^n - Σ b_i x^(n-i)` for nonnegative weights,
/// by bisection on `(0, 1 + max b_i]`.
fn positive_root<S: Scalar>(rec: &Recurrence<S>, noise: f64) -> f64 {
    let weights: Vec<f64> = rec
        .weights()
        .iter()
        .map(|w| {
            let re = w.to_approx().re;
            if re.abs() <= noise {
                0.0
            } else {
                re
            }
        })
        .collect();
    // x^n - Σ b_i x^(n-i), written as x^n (1 - Σ b_i x^-i) to avoid overflow.
    let sign_at = |x: f64| -> f64 {
        let mut power = 1.0;
        let mut sum = 0.0;
        for b in &weights {
            power /= x;
            sum += b * power;
        }
        1.0 - sum
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0 + weights.iter().copied().fold(0.0, f64::max);
    // Lower end: a point where the polynomial is negative.
    lo = lo.max(f64::MIN_POSITIVE);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sign_at(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Left-hand side `L(λ)` of the Dubeau inequality.
pub fn dubeau_lhs<S: Scalar>(rec: &Recurrence<S>, lambda: ApproxComplex) -> Result<f64> {
    if lambda.norm() == 0.0 {
        return Err(Error::RootModulusZero);
    }
    let n = rec.order();
    let inv = lambda.inv();
    // powers[i] = λ^-(i+1)
    let mut powers = Vec::with_capacity(n);
    let mut p = inv;
    for _ in 0..n {
        powers.push(p);
        p *= inv;
    }
    let mut suffix = Complex64::new(0.0, 0.0);
    let mut lhs = 0.0;
    for j in (1..n).rev() {
        suffix += rec.weight(j + 1).to_approx() * powers[j];
        lhs += suffix.norm();
    }
    Ok(lhs)
}

/// Evaluates the Dubeau inequality at every distinct root.
pub fn dubeau_check<S: Scalar>(rec: &Recurrence<S>, roots: &RootSet) -> Result<Vec<CriterionResult>> {
    roots
        .roots
        .iter()
        .map(|root| {
            let lhs = dubeau_lhs(rec, root.value)?;
            let pass = lhs < 1.0 - DUBEAU_MARGIN;
            Ok(CriterionResult {
                name: CriterionName::Dubeau,
                status: if pass { CriterionStatus::Pass } else { CriterionStatus::Fail },
                detail: CriterionDetail::Dubeau { root: root.value, multiplicity: root.multiplicity, lhs },
                reason: None,
                implied_lambda0: pass.then_some(root.value),
            })
        })
        .collect()
}

/// The root certified by the Dubeau inequality, if some root satisfies it.
pub fn dubeau_certified(results: &[CriterionResult]) -> Option<ApproxComplex> {
    results.iter().find(|r| r.status == CriterionStatus::Pass).and_then(|r| r.implied_lambda0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::{characteristic_polynomial, find_roots, DEFAULT_RESIDUAL_TOL};
    use crate::scalar::ExactComplex;
    use alloc::vec;

    fn rec(b: &[i64]) -> Recurrence<ExactComplex> {
        Recurrence::new(b.iter().map(|&w| ExactComplex::from_integer(w)).collect()).unwrap()
    }

    #[test]
    fn ostrowski_examples() {
        let r = ostrowski_check(&rec(&[1, 1]));
        assert_eq!(r.status, CriterionStatus::Pass);
        assert_eq!(r.detail, CriterionDetail::Ostrowski { positive_indices: vec![1, 2], gcd: Some(1) });
        assert!((r.implied_lambda0.unwrap().re - 1.618033988749895).abs() < 1e-14);

        let r = ostrowski_check(&rec(&[0, 1]));
        assert_eq!(r.status, CriterionStatus::Fail);
        assert_eq!(r.detail, CriterionDetail::Ostrowski { positive_indices: vec![2], gcd: Some(2) });

        let r = ostrowski_check(&rec(&[-1, 1]));
        assert_eq!(r.status, CriterionStatus::NotApplicable);
        assert!(r.reason.unwrap().contains("negative"));

        let complex = Recurrence::new(vec!["1+i".parse::<ExactComplex>().unwrap(), ExactComplex::from_integer(1)]).unwrap();
        assert_eq!(ostrowski_check(&complex).status, CriterionStatus::NotApplicable);
    }

    #[test]
    fn ostrowski_ignores_float_noise() {
        let r = Recurrence::new(vec![Complex64::new(-1e-15, 0.0), Complex64::new(0.0, 1e-16), Complex64::new(1.0, 0.0)]).unwrap();
        let result = ostrowski_check(&r);
        assert_eq!(result.status, CriterionStatus::Fail);
        assert_eq!(result.detail, CriterionDetail::Ostrowski { positive_indices: vec![3], gcd: Some(3) });
    }

    #[test]
    fn dubeau_examples() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let fib = rec(&[1, 1]);
        let lhs = dubeau_lhs(&fib, Complex64::new(phi, 0.0)).unwrap();
        assert!((lhs - (2.0 - phi)).abs() < 1e-15);
        let lhs = dubeau_lhs(&fib, Complex64::new(1.0 - phi, 0.0)).unwrap();
        assert!((lhs - 2.618033988749895).abs() < 1e-12);

        let trib = rec(&[1, 1, 1]);
        let lambda = 1.8392867552141612;
        let lhs = dubeau_lhs(&trib, Complex64::new(lambda, 0.0)).unwrap();
        let expected = (1.0 / (lambda * lambda) + 1.0 / lambda.powi(3)) + 1.0 / lambda.powi(3);
        assert!((lhs - expected).abs() < 1e-15);
        assert!((lhs - 0.6170).abs() < 1e-3);

        let roots = find_roots(&characteristic_polynomial(&fib), DEFAULT_RESIDUAL_TOL).unwrap();
        let results = dubeau_check(&fib, &roots).unwrap();
        assert_eq!(results[0].status, CriterionStatus::Pass);
        assert_eq!(results[1].status, CriterionStatus::Fail);
        assert!((dubeau_certified(&results).unwrap().re - phi).abs() < 1e-14);
        assert!(dubeau_lhs(&fib, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn dubeau_boundary_is_not_certified() {
        // x^2 - 2: L(±√2) = 1 exactly, computed as 1 - ulp.
        let r = rec(&[0, 2]);
        let roots = find_roots(&characteristic_polynomial(&r), DEFAULT_RESIDUAL_TOL).unwrap();
        let results = dubeau_check(&r, &roots).unwrap();
        assert!(results.iter().all(|d| d.status == CriterionStatus::Fail));
    }
}
