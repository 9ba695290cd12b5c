//! Ratio limits, the fundamental-sequence decomposition, the closed-form limit
//! expression and its denominator, and audits of the ratio-limit theorem.
//!
//! Throughout, the ratio at index `k` is `r_k = F_{k+1} / F_k`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charpoly::{
    characteristic_polynomial, classify_dominance, find_roots, recognize_exact_root, DEFAULT_RESIDUAL_TOL,
    DEFAULT_TIE_TOL,
};
use crate::error::{Error, Result};
use crate::recurrence::{exact_pair, generate, shift_to_nonzero_head, InitialConditions, Mode, Recurrence, SequenceWindow};
use crate::scalar::{ApproxComplex, ExactComplex, Scalar};

/// `|D|` at most this fraction of its term-wise scale counts as zero.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;
/// Exact ratio scans stop here and hand over to floats.
pub const DEFAULT_EXACT_MAX_K: usize = 2000;

const FIRST_CHUNK: usize = 64;

/// Stopping rule for ratio estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RatioOptions {
    pub tol: f64,
    pub max_k: usize,
    /// Consecutive stable steps required; never fewer than the order `n`.
    pub stability_window: usize,
}

impl Default for RatioOptions {
    fn default() -> Self {
        RatioOptions { tol: 1e-10, max_k: 10_000, stability_window: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum RatioStatus {
    Converged,
    NotConverged,
    /// The last `n` scanned terms are all zero.
    NoNonzeroTail,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RatioEstimate {
    /// Last ratio formed.
    pub value: Option<ApproxComplex>,
    pub status: RatioStatus,
    /// Index `k` of the ratio `F_{k+1}/F_k` at which the streak completed.
    pub k_converged: Option<i64>,
    /// Last `|r_k - r_{k-1}|`; infinite when fewer than two ratios were formed.
    pub last_residual: f64,
    pub skipped_zero_indices: Vec<i64>,
    /// Last zero index, when the nonzero tail after it covers at least half
    /// of the scanned range and at least `n` terms.
    pub empirical_k0: Option<i64>,
    /// Last term index looked at.
    pub horizon: i64,
    pub mode: Mode,
}

fn validate(opts: &RatioOptions, n: usize) -> Result<()> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("ratio tolerance must be positive"));
    }
    if opts.max_k < 4 * n {
        return Err(Error::InvalidParameter("max_k must be at least 4n"));
    }
    if opts.stability_window == 0 {
        return Err(Error::InvalidParameter("stability window must be positive"));
    }
    Ok(())
}

/// Last zero index in `zeros`, if the nonzero run after it up to `end` is at
/// least `max(n, ceil(len / 2))` long.
fn settled_k0(zeros: &[i64], start: i64, end: i64, n: usize) -> Option<i64> {
    let last_zero = zeros.last().copied().unwrap_or(start - 1);
    let len = (end - start + 1) as usize;
    let tail = (end - last_zero) as usize;
    (tail >= n.max(len.div_ceil(2))).then_some(last_zero)
}

fn scan(win: &SequenceWindow, n: usize, opts: &RatioOptions, mode: Mode) -> RatioEstimate {
    let (start, end) = (win.start_index(), win.end_index());
    let mut skipped = Vec::new();
    let mut prev: Option<Complex64> = None;
    let mut value = None;
    let mut streak = 0usize;
    let mut last_residual = f64::INFINITY;
    let mut zero_run = 0usize;
    // n + 1 geometric terms force the ratio to be a root and the sequence to
    // stay geometric; shorter runs can be coincidental (ones-weights double
    // for n steps from the fundamental start).
    let needed = opts.stability_window.max(n);
    let mut k = start;
    loop {
        if win.is_zero_at(k) {
            skipped.push(k);
            zero_run += 1;
        } else {
            zero_run = 0;
        }
        if k == end {
            break;
        }
        match win.ratio(k) {
            None => {
                prev = None;
                streak = 0;
            }
            Some(r) => {
                if let Some(p) = prev {
                    last_residual = (r - p).norm();
                    if last_residual <= opts.tol * p.norm().max(1.0) {
                        streak += 1;
                    } else {
                        streak = 0;
                    }
                }
                prev = Some(r);
                value = Some(r);
                if streak >= needed {
                    return RatioEstimate {
                        value,
                        status: RatioStatus::Converged,
                        k_converged: Some(k),
                        last_residual,
                        empirical_k0: settled_k0(&skipped, start, k + 1, n),
                        skipped_zero_indices: skipped,
                        horizon: k + 1,
                        mode,
                    };
                }
            }
        }
        k += 1;
    }
    let status = if zero_run >= n { RatioStatus::NoNonzeroTail } else { RatioStatus::NotConverged };
    RatioEstimate {
        value,
        status,
        k_converged: None,
        last_residual,
        empirical_k0: settled_k0(&skipped, start, end, n),
        skipped_zero_indices: skipped,
        horizon: end,
        mode,
    }
}

/// Estimates `lim F_{k+1}/F_k` in double precision.
pub fn estimate_ratio_limit<S: Scalar>(
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
    opts: &RatioOptions,
) -> Result<RatioEstimate> {
    estimate_ratio_limit_in(rec, init, opts, Mode::Float)
}

/// Estimates the ratio limit in the given arithmetic. In exact mode the
/// ratios are quotients of exact terms, rounded only at the end.
pub fn estimate_ratio_limit_in<S: Scalar>(
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
    opts: &RatioOptions,
    mode: Mode,
) -> Result<RatioEstimate> {
    let n = rec.order();
    validate(opts, n)?;
    if mode == Mode::Exact {
        exact_pair(rec, init)?;
    }
    // Doubling horizons: a scan is a pure function of the prefix it covers,
    // so stopping early gives the same answer as one long run.
    let mut count = FIRST_CHUNK.min(opts.max_k);
    loop {
        let win = generate(rec, init, count, mode)?;
        let estimate = scan(&win, n, opts, mode);
        if estimate.status == RatioStatus::Converged || count >= opts.max_k {
            return Ok(estimate);
        }
        count = (2 * count).min(opts.max_k);
    }
}

/// `(k, r_k)` for `k` in `from..=to`, `None` where a term is zero.
pub fn ratio_trace(win: &SequenceWindow, from: i64, to: i64) -> Vec<(i64, Option<ApproxComplex>)> {
    let from = from.max(win.start_index());
    let to = to.min(win.end_index() - 1);
    (from..=to).map(|k| (k, win.ratio(k))).collect()
}

/// Terms of the fundamental sequence (initial conditions `(0, ..., 0, 1)`)
/// up to index `last`; position `p` holds `F⁰_{p-n+1}`. Plain arithmetic in
/// `S`, so meant for moderate `last`.
fn fundamental_terms<S: Scalar>(rec: &Recurrence<S>, last: i64) -> Vec<S> {
    let n = rec.order();
    let mut terms: Vec<S> = (0..n).map(|i| if i + 1 == n { S::one() } else { S::zero() }).collect();
    let needed = (last + n as i64) as usize;
    while terms.len() < needed {
        let len = terms.len();
        let next = (1..=n).fold(S::zero(), |acc, i| acc + rec.weight(i).clone() * terms[len - i].clone());
        terms.push(next);
    }
    terms
}

/// `F^a_k` rebuilt from the fundamental sequence:
/// `a_0 F⁰_k + Σ_{i=1}^{n-1} a_{-i} Σ_{j=1}^{n-i} b_{i+j} F⁰_{k-j}`.
pub fn decompose_via_fundamental<S: Scalar>(rec: &Recurrence<S>, init: &InitialConditions<S>, k: i64) -> Result<S> {
    let mut terms = decompose_range(rec, init, k)?;
    Ok(terms.pop().expect("k >= 1 terms"))
}

/// `F^a_1, ..., F^a_last` from one pass over the fundamental sequence.
pub fn decompose_range<S: Scalar>(rec: &Recurrence<S>, init: &InitialConditions<S>, last: i64) -> Result<Vec<S>> {
    if last < 1 {
        return Err(Error::InvalidParameter("decomposition index must be at least 1"));
    }
    let n = rec.order();
    let f0 = fundamental_terms(rec, last);
    let at = |idx: i64| &f0[(idx + n as i64 - 1) as usize];
    // Coefficient of F⁰_{k-j} is Σ_{i=1}^{n-j} a_{-i} b_{i+j}, independent of k.
    let coeffs: Vec<S> = (1..n)
        .map(|j| (1..=n - j).fold(S::zero(), |acc, i| acc + init.back(i).clone() * rec.weight(i + j).clone()))
        .collect();
    Ok((1..=last)
        .map(|k| {
            coeffs
                .iter()
                .enumerate()
                .fold(init.back(0).clone() * at(k).clone(), |acc, (j, c)| acc + c.clone() * at(k - j as i64 - 1).clone())
        })
        .collect())
}

/// The closed-form limit `N / D` evaluated at a candidate `Φ⁰`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LimitExpression {
    pub numerator: ApproxComplex,
    pub denominator: ApproxComplex,
    /// `Σ` of the moduli of the terms making up `D`.
    pub scale: f64,
    /// `N / D`, absent when `D` is negligible against `scale`.
    pub value: Option<ApproxComplex>,
}

/// Inner sums `c_i = Σ_{j=1}^{n-i} b_{i+j} φ^{-j}` and their modulus bounds, for `i = 1..n-1`.
fn inner_sums<S: Scalar>(rec: &Recurrence<S>, phi: Complex64) -> (Vec<Complex64>, Vec<f64>) {
    let n = rec.order();
    let inv = phi.inv();
    let (mut sums, mut bounds) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 1..n {
        let mut power = Complex64::new(1.0, 0.0);
        let mut s = Complex64::new(0.0, 0.0);
        let mut bound = 0.0;
        for j in 1..=n - i {
            power *= inv;
            let b = rec.weight(i + j).to_approx();
            s += b * power;
            bound += b.norm() * power.norm();
        }
        sums.push(s);
        bounds.push(bound);
    }
    (sums, bounds)
}

pub fn limit_expression<S: Scalar>(
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
    phi0: ApproxComplex,
) -> Result<LimitExpression> {
    if phi0.norm() == 0.0 {
        return Err(Error::RootModulusZero);
    }
    let n = rec.order();
    let (sums, bounds) = inner_sums(rec, phi0);
    let a0 = init.back(0).to_approx();
    let mut denominator = a0;
    let mut numerator = a0 * phi0;
    let mut scale = a0.norm();
    // The numerator is summed with its own powers φ^{-j+1} rather than as φ·D.
    for i in 1..n {
        let a = init.back(i).to_approx();
        denominator += a * sums[i - 1];
        scale += a.norm() * bounds[i - 1];
        let mut power = Complex64::new(1.0, 0.0);
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=n - i {
            s += rec.weight(i + j).to_approx() * power;
            power /= phi0;
        }
        numerator += a * s;
    }
    let value = (denominator.norm() > DEFAULT_DEGENERACY_TOL * scale).then(|| numerator / denominator);
    Ok(LimitExpression { numerator, denominator, scale, value })
}

/// Whether the closed-form denominator vanishes at `λ₀`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DegeneracyReport {
    pub denominator: ApproxComplex,
    pub numerator: ApproxComplex,
    /// `|D| / scale`.
    pub relative_magnitude: f64,
    pub scale: f64,
    pub degenerate: bool,
    /// The verdict came from exact arithmetic (exact inputs, rational `λ₀`).
    pub exact: bool,
    pub lambda0: ApproxComplex,
    pub tolerance: f64,
}

pub fn degeneracy_check<S: Scalar>(
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
    lambda0: ApproxComplex,
    tol: f64,
) -> Result<DegeneracyReport> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter("degeneracy tolerance must be nonnegative"));
    }
    let expr = limit_expression(rec, init, lambda0)?;
    let relative_magnitude = expr.denominator.norm() / expr.scale;
    let mut report = DegeneracyReport {
        denominator: expr.denominator,
        numerator: expr.numerator,
        relative_magnitude,
        scale: expr.scale,
        degenerate: relative_magnitude <= tol,
        exact: false,
        lambda0,
        tolerance: tol,
    };
    if let Ok((rec, init)) = exact_pair(rec, init) {
        if let Some(d) = exact_denominator(&rec, &init, lambda0) {
            report.exact = true;
            report.degenerate = d.is_zero();
            if report.degenerate {
                report.denominator = Complex64::new(0.0, 0.0);
                report.numerator = Complex64::new(0.0, 0.0);
                report.relative_magnitude = 0.0;
            }
        }
    }
    Ok(report)
}

/// `D` in exact arithmetic, when `λ₀` is a Gaussian rational root.
fn exact_denominator(
    rec: &Recurrence<ExactComplex>,
    init: &InitialConditions<ExactComplex>,
    lambda0: ApproxComplex,
) -> Option<ExactComplex> {
    let lambda = recognize_exact_root(&characteristic_polynomial(rec), lambda0)?;
    let inv = lambda.recip()?;
    let n = rec.order();
    let mut d = init.back(0).clone();
    for i in 1..n {
        let mut power = ExactComplex::from_integer(1);
        let mut s = ExactComplex::from_integer(0);
        for j in 1..=n - i {
            power = &power * &inv;
            s += &(rec.weight(i + j) * &power);
        }
        d += &(init.back(i) * &s);
    }
    Some(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Trend {
    Vanishing,
    Stabilizing,
    Inconclusive,
}

/// Samples of `|F_k / (k^{ν-1} λ₀^k)|`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Condition11Report {
    pub samples: Vec<(i64, f64)>,
    pub trend: Trend,
    pub final_magnitude: f64,
    pub mode: Mode,
}

/// `count` evenly spaced indices in `1..=horizon`.
pub fn default_condition_11_samples(horizon: i64, count: usize) -> Vec<i64> {
    let mut ks: Vec<i64> = (1..=count as i64).map(|i| (horizon * i / count as i64).max(1)).collect();
    ks.dedup();
    ks
}

pub fn condition_11_estimate<S: Scalar>(
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
    lambda0: ApproxComplex,
    nu: usize,
    sample_ks: &[i64],
    mode: Mode,
) -> Result<Condition11Report> {
    if lambda0.norm() == 0.0 {
        return Err(Error::RootModulusZero);
    }
    if nu == 0 {
        return Err(Error::InvalidParameter("multiplicity must be at least 1"));
    }
    if sample_ks.is_empty() || sample_ks[0] < 1 || sample_ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("sample indices must be positive and strictly increasing"));
    }
    let last = *sample_ks.last().unwrap_or(&1);
    let win = generate(rec, init, last as usize, mode)?;
    let ln_lambda = lambda0.norm().ln();
    let samples: Vec<(i64, f64)> = sample_ks
        .iter()
        .map(|&k| {
            let ln = win.ln_modulus(k) - (nu as f64 - 1.0) * (k as f64).ln() - k as f64 * ln_lambda;
            (k, ln.exp())
        })
        .collect();
    let first = samples[0].1;
    let final_magnitude = samples[samples.len() - 1].1;
    let trend = if first > 0.0 && final_magnitude <= 1e-6 * first {
        Trend::Vanishing
    } else if final_magnitude > 0.0
        && samples[samples.len() / 2..].iter().all(|&(_, m)| (m - final_magnitude).abs() <= 0.1 * final_magnitude)
    {
        Trend::Stabilizing
    } else {
        Trend::Inconclusive
    };
    Ok(Condition11Report { samples, trend, final_magnitude, mode })
}

/// Exact mode when both the weights and the initial conditions are exact.
pub fn preferred_mode<S: Scalar>(rec: &Recurrence<S>, init: &InitialConditions<S>) -> Mode {
    if exact_pair(rec, init).is_ok() {
        Mode::Exact
    } else {
        Mode::Float
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Claim {
    PartI,
    PartII,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum EvidenceStatus {
    Supported,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum Witness {
    /// `F^a_index` vanishes although `index > k0 + n - 1`. Indices refer to
    /// the instance as given.
    ZeroTerm { index: i64, value: ApproxComplex, k0: i64 },
    /// Measured ratio limit against the dominant root.
    Ratio {
        measured: ApproxComplex,
        lambda0: ApproxComplex,
        k_converged: Option<i64>,
        mode: Mode,
        degeneracy: DegeneracyReport,
    },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClaimEvidence {
    pub claim: Claim,
    pub status: EvidenceStatus,
    pub witness: Option<Witness>,
    pub horizon: i64,
    pub note: Option<String>,
}

/// Part (i): with `k0` the minimal index after which the fundamental sequence
/// has no zeros, `F^a_k != 0` for every `k > k0 + n - 1`.
///
/// The claim assumes `a_{-n+1} != 0`; other instances are re-anchored at
/// their first nonzero term and audited in that form.
pub fn audit_part_i<S: Scalar>(rec: &Recurrence<S>, init: &InitialConditions<S>, horizon: usize) -> Result<ClaimEvidence> {
    let n = rec.order();
    if horizon < 4 * n {
        return Err(Error::InvalidParameter("horizon must be at least 4n"));
    }
    let mode = preferred_mode(rec, init);
    let head = shift_to_nonzero_head(rec, init, mode)?;
    let mut note = (head.shift != 0).then(|| {
        format!("a_(-n+1) = 0; audited the instance re-anchored at F_{} (indices shifted by {})", head.first_nonzero_index, head.shift)
    });
    let fundamental = generate(rec, &InitialConditions::fundamental(n), horizon, mode)?;
    let zeros: Vec<i64> =
        (fundamental.start_index()..=fundamental.end_index()).filter(|&k| fundamental.is_zero_at(k)).collect();
    let Some(k0) = settled_k0(&zeros, fundamental.start_index(), fundamental.end_index(), n) else {
        let msg = String::from("the fundamental sequence has no settled nonzero tail within the horizon");
        return Ok(ClaimEvidence {
            claim: Claim::PartI,
            status: EvidenceStatus::Inconclusive,
            witness: None,
            horizon: horizon as i64,
            note: Some(match note {
                Some(prefix) => format!("{prefix}; {msg}"),
                None => msg,
            }),
        });
    };
    let win = generate(rec, &head.init, horizon, mode)?;
    let first_checked = k0 + n as i64;
    let witness = (first_checked..=win.end_index()).find(|&k| win.is_zero_at(k)).map(|k| Witness::ZeroTerm {
        index: k + head.shift,
        value: win.approx_term(k),
        k0,
    });
    if note.is_none() && witness.is_some() {
        note = Some(format!("k0 = {k0} is minimal for the fundamental sequence"));
    }
    Ok(ClaimEvidence {
        claim: Claim::PartI,
        status: if witness.is_some() { EvidenceStatus::Violated } else { EvidenceStatus::Supported },
        witness,
        horizon: horizon as i64,
        note,
    })
}

/// Settings shared by the Part (ii) audit and batch runs.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditOptions {
    pub ratio: RatioOptions,
    pub tie_tol: f64,
    pub degeneracy_tol: f64,
    /// Horizon for exact ratio scans before falling back to floats.
    pub exact_max_k: usize,
    pub prefer_exact: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            ratio: RatioOptions::default(),
            tie_tol: DEFAULT_TIE_TOL,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            exact_max_k: DEFAULT_EXACT_MAX_K,
            prefer_exact: true,
        }
    }
}

/// Agreement threshold between a measured limit and `λ₀`.
pub fn part_ii_threshold(lambda0: ApproxComplex, ratio_tol: f64) -> f64 {
    1e-6f64.max(10.0 * ratio_tol) * (1.0 + lambda0.norm())
}

/// Part (ii): for an asymptotically simple characteristic polynomial the
/// ratio limit exists and equals `λ₀`.
pub fn audit_part_ii<S: Scalar>(
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
    opts: &AuditOptions,
) -> Result<ClaimEvidence> {
    validate(&opts.ratio, rec.order())?;
    let roots = find_roots(&characteristic_polynomial(rec), DEFAULT_RESIDUAL_TOL)?;
    let dominance = classify_dominance(&roots, opts.tie_tol);
    let inconclusive = |note: String, horizon: i64, witness: Option<Witness>| ClaimEvidence {
        claim: Claim::PartII,
        status: EvidenceStatus::Inconclusive,
        witness,
        horizon,
        note: Some(note),
    };
    let Some(lambda0) = dominance.lambda0.filter(|_| dominance.is_asymptotically_simple) else {
        let why = if dominance.near_tie { "a near tie in modulus" } else { "no unique dominant root" };
        return Ok(inconclusive(format!("characteristic polynomial is not asymptotically simple ({why})"), 0, None));
    };
    let degeneracy = degeneracy_check(rec, init, lambda0, opts.degeneracy_tol)?;
    let mut estimate = None;
    if opts.prefer_exact && preferred_mode(rec, init) == Mode::Exact {
        let exact_opts = RatioOptions { max_k: opts.ratio.max_k.min(opts.exact_max_k).max(4 * rec.order()), ..opts.ratio };
        let e = estimate_ratio_limit_in(rec, init, &exact_opts, Mode::Exact)?;
        if e.status == RatioStatus::Converged {
            estimate = Some(e);
        }
    }
    let estimate = match estimate {
        Some(e) => e,
        None => estimate_ratio_limit(rec, init, &opts.ratio)?,
    };
    let witness = |measured| Witness::Ratio {
        measured,
        lambda0,
        k_converged: estimate.k_converged,
        mode: estimate.mode,
        degeneracy: degeneracy.clone(),
    };
    let (RatioStatus::Converged, Some(measured)) = (estimate.status, estimate.value) else {
        return Ok(inconclusive(
            String::from("ratio did not converge within the horizon"),
            estimate.horizon,
            estimate.value.map(witness),
        ));
    };
    let agrees = (measured - lambda0).norm() <= part_ii_threshold(lambda0, opts.ratio.tol);
    let note = match (agrees, degeneracy.degenerate) {
        (false, true) => Some(String::from("limit-expression denominator vanishes at lambda0")),
        (false, false) => Some(String::from("limit differs from lambda0 with a nonzero limit-expression denominator")),
        (true, true) if estimate.mode == Mode::Float => {
            Some(String::from("denominator vanishes; agreement comes from roundoff re-injecting the dominant mode"))
        }
        _ => None,
    };
    Ok(ClaimEvidence {
        claim: Claim::PartII,
        status: if agrees { EvidenceStatus::Supported } else { EvidenceStatus::Violated },
        witness: Some(witness(measured)),
        horizon: estimate.horizon,
        note,
    })
}

/// Kind of random entries drawn by [`batch_audit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum EntryKind {
    Integer,
    Rational,
    GaussianRational,
    Float,
}

/// Random instance generator. Numerators (or float values) are drawn from
/// `lo..=hi`, denominators from `1..=max_denominator`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InstanceSource {
    pub kind: EntryKind,
    pub lo: i64,
    pub hi: i64,
    pub max_denominator: i64,
    pub n_min: usize,
    pub n_max: usize,
    pub part_i_horizon: usize,
}

impl Default for InstanceSource {
    fn default() -> Self {
        InstanceSource { kind: EntryKind::Integer, lo: -3, hi: 3, max_denominator: 4, n_min: 2, n_max: 4, part_i_horizon: 60 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BatchRecord {
    pub index: usize,
    /// Entries in the exact-literal syntax; float entries print the shortest
    /// decimal that round-trips.
    pub weights: Vec<String>,
    pub init: Vec<String>,
    pub part_i: ClaimEvidence,
    pub part_ii: ClaimEvidence,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StatusCounts {
    pub supported: usize,
    pub violated: usize,
    pub inconclusive: usize,
}

impl StatusCounts {
    fn add(&mut self, status: EvidenceStatus) {
        match status {
            EvidenceStatus::Supported => self.supported += 1,
            EvidenceStatus::Violated => self.violated += 1,
            EvidenceStatus::Inconclusive => self.inconclusive += 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BatchSummary {
    pub count: usize,
    pub part_i: StatusCounts,
    pub part_ii: StatusCounts,
    /// Audits that stopped on an error (reported as inconclusive).
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BatchReport {
    pub seed: u64,
    pub source: InstanceSource,
    pub records: Vec<BatchRecord>,
    pub summary: BatchSummary,
}

fn draw_rational(rng: &mut ChaCha8Rng, src: &InstanceSource) -> ExactComplex {
    let num = rng.gen_range(src.lo..=src.hi);
    let den = rng.gen_range(1..=src.max_denominator);
    ExactComplex::from_ratio(num, den)
}

fn draw_exact(rng: &mut ChaCha8Rng, src: &InstanceSource) -> ExactComplex {
    match src.kind {
        EntryKind::Integer => ExactComplex::from_integer(rng.gen_range(src.lo..=src.hi)),
        EntryKind::Rational => draw_rational(rng, src),
        _ => {
            let re = draw_rational(rng, src);
            let im = draw_rational(rng, src);
            ExactComplex::new(re.re().clone(), im.re().clone())
        }
    }
}

fn draw_vec<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, mut draw: impl FnMut(&mut ChaCha8Rng) -> S) -> Vec<S> {
    (0..n).map(|_| draw(rng)).collect()
}

fn draw_instance<S: Scalar>(
    rng: &mut ChaCha8Rng,
    n: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> S,
) -> (Recurrence<S>, InitialConditions<S>) {
    let rec = loop {
        if let Ok(rec) = Recurrence::new(draw_vec(rng, n, &mut draw)) {
            break rec;
        }
    };
    let init = loop {
        if let Ok(init) = InitialConditions::new(&rec, draw_vec(rng, n, &mut draw)) {
            break init;
        }
    };
    (rec, init)
}

fn format_float(z: &Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 || z.im.is_sign_negative() {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn audit_record<S: Scalar>(
    index: usize,
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
    src: &InstanceSource,
    opts: &AuditOptions,
    show: impl Fn(&S) -> String,
    errors: &mut usize,
) -> BatchRecord {
    let mut recover = |claim: Claim, r: Result<ClaimEvidence>| {
        r.unwrap_or_else(|e| {
            *errors += 1;
            ClaimEvidence {
                claim,
                status: EvidenceStatus::Inconclusive,
                witness: None,
                horizon: 0,
                note: Some(format!("error: {e}")),
            }
        })
    };
    let part_i = recover(Claim::PartI, audit_part_i(rec, init, src.part_i_horizon.max(4 * rec.order())));
    let part_ii = recover(Claim::PartII, audit_part_ii(rec, init, opts));
    BatchRecord {
        index,
        weights: rec.weights().iter().map(&show).collect(),
        init: init.values().iter().map(&show).collect(),
        part_i,
        part_ii,
    }
}

/// Audits `count` random instances drawn from a ChaCha8 stream seeded with
/// `seed`. Records come out in draw order, so the report is a pure function
/// of its arguments.
pub fn batch_audit(src: &InstanceSource, seed: u64, count: usize, opts: &AuditOptions) -> Result<BatchReport> {
    if src.n_min < 2 || src.n_min > src.n_max {
        return Err(Error::InvalidParameter("order range must satisfy 2 <= n_min <= n_max"));
    }
    if src.lo > src.hi || (src.lo == 0 && src.hi == 0) {
        return Err(Error::InvalidParameter("entry range must be nonempty and contain a nonzero value"));
    }
    if src.max_denominator < 1 {
        return Err(Error::InvalidParameter("max_denominator must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = BatchSummary { count, ..BatchSummary::default() };
    let mut records = Vec::with_capacity(count);
    for index in 0..count {
        let n = rng.gen_range(src.n_min..=src.n_max);
        let record = if src.kind == EntryKind::Float {
            let (lo, hi) = (src.lo as f64, src.hi as f64);
            let (rec, init) = draw_instance(&mut rng, n, |r| Complex64::new(r.gen_range(lo..=hi), 0.0));
            audit_record(index, &rec, &init, src, opts, format_float, &mut summary.errors)
        } else {
            let (rec, init) = draw_instance(&mut rng, n, |r| draw_exact(r, src));
            audit_record(index, &rec, &init, src, opts, |x: &ExactComplex| format!("{x}"), &mut summary.errors)
        };
        summary.part_i.add(record.part_i.status);
        summary.part_ii.add(record.part_ii.status);
        records.push(record);
    }
    Ok(BatchReport { seed, source: *src, records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::recurrence::generate_exact;

    fn exact(ws: &[i64]) -> Vec<ExactComplex> {
        ws.iter().map(|&w| ExactComplex::from_integer(w)).collect()
    }

    fn instance(b: &[i64], a: &[i64]) -> (Recurrence<ExactComplex>, InitialConditions<ExactComplex>) {
        let rec = Recurrence::new(exact(b)).unwrap();
        let init = InitialConditions::new(&rec, exact(a)).unwrap();
        (rec, init)
    }

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() <= tol
    }

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn estimator_examples() {
        let (rec, init) = instance(&[1, 1], &[0, 1]);
        let est = estimate_ratio_limit(&rec, &init, &RatioOptions::default()).unwrap();
        assert_eq!(est.status, RatioStatus::Converged);
        // Oracle: 165580141 / 102334155 is a consecutive Fibonacci quotient.
        assert!(close(est.value.unwrap(), 165_580_141.0 / 102_334_155.0, 1e-10));
        assert_eq!(est.skipped_zero_indices, vec![-1]);
        assert_eq!(est.empirical_k0, Some(-1));

        let (rec, init) = instance(&[0, 1], &[0, 1]);
        let est = estimate_ratio_limit(&rec, &init, &RatioOptions { max_k: 200, ..Default::default() }).unwrap();
        assert_eq!(est.status, RatioStatus::NotConverged);
        assert_eq!(est.value, None);
        assert_eq!(est.empirical_k0, None);

        let (rec, init) = instance(&[2, 2], &[0, 1]);
        let est = estimate_ratio_limit_in(&rec, &init, &RatioOptions::default(), Mode::Exact).unwrap();
        assert_eq!(est.status, RatioStatus::Converged);
        assert!(close(est.value.unwrap(), 1.0 + 3f64.sqrt(), 1e-10));
    }

    #[test]
    fn estimator_rejects_bad_options() {
        let (rec, init) = instance(&[1, 1], &[0, 1]);
        assert!(estimate_ratio_limit(&rec, &init, &RatioOptions { tol: 0.0, ..Default::default() }).is_err());
        assert!(estimate_ratio_limit(&rec, &init, &RatioOptions { max_k: 7, ..Default::default() }).is_err());
        let frec = rec.to_approx();
        let finit = init.to_approx();
        assert_eq!(
            estimate_ratio_limit_in(&frec, &finit, &RatioOptions::default(), Mode::Exact).unwrap_err(),
            Error::ExactModeUnavailable
        );
    }

    #[test]
    fn decomposition_examples() {
        let (rec, init) = instance(&[1, 1], &[1, 1]);
        assert_eq!(decompose_via_fundamental(&rec, &init, 3).unwrap(), ExactComplex::from_integer(5));
        let (rec, init) = instance(&[1, 1], &[-1, 1]);
        assert_eq!(decompose_via_fundamental(&rec, &init, 1).unwrap(), ExactComplex::from_integer(0));
        let (rec, init) = instance(&[4, -2, -3], &[1, 1, 2]);
        assert_eq!(decompose_via_fundamental(&rec, &init, 2).unwrap(), ExactComplex::from_integer(5));
        assert!(decompose_via_fundamental(&rec, &init, 0).is_err());
        let all = decompose_range(&rec, &init, 12).unwrap();
        let direct = generate_exact(&rec, &init, 12).unwrap();
        assert!((1..=12).all(|k| &all[k as usize - 1] == direct.term(k)));
    }

    #[test]
    fn limit_expression_examples() {
        let (rec, init) = instance(&[1, 1], &[0, 1]);
        let e = limit_expression(&rec, &init, Complex64::new(PHI, 0.0)).unwrap();
        assert!(close(e.denominator, 1.0, 1e-15));
        assert!(close(e.value.unwrap(), PHI, 1e-15));

        let (rec, init) = instance(&[4, -2, -3], &[1, 1, 2]);
        let e = limit_expression(&rec, &init, Complex64::new(3.0, 0.0)).unwrap();
        assert!(e.denominator.norm() < 1e-15);
        assert_eq!(e.value, None);
        assert!(limit_expression(&rec, &init, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn degeneracy_examples() {
        let (rec, init) = instance(&[1, 1], &[0, 1]);
        let r = degeneracy_check(&rec, &init, Complex64::new(PHI, 0.0), DEFAULT_DEGENERACY_TOL).unwrap();
        assert!(!r.degenerate && !r.exact);
        assert!((r.relative_magnitude - 1.0).abs() < 1e-15);

        let (rec, init) = instance(&[4, -2, -3], &[1, 1, 2]);
        let r = degeneracy_check(&rec, &init, Complex64::new(3.0 + 1e-13, 0.0), DEFAULT_DEGENERACY_TOL).unwrap();
        assert!(r.degenerate && r.exact);
        assert_eq!(r.denominator, Complex64::new(0.0, 0.0));

        let rec = Recurrence::new(vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let init = InitialConditions::new(&rec, vec![Complex64::new(1.0, 0.0), Complex64::new(-0.618_033_988_749_894_9, 0.0)])
            .unwrap();
        let r = degeneracy_check(&rec, &init, Complex64::new(PHI, 0.0), DEFAULT_DEGENERACY_TOL).unwrap();
        assert!(r.degenerate && !r.exact);
    }

    #[test]
    fn condition_11_examples() {
        let ks = default_condition_11_samples(200, 16);
        assert_eq!(ks.len(), 16);
        assert_eq!(*ks.last().unwrap(), 200);

        // With F_{-1} = 0, F_0 = 1 the terms are shifted Fibonacci numbers and
        // F_k / φ^k tends to φ/√5.
        let (rec, init) = instance(&[1, 1], &[0, 1]);
        let r = condition_11_estimate(&rec, &init, Complex64::new(PHI, 0.0), 1, &ks, Mode::Exact).unwrap();
        assert_eq!(r.trend, Trend::Stabilizing);
        assert!((r.final_magnitude - PHI / 5f64.sqrt()).abs() < 1e-9);

        let (rec, init) = instance(&[4, -2, -3], &[1, 1, 2]);
        let r = condition_11_estimate(&rec, &init, Complex64::new(3.0, 0.0), 1, &ks, Mode::Exact).unwrap();
        assert_eq!(r.trend, Trend::Vanishing);

        let (rec, init) = instance(&[2, 2], &[0, 1]);
        let r = condition_11_estimate(&rec, &init, Complex64::new(1.0 + 3f64.sqrt(), 0.0), 1, &ks, Mode::Float).unwrap();
        assert_eq!(r.trend, Trend::Stabilizing);

        assert!(condition_11_estimate(&rec, &init, Complex64::new(2.0, 0.0), 1, &[3, 2], Mode::Float).is_err());
        assert!(condition_11_estimate(&rec, &init, Complex64::new(2.0, 0.0), 0, &[1], Mode::Float).is_err());
    }

    #[test]
    fn part_i_examples() {
        let (rec, init) = instance(&[1, 1], &[1, 1]);
        assert_eq!(audit_part_i(&rec, &init, 60).unwrap().status, EvidenceStatus::Supported);

        let (rec, init) = instance(&[1, 1], &[-1, 1]);
        let ev = audit_part_i(&rec, &init, 60).unwrap();
        assert_eq!(ev.status, EvidenceStatus::Violated);
        match ev.witness.unwrap() {
            Witness::ZeroTerm { index, k0, value } => {
                assert_eq!((index, k0), (1, -1));
                assert_eq!(value, Complex64::new(0.0, 0.0));
            }
            other => panic!("unexpected witness {other:?}"),
        }

        let (rec, init) = instance(&[0, 1], &[0, 1]);
        assert_eq!(audit_part_i(&rec, &init, 60).unwrap().status, EvidenceStatus::Inconclusive);
        assert!(audit_part_i(&rec, &init, 7).is_err());
    }

    #[test]
    fn part_i_reanchors_zero_head() {
        // F: 0, 1, -1, 2, -3, ... under b = (-1, 1): the head is re-anchored.
        let (rec, init) = instance(&[-1, 1], &[0, 1]);
        let ev = audit_part_i(&rec, &init, 60).unwrap();
        assert!(ev.note.unwrap().contains("re-anchored"));
    }

    #[test]
    fn part_ii_examples() {
        let opts = AuditOptions::default();
        let (rec, init) = instance(&[1, 1], &[-1, 2]);
        let ev = audit_part_ii(&rec, &init, &opts).unwrap();
        assert_eq!(ev.status, EvidenceStatus::Supported);

        let (rec, init) = instance(&[4, -2, -3], &[1, 1, 2]);
        let ev = audit_part_ii(&rec, &init, &opts).unwrap();
        assert_eq!(ev.status, EvidenceStatus::Violated);
        match ev.witness.unwrap() {
            Witness::Ratio { measured, lambda0, degeneracy, mode, .. } => {
                assert!(close(measured, PHI, 1e-9));
                assert!(close(lambda0, 3.0, 1e-12));
                assert!(degeneracy.degenerate);
                assert_eq!(mode, Mode::Exact);
            }
            other => panic!("unexpected witness {other:?}"),
        }

        let (rec, init) = instance(&[4, -2, -3], &[0, 0, 1]);
        assert_eq!(audit_part_ii(&rec, &init, &opts).unwrap().status, EvidenceStatus::Supported);

        let (rec, init) = instance(&[0, 1], &[0, 1]);
        assert_eq!(audit_part_ii(&rec, &init, &opts).unwrap().status, EvidenceStatus::Inconclusive);
    }

    #[test]
    fn batch_is_deterministic() {
        let src = InstanceSource::default();
        let opts = AuditOptions::default();
        let a = batch_audit(&src, 42, 20, &opts).unwrap();
        let b = batch_audit(&src, 42, 20, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 20);
        let s = a.summary;
        assert_eq!(s.part_i.supported + s.part_i.violated + s.part_i.inconclusive, 20);
        for r in &a.records {
            if r.part_i.status == EvidenceStatus::Violated || r.part_ii.status == EvidenceStatus::Violated {
                assert!(r.part_i.status != EvidenceStatus::Violated || r.part_i.witness.is_some());
                assert!(r.part_ii.status != EvidenceStatus::Violated || r.part_ii.witness.is_some());
            }
        }
        let empty = batch_audit(&src, 42, 0, &opts).unwrap();
        assert!(empty.records.is_empty());
        assert_eq!(empty.summary, BatchSummary::default());
    }

    #[test]
    fn batch_other_entry_kinds() {
        let opts = AuditOptions::default();
        for kind in [EntryKind::Rational, EntryKind::GaussianRational, EntryKind::Float] {
            let src = InstanceSource { kind, ..Default::default() };
            let report = batch_audit(&src, 7, 5, &opts).unwrap();
            assert_eq!(report.records.len(), 5);
        }
        let bad = InstanceSource { n_min: 1, ..Default::default() };
        assert!(batch_audit(&bad, 1, 1, &opts).is_err());
    }
}
