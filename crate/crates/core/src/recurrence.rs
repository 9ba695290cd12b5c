//! Weighted n-generalized Fibonacci recurrences
//! `F_k = b_1 F_{k-1} + ... + b_n F_{k-n}` for `k > 0`, with `F_k = a_k` for
//! `k = -n+1..=0`.
//!
//! All interfaces address terms by their sequence index `k`, so the initial
//! conditions occupy indices `-n+1..=0`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
// Needed without std; std's inherent float methods shadow it otherwise.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{ExactComplex, Scalar};

/// Float windows are renormalized once their largest modulus leaves this band.
const RENORM_HIGH: f64 = 1e50;
const RENORM_LOW: f64 = 1e-50;
/// Relative threshold of the float zero test.
pub const FLOAT_ZERO_REL: f64 = 1e-12;

/// Arithmetic used to generate terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "lowercase"))]
pub enum Mode {
    Exact,
    Float,
}

/// A linear recurrence of order `n >= 2` with weights `b_1..b_n`, `b_n != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Recurrence<S> {
    weights: Vec<S>,
}

impl<S: Scalar> Recurrence<S> {
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::RejectedOrder(weights.len()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        if weights[weights.len() - 1].is_zero() {
            return Err(Error::RejectedLastWeightZero);
        }
        Ok(Self { weights })
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `b_i` for `i` in `1..=n`.
    pub fn weight(&self, i: usize) -> &S {
        &self.weights[i - 1]
    }

    pub fn to_approx(&self) -> Recurrence<Complex64> {
        Recurrence { weights: self.weights.iter().map(Scalar::to_approx).collect() }
    }

    pub fn to_exact(&self) -> Option<Recurrence<ExactComplex>> {
        let weights = self.weights.iter().map(Scalar::to_exact).collect::<Option<Vec<_>>>()?;
        Some(Recurrence { weights })
    }
}

/// Initial values `a_{-n+1}, ..., a_0`, listed in index order.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialConditions<S> {
    values: Vec<S>,
}

impl<S: Scalar> InitialConditions<S> {
    pub fn new(rec: &Recurrence<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != rec.order() {
            return Err(Error::RejectedLength { expected: rec.order(), actual: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if values.iter().all(Scalar::is_zero) {
            return Err(Error::RejectedTrivial);
        }
        Ok(Self { values })
    }

    /// The fundamental initial conditions `(0, ..., 0, 1)`.
    pub fn fundamental(n: usize) -> Self {
        let mut values = vec![S::zero(); n];
        values[n - 1] = S::one();
        Self { values }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a_k` for `k` in `-n+1..=0`.
    pub fn at(&self, k: i64) -> &S {
        let n = self.values.len() as i64;
        &self.values[(k + n - 1) as usize]
    }

    /// `a_{-i}` for `i` in `0..n`.
    pub fn back(&self, i: usize) -> &S {
        &self.values[self.values.len() - 1 - i]
    }

    /// `c · a` (nontrivial whenever `c != 0`).
    pub fn scaled(&self, c: &S) -> Result<Self> {
        let values: Vec<S> = self.values.iter().map(|v| c.clone() * v.clone()).collect();
        if values.iter().all(Scalar::is_zero) {
            return Err(Error::RejectedTrivial);
        }
        Ok(Self { values })
    }

    pub fn to_approx(&self) -> InitialConditions<Complex64> {
        InitialConditions { values: self.values.iter().map(Scalar::to_approx).collect() }
    }

    pub fn to_exact(&self) -> Option<InitialConditions<ExactComplex>> {
        let values = self.values.iter().map(Scalar::to_exact).collect::<Option<Vec<_>>>()?;
        Some(InitialConditions { values })
    }
}

/// Terms `F_k` for `k = start_index, start_index + 1, ...` computed exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactWindow {
    start_index: i64,
    order: usize,
    terms: Vec<ExactComplex>,
}

/// Terms computed in double precision. The true value of term `k` is
/// `terms[k] · exp(log_scales[k])`; stored moduli stay within `[0, 1e100]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatWindow {
    start_index: i64,
    order: usize,
    terms: Vec<Complex64>,
    log_scales: Vec<f64>,
}

/// A generated stretch of a sequence, in either arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceWindow {
    Exact(ExactWindow),
    Float(FloatWindow),
}

impl ExactWindow {
    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn end_index(&self) -> i64 {
        self.start_index + self.terms.len() as i64 - 1
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &[ExactComplex] {
        &self.terms
    }

    pub fn term(&self, k: i64) -> &ExactComplex {
        &self.terms[(k - self.start_index) as usize]
    }

    /// `F_{k+1} / F_k` when both terms are nonzero.
    pub fn ratio(&self, k: i64) -> Option<Complex64> {
        let (num, den) = (self.term(k + 1), self.term(k));
        if num.is_zero() || den.is_zero() {
            return None;
        }
        num.to_scaled().ratio(&den.to_scaled())
    }
}

impl FloatWindow {
    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn end_index(&self) -> i64 {
        self.start_index + self.terms.len() as i64 - 1
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Stored (renormalized) values.
    pub fn stored_terms(&self) -> &[Complex64] {
        &self.terms
    }

    pub fn log_scales(&self) -> &[f64] {
        &self.log_scales
    }

    fn idx(&self, k: i64) -> usize {
        (k - self.start_index) as usize
    }

    /// Stored value and the log of its scale factor.
    pub fn scaled_term(&self, k: i64) -> (Complex64, f64) {
        let i = self.idx(k);
        (self.terms[i], self.log_scales[i])
    }

    /// The term with its scale undone; may overflow for large `k`.
    pub fn term(&self, k: i64) -> Complex64 {
        let (v, s) = self.scaled_term(k);
        v * s.exp()
    }

    pub fn ln_modulus(&self, k: i64) -> f64 {
        let (v, s) = self.scaled_term(k);
        let m = v.norm();
        if m == 0.0 {
            f64::NEG_INFINITY
        } else {
            m.ln() + s
        }
    }

    /// Float zero test: `|F_k|` at most `1e-12` times the largest modulus among
    /// the `n` terms ending at `max(k, 0)`.
    pub fn is_zero_at(&self, k: i64) -> bool {
        let own = self.ln_modulus(k);
        if own == f64::NEG_INFINITY {
            return true;
        }
        let hi = k.max(0).min(self.end_index());
        let lo = (hi - self.order as i64 + 1).max(self.start_index);
        let peak = (lo..=hi).map(|j| self.ln_modulus(j)).fold(f64::NEG_INFINITY, f64::max);
        own <= FLOAT_ZERO_REL.ln() + peak
    }

    /// `F_{k+1} / F_k` when neither term is zero under the float zero test.
    pub fn ratio(&self, k: i64) -> Option<Complex64> {
        if self.is_zero_at(k) || self.is_zero_at(k + 1) {
            return None;
        }
        let (num, sn) = self.scaled_term(k + 1);
        let (den, sd) = self.scaled_term(k);
        Some(num / den * (sn - sd).exp())
    }
}

impl SequenceWindow {
    pub fn start_index(&self) -> i64 {
        match self {
            SequenceWindow::Exact(w) => w.start_index,
            SequenceWindow::Float(w) => w.start_index,
        }
    }

    pub fn end_index(&self) -> i64 {
        match self {
            SequenceWindow::Exact(w) => w.end_index(),
            SequenceWindow::Float(w) => w.end_index(),
        }
    }

    pub fn len(&self) -> usize {
        (self.end_index() - self.start_index() + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_zero_at(&self, k: i64) -> bool {
        match self {
            SequenceWindow::Exact(w) => w.term(k).is_zero(),
            SequenceWindow::Float(w) => w.is_zero_at(k),
        }
    }

    pub fn ratio(&self, k: i64) -> Option<Complex64> {
        match self {
            SequenceWindow::Exact(w) => w.ratio(k),
            SequenceWindow::Float(w) => w.ratio(k),
        }
    }

    /// Term `k` as a double (scale undone).
    pub fn approx_term(&self, k: i64) -> Complex64 {
        match self {
            SequenceWindow::Exact(w) => w.term(k).to_approx(),
            SequenceWindow::Float(w) => w.term(k),
        }
    }

    pub fn ln_modulus(&self, k: i64) -> f64 {
        match self {
            SequenceWindow::Exact(w) => w.term(k).ln_modulus(),
            SequenceWindow::Float(w) => w.ln_modulus(k),
        }
    }

    pub fn as_exact(&self) -> Option<&ExactWindow> {
        match self {
            SequenceWindow::Exact(w) => Some(w),
            SequenceWindow::Float(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<&FloatWindow> {
        match self {
            SequenceWindow::Float(w) => Some(w),
            SequenceWindow::Exact(_) => None,
        }
    }
}

/// Streaming exact generator yielding `(k, F_k)` from `k = -n+1` onwards.
///
/// Denominators are cleared up front: with `q` the common denominator of the
/// weights and `d` that of the initial conditions, `G_k = d q^(k+n-1) F_k`
/// satisfies `G_k = Σ (q b_i) q^(i-1) G_{k-i}` over the Gaussian integers, so
/// the recurrence itself runs without any gcd work.
#[derive(Clone, Debug)]
pub struct ExactTerms {
    init: Vec<ExactComplex>,
    /// `q b_i q^(i-1)`.
    weights: Vec<GaussInt>,
    /// `G` values, most recent last.
    window: Vec<GaussInt>,
    q: BigInt,
    /// `d q^(k+n-1)` for the last emitted `k`.
    denom: BigInt,
    next_index: i64,
    n: i64,
}

#[derive(Clone, Debug, PartialEq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `x · scale`, where `scale` clears the denominators of `x`.
    fn scaled(x: &ExactComplex, scale: &BigInt) -> Self {
        let part = |r: &BigRational| (r.numer() * scale) / r.denom();
        GaussInt { re: part(x.re()), im: part(x.im()) }
    }

    fn mul_add(&self, other: &GaussInt, acc: &mut GaussInt) {
        let (a, b, c, d) = (&self.re, &self.im, &other.re, &other.im);
        if b.is_zero() && d.is_zero() {
            acc.re += a * c;
        } else {
            acc.re += a * c - b * d;
            acc.im += a * d + b * c;
        }
    }
}

fn common_denominator<'a>(values: impl Iterator<Item = &'a ExactComplex>) -> BigInt {
    values.fold(BigInt::one(), |acc, x| acc.lcm(x.re().denom()).lcm(x.im().denom()))
}

impl ExactTerms {
    pub fn new(rec: &Recurrence<ExactComplex>, init: &InitialConditions<ExactComplex>) -> Self {
        let n = rec.order() as i64;
        let q = common_denominator(rec.weights.iter());
        let d = common_denominator(init.values.iter());
        let mut power = BigInt::one();
        let weights = rec
            .weights
            .iter()
            .map(|b| {
                let w = GaussInt::scaled(b, &(&q * &power));
                power *= &q;
                w
            })
            .collect();
        let mut power = d.clone();
        let window = init
            .values
            .iter()
            .map(|a| {
                let g = GaussInt::scaled(a, &power);
                power *= &q;
                g
            })
            .collect();
        // Denominator of G_0 is d q^(n-1); the next step multiplies by q.
        let denom = d * num_traits::pow(q.clone(), (n - 1) as usize);
        Self { init: init.values.clone(), weights, window, q, denom, next_index: -n + 1, n }
    }
}

impl Iterator for ExactTerms {
    type Item = (i64, ExactComplex);

    fn next(&mut self) -> Option<Self::Item> {
        let k = self.next_index;
        self.next_index += 1;
        if k <= 0 {
            return Some((k, self.init[(k + self.n - 1) as usize].clone()));
        }
        let n = self.weights.len();
        let mut acc = GaussInt { re: BigInt::zero(), im: BigInt::zero() };
        for (i, w) in self.weights.iter().enumerate() {
            let prev = &self.window[n - 1 - i];
            if !w.is_zero() && !prev.is_zero() {
                w.mul_add(prev, &mut acc);
            }
        }
        self.denom *= &self.q;
        let value = ExactComplex::new(
            BigRational::new(acc.re.clone(), self.denom.clone()),
            BigRational::new(acc.im.clone(), self.denom.clone()),
        );
        self.window.remove(0);
        self.window.push(acc);
        Some((k, value))
    }
}

/// Streaming float generator yielding `(k, stored value, log scale)`.
#[derive(Clone, Debug)]
pub struct FloatTerms {
    weights: Vec<Complex64>,
    window: Vec<Complex64>,
    log_scale: f64,
    next_index: i64,
    n: i64,
}

impl FloatTerms {
    pub fn new<S: Scalar>(rec: &Recurrence<S>, init: &InitialConditions<S>) -> Self {
        let n = rec.order() as i64;
        let mut gen = Self {
            weights: rec.weights.iter().map(Scalar::to_approx).collect(),
            window: init.values.iter().map(Scalar::to_approx).collect(),
            log_scale: 0.0,
            next_index: -n + 1,
            n,
        };
        gen.renormalize();
        gen
    }

    fn renormalize(&mut self) {
        let peak = self.window.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak > RENORM_HIGH || (peak > 0.0 && peak < RENORM_LOW) {
            for z in &mut self.window {
                *z /= peak;
            }
            self.log_scale += peak.ln();
        }
    }
}

impl Iterator for FloatTerms {
    type Item = (i64, Complex64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let k = self.next_index;
        self.next_index += 1;
        if k <= 0 {
            return Some((k, self.window[(k + self.n - 1) as usize], self.log_scale));
        }
        let n = self.weights.len();
        let value: Complex64 = self.weights.iter().enumerate().map(|(i, b)| b * self.window[n - 1 - i]).sum();
        self.window.remove(0);
        self.window.push(value);
        self.renormalize();
        Some((k, self.window[n - 1], self.log_scale))
    }
}

/// Exact terms `F_{-n+1}..=F_count`.
pub fn generate_exact(
    rec: &Recurrence<ExactComplex>,
    init: &InitialConditions<ExactComplex>,
    count: usize,
) -> Result<ExactWindow> {
    if count < 1 {
        return Err(Error::InvalidParameter("count must be at least 1"));
    }
    let n = rec.order();
    let terms = ExactTerms::new(rec, init).take(n + count).map(|(_, f)| f).collect();
    Ok(ExactWindow { start_index: -(n as i64) + 1, order: n, terms })
}

/// Float terms `F_{-n+1}..=F_count`, renormalized against overflow and underflow.
pub fn generate_float<S: Scalar>(rec: &Recurrence<S>, init: &InitialConditions<S>, count: usize) -> Result<FloatWindow> {
    if count < 1 {
        return Err(Error::InvalidParameter("count must be at least 1"));
    }
    let n = rec.order();
    let mut terms = Vec::with_capacity(n + count);
    let mut log_scales = Vec::with_capacity(n + count);
    for (_, v, s) in FloatTerms::new(rec, init).take(n + count) {
        terms.push(v);
        log_scales.push(s);
    }
    Ok(FloatWindow { start_index: -(n as i64) + 1, order: n, terms, log_scales })
}

/// Terms `F_{-n+1}..=F_count` in the requested arithmetic. Exact mode needs
/// exact inputs.
pub fn generate<S: Scalar>(
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
    count: usize,
    mode: Mode,
) -> Result<SequenceWindow> {
    match mode {
        Mode::Exact => {
            let (rec, init) = exact_pair(rec, init)?;
            generate_exact(&rec, &init, count).map(SequenceWindow::Exact)
        }
        Mode::Float => generate_float(rec, init, count).map(SequenceWindow::Float),
    }
}

pub(crate) fn exact_pair<S: Scalar>(
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
) -> Result<(Recurrence<ExactComplex>, InitialConditions<ExactComplex>)> {
    match (rec.to_exact(), init.to_exact()) {
        (Some(r), Some(i)) => Ok((r, i)),
        _ => Err(Error::ExactModeUnavailable),
    }
}

/// Zero bookkeeping over a generated window.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ZeroRunReport {
    pub longest_zero_run: usize,
    /// Minimal `k0` with `F_k != 0` for every `k > k0` in the window, reported
    /// only when that nonzero tail covers at least half of the window (and at
    /// least `n` terms); otherwise the horizon shows no settled tail.
    pub first_index_after_which_all_nonzero: Option<i64>,
    pub zero_indices: Vec<i64>,
}

/// Scans a window for zero terms. A run of `n` zeros cannot occur for
/// nontrivial initial conditions with `b_n != 0`, so it is reported as an error.
pub fn zero_run_stats(win: &SequenceWindow, n: usize) -> Result<ZeroRunReport> {
    let (start, end) = (win.start_index(), win.end_index());
    let mut zero_indices = Vec::new();
    let mut longest = 0usize;
    let mut run = 0usize;
    for k in start..=end {
        if win.is_zero_at(k) {
            zero_indices.push(k);
            run += 1;
            longest = longest.max(run);
            if run >= n {
                return Err(Error::ZeroRunBoundViolated { length: run, end: k, order: n });
            }
        } else {
            run = 0;
        }
    }
    let last_zero = zero_indices.last().copied().unwrap_or(start - 1);
    let tail = (end - last_zero) as usize;
    let needed = n.max(win.len().div_ceil(2));
    let k0 = (tail >= needed).then_some(last_zero);
    Ok(ZeroRunReport { longest_zero_run: longest, first_index_after_which_all_nonzero: k0, zero_indices })
}

/// Initial conditions re-anchored at the first nonzero term.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedHead<S> {
    /// `(F_{k'}, ..., F_{k'+n-1})`.
    pub init: InitialConditions<S>,
    /// `k'`, the index of the first nonzero term.
    pub first_nonzero_index: i64,
    /// Term `j` of the shifted sequence equals term `j + shift` of the original.
    pub shift: i64,
}

/// Re-anchors the sequence so that the head of the initial conditions is
/// nonzero. The zero test follows `mode`.
pub fn shift_to_nonzero_head<S: Scalar>(
    rec: &Recurrence<S>,
    init: &InitialConditions<S>,
    mode: Mode,
) -> Result<ShiftedHead<S>> {
    let n = rec.order();
    let probe = generate(rec, init, 2 * n - 2, mode)?;
    let start = probe.start_index();
    let first = (start..=probe.end_index())
        .find(|&k| !probe.is_zero_at(k))
        .ok_or(Error::ZeroRunBoundViolated { length: probe.len(), end: probe.end_index(), order: n })?;
    // Recompute in S so the result is another instance over the same field.
    // Position `p` of `terms` holds F_{p-n+1}.
    let mut terms: Vec<S> = init.values.clone();
    let needed = (first + 2 * n as i64 - 1) as usize;
    while terms.len() < needed {
        let len = terms.len();
        let next = (1..=n).fold(S::zero(), |acc, i| acc + rec.weights[i - 1].clone() * terms[len - i].clone());
        terms.push(next);
    }
    let head = (first + n as i64 - 1) as usize;
    let values = terms[head..head + n].to_vec();
    Ok(ShiftedHead { init: InitialConditions { values }, first_nonzero_index: first, shift: first + n as i64 - 1 })
}
