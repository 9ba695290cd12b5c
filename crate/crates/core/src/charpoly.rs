//! Characteristic polynomials `x^n - b_1 x^(n-1) - ... - b_n`, their roots,
//! and the asymptotic-simplicity classification.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::recurrence::Recurrence;
use crate::scalar::{rational_near, ApproxComplex, ExactComplex, Scalar};

/// Default relative residual accepted for a reported root.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;
/// Default relative tolerance of the max-modulus tie test.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;
/// Moduli within this many tie tolerances of the maximum, but outside the
/// tie band, are reported as a near tie.
const NEAR_TIE_FACTOR: f64 = 1e3;
const MAX_ITERATIONS: usize = 1000;
const STEP_TOL: f64 = 1e-14;
/// Clustering radii, relative to `1 + max modulus`; the last one is accepted
/// without verification.
const CLUSTER_RADII: [f64; 6] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
/// Slack on roundoff bounds when verifying a multiple root.
const MULTIPLE_ROOT_SLACK: f64 = 1e3;
const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A monic polynomial kept in recurrence form `x^n - b_1 x^(n-1) - ... - b_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPolynomial<S> {
    weights: Vec<S>,
}

/// The characteristic polynomial of a recurrence.
pub fn characteristic_polynomial<S: Scalar>(rec: &Recurrence<S>) -> MonicPolynomial<S> {
    MonicPolynomial { weights: rec.weights().to_vec() }
}

impl<S: Scalar> MonicPolynomial<S> {
    pub fn degree(&self) -> usize {
        self.weights.len()
    }

    /// `b_1..b_n`.
    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// All `n + 1` coefficients, constant term first; the last is `1`.
    pub fn coefficients_ascending(&self) -> Vec<S> {
        let mut coeffs: Vec<S> = self.weights.iter().rev().map(|b| -b.clone()).collect();
        coeffs.push(S::one());
        coeffs
    }

    pub fn to_approx(&self) -> MonicPolynomial<Complex64> {
        MonicPolynomial { weights: self.weights.iter().map(Scalar::to_approx).collect() }
    }

    pub fn to_exact(&self) -> Option<MonicPolynomial<ExactComplex>> {
        let weights = self.weights.iter().map(Scalar::to_exact).collect::<Option<Vec<_>>>()?;
        Some(MonicPolynomial { weights })
    }

    /// `p(z)` in double precision.
    pub fn eval_approx(&self, z: Complex64) -> Complex64 {
        horner(&self.approx_coefficients(), z).0
    }

    fn approx_coefficients(&self) -> Vec<Complex64> {
        self.coefficients_ascending().iter().map(Scalar::to_approx).collect()
    }
}

impl MonicPolynomial<ExactComplex> {
    pub fn eval_exact(&self, z: &ExactComplex) -> ExactComplex {
        let coeffs = self.coefficients_ascending();
        coeffs.iter().rev().fold(ExactComplex::zero(), |acc, c| &(&acc * z) + c)
    }
}

impl<S: Scalar> fmt::Display for MonicPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.weights.len();
        write!(f, "x^{n}")?;
        for (i, b) in self.weights.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let power = n - 1 - i;
            let coeff = -b.clone();
            let approx = coeff.to_approx();
            if approx.im == 0.0 {
                let mut text = alloc::format!("{coeff}");
                if power > 0 && (text == "1" || text == "-1") {
                    text.pop();
                }
                match text.strip_prefix('-') {
                    Some(rest) => write!(f, " - {rest}")?,
                    None => write!(f, " + {text}")?,
                }
            } else {
                write!(f, " + ({coeff})")?;
            }
            match power {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{power}")?,
            }
        }
        Ok(())
    }
}

/// Value, derivative and the roundoff scale `sum |a_i| |z|^i`.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let r = z.norm();
    let mut p = C_ZERO;
    let mut dp = C_ZERO;
    let mut bound = 0.0;
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        bound = bound * r + c.norm();
    }
    (p, dp, bound)
}

/// Taylor coefficients `p^(j)(c) / j!` at `c`, each paired with its roundoff scale.
fn taylor(coeffs: &[Complex64], c: Complex64) -> Vec<(Complex64, f64)> {
    let n = coeffs.len() - 1;
    let mut t = coeffs.to_vec();
    let mut m: Vec<f64> = coeffs.iter().map(|z| z.norm()).collect();
    let r = c.norm();
    for i in 0..n {
        for j in (i..n).rev() {
            let next = t[j + 1];
            t[j] += c * next;
            m[j] += r * m[j + 1];
        }
    }
    t.into_iter().zip(m).collect()
}

/// A root with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Root {
    pub value: ApproxComplex,
    pub multiplicity: usize,
}

/// All roots of a polynomial, sorted by non-increasing modulus.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Largest `|p(λ)|` over the reported roots.
    pub residual_bound: f64,
    /// Every cluster member lies within this distance of its reported root.
    pub cluster_radius: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Multiplicities in non-increasing order.
    pub fn multiplicity_profile(&self) -> Vec<usize> {
        let mut profile: Vec<usize> = self.roots.iter().map(|r| r.multiplicity).collect();
        profile.sort_unstable_by(|a, b| b.cmp(a));
        profile
    }
}

/// Finds all roots by simultaneous Aberth–Ehrlich iteration, then groups the
/// iterates into multiple roots.
///
/// `residual_tol` bounds `|p(λ)| / Σ|a_i||λ|^i` for every reported root.
pub fn find_roots<S: Scalar>(poly: &MonicPolynomial<S>, residual_tol: f64) -> Result<RootSet> {
    if !(residual_tol > 0.0) {
        return Err(Error::InvalidParameter("residual tolerance must be positive"));
    }
    let coeffs = poly.approx_coefficients();
    let n = poly.degree();
    let iterates = aberth(&coeffs)?;
    let max_modulus = iterates.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = 1.0 + max_modulus;

    let groups = resolve_clusters(&coeffs, &iterates, (0..n).collect(), 0, scale);
    let mut roots = Vec::with_capacity(groups.len());
    let mut cluster_radius = CLUSTER_RADII[CLUSTER_RADII.len() - 1] * scale;
    let mut residual_bound: f64 = 0.0;
    let mut worst_relative: f64 = 0.0;
    let real_poly = coeffs.iter().all(|c| c.im == 0.0);
    let values: Vec<Complex64> = groups.iter().map(|(_, v)| *v).collect();
    for (gi, (members, mut value)) in groups.into_iter().enumerate() {
        if real_poly {
            value = snap_to_real(&coeffs, &values, gi, value, residual_tol);
        }
        let spread = members.iter().map(|&i| (iterates[i] - value).norm()).fold(0.0, f64::max);
        cluster_radius = cluster_radius.max(spread);
        let (p, _, bound) = horner(&coeffs, value);
        residual_bound = residual_bound.max(p.norm());
        worst_relative = worst_relative.max(if bound > 0.0 { p.norm() / bound } else { 0.0 });
        roots.push(Root { value, multiplicity: members.len() });
    }
    if worst_relative > residual_tol {
        return Err(Error::NoConvergence { iterations: MAX_ITERATIONS, max_residual: worst_relative });
    }
    roots.sort_by(root_order);
    Ok(RootSet { roots, residual_bound, cluster_radius })
}

/// Drops a roundoff imaginary part from a root of a real polynomial, unless
/// the root has a conjugate partner or the real point is a worse root.
fn snap_to_real(coeffs: &[Complex64], values: &[Complex64], index: usize, z: Complex64, residual_tol: f64) -> Complex64 {
    let im = z.im.abs();
    if im == 0.0 || im > 1e-8 * z.norm().max(1.0) {
        return z;
    }
    let partner = values.iter().enumerate().any(|(j, w)| j != index && (w.conj() - z).norm() <= 4.0 * im);
    if partner {
        return z;
    }
    let real = Complex64::new(z.re, 0.0);
    let (p, _, bound) = horner(coeffs, real);
    if bound == 0.0 || p.norm() <= residual_tol * bound {
        real
    } else {
        z
    }
}

fn root_order(a: &Root, b: &Root) -> Ordering {
    let (ma, mb) = (a.value.norm(), b.value.norm());
    if (ma - mb).abs() > 1e-12 * ma.max(mb) {
        return mb.partial_cmp(&ma).unwrap_or(Ordering::Equal);
    }
    b.value
        .im
        .partial_cmp(&a.value.im)
        .unwrap_or(Ordering::Equal)
        .then(b.value.re.partial_cmp(&a.value.re).unwrap_or(Ordering::Equal))
}

fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut frozen = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut active = false;
        for k in 0..n {
            if frozen[k] {
                continue;
            }
            let (p, dp, bound) = horner(coeffs, z[k]);
            if p.norm() <= f64::EPSILON * bound {
                frozen[k] = true;
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k && z[j] != z[k])
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let newton = if dp == C_ZERO { Complex64::new(1e-8 * (1.0 + z[k].norm()), 0.0) } else { p / dp };
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[k] -= step;
            if step.norm() <= STEP_TOL * z[k].norm() {
                frozen[k] = true;
            } else {
                active = true;
            }
        }
        if !active && frozen.iter().all(|&f| f) {
            return Ok(z);
        }
    }
    let max_residual = z
        .iter()
        .map(|&zk| {
            let (p, _, bound) = horner(coeffs, zk);
            p.norm() / bound.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, max_residual })
}

/// Recursively groups iterates: single-linkage clusters at decreasing radii,
/// accepting a cluster of size `m` once it verifies as an `m`-fold root.
fn resolve_clusters(
    coeffs: &[Complex64],
    iterates: &[Complex64],
    members: Vec<usize>,
    level: usize,
    scale: f64,
) -> Vec<(Vec<usize>, Complex64)> {
    if members.len() == 1 {
        let value = polish_simple(coeffs, iterates[members[0]]);
        return vec![(members, value)];
    }
    let radius = CLUSTER_RADII[level] * scale;
    let mut out = Vec::new();
    for group in single_linkage(iterates, &members, radius) {
        if group.len() == 1 {
            out.extend(resolve_clusters(coeffs, iterates, group, level, scale));
            continue;
        }
        let centroid = group.iter().map(|&i| iterates[i]).sum::<Complex64>() / group.len() as f64;
        if let Some(value) = verify_multiple_root(coeffs, centroid, group.len(), radius) {
            out.push((group, value));
        } else if level + 1 < CLUSTER_RADII.len() {
            out.extend(resolve_clusters(coeffs, iterates, group, level + 1, scale));
        } else {
            out.push((group, centroid));
        }
    }
    out
}

fn single_linkage(points: &[Complex64], members: &[usize], radius: f64) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        parent[i] = root;
        root
    }
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            if (points[members[a]] - points[members[b]]).norm() <= radius {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[rb.max(ra)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label: Vec<Option<usize>> = vec![None; members.len()];
    for i in 0..members.len() {
        let r = find(&mut parent, i);
        match label[r] {
            Some(g) => groups[g].push(members[i]),
            None => {
                label[r] = Some(groups.len());
                groups.push(vec![members[i]]);
            }
        }
    }
    groups
}

/// Refines the centroid by Newton's method on `p^(m-1)`, which has a simple
/// zero at an `m`-fold root of `p`, then checks that `p, p', ..., p^(m-1)`
/// all vanish there to roundoff.
fn verify_multiple_root(coeffs: &[Complex64], centroid: Complex64, m: usize, radius: f64) -> Option<Complex64> {
    let mut c = centroid;
    for _ in 0..50 {
        let t = taylor(coeffs, c);
        if t[m].0 == C_ZERO {
            break;
        }
        let step = t[m - 1].0 / (t[m].0 * m as f64);
        c -= step;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + c.norm()) {
            break;
        }
    }
    if (c - centroid).norm() > 2.0 * radius {
        return None;
    }
    let t = taylor(coeffs, c);
    let vanishes = t[..m]
        .iter()
        .all(|(value, bound)| value.norm() <= MULTIPLE_ROOT_SLACK * f64::EPSILON * bound);
    vanishes.then_some(c)
}

fn polish_simple(coeffs: &[Complex64], z0: Complex64) -> Complex64 {
    let mut best = z0;
    let mut best_residual = horner(coeffs, z0).0.norm();
    let mut z = z0;
    for _ in 0..3 {
        let (p, dp, _) = horner(coeffs, z);
        if dp == C_ZERO {
            break;
        }
        z -= p / dp;
        let residual = horner(coeffs, z).0.norm();
        if residual < best_residual {
            best = z;
            best_residual = residual;
        } else {
            break;
        }
    }
    best
}

/// Square-free structure `(factor degree, multiplicity)` of an exact
/// polynomial, in non-increasing multiplicity, via Yun's algorithm.
pub fn exact_multiplicity_structure(poly: &MonicPolynomial<ExactComplex>) -> Vec<(usize, usize)> {
    let f = poly.coefficients_ascending();
    let df = exact_poly::derivative(&f);
    let a0 = exact_poly::gcd(&f, &df);
    let mut b = exact_poly::div_exact(&f, &a0);
    let c = exact_poly::div_exact(&df, &a0);
    let mut d = exact_poly::sub(&c, &exact_poly::derivative(&b));
    let mut out = Vec::new();
    let mut multiplicity = 1;
    while exact_poly::degree(&b) > 0 {
        let a = exact_poly::gcd(&b, &d);
        let degree = exact_poly::degree(&a);
        if degree > 0 {
            out.push((degree, multiplicity));
        }
        let next_b = exact_poly::div_exact(&b, &a);
        let c = exact_poly::div_exact(&d, &a);
        d = exact_poly::sub(&c, &exact_poly::derivative(&next_b));
        b = next_b;
        multiplicity += 1;
    }
    out.sort_by(|x, y| y.1.cmp(&x.1).then(y.0.cmp(&x.0)));
    out
}

/// Dense polynomial arithmetic over the Gaussian rationals, constant term first.
mod exact_poly {
    use super::*;

    pub fn trim(mut p: Vec<ExactComplex>) -> Vec<ExactComplex> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(p: &[ExactComplex]) -> usize {
        p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn derivative(p: &[ExactComplex]) -> Vec<ExactComplex> {
        trim(p.iter().enumerate().skip(1).map(|(i, c)| c * &ExactComplex::from_integer(i as i64)).collect())
    }

    pub fn sub(a: &[ExactComplex], b: &[ExactComplex]) -> Vec<ExactComplex> {
        let len = a.len().max(b.len());
        let zero = ExactComplex::zero();
        trim((0..len).map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).collect())
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn div_rem(a: &[ExactComplex], b: &[ExactComplex]) -> (Vec<ExactComplex>, Vec<ExactComplex>) {
        let b = trim(b.to_vec());
        let mut rem = trim(a.to_vec());
        let db = b.len() - 1;
        let lead_inv = b[db].recip().expect("divisor is nonzero");
        if rem.len() < b.len() {
            return (Vec::new(), rem);
        }
        let mut quot = vec![ExactComplex::zero(); rem.len() - db];
        while rem.len() >= b.len() {
            let shift = rem.len() - b.len();
            let factor = &rem[rem.len() - 1] * &lead_inv;
            for (i, bc) in b.iter().enumerate() {
                rem[shift + i] = &rem[shift + i] - &(&factor * bc);
            }
            quot[shift] = factor;
            rem = trim(rem);
        }
        (trim(quot), rem)
    }

    pub fn div_exact(a: &[ExactComplex], b: &[ExactComplex]) -> Vec<ExactComplex> {
        div_rem(a, b).0
    }

    fn monic(p: Vec<ExactComplex>) -> Vec<ExactComplex> {
        match p.last().and_then(ExactComplex::recip) {
            Some(inv) => p.iter().map(|c| c * &inv).collect(),
            None => p,
        }
    }

    pub fn gcd(a: &[ExactComplex], b: &[ExactComplex]) -> Vec<ExactComplex> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = div_rem(&x, &y).1;
            x = y;
            y = r;
        }
        monic(x)
    }
}

/// Attempts to identify an approximate root as an exact Gaussian rational
/// (denominators up to 10^6), confirmed by exact evaluation.
pub fn recognize_exact_root(poly: &MonicPolynomial<ExactComplex>, approx: ApproxComplex) -> Option<ExactComplex> {
    const MAX_DENOM: u64 = 1_000_000;
    let tol = 1e-9 * (1.0 + approx.norm());
    let re = rational_near(approx.re, MAX_DENOM, tol)?;
    let im = if approx.im.abs() <= tol { Zero::zero() } else { rational_near(approx.im, MAX_DENOM, tol)? };
    let candidate = ExactComplex::new(re, im);
    poly.eval_exact(&candidate).is_zero().then_some(candidate)
}

/// Outcome of the asymptotic-simplicity test.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DominanceReport {
    pub max_modulus: f64,
    /// Roots whose modulus is at least `(1 - tie_tolerance) · max_modulus`.
    pub max_modulus_roots: Vec<Root>,
    pub is_asymptotically_simple: bool,
    pub lambda0: Option<ApproxComplex>,
    pub nu: Option<usize>,
    pub tie_tolerance: f64,
    /// Another root's modulus is close to the maximum without being tied to
    /// it; the classification is withheld as not simple.
    pub near_tie: bool,
}

/// Asymptotically simple iff exactly one max-modulus root attains the largest
/// multiplicity among the max-modulus roots.
pub fn classify_dominance(roots: &RootSet, tie_tol: f64) -> DominanceReport {
    let max_modulus = roots.roots.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
    let tie_floor = (1.0 - tie_tol) * max_modulus;
    let near_floor = (1.0 - (NEAR_TIE_FACTOR * tie_tol).min(0.5)) * max_modulus;
    let max_modulus_roots: Vec<Root> = roots.roots.iter().filter(|r| r.value.norm() >= tie_floor).copied().collect();
    let near_tie = roots.roots.iter().any(|r| {
        let m = r.value.norm();
        m < tie_floor && m >= near_floor
    });
    let top = max_modulus_roots.iter().map(|r| r.multiplicity).max().unwrap_or(0);
    let leaders: Vec<&Root> = max_modulus_roots.iter().filter(|r| r.multiplicity == top).collect();
    let is_asymptotically_simple = leaders.len() == 1 && !near_tie;
    let (lambda0, nu) = if is_asymptotically_simple {
        (Some(leaders[0].value), Some(leaders[0].multiplicity))
    } else {
        (None, None)
    };
    DominanceReport {
        max_modulus,
        max_modulus_roots,
        is_asymptotically_simple,
        lambda0,
        nu,
        tie_tolerance: tie_tol,
        near_tie,
    }
}

/// Roots and dominance for a recurrence with default tolerances.
pub fn analyze<S: Scalar>(rec: &Recurrence<S>) -> Result<(RootSet, DominanceReport)> {
    let roots = find_roots(&characteristic_polynomial(rec), DEFAULT_RESIDUAL_TOL)?;
    let report = classify_dominance(&roots, DEFAULT_TIE_TOL);
    Ok((roots, report))
}
