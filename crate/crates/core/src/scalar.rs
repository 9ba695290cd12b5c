//! Scalar fields: exact Gaussian rationals and double-precision complex numbers.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Double-precision complex value used on every numeric path.
pub type ApproxComplex = Complex64;

/// Common surface of the two scalar fields a recurrence can be defined over.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic in this field is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;
    fn to_approx(&self) -> ApproxComplex;
    /// The exact value, when this field is exact.
    fn to_exact(&self) -> Option<ExactComplex>;
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn to_approx(&self) -> ApproxComplex {
        *self
    }
    fn to_exact(&self) -> Option<ExactComplex> {
        None
    }
}

/// A Gaussian rational `re + im·i` with arbitrary-precision components.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactComplex {
    re: BigRational,
    im: BigRational,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_integer(v: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(v)))
    }

    /// `numer / denom` as a real value. Panics if `denom == 0`.
    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// The exact dyadic rational of a finite double.
    pub fn from_f64(re: f64, im: f64) -> Option<Self> {
        Some(Self { re: BigRational::from_float(re)?, im: BigRational::from_float(im)? })
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re² + im²`, exactly.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.recip().map(|r| self * &r)
    }

    /// Mantissa/exponent form that never overflows, whatever the size of the
    /// numerators and denominators.
    pub fn to_scaled(&self) -> ScaledComplex {
        const MANTISSA_BITS: i64 = 62;
        let exponent = match (bit_exponent(&self.re), bit_exponent(&self.im)) {
            (None, None) => return ScaledComplex::ZERO,
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => a.max(b),
        };
        let shift = MANTISSA_BITS - exponent;
        let scale = |r: &BigRational| -> f64 {
            if r.is_zero() {
                return 0.0;
            }
            let q = if shift >= 0 {
                (r.numer() << shift as usize) / r.denom()
            } else {
                r.numer() / (r.denom() << (-shift) as usize)
            };
            q.to_f64().unwrap_or(0.0)
        };
        ScaledComplex { mantissa: Complex64::new(scale(&self.re), scale(&self.im)), exp2: -shift }
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_modulus(&self) -> f64 {
        self.to_scaled().ln_modulus()
    }
}

/// Serialized as `{"re": {"num", "den"}, "im": {"num", "den"}}` with decimal strings.
#[cfg(feature = "serde")]
impl serde::Serialize for ExactComplex {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> core::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeStruct;

        struct Parts<'a>(&'a BigRational);

        impl serde::Serialize for Parts<'_> {
            fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> core::result::Result<Ser::Ok, Ser::Error> {
                let mut st = serializer.serialize_struct("Rational", 2)?;
                st.serialize_field("num", &self.0.numer().to_string())?;
                st.serialize_field("den", &self.0.denom().to_string())?;
                st.end()
            }
        }

        let mut st = serializer.serialize_struct("ExactComplex", 2)?;
        st.serialize_field("re", &Parts(&self.re))?;
        st.serialize_field("im", &Parts(&self.im))?;
        st.end()
    }
}

/// Position of the leading bit of `|r|`, up to ±1.
fn bit_exponent(r: &BigRational) -> Option<i64> {
    if r.is_zero() {
        None
    } else {
        Some(r.numer().bits() as i64 - r.denom().bits() as i64)
    }
}

/// `x · 2^e` without intermediate overflow of the power.
pub(crate) fn scale_by_pow2(x: f64, e: i64) -> f64 {
    let e = e.clamp(-2200, 2200) as i32;
    let half = e / 2;
    x * 2f64.powi(half) * 2f64.powi(e - half)
}

/// A complex value `mantissa · 2^exp2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub exp2: i64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex { mantissa: Complex64::new(0.0, 0.0), exp2: 0 };

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn ln_modulus(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().ln() + self.exp2 as f64 * core::f64::consts::LN_2
    }

    /// `self / other` as an ordinary double; `None` if `other` is zero.
    pub fn ratio(&self, other: &ScaledComplex) -> Option<Complex64> {
        if other.is_zero() {
            return None;
        }
        let q = self.mantissa / other.mantissa;
        let e = self.exp2 - other.exp2;
        Some(Complex64::new(scale_by_pow2(q.re, e), scale_by_pow2(q.im, e)))
    }

    pub fn to_approx(&self) -> Complex64 {
        Complex64::new(scale_by_pow2(self.mantissa.re, self.exp2), scale_by_pow2(self.mantissa.im, self.exp2))
    }
}

impl Scalar for ExactComplex {
    const EXACT: bool = true;

    fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn one() -> Self {
        Self::from_integer(1)
    }
    fn from_i64(v: i64) -> Self {
        Self::from_integer(v)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn is_finite(&self) -> bool {
        true
    }
    /// Each component correctly rounded; out-of-range parts saturate.
    fn to_approx(&self) -> ApproxComplex {
        let part = |r: &BigRational| {
            r.to_f64().filter(|x| x.is_finite()).unwrap_or_else(|| ExactComplex::real(r.clone()).to_scaled().to_approx().re)
        };
        Complex64::new(part(&self.re), part(&self.im))
    }
    fn to_exact(&self) -> Option<ExactComplex> {
        Some(self.clone())
    }
}

impl<'a> Add<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        if self.im.is_zero() && rhs.im.is_zero() {
            return ExactComplex::real(&self.re * &rhs.re);
        }
        ExactComplex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Add for ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: ExactComplex) -> ExactComplex {
        &self + &rhs
    }
}

impl Sub for ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: ExactComplex) -> ExactComplex {
        &self - &rhs
    }
}

impl Mul for ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: ExactComplex) -> ExactComplex {
        &self * &rhs
    }
}

impl Neg for ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&ExactComplex> for ExactComplex {
    fn add_assign(&mut self, rhs: &ExactComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl FromStr for ExactComplex {
    type Err = Error;

    /// Accepts `re`, `imi`, `re+imi` and `re-imi`, where each component is
    /// an integer, a fraction `p/q`, or a decimal with optional exponent.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().collect();
        if chars.is_empty() {
            return Err(parse_error(0, "empty literal"));
        }
        let mut pos = 0;
        let (first, first_imag) = parse_term(&chars, &mut pos, true)?;
        if pos == chars.len() {
            return Ok(if first_imag {
                ExactComplex::new(BigRational::zero(), first)
            } else {
                ExactComplex::real(first)
            });
        }
        if first_imag {
            return Err(parse_error(pos, "imaginary part must come last"));
        }
        let second_start = pos;
        let (second, second_imag) = parse_term(&chars, &mut pos, false)?;
        if !second_imag {
            return Err(parse_error(second_start, "second component must be imaginary (suffix 'i')"));
        }
        if pos != chars.len() {
            return Err(parse_error(pos, "unexpected trailing characters"));
        }
        Ok(ExactComplex::new(first, second))
    }
}

fn parse_error(position: usize, message: &str) -> Error {
    Error::Parse { position, message: message.to_string() }
}

fn parse_term(s: &[char], pos: &mut usize, first: bool) -> Result<(BigRational, bool)> {
    let mut negative = false;
    match s.get(*pos) {
        Some('+') => *pos += 1,
        Some('-') | Some('\u{2212}') => {
            negative = true;
            *pos += 1;
        }
        _ if !first => return Err(parse_error(*pos, "expected '+' or '-'")),
        _ => {}
    }
    let start = *pos;
    let magnitude = parse_unsigned(s, pos)?;
    let imag = s.get(*pos) == Some(&'i');
    if imag {
        *pos += 1;
    }
    let value = match magnitude {
        Some(m) => m,
        None if imag => BigRational::one(),
        None => return Err(parse_error(start, "expected a number")),
    };
    Ok((if negative { -value } else { value }, imag))
}

fn parse_digits(s: &[char], pos: &mut usize) -> Option<BigInt> {
    let start = *pos;
    while s.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
        *pos += 1;
    }
    if *pos == start {
        return None;
    }
    let text: String = s[start..*pos].iter().collect();
    text.parse().ok()
}

fn parse_unsigned(s: &[char], pos: &mut usize) -> Result<Option<BigRational>> {
    let start = *pos;
    let int_part = parse_digits(s, pos);
    let mut numer = int_part.clone().unwrap_or_default();
    let mut scale: i64 = 0;
    let mut decimal = false;
    if s.get(*pos) == Some(&'.') {
        decimal = true;
        *pos += 1;
        let frac_start = *pos;
        if let Some(frac) = parse_digits(s, pos) {
            let digits = (*pos - frac_start) as u32;
            numer = numer * BigInt::from(10u32).pow(digits) + frac;
            scale -= digits as i64;
        } else if int_part.is_none() {
            return Err(parse_error(start, "expected digits"));
        }
    } else if int_part.is_none() {
        return Ok(None);
    }
    if matches!(s.get(*pos), Some('e') | Some('E')) {
        decimal = true;
        *pos += 1;
        let mut exp_negative = false;
        match s.get(*pos) {
            Some('+') => *pos += 1,
            Some('-') | Some('\u{2212}') => {
                exp_negative = true;
                *pos += 1;
            }
            _ => {}
        }
        let exp_pos = *pos;
        let exp = parse_digits(s, pos)
            .and_then(|e| e.to_i64())
            .filter(|e| *e <= 4000)
            .ok_or_else(|| parse_error(exp_pos, "invalid exponent"))?;
        scale += if exp_negative { -exp } else { exp };
    }
    let mut value = BigRational::from_integer(numer);
    let ten = BigRational::from_integer(BigInt::from(10u32));
    if scale > 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else if scale < 0 {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    if s.get(*pos) == Some(&'/') {
        if decimal {
            return Err(parse_error(*pos, "fractions take integer numerators"));
        }
        *pos += 1;
        let den_pos = *pos;
        let den = parse_digits(s, pos).ok_or_else(|| parse_error(den_pos, "expected denominator digits"))?;
        if den.is_zero() {
            return Err(parse_error(den_pos, "zero denominator"));
        }
        value /= BigRational::from_integer(den);
    }
    Ok(Some(value))
}

/// Best rational approximation of `x` with denominator at most `max_denom`,
/// accepted only when within `tol` of `x`.
pub(crate) fn rational_near(x: f64, max_denom: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let a_int = BigInt::from(a as i128);
        let h2 = &a_int * &h1 + &h0;
        let k2 = &a_int * &k1 + &k0;
        if k2 > BigInt::from(max_denom) {
            break;
        }
        h0 = core::mem::replace(&mut h1, h2);
        k0 = core::mem::replace(&mut k1, k2);
        let candidate = BigRational::new(h1.clone(), k1.clone());
        let approx = candidate.to_f64().unwrap_or(f64::NAN);
        if (approx - x).abs() <= tol {
            return Some(candidate);
        }
        let frac = rest - a;
        if frac.abs() < 1e-300 {
            break;
        }
        rest = 1.0 / frac;
    }
    None
}

/// Greatest common divisor, used by the index-set criterion.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
