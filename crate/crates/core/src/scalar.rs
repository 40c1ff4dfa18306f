//! Scalar backends.
//!
//! Every sign decision in the crate routes through [`Scalar`]. Two backends
//! are provided: [`Exact`] (arbitrary-precision rationals, all decisions
//! exact) and `f64` (fast, with an absolute + relative tolerance band around
//! zero). Definiteness verdicts hinge on the sign of determinants at or near
//! zero, which floating point cannot decide alone, so `Exact` is the default
//! for certification.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Absolute tolerance for the float backend's sign-at-zero band.
pub const TOL_ABS: f64 = 1e-12;
/// Relative tolerance, applied against a caller-provided magnitude scale.
pub const TOL_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }
    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }
    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

#[derive(Debug, Error)]
#[error("cannot parse scalar from {0:?}")]
pub struct ScalarParseError(pub String);

/// Number type that all matrix operations are generic over.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + 'static
{
    /// True when arithmetic and sign decisions are exact.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    /// Lossless conversion from an f64 (every finite f64 is a rational).
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Parses decimal ("0.8", "-1.08e2") and fraction ("27/50") literals.
    fn parse(text: &str) -> Result<Self, ScalarParseError>;

    fn abs(&self) -> Self;

    /// Raw sign, no tolerance.
    fn sign(&self) -> Sign;

    /// Tolerance-aware sign: the float backend reports `Zero` when
    /// `|x| <= TOL_ABS + TOL_REL * |scale|`. Exact backend ignores `scale`.
    fn sign_scaled(&self, scale: &Self) -> Sign {
        let _ = scale;
        self.sign()
    }

    /// Determinant of a dense square matrix, consuming it.
    ///
    /// Default is Gaussian elimination with partial pivoting. The exact
    /// backend overrides this with fraction-free (Bareiss) elimination on
    /// cleared denominators. The 0x0 determinant is 1.
    fn det_in_place(rows: Vec<Vec<Self>>) -> Self {
        gaussian_det(rows)
    }

    /// Rewrites `coeff * sqrt(radicand)` pulling perfect squares out of the
    /// radicand, for display. Returns the new `(coeff, radicand)`; the float
    /// backend leaves the pair untouched.
    fn normalize_radical(coeff: Self, radicand: Self) -> (Self, Self) {
        (coeff, radicand)
    }
}

fn gaussian_det<S: Scalar>(mut rows: Vec<Vec<S>>) -> S {
    let n = rows.len();
    if n == 0 {
        return S::one();
    }
    let mut det = S::one();
    for k in 0..n {
        // partial pivoting: largest |entry| in column k
        let mut piv = k;
        for i in (k + 1)..n {
            if rows[i][k].abs() > rows[piv][k].abs() {
                piv = i;
            }
        }
        if rows[piv][k].sign().is_zero() {
            return S::zero();
        }
        if piv != k {
            rows.swap(piv, k);
            det = -det;
        }
        det = det * rows[k][k].clone();
        for i in (k + 1)..n {
            let factor = rows[i][k].clone() / rows[k][k].clone();
            let pivot_row = rows[k].clone();
            for (cell, p) in rows[i][k..].iter_mut().zip(&pivot_row[k..]) {
                *cell = cell.clone() - factor.clone() * p.clone();
            }
        }
    }
    det
}

/// Exact rational scalar, backed by `BigRational`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact(self.0 + rhs.0)
    }
}
impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact(self.0 - rhs.0)
    }
}
impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        Exact(self.0 * rhs.0)
    }
}
impl Div for Exact {
    type Output = Exact;
    fn div(self, rhs: Exact) -> Exact {
        Exact(self.0 / rhs.0)
    }
}
impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact(-self.0)
    }
}
impl Zero for Exact {
    fn zero() -> Self {
        Exact(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}
impl One for Exact {
    fn one() -> Self {
        Exact(BigRational::one())
    }
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let numer: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().ok()?
    };
    let mut value = BigRational::from_integer(numer * BigInt::from(sign));
    let shift = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift > 0 {
        for _ in 0..shift {
            value *= ten.clone();
        }
    } else {
        for _ in 0..(-shift) {
            value /= ten.clone();
        }
    }
    Some(value)
}

/// Fraction-free (Bareiss) determinant over integers.
fn bareiss_det_int(mut rows: Vec<Vec<BigInt>>) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..(n - 1) {
        if rows[k][k].is_zero() {
            match ((k + 1)..n).find(|&i| !rows[i][k].is_zero()) {
                Some(i) => {
                    rows.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &rows[i][j] * &rows[k][k] - &rows[i][k] * &rows[k][j];
                rows[i][j] = num / &prev; // exact by Bareiss
            }
            rows[i][k] = BigInt::zero();
        }
        prev = rows[k][k].clone();
    }
    sign * rows[n - 1][n - 1].clone()
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Exact(BigRational::from_integer(BigInt::from(v)))
    }

    fn from_f64(v: f64) -> Self {
        Exact(BigRational::from_float(v).expect("finite float"))
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    fn parse(text: &str) -> Result<Self, ScalarParseError> {
        parse_decimal(text)
            .map(Exact)
            .ok_or_else(|| ScalarParseError(text.to_owned()))
    }

    fn abs(&self) -> Self {
        Exact(self.0.abs())
    }

    fn sign(&self) -> Sign {
        if self.0.is_zero() {
            Sign::Zero
        } else if self.0.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn det_in_place(rows: Vec<Vec<Self>>) -> Self {
        let n = rows.len();
        if n == 0 {
            return Exact::one();
        }
        // Clear denominators row by row, then run integer Bareiss.
        let mut scale = BigRational::one();
        let mut int_rows = Vec::with_capacity(n);
        for row in rows {
            let mut lcm = BigInt::one();
            for x in &row {
                lcm = num_integer::lcm(lcm, x.0.denom().clone());
            }
            scale *= BigRational::from_integer(lcm.clone());
            int_rows.push(
                row.into_iter()
                    .map(|x| x.0.numer() * (&lcm / x.0.denom()))
                    .collect::<Vec<_>>(),
            );
        }
        Exact(BigRational::from_integer(bareiss_det_int(int_rows)) / scale)
    }

    fn normalize_radical(coeff: Self, radicand: Self) -> (Self, Self) {
        if radicand.sign() != Sign::Positive || coeff.is_zero() {
            return (coeff, radicand);
        }
        // sqrt(p/q) = sqrt(p*q)/q; pull square factors out of p*q.
        let q = radicand.0.denom().clone();
        let mut n: BigInt = radicand.0.numer() * &q;
        let mut square = BigInt::one();
        let mut p = BigInt::from(2);
        let limit = BigInt::from(10_000);
        while p <= limit && (&p * &p) <= n {
            let pp = &p * &p;
            while (&n % &pp).is_zero() {
                n /= &pp;
                square *= &p;
            }
            p += 1;
        }
        let root = n.sqrt();
        if &root * &root == n {
            square *= root;
            n = BigInt::one();
        }
        let coeff = Exact(coeff.0 * BigRational::new(square, q));
        (coeff, Exact(BigRational::from_integer(n)))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse(text: &str) -> Result<Self, ScalarParseError> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let n: f64 = num
                .trim()
                .parse()
                .map_err(|_| ScalarParseError(text.to_owned()))?;
            let d: f64 = den
                .trim()
                .parse()
                .map_err(|_| ScalarParseError(text.to_owned()))?;
            return Ok(n / d);
        }
        text.parse().map_err(|_| ScalarParseError(text.to_owned()))
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sign(&self) -> Sign {
        if *self == 0.0 {
            Sign::Zero
        } else if *self > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn sign_scaled(&self, scale: &Self) -> Sign {
        let band = TOL_ABS + TOL_REL * f64::abs(*scale);
        if f64::abs(*self) <= band {
            Sign::Zero
        } else if *self > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Sign of `p + q * sqrt(r)` with `r >= 0`, using only ring operations.
pub fn radical_sign<S: Scalar>(p: &S, q: &S, r: &S) -> Sign {
    if r.sign() != Sign::Positive || q.sign().is_zero() {
        return p.sign();
    }
    let sp = p.sign();
    let sq = q.sign();
    if sp == sq || sp.is_zero() {
        return sq;
    }
    if sq.is_zero() {
        return sp;
    }
    // opposite signs: |p| vs |q| sqrt(r) decided by squaring
    let diff = p.clone() * p.clone() - q.clone() * q.clone() * r.clone();
    match diff.sign() {
        Sign::Zero => Sign::Zero,
        Sign::Positive => sp,
        Sign::Negative => sq,
    }
}

/// Total order helper for scalars (no NaNs expected from either backend).
pub fn scalar_cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).expect("scalars are totally ordered")
}
