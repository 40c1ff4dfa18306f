//! The determinant of a symmetric matrix as a quadratic in its corner entry
//! `X_{1,m}`, and the feasibility intervals of that corner for PD and PSD
//! completions.
//!
//! Interval endpoints are kept symbolic as `base + coeff * sqrt(radicand)`
//! so that membership and equality tests stay exact under the exact backend.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::criterion::{canonical_inner_saturated, check_pd_classic, check_psd_strong};
use crate::matrix::{det_dense, ConsecutiveRange, SymMatrix};
use crate::scalar::{radical_sign, Scalar, Sign};

#[derive(Debug, Error)]
pub enum QuadraticError {
    #[error("matrix dimension must be >= 2 for corner quadratics")]
    TooSmall,
    #[error("precondition violated: block {block} is not {requirement}")]
    PreconditionViolated { block: String, requirement: &'static str },
    #[error("internal invariant violated: leading coefficient a is not negative")]
    DegenerateLeadingCoefficient,
}

/// Coefficients of `det(X) = a*t^2 + b*t + c` where `t = X_{1,m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerQuadratic<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

impl<S: Scalar> CornerQuadratic<S> {
    pub fn eval(&self, t: &S) -> S {
        self.a.clone() * t.clone() * t.clone() + self.b.clone() * t.clone() + self.c.clone()
    }

    pub fn discriminant(&self) -> S {
        self.b.clone() * self.b.clone()
            - S::from_int(4) * self.a.clone() * self.c.clone()
    }
}

/// Coefficients of the corner quadratic, from all entries of `X` other than
/// the corner pair. `a = -det(inner block)`, with the empty 0x0 inner
/// determinant taken as 1 so that m = 2 needs no special casing; `b` and `c`
/// come from the two bordered determinants.
pub fn corner_quadratic<S: Scalar>(x: &SymMatrix<S>) -> Result<CornerQuadratic<S>, QuadraticError> {
    let m = x.dim();
    if m < 2 {
        return Err(QuadraticError::TooSmall);
    }
    // a = -det(X_{2:(m-1),2:(m-1)}); det of the empty block is 1
    let a = if m == 2 {
        -S::one()
    } else {
        -x.range_submatrix(ConsecutiveRange { a: 2, b: m - 1 }).det()
    };

    // b = 2 * (-1)^(m+1) * det of the (m-1)x(m-1) bordered matrix
    //     [ X_{1,2:(m-1)}        0            ]
    //     [ X_{2:(m-1),2:(m-1)}  X_{2:(m-1),m} ]
    let mut b_rows: Vec<Vec<S>> = Vec::with_capacity(m - 1);
    let mut top: Vec<S> = (2..m).map(|j| x.get(1, j).clone()).collect();
    top.push(S::zero());
    b_rows.push(top);
    for i in 2..m {
        let mut row: Vec<S> = (2..m).map(|j| x.get(i, j).clone()).collect();
        row.push(x.get(i, m).clone());
        b_rows.push(row);
    }
    let sign = if m % 2 == 1 { S::one() } else { -S::one() };
    let b = S::from_int(2) * sign * det_dense(b_rows);

    // c = det(X) with the corner pair zeroed
    let mut zeroed = x.clone();
    zeroed.set(1, m, S::zero());
    let c = zeroed.det();

    Ok(CornerQuadratic { a, b, c })
}

/// `(b^2 - 4ac) - 4 det(X_{1:(m-1)}) det(X_{2:m})`; exactly zero under the
/// exact backend.
pub fn discriminant_identity_gap<S: Scalar>(x: &SymMatrix<S>) -> Result<S, QuadraticError> {
    let m = x.dim();
    let q = corner_quadratic(x)?;
    let left = x.range_submatrix(ConsecutiveRange { a: 1, b: m - 1 }).det();
    let right = x.range_submatrix(ConsecutiveRange { a: 2, b: m }).det();
    Ok(q.discriminant() - S::from_int(4) * left * right)
}

/// Symbolic interval endpoint `base + coeff * sqrt(radicand)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Endpoint<S> {
    pub base: S,
    pub coeff: S,
    pub radicand: S,
}

impl<S: Scalar> Endpoint<S> {
    pub fn rational(v: S) -> Self {
        Endpoint { base: v, coeff: S::zero(), radicand: S::zero() }
    }

    pub fn approx(&self) -> f64 {
        self.base.to_f64() + self.coeff.to_f64() * self.radicand.to_f64().max(0.0).sqrt()
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.sign().is_zero() || self.radicand.sign() != Sign::Positive
    }

    /// Compares the endpoint against a plain scalar, exactly.
    pub fn cmp_scalar(&self, t: &S) -> Ordering {
        let p = self.base.clone() - t.clone();
        match radical_sign(&p, &self.coeff, &self.radicand) {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }

    /// Exact equality of `base1 + coeff1*sqrt(rad1)` and
    /// `base2 + coeff2*sqrt(rad2)` across different radicand representations,
    /// including radicals that collapse to rationals.
    pub fn eq_value(&self, other: &Endpoint<S>) -> bool {
        let a = self.canonical();
        let b = other.canonical();
        let (c1, r1) = a.effective();
        let (c2, r2) = b.effective();
        if a.base != b.base {
            return false;
        }
        if c1.sign() != c2.sign() {
            return false;
        }
        c1.clone() * c1 * r1 == c2.clone() * c2 * r2
    }

    /// Canonical form: square factors pulled out of the radicand, and a
    /// perfect-square radical folded into the rational base.
    pub fn canonical(&self) -> Endpoint<S> {
        if self.coeff.sign().is_zero() || self.radicand.sign() != Sign::Positive {
            return Endpoint::rational(self.base.clone());
        }
        let (coeff, radicand) = S::normalize_radical(self.coeff.clone(), self.radicand.clone());
        if radicand == S::one() {
            Endpoint::rational(self.base.clone() + coeff)
        } else {
            Endpoint { base: self.base.clone(), coeff, radicand }
        }
    }

    fn effective(&self) -> (S, S) {
        if self.radicand.sign() != Sign::Positive {
            (S::zero(), S::zero())
        } else {
            (self.coeff.clone(), self.radicand.clone())
        }
    }

    /// Display form with square factors pulled out of the radicand,
    /// e.g. `27/50 - 2/25*sqrt(19)`.
    pub fn display(&self) -> String {
        let (coeff, radicand) = S::normalize_radical(self.coeff.clone(), self.radicand.clone());
        let (base, coeff, radicand) = if radicand == S::one() {
            (self.base.clone() + coeff, S::zero(), S::zero())
        } else {
            (self.base.clone(), coeff, radicand)
        };
        if coeff.sign().is_zero() || radicand.sign() != Sign::Positive {
            return base.to_string();
        }
        let rad = format!("{}*sqrt({})", coeff.abs(), radicand);
        if base.sign().is_zero() {
            if coeff.sign().is_negative() {
                format!("-{rad}")
            } else {
                rad
            }
        } else if coeff.sign().is_negative() {
            format!("{base} - {rad}")
        } else {
            format!("{base} + {rad}")
        }
    }
}

impl<S: Scalar> fmt::Display for Endpoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// Interval bound: finite symbolic endpoint or infinite.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound<S> {
    NegInf,
    Finite(Endpoint<S>),
    PosInf,
}

/// Feasibility interval for a corner entry. PD/PSD corner intervals
/// always yield bounded intervals (the leading coefficient is negative);
/// the infinite bounds exist for completeness of the representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Interval<S> {
    Empty,
    Range { lo: Bound<S>, hi: Bound<S>, open_lo: bool, open_hi: bool },
}

impl<S: Scalar> Interval<S> {
    pub fn bounded(lo: Endpoint<S>, hi: Endpoint<S>, open_lo: bool, open_hi: bool) -> Self {
        Interval::Range { lo: Bound::Finite(lo), hi: Bound::Finite(hi), open_lo, open_hi }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Interval::Empty)
    }

    pub fn contains(&self, t: &S) -> bool {
        match self {
            Interval::Empty => false,
            Interval::Range { lo, hi, open_lo, open_hi } => {
                let lo_ok = match lo {
                    Bound::NegInf => true,
                    Bound::PosInf => false,
                    Bound::Finite(e) => match e.cmp_scalar(t) {
                        Ordering::Less => true,
                        Ordering::Equal => !open_lo,
                        Ordering::Greater => false,
                    },
                };
                let hi_ok = match hi {
                    Bound::PosInf => true,
                    Bound::NegInf => false,
                    Bound::Finite(e) => match e.cmp_scalar(t) {
                        Ordering::Greater => true,
                        Ordering::Equal => !open_hi,
                        Ordering::Less => false,
                    },
                };
                lo_ok && hi_ok
            }
        }
    }

    /// A rational representative inside the interval: the midpoint of the
    /// bounded symbolic endpoints (their common `base`), which is exact.
    pub fn representative(&self) -> Option<S> {
        match self {
            Interval::Empty => None,
            Interval::Range { lo: Bound::Finite(l), hi: Bound::Finite(h), .. } => {
                Some((l.base.clone() + h.base.clone()) / S::from_int(2))
            }
            _ => None,
        }
    }
}

/// Solution interval of `a t^2 + b t + c {>, >=} 0` with `a < 0`.
/// Endpoints are `-b/(2a) ± sqrt(D)/(2|a|)` with `D = b^2 - 4ac`.
fn concave_quadratic_interval<S: Scalar>(
    q: &CornerQuadratic<S>,
    closed: bool,
) -> Result<Interval<S>, QuadraticError> {
    if q.a.sign() != Sign::Negative {
        return Err(QuadraticError::DegenerateLeadingCoefficient);
    }
    let d = q.discriminant();
    match d.sign() {
        Sign::Negative => Ok(Interval::Empty),
        Sign::Zero if !closed => Ok(Interval::Empty),
        _ => {
            let two_a = S::from_int(2) * q.a.clone();
            let base = -q.b.clone() / two_a.clone();
            // 1/(2a) < 0, so +sqrt(D)/(2a) is the lower endpoint
            let lo = Endpoint {
                base: base.clone(),
                coeff: S::one() / two_a.clone(),
                radicand: d.clone(),
            };
            let hi = Endpoint { base, coeff: -(S::one() / two_a), radicand: d };
            Ok(Interval::bounded(lo, hi, !closed, !closed))
        }
    }
}

/// Open interval of corner values `t = X_{1,m}` keeping `X` PD, given that
/// both overlapping blocks `X_{1:(m-1)}` and `X_{2:m}` are PD.
pub fn pd_corner_interval<S: Scalar>(x: &SymMatrix<S>) -> Result<Interval<S>, QuadraticError> {
    let m = x.dim();
    if m < 2 {
        return Err(QuadraticError::TooSmall);
    }
    for (range, name) in [
        (ConsecutiveRange { a: 1, b: m - 1 }, format!("X_{{1:{}}}", m - 1)),
        (ConsecutiveRange { a: 2, b: m }, format!("X_{{2:{m}}}")),
    ] {
        let block = x.range_submatrix(range);
        if !check_pd_classic(&block).is_positive {
            return Err(QuadraticError::PreconditionViolated { block: name, requirement: "PD" });
        }
    }
    let q = corner_quadratic(x)?;
    concave_quadratic_interval(&q, false)
}

/// Closed interval of corner values keeping `X` PSD, given that both
/// overlapping blocks are PSD. Works on the canonical inner-saturated
/// submatrix, whose corner entry is still `X_{1,m}`. May degenerate to a
/// single point when the discriminant is zero.
pub fn psd_corner_interval<S: Scalar>(x: &SymMatrix<S>) -> Result<Interval<S>, QuadraticError> {
    let m = x.dim();
    if m < 2 {
        return Err(QuadraticError::TooSmall);
    }
    for (range, name) in [
        (ConsecutiveRange { a: 1, b: m - 1 }, format!("X_{{1:{}}}", m - 1)),
        (ConsecutiveRange { a: 2, b: m }, format!("X_{{2:{m}}}")),
    ] {
        let block = x.range_submatrix(range);
        if !check_psd_strong(&block).0.is_positive {
            return Err(QuadraticError::PreconditionViolated { block: name, requirement: "PSD" });
        }
    }
    let inner_sat = canonical_inner_saturated(x);
    let sub = x.submatrix(&inner_sat.indices).expect("in range");
    let q = corner_quadratic(&sub)?;
    concave_quadratic_interval(&q, true)
}

/// The positive constant `k` with `q1 = k * q2`, when one exists.
pub fn proportionality_ratio<S: Scalar>(
    q1: &CornerQuadratic<S>,
    q2: &CornerQuadratic<S>,
) -> Option<S> {
    let lhs = [&q1.a, &q1.b, &q1.c];
    let rhs = [&q2.a, &q2.b, &q2.c];
    // cross-ratio check avoids division: q1[i]*q2[j] == q1[j]*q2[i]
    for i in 0..3 {
        for j in (i + 1)..3 {
            let cross = lhs[i].clone() * rhs[j].clone() - lhs[j].clone() * rhs[i].clone();
            if !cross.sign_scaled(&(lhs[i].abs() * rhs[j].abs() + lhs[j].abs() * rhs[i].abs()))
                .is_zero()
            {
                return None;
            }
        }
    }
    for (l, r) in lhs.iter().zip(rhs.iter()) {
        if !r.sign().is_zero() {
            let k = (*l).clone() / (*r).clone();
            // componentwise zeros must line up
            if !l.sign().is_zero() && k.sign() == Sign::Positive {
                for (l2, r2) in lhs.iter().zip(rhs.iter()) {
                    if l2.sign().is_zero() != r2.sign().is_zero() {
                        return None;
                    }
                }
                return Some(k);
            }
            return None;
        }
    }
    // q2 is identically zero: proportional iff q1 is too
    if lhs.iter().all(|v| v.sign().is_zero()) {
        Some(S::one())
    } else {
        None
    }
}
