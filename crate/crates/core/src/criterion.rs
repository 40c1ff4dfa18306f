//! Classic principal-minor checks and the strong consecutive-block PSD criterion.
//!
//! The classic PSD check enumerates all `2^m - 1` principal minors and serves
//! as the oracle. The strong check evaluates one inner-saturated determinant
//! per consecutive principal submatrix, `m(m+1)/2` determinants in total,
//! and agrees with the oracle on every symmetric matrix.

use thiserror::Error;

use crate::matrix::{
    columns_independent, max_independent_columns, ConsecutiveRange, IndexSet, SymMatrix,
};
use crate::scalar::{Scalar, Sign};

pub const DEFAULT_CLASSIC_CAP: usize = 16;

#[derive(Debug, Error)]
pub enum CriterionError {
    #[error("dimension {dim} exceeds the classic PSD cap of {cap} (2^m - 1 minors)")]
    DimensionCap { dim: usize, cap: usize },
}

/// Outcome of a definiteness check. A failing verdict carries the principal
/// submatrix whose determinant violates the requirement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub is_positive: bool,
    pub witness: Option<IndexSet>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict { is_positive: true, witness: None }
    }

    fn fail(witness: IndexSet) -> Self {
        Verdict { is_positive: false, witness: Some(witness) }
    }
}

/// Determinant evaluation counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckStats {
    pub det_evaluations: usize,
}

/// An inner-saturated index set `I = {first, last} ∪ J` of a consecutive
/// principal submatrix, in global 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerSaturated {
    pub parent_range: ConsecutiveRange,
    pub indices: IndexSet,
}

/// Classic PD test: all `m` leading principal minors positive.
pub fn check_pd_classic<S: Scalar>(x: &SymMatrix<S>) -> Verdict {
    let m = x.dim();
    for b in 1..=m {
        let block = x.range_submatrix(ConsecutiveRange { a: 1, b });
        let d = block.det();
        if d.sign_scaled(&block.det_scale(b)) != Sign::Positive {
            return Verdict::fail(IndexSet::full(b));
        }
    }
    Verdict::pass()
}

/// Classic PSD test: all `2^m - 1` principal minors nonnegative. Exponential;
/// used as the oracle. The witness is the lexicographically first violating
/// index set. Evaluates the full budget regardless of early failures.
pub fn check_psd_classic<S: Scalar>(
    x: &SymMatrix<S>,
    cap: usize,
) -> Result<(Verdict, CheckStats), CriterionError> {
    let m = x.dim();
    if m > cap {
        return Err(CriterionError::DimensionCap { dim: m, cap });
    }
    let mut evals = 0usize;
    let mut witness: Option<IndexSet> = None;
    let mut prefix: Vec<usize> = Vec::with_capacity(m);
    // depth-first extension enumerates subsets in lexicographic order
    fn visit<S: Scalar>(
        x: &SymMatrix<S>,
        prefix: &mut Vec<usize>,
        start: usize,
        evals: &mut usize,
        witness: &mut Option<IndexSet>,
    ) {
        for i in start..=x.dim() {
            prefix.push(i);
            let set = IndexSet::new(prefix.clone()).expect("strictly increasing by construction");
            let block = x.submatrix(&set).expect("indices in range");
            let d = block.det();
            *evals += 1;
            if witness.is_none() && d.sign_scaled(&block.det_scale(block.dim())) == Sign::Negative
            {
                *witness = Some(set);
            }
            visit(x, prefix, i + 1, evals, witness);
            prefix.pop();
        }
    }
    visit(x, &mut prefix, 1, &mut evals, &mut witness);
    let verdict = match witness {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    };
    Ok((verdict, CheckStats { det_evaluations: evals }))
}

/// The canonical inner-saturated index set of `X_{a:b,a:b}`, in global
/// indices: `{a, b}` plus the greedy maximal independent column set of the
/// inner block.
pub fn canonical_inner_saturated_of_range<S: Scalar>(
    x: &SymMatrix<S>,
    range: ConsecutiveRange,
) -> InnerSaturated {
    let (a, b) = (range.a, range.b);
    let indices = if b - a < 2 {
        let mut v = vec![a];
        if b > a {
            v.push(b);
        }
        v
    } else {
        let inner = x.range_submatrix(ConsecutiveRange { a: a + 1, b: b - 1 });
        let mut v = vec![a];
        v.extend(max_independent_columns(&inner).into_iter().map(|j| a + j));
        v.push(b);
        v
    };
    InnerSaturated {
        parent_range: range,
        indices: IndexSet::new(indices).expect("increasing"),
    }
}

/// All inner-saturated index sets of `X_{a:b,a:b}`, one per maximal
/// independent column set of the inner block, in lexicographic order.
pub fn enumerate_inner_saturated_of_range<S: Scalar>(
    x: &SymMatrix<S>,
    range: ConsecutiveRange,
) -> Vec<InnerSaturated> {
    let (a, b) = (range.a, range.b);
    if b - a < 2 {
        return vec![canonical_inner_saturated_of_range(x, range)];
    }
    let inner = x.range_submatrix(ConsecutiveRange { a: a + 1, b: b - 1 });
    let r = max_independent_columns(&inner).len();
    let mut out = Vec::new();
    let mut combo: Vec<usize> = Vec::with_capacity(r);
    #[allow(clippy::too_many_arguments)]
    fn rec<S: Scalar>(
        inner: &SymMatrix<S>,
        combo: &mut Vec<usize>,
        start: usize,
        r: usize,
        a: usize,
        b: usize,
        range: ConsecutiveRange,
        out: &mut Vec<InnerSaturated>,
    ) {
        if combo.len() == r {
            if columns_independent(inner, combo) {
                let mut v = vec![a];
                v.extend(combo.iter().map(|&j| a + j));
                v.push(b);
                out.push(InnerSaturated {
                    parent_range: range,
                    indices: IndexSet::new(v).expect("increasing"),
                });
            }
            return;
        }
        for j in start..=inner.dim() {
            combo.push(j);
            rec(inner, combo, j + 1, r, a, b, range, out);
            combo.pop();
        }
    }
    rec(&inner, &mut combo, 1, r, a, b, range, &mut out);
    debug_assert!(!out.is_empty());
    out
}

/// All inner-saturated submatrices of `X` itself.
pub fn enumerate_inner_saturated<S: Scalar>(x: &SymMatrix<S>) -> Vec<InnerSaturated> {
    enumerate_inner_saturated_of_range(x, ConsecutiveRange { a: 1, b: x.dim() })
}

/// The canonical (greedy) inner-saturated submatrix of `X`.
pub fn canonical_inner_saturated<S: Scalar>(x: &SymMatrix<S>) -> InnerSaturated {
    canonical_inner_saturated_of_range(x, ConsecutiveRange { a: 1, b: x.dim() })
}

/// Strong PSD criterion: for each of the `m(m+1)/2` consecutive ranges,
/// the canonical inner-saturated determinant must be nonnegative.
///
/// Exactly `m(m+1)/2` determinants are evaluated. Ranges are visited in
/// `(b - a, a)` order; the witness is the first failing inner-saturated set.
pub fn check_psd_strong<S: Scalar>(x: &SymMatrix<S>) -> (Verdict, CheckStats) {
    let m = x.dim();
    let mut evals = 0usize;
    let mut witness: Option<IndexSet> = None;
    for len in 1..=m {
        for a in 1..=(m - len + 1) {
            let range = ConsecutiveRange { a, b: a + len - 1 };
            let inner_sat = canonical_inner_saturated_of_range(x, range);
            let block = x.submatrix(&inner_sat.indices).expect("in range");
            let d = block.det();
            evals += 1;
            if witness.is_none() && d.sign_scaled(&block.det_scale(block.dim())) == Sign::Negative
            {
                witness = Some(inner_sat.indices);
            }
        }
    }
    let verdict = match witness {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    };
    (verdict, CheckStats { det_evaluations: evals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn hankel(m: usize) -> SymMatrix<Exact> {
        SymMatrix::from_fn(m, |i, j| Exact::from_int((i + j - 1) as i64)).unwrap()
    }

    #[test]
    fn pd_classic_examples() {
        assert!(check_pd_classic(&SymMatrix::<Exact>::identity(4)).is_positive);
        let x = SymMatrix::from_rows(vec![
            vec![Exact::from_int(1), Exact::from_int(2)],
            vec![Exact::from_int(2), Exact::from_int(3)],
        ])
        .unwrap();
        let v = check_pd_classic(&x);
        assert!(!v.is_positive);
        assert_eq!(v.witness.unwrap(), IndexSet::new(vec![1, 2]).unwrap());
        // fully specified top-left block of the 5x5 completion example
        let y = SymMatrix::from_rows(vec![
            vec![Exact::parse("1").unwrap(), Exact::parse("0.8").unwrap(), Exact::parse("0.6").unwrap()],
            vec![Exact::parse("0.8").unwrap(), Exact::parse("1").unwrap(), Exact::parse("0.4").unwrap()],
            vec![Exact::parse("0.6").unwrap(), Exact::parse("0.4").unwrap(), Exact::parse("1").unwrap()],
        ])
        .unwrap();
        assert!(check_pd_classic(&y).is_positive);
    }

    #[test]
    fn psd_classic_examples() {
        let zero = SymMatrix::from_fn(2, |_, _| Exact::from_int(0)).unwrap();
        let (v, s) = check_psd_classic(&zero, DEFAULT_CLASSIC_CAP).unwrap();
        assert!(v.is_positive);
        assert_eq!(s.det_evaluations, 3);

        let offdiag = SymMatrix::from_fn(2, |i, j| Exact::from_int(if i == j { 0 } else { 1 }))
            .unwrap();
        let (v, _) = check_psd_classic(&offdiag, DEFAULT_CLASSIC_CAP).unwrap();
        assert!(!v.is_positive);
        assert_eq!(v.witness.unwrap(), IndexSet::new(vec![1, 2]).unwrap());

        let (v, s) = check_psd_classic(&hankel(5), DEFAULT_CLASSIC_CAP).unwrap();
        assert!(!v.is_positive);
        assert_eq!(v.witness.unwrap(), IndexSet::new(vec![1, 2]).unwrap());
        assert_eq!(s.det_evaluations, 31);
    }

    #[test]
    fn psd_classic_cap() {
        let x = SymMatrix::<Exact>::identity(5);
        assert!(matches!(
            check_psd_classic(&x, 4),
            Err(CriterionError::DimensionCap { dim: 5, cap: 4 })
        ));
    }

    #[test]
    fn inner_saturated_example1_unique() {
        let sets = enumerate_inner_saturated(&hankel(4));
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].indices, IndexSet::full(4));
    }

    #[test]
    fn inner_saturated_example2_three_sets() {
        let sets = enumerate_inner_saturated(&hankel(5));
        let got: Vec<_> = sets.iter().map(|s| s.indices.indices().to_vec()).collect();
        assert_eq!(got, vec![vec![1, 2, 3, 5], vec![1, 2, 4, 5], vec![1, 3, 4, 5]]);
        assert_eq!(
            canonical_inner_saturated(&hankel(5)).indices,
            IndexSet::new(vec![1, 2, 3, 5]).unwrap()
        );
    }

    #[test]
    fn inner_saturated_zero_middle() {
        // 3x3 with X_{2,2} = 0: inner-saturated is {1,3}
        let x = SymMatrix::from_rows(vec![
            vec![Exact::from_int(1), Exact::from_int(0), Exact::from_int(0)],
            vec![Exact::from_int(0), Exact::from_int(0), Exact::from_int(0)],
            vec![Exact::from_int(0), Exact::from_int(0), Exact::from_int(1)],
        ])
        .unwrap();
        let sets = enumerate_inner_saturated(&x);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].indices, IndexSet::new(vec![1, 3]).unwrap());
    }

    #[test]
    fn strong_check_counts_and_verdicts() {
        let (v, s) = check_psd_strong(&SymMatrix::<Exact>::identity(7));
        assert!(v.is_positive);
        assert_eq!(s.det_evaluations, 28);

        let (v, s) = check_psd_strong(&hankel(5));
        assert!(!v.is_positive);
        assert_eq!(s.det_evaluations, 15);
    }
}
