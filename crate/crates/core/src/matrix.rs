//! Symmetric matrix storage, principal submatrices, determinants, and
//! maximal independent column selection.
//!
//! Indices are 1-based in the public API, matching the usual row/column
//! numbering of principal submatrices.

use thiserror::Error;

use crate::scalar::{Scalar, Sign};

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix dimension must be >= 1")]
    EmptyMatrix,
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("matrix is not symmetric at ({i},{j}): {a} vs {b}")]
    NotSymmetric { i: usize, j: usize, a: String, b: String },
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("index set must be nonempty and strictly increasing")]
    BadIndexSet,
    #[error("consecutive range {a}:{b} invalid for dimension {dim}")]
    BadRange { a: usize, b: usize, dim: usize },
}

/// Sorted set of 1-based row/column indices selecting a principal submatrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self, MatrixError> {
        if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MatrixError::BadIndexSet);
        }
        Ok(IndexSet(indices))
    }

    /// All indices from 1 to `m`.
    pub fn full(m: usize) -> Self {
        IndexSet((1..=m).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn validate_for(&self, dim: usize) -> Result<(), MatrixError> {
        match self.0.iter().find(|&&i| i < 1 || i > dim) {
            Some(&index) => Err(MatrixError::IndexOutOfRange { index, dim }),
            None => Ok(()),
        }
    }
}

impl std::fmt::Display for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Contiguous index range `a:b`, selecting a consecutive principal submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsecutiveRange {
    pub a: usize,
    pub b: usize,
}

impl ConsecutiveRange {
    pub fn new(a: usize, b: usize, dim: usize) -> Result<Self, MatrixError> {
        if a < 1 || a > b || b > dim {
            return Err(MatrixError::BadRange { a, b, dim });
        }
        Ok(ConsecutiveRange { a, b })
    }

    pub fn len(&self) -> usize {
        self.b - self.a + 1
    }

    /// Ranges are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_index_set(&self) -> IndexSet {
        IndexSet((self.a..=self.b).collect())
    }
}

/// Dense symmetric matrix with checked symmetric access.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<S> {
    m: usize,
    entries: Vec<S>, // row-major m*m
}

impl<S: Scalar> SymMatrix<S> {
    /// Builds from full rows, enforcing symmetry (exact equality for the
    /// exact backend, tolerance for the float backend).
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, MatrixError> {
        let m = rows.len();
        if m == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(MatrixError::RaggedRow { row: i + 1, got: row.len(), expected: m });
            }
        }
        let entries: Vec<S> = rows.into_iter().flatten().collect();
        let mat = SymMatrix { m, entries };
        let scale = mat.max_abs();
        for i in 1..=m {
            for j in (i + 1)..=m {
                let d = mat.get(i, j).clone() - mat.get(j, i).clone();
                if !d.sign_scaled(&scale).is_zero() {
                    return Err(MatrixError::NotSymmetric {
                        i,
                        j,
                        a: mat.get(i, j).to_string(),
                        b: mat.get(j, i).to_string(),
                    });
                }
            }
        }
        Ok(mat)
    }

    /// Builds from an upper-triangular closure: `f(i, j)` is called with
    /// `i <= j` and mirrored.
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self, MatrixError> {
        if m == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        let mut entries = vec![S::zero(); m * m];
        for i in 1..=m {
            for j in i..=m {
                let v = f(i, j);
                entries[(i - 1) * m + (j - 1)] = v.clone();
                entries[(j - 1) * m + (i - 1)] = v;
            }
        }
        Ok(SymMatrix { m, entries })
    }

    pub fn identity(m: usize) -> Self {
        Self::from_fn(m, |i, j| if i == j { S::one() } else { S::zero() }).expect("m >= 1")
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// 1-based access.
    pub fn get(&self, i: usize, j: usize) -> &S {
        assert!(i >= 1 && i <= self.m && j >= 1 && j <= self.m, "index out of range");
        &self.entries[(i - 1) * self.m + (j - 1)]
    }

    /// Symmetric 1-based mutation: sets both (i,j) and (j,i).
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        assert!(i >= 1 && i <= self.m && j >= 1 && j <= self.m, "index out of range");
        self.entries[(i - 1) * self.m + (j - 1)] = v.clone();
        self.entries[(j - 1) * self.m + (i - 1)] = v;
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (1..=self.m)
            .map(|i| (1..=self.m).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn max_abs(&self) -> S {
        let mut best = S::zero();
        for e in &self.entries {
            let a = e.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// `max_abs()^k`, the magnitude context for a size-`k` determinant.
    pub fn det_scale(&self, k: usize) -> S {
        let base = self.max_abs();
        let mut out = S::one();
        for _ in 0..k {
            out = out * base.clone();
        }
        out
    }

    /// Principal submatrix `X_{I,I}`.
    pub fn submatrix(&self, set: &IndexSet) -> Result<SymMatrix<S>, MatrixError> {
        set.validate_for(self.m)?;
        let idx = set.indices();
        let n = idx.len();
        let mut entries = Vec::with_capacity(n * n);
        for &i in idx {
            for &j in idx {
                entries.push(self.get(i, j).clone());
            }
        }
        Ok(SymMatrix { m: n, entries })
    }

    /// Consecutive principal submatrix `X_{a:b,a:b}`.
    pub fn range_submatrix(&self, r: ConsecutiveRange) -> SymMatrix<S> {
        self.submatrix(&r.to_index_set()).expect("range validated at construction")
    }

    /// Symmetric reordering: entry (i,j) of the result is
    /// X_{perm[i-1], perm[j-1]}. `perm` lists 1-based original indices.
    pub fn permuted(&self, perm: &[usize]) -> SymMatrix<S> {
        assert_eq!(perm.len(), self.m);
        let n = self.m;
        let mut entries = Vec::with_capacity(n * n);
        for &i in perm {
            for &j in perm {
                entries.push(self.get(i, j).clone());
            }
        }
        SymMatrix { m: n, entries }
    }

    pub fn det(&self) -> S {
        S::det_in_place(self.rows())
    }
}

/// Determinant of a general (not necessarily symmetric) square matrix.
/// An empty matrix has determinant 1 by convention.
pub fn det_dense<S: Scalar>(rows: Vec<Vec<S>>) -> S {
    S::det_in_place(rows)
}

/// Greedy left-to-right maximal linearly independent column selection.
///
/// Keeps a column iff it increases the rank, so the smallest index set is
/// chosen among all maximal independent sets. Returns 1-based column indices;
/// empty for the zero matrix.
pub fn max_independent_columns<S: Scalar>(b: &SymMatrix<S>) -> Vec<usize> {
    independent_columns_among(b, &(1..=b.dim()).collect::<Vec<_>>(), true)
}

/// Rank under the same pivoting policy as [`max_independent_columns`].
pub fn rank<S: Scalar>(b: &SymMatrix<S>) -> usize {
    max_independent_columns(b).len()
}

/// Incremental-elimination scan over the given columns (1-based). When
/// `collect_all` is false, stops early once a dependent column is found.
/// Returns the accepted column indices.
pub(crate) fn independent_columns_among<S: Scalar>(
    b: &SymMatrix<S>,
    columns: &[usize],
    collect_all: bool,
) -> Vec<usize> {
    let n = b.dim();
    let scale = b.max_abs();
    // reduced basis vectors with their pivot row
    let mut basis: Vec<(usize, Vec<S>)> = Vec::new();
    let mut kept = Vec::new();
    for &j in columns {
        let mut v: Vec<S> = (1..=n).map(|i| b.get(i, j).clone()).collect();
        for (piv, bv) in &basis {
            if !v[*piv].sign_scaled(&scale).is_zero() {
                let factor = v[*piv].clone() / bv[*piv].clone();
                for (vi, bvi) in v.iter_mut().zip(bv.iter()) {
                    *vi = vi.clone() - factor.clone() * bvi.clone();
                }
            }
        }
        let pivot = (0..n).find(|&i| !v[i].sign_scaled(&scale).is_zero());
        match pivot {
            Some(p) => {
                basis.push((p, v));
                kept.push(j);
            }
            None if !collect_all => return kept,
            None => {}
        }
    }
    kept
}

/// Whether the given 1-based columns of `b` are linearly independent.
pub fn columns_independent<S: Scalar>(b: &SymMatrix<S>, columns: &[usize]) -> bool {
    independent_columns_among(b, columns, false).len() == columns.len()
}

/// True when every entry of row `i` is (tolerance-)zero.
pub fn row_is_zero<S: Scalar>(x: &SymMatrix<S>, i: usize) -> bool {
    let scale = x.max_abs();
    (1..=x.dim()).all(|j| x.get(i, j).sign_scaled(&scale).is_zero())
}

/// Convenience: checks a determinant's sign with the scale of its block.
pub fn det_sign<S: Scalar>(block: &SymMatrix<S>) -> Sign {
    let d = block.det();
    d.sign_scaled(&block.det_scale(block.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn exact_matrix(rows: &[&[i64]]) -> SymMatrix<Exact> {
        SymMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Exact::from_int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    /// 4x4 matrix with entries i+j-1.
    fn example1() -> SymMatrix<Exact> {
        SymMatrix::from_fn(4, |i, j| Exact::from_int((i + j - 1) as i64)).unwrap()
    }

    #[test]
    fn submatrix_selects_principal_block() {
        let x = example1();
        let i = IndexSet::new(vec![1, 4]).unwrap();
        let sub = x.submatrix(&i).unwrap();
        assert_eq!(sub, exact_matrix(&[&[1, 4], &[4, 7]]));
        // identity selection
        let full = x.submatrix(&IndexSet::full(4)).unwrap();
        assert_eq!(full, x);
    }

    #[test]
    fn submatrix_example2_y1() {
        let x = SymMatrix::from_fn(5, |i, j| Exact::from_int((i + j - 1) as i64)).unwrap();
        let y1 = x.submatrix(&IndexSet::new(vec![1, 2, 3, 5]).unwrap()).unwrap();
        assert_eq!(
            y1,
            exact_matrix(&[&[1, 2, 3, 5], &[2, 3, 4, 6], &[3, 4, 5, 7], &[5, 6, 7, 9]])
        );
    }

    #[test]
    fn submatrix_rejects_bad_index() {
        let x = example1();
        let i = IndexSet::new(vec![1, 5]).unwrap();
        assert!(matches!(
            x.submatrix(&i),
            Err(MatrixError::IndexOutOfRange { index: 5, dim: 4 })
        ));
    }

    #[test]
    fn det_examples() {
        assert_eq!(exact_matrix(&[&[3, 4], &[4, 5]]).det(), Exact::from_int(-1));
        assert_eq!(exact_matrix(&[&[1, 2], &[2, 3]]).det(), Exact::from_int(-1));
        assert_eq!(SymMatrix::<Exact>::identity(5).det(), Exact::from_int(1));
    }

    #[test]
    fn max_independent_columns_examples() {
        assert_eq!(max_independent_columns(&exact_matrix(&[&[3, 4], &[4, 5]])), vec![1, 2]);
        let dep = exact_matrix(&[&[3, 4, 5], &[4, 5, 6], &[5, 6, 7]]);
        assert_eq!(max_independent_columns(&dep), vec![1, 2]);
        assert_eq!(rank(&dep), 2);
        assert_eq!(max_independent_columns(&exact_matrix(&[&[0]])), Vec::<usize>::new());
        assert_eq!(rank(&SymMatrix::<Exact>::identity(3)), 3);
        assert_eq!(rank(&exact_matrix(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn symmetry_enforced() {
        let rows = vec![
            vec![Exact::from_int(1), Exact::from_int(2)],
            vec![Exact::from_int(3), Exact::from_int(1)],
        ];
        assert!(matches!(SymMatrix::from_rows(rows), Err(MatrixError::NotSymmetric { .. })));
    }

    #[test]
    fn float_symmetry_tolerance() {
        let rows = vec![vec![1.0, 0.5 + 1e-14], vec![0.5, 1.0]];
        assert!(SymMatrix::from_rows(rows).is_ok());
    }
}
