//! Elementwise constraints on symmetric matrices: sign requirements on
//! single entries or on principal minors.

use std::fmt;

use crate::matrix::{IndexSet, SymMatrix};
use crate::scalar::{Scalar, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    DetGe0,
    DetGt0,
    DetEq0,
    EntryGe0,
    EntryGt0,
    EntryEq0,
}

impl ConstraintKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstraintKind::DetGe0 => "det_ge_0",
            ConstraintKind::DetGt0 => "det_gt_0",
            ConstraintKind::DetEq0 => "det_eq_0",
            ConstraintKind::EntryGe0 => "entry_ge_0",
            ConstraintKind::EntryGt0 => "entry_gt_0",
            ConstraintKind::EntryEq0 => "entry_eq_0",
        }
    }

    pub fn parse_kind(s: &str) -> Option<Self> {
        Some(match s {
            "det_ge_0" => ConstraintKind::DetGe0,
            "det_gt_0" => ConstraintKind::DetGt0,
            "det_eq_0" => ConstraintKind::DetEq0,
            "entry_ge_0" => ConstraintKind::EntryGe0,
            "entry_gt_0" => ConstraintKind::EntryGt0,
            "entry_eq_0" => ConstraintKind::EntryEq0,
            _ => return None,
        })
    }

    pub fn is_det(&self) -> bool {
        matches!(self, ConstraintKind::DetGe0 | ConstraintKind::DetGt0 | ConstraintKind::DetEq0)
    }
}

/// One constraint: a sign condition on a principal minor (`det_*`, target is
/// an index set) or on a single entry (`entry_*`, target is a position).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintTarget {
    Minor(IndexSet),
    Entry(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementConstraint {
    pub kind: ConstraintKind,
    pub target: ConstraintTarget,
}

impl ElementConstraint {
    pub fn minor(kind: ConstraintKind, indices: Vec<usize>) -> Self {
        debug_assert!(kind.is_det());
        ElementConstraint {
            kind,
            target: ConstraintTarget::Minor(IndexSet::new(indices).expect("valid index set")),
        }
    }

    pub fn entry(kind: ConstraintKind, i: usize, j: usize) -> Self {
        debug_assert!(!kind.is_det());
        ElementConstraint { kind, target: ConstraintTarget::Entry(i, j) }
    }

    /// Index list for serialization: the minor's index set, or `[i, j]`.
    pub fn indices(&self) -> Vec<usize> {
        match &self.target {
            ConstraintTarget::Minor(set) => set.indices().to_vec(),
            ConstraintTarget::Entry(i, j) => vec![*i, *j],
        }
    }

    /// Evaluates the constraint under the active backend's sign rules:
    /// strict inequalities require `Positive`, equalities require `Zero`.
    pub fn holds<S: Scalar>(&self, x: &SymMatrix<S>) -> bool {
        let (value, scale) = match &self.target {
            ConstraintTarget::Minor(set) => {
                let block = x.submatrix(set).expect("constraint target in range");
                let scale = block.det_scale(block.dim());
                (block.det(), scale)
            }
            ConstraintTarget::Entry(i, j) => (x.get(*i, *j).clone(), x.max_abs()),
        };
        let sign = value.sign_scaled(&scale);
        match self.kind {
            ConstraintKind::DetGe0 | ConstraintKind::EntryGe0 => sign != Sign::Negative,
            ConstraintKind::DetGt0 | ConstraintKind::EntryGt0 => sign == Sign::Positive,
            ConstraintKind::DetEq0 | ConstraintKind::EntryEq0 => sign == Sign::Zero,
        }
    }
}

impl fmt::Display for ElementConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, &self.target) {
            (k, ConstraintTarget::Minor(set)) => {
                let op = match k {
                    ConstraintKind::DetGe0 => ">= 0",
                    ConstraintKind::DetGt0 => "> 0",
                    _ => "= 0",
                };
                write!(f, "det(X_{set}) {op}")
            }
            (k, ConstraintTarget::Entry(i, j)) => {
                let op = match k {
                    ConstraintKind::EntryGe0 => ">= 0",
                    ConstraintKind::EntryGt0 => "> 0",
                    _ => "= 0",
                };
                write!(f, "X[{i},{j}] {op}")
            }
        }
    }
}
