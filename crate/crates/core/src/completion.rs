//! PD/PSD completion of partially observed symmetric matrices.
//!
//! The procedure permutes the matrix so the widest missing entry sits at the
//! `(1, m)` corner, grid-searches the remaining missing entries over boxes
//! derived from the 2x2 minor necessity `|X_{i,j}| <= sqrt(X_{i,i} X_{j,j})`,
//! and solves the corner entry exactly from its quadratic interval at every
//! feasible grid point.

use thiserror::Error;

use crate::constraint::{ConstraintKind, ElementConstraint};
use crate::criterion::{check_pd_classic, check_psd_strong, CriterionError};
use crate::graph::PatternGraph;
use crate::matrix::{IndexSet, MatrixError, SymMatrix};
use crate::quadratic::{pd_corner_interval, psd_corner_interval, QuadraticError};
use crate::scalar::{Scalar, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pd,
    Psd,
}

#[derive(Debug, Error)]
pub enum CompletionError {
    #[error("diagonal entries are missing at {0:?}; apply reduce_missing_diagonal first")]
    MissingDiagonal(Vec<usize>),
    #[error("matrix has missing entries at {0:?}")]
    Incomplete(Vec<(usize, usize)>),
    #[error("expected dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("entry ({0},{1}) must be observed to resolve the degenerate branch")]
    BranchEntryMissing(usize, usize),
    #[error("k = {k} out of range 0..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("variable label {0} out of range 1..={1}")]
    BadVariableLabel(usize, usize),
    #[error("variable x{0} is the corner variable, not a gridded one")]
    CornerVariable(usize),
    #[error("grid must have at least 2 points per axis")]
    GridTooCoarse,
    #[error("no diagonal value large enough to extend the reduced completion")]
    ExtensionFailed,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Quadratic(#[from] QuadraticError),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
}

/// Symmetric matrix with a set of missing unordered-pair positions.
/// Missing positions in upper-triangular order sorted by `(j - i, (i, j))`
/// are the variables `x_1..x_K`; the last one is the completion corner.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSymMatrix<S> {
    m: usize,
    entries: Vec<Option<S>>,
}

impl<S: Scalar> PartialSymMatrix<S> {
    pub fn from_rows(rows: Vec<Vec<Option<S>>>) -> Result<Self, MatrixError> {
        let m = rows.len();
        if m == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(MatrixError::RaggedRow { row: i + 1, got: row.len(), expected: m });
            }
        }
        let entries: Vec<Option<S>> = rows.into_iter().flatten().collect();
        let p = PartialSymMatrix { m, entries };
        let scale = p.max_abs_known();
        for i in 1..=m {
            for j in (i + 1)..=m {
                match (p.get(i, j), p.get(j, i)) {
                    (Some(a), Some(b)) => {
                        let d = a.clone() - b.clone();
                        if !d.sign_scaled(&scale).is_zero() {
                            return Err(MatrixError::NotSymmetric {
                                i,
                                j,
                                a: a.to_string(),
                                b: b.to_string(),
                            });
                        }
                    }
                    (None, None) => {}
                    (a, b) => {
                        return Err(MatrixError::NotSymmetric {
                            i,
                            j,
                            a: a.map_or("?".into(), |v| v.to_string()),
                            b: b.map_or("?".into(), |v| v.to_string()),
                        })
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn from_matrix(x: &SymMatrix<S>) -> Self {
        PartialSymMatrix {
            m: x.dim(),
            entries: x.rows().into_iter().flatten().map(Some).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&S> {
        self.entries[(i - 1) * self.m + (j - 1)].as_ref()
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.entries[(i - 1) * self.m + (j - 1)] = Some(v.clone());
        self.entries[(j - 1) * self.m + (i - 1)] = Some(v);
    }

    fn max_abs_known(&self) -> S {
        let mut best = S::zero();
        for e in self.entries.iter().flatten() {
            let a = e.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Missing upper-triangular positions in variable-label order:
    /// ascending by offset `j - i`, ties by `(i, j)`. The last label is the
    /// widest missing entry and becomes the completion corner.
    pub fn missing_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.m {
            for j in i..=self.m {
                if self.get(i, j).is_none() {
                    out.push((i, j));
                }
            }
        }
        out.sort_by_key(|&(i, j)| (j - i, i, j));
        out
    }

    pub fn missing_diagonal(&self) -> Vec<usize> {
        (1..=self.m).filter(|&i| self.get(i, i).is_none()).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(|e| e.is_some())
    }

    pub fn to_matrix(&self) -> Result<SymMatrix<S>, CompletionError> {
        if !self.is_complete() {
            return Err(CompletionError::Incomplete(self.missing_positions()));
        }
        let rows = (1..=self.m)
            .map(|i| (1..=self.m).map(|j| self.get(i, j).unwrap().clone()).collect())
            .collect();
        Ok(SymMatrix::from_rows(rows)?)
    }

    /// Symmetric reordering; `perm` lists 1-based original indices.
    pub fn permuted(&self, perm: &[usize]) -> PartialSymMatrix<S> {
        assert_eq!(perm.len(), self.m);
        let entries = perm
            .iter()
            .flat_map(|&i| perm.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.entries[(i - 1) * self.m + (j - 1)].clone())
            .collect();
        PartialSymMatrix { m: self.m, entries }
    }

    /// Pattern graph: vertices `1..=m`, edges at observed off-diagonal pairs.
    pub fn pattern_graph(&self) -> PatternGraph {
        let mut g = PatternGraph::new(self.m);
        for i in 1..=self.m {
            for j in (i + 1)..=self.m {
                if self.get(i, j).is_some() {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// The consecutive principal block `a:b` as a full matrix; every entry
    /// must be observed.
    fn range_matrix(&self, a: usize, b: usize) -> Result<SymMatrix<S>, CompletionError> {
        let mut missing = Vec::new();
        let rows: Vec<Vec<S>> = (a..=b)
            .map(|i| {
                (a..=b)
                    .map(|j| match self.get(i, j) {
                        Some(v) => v.clone(),
                        None => {
                            missing.push((i.min(j), i.max(j)));
                            S::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        if !missing.is_empty() {
            missing.sort_unstable();
            missing.dedup();
            return Err(CompletionError::Incomplete(missing));
        }
        Ok(SymMatrix::from_rows(rows)?)
    }
}

/// Grid search configuration.
#[derive(Debug, Clone)]
pub struct GridConfig<S> {
    pub points_per_axis: usize,
    /// Optional per-variable search boxes (label order, corner excluded);
    /// defaults to `[-sqrt(X_ii X_jj), +sqrt(X_ii X_jj)]` rounded outward.
    pub boxes: Option<Vec<(S, S)>>,
    pub mode: Mode,
}

impl<S> GridConfig<S> {
    pub fn new(mode: Mode) -> Self {
        GridConfig { points_per_axis: 200, boxes: None, mode }
    }

    pub fn with_points(mode: Mode, points_per_axis: usize) -> Self {
        GridConfig { points_per_axis, boxes: None, mode }
    }
}

/// Report of the diagonal-reduction step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReduceReport {
    /// Removed 1-based row/column indices (missing diagonal).
    pub removed: Vec<usize>,
    /// Remaining original indices, in order.
    pub kept: Vec<usize>,
}

/// Deletes every row/column with a missing diagonal entry. A completion of
/// the reduced matrix extends to the full one by choosing the removed
/// diagonals large enough; see [`extend_reduced_completion`].
pub fn reduce_missing_diagonal<S: Scalar>(
    p: &PartialSymMatrix<S>,
) -> (PartialSymMatrix<S>, ReduceReport) {
    let removed = p.missing_diagonal();
    let kept: Vec<usize> = (1..=p.dim()).filter(|i| !removed.contains(i)).collect();
    let reduced = if kept.is_empty() {
        // empty problem, trivially completable; keep a 1x1 zero placeholder
        PartialSymMatrix { m: 0, entries: Vec::new() }
    } else {
        let entries = kept
            .iter()
            .flat_map(|&i| kept.iter().map(move |&j| (i, j)))
            .map(|(i, j)| p.get(i, j).cloned())
            .collect();
        PartialSymMatrix { m: kept.len(), entries }
    };
    (reduced, ReduceReport { removed, kept })
}

/// Re-inserts the rows removed by [`reduce_missing_diagonal`]: missing
/// off-diagonal entries in removed rows are set to zero and the removed
/// diagonals are doubled upward until the whole matrix passes the mode's
/// check. Guaranteed to terminate in PD mode.
pub fn extend_reduced_completion<S: Scalar>(
    original: &PartialSymMatrix<S>,
    completed_reduced: &SymMatrix<S>,
    report: &ReduceReport,
    mode: Mode,
) -> Result<SymMatrix<S>, CompletionError> {
    if report.removed.is_empty() {
        return Ok(completed_reduced.clone());
    }
    let m = original.dim();
    let mut pos_in_kept = vec![None; m + 1];
    for (k, &i) in report.kept.iter().enumerate() {
        pos_in_kept[i] = Some(k + 1);
    }
    let base = SymMatrix::from_fn(m, |i, j| match (pos_in_kept[i], pos_in_kept[j]) {
        (Some(a), Some(b)) => completed_reduced.get(a, b).clone(),
        _ => match original.get(i, j) {
            Some(v) => v.clone(),
            None => S::zero(),
        },
    })?;
    let mut c = S::one();
    for _ in 0..64 {
        let mut candidate = base.clone();
        for &i in &report.removed {
            candidate.set(i, i, c.clone());
        }
        let ok = match mode {
            Mode::Pd => check_pd_classic(&candidate).is_positive,
            Mode::Psd => check_psd_strong(&candidate).0.is_positive,
        };
        if ok {
            return Ok(candidate);
        }
        c = c * S::from_int(2);
    }
    Err(CompletionError::ExtensionFailed)
}

/// Variable ordering and the symmetric permutation placing the corner
/// variable at `(1, m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableOrder {
    /// Missing positions `x_1..x_K` ascending by `(j - i, (i, j))`.
    pub variables: Vec<(usize, usize)>,
    /// Original 1-based indices in their new order.
    pub permutation: Vec<usize>,
}

pub fn variable_elimination_order<S: Scalar>(
    p: &PartialSymMatrix<S>,
) -> Result<VariableOrder, CompletionError> {
    let diag = p.missing_diagonal();
    if !diag.is_empty() {
        return Err(CompletionError::MissingDiagonal(diag));
    }
    let m = p.dim();
    let variables = p.missing_positions();
    let permutation = match variables.last() {
        None => (1..=m).collect(),
        Some(&(i, j)) => {
            let mut perm = vec![i];
            perm.extend((1..=m).filter(|&k| k != i && k != j));
            perm.push(j);
            perm
        }
    };
    Ok(VariableOrder { variables, permutation })
}

/// Outcome of a completion attempt.
#[derive(Debug, Clone)]
pub enum CompletionOutcome<S> {
    Completed {
        matrix: SymMatrix<S>,
        /// Values of `x_1..x_K` in label order.
        assignment: Vec<S>,
        /// All feasible grid prefixes `(x_1..x_{K-1})`.
        feasible_prefixes: Vec<Vec<S>>,
    },
    /// No grid point worked; not a certificate of nonexistence.
    InfeasibleAtResolution { points_per_axis: usize },
    /// A fully observed principal submatrix already fails.
    CertifiedInfeasible { witness: IndexSet },
}

impl<S> CompletionOutcome<S> {
    pub fn is_completed(&self) -> bool {
        matches!(self, CompletionOutcome::Completed { .. })
    }
}

/// One prepared grid level: the permuted partial matrix, the gridded
/// variable positions (permuted coordinates, label order), and the axes.
#[derive(Debug, Clone)]
pub struct CompletionLevel<S> {
    pub permuted: PartialSymMatrix<S>,
    pub permutation: Vec<usize>,
    pub gridded: Vec<(usize, usize)>,
    pub axes: Vec<Vec<S>>,
}

fn axis_points<S: Scalar>(lo: S, hi: S, n: usize) -> Vec<S> {
    if lo == hi {
        return vec![lo];
    }
    let span = hi.clone() - lo.clone();
    let steps = S::from_int((n - 1) as i64);
    (0..n)
        .map(|t| lo.clone() + span.clone() * S::from_int(t as i64) / steps.clone())
        .collect()
}

/// Outward-rounded `sqrt(prod)` with denominator 1000, so grid coordinates
/// stay small rationals. Never undershoots: the box keeps every feasible
/// value of the variable.
fn axis_bound<S: Scalar>(prod: &S) -> S {
    if prod.sign() != Sign::Positive {
        return S::zero();
    }
    let approx = prod.to_f64().max(0.0).sqrt();
    let mut k = (approx * 1000.0).ceil() as i64;
    let thousandth = S::one() / S::from_int(1000);
    let mut bound = S::from_int(k) * thousandth.clone();
    while bound.clone() * bound.clone() < prod.clone() {
        k += 1;
        bound = S::from_int(k) * thousandth.clone();
    }
    bound
}

/// Prepares the grid level for a completion problem.
pub fn completion_level<S: Scalar>(
    p: &PartialSymMatrix<S>,
    g: &GridConfig<S>,
) -> Result<CompletionLevel<S>, CompletionError> {
    if g.points_per_axis < 2 {
        return Err(CompletionError::GridTooCoarse);
    }
    let order = variable_elimination_order(p)?;
    let m = p.dim();
    let permuted = p.permuted(&order.permutation);
    let mut pos = vec![0usize; m + 1];
    for (k, &i) in order.permutation.iter().enumerate() {
        pos[i] = k + 1;
    }
    let k = order.variables.len();
    let gridded: Vec<(usize, usize)> = order.variables[..k.saturating_sub(1)]
        .iter()
        .map(|&(i, j)| {
            let (a, b) = (pos[i], pos[j]);
            (a.min(b), a.max(b))
        })
        .collect();
    let axes = match &g.boxes {
        Some(boxes) => {
            if boxes.len() != gridded.len() {
                return Err(CompletionError::GridTooCoarse);
            }
            boxes
                .iter()
                .map(|(lo, hi)| axis_points(lo.clone(), hi.clone(), g.points_per_axis))
                .collect()
        }
        None => gridded
            .iter()
            .map(|&(i, j)| {
                let prod = permuted.get(i, i).unwrap().clone() * permuted.get(j, j).unwrap().clone();
                let b = axis_bound(&prod);
                axis_points(-b.clone(), b, g.points_per_axis)
            })
            .collect(),
    };
    Ok(CompletionLevel { permuted, permutation: order.permutation, gridded, axes })
}

fn advance(idx: &mut [usize], dims: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

fn block_check<S: Scalar>(block: &SymMatrix<S>, mode: Mode) -> bool {
    match mode {
        Mode::Pd => check_pd_classic(block).is_positive,
        Mode::Psd => check_psd_strong(block).0.is_positive,
    }
}

/// Level feasibility predicate: with the gridded variables set to
/// `assignment`, both overlapping blocks `X_{1:(m-1)}` and `X_{2:m}` of the
/// permuted matrix pass the mode's check.
pub fn prefix_feasible<S: Scalar>(
    level: &CompletionLevel<S>,
    assignment: &[S],
    mode: Mode,
) -> Result<bool, CompletionError> {
    Ok(single_block_feasible(level, assignment, 1, mode)?
        && single_block_feasible(level, assignment, 2, mode)?)
}

/// Feasibility of one overlapping block (1 = `X_{1:(m-1)}`, 2 = `X_{2:m}`).
pub fn single_block_feasible<S: Scalar>(
    level: &CompletionLevel<S>,
    assignment: &[S],
    which: usize,
    mode: Mode,
) -> Result<bool, CompletionError> {
    assert!(which == 1 || which == 2);
    assert_eq!(assignment.len(), level.gridded.len());
    let mut filled = level.permuted.clone();
    for (&(i, j), v) in level.gridded.iter().zip(assignment) {
        filled.set(i, j, v.clone());
    }
    let m = filled.dim();
    let block = if which == 1 {
        filled.range_matrix(1, m - 1)?
    } else {
        filled.range_matrix(2, m)?
    };
    Ok(block_check(&block, mode))
}

/// Finds any principal submatrix that is fully observed and already violates
/// the mode; its index set certifies infeasibility.
fn observed_violation<S: Scalar>(
    p: &PartialSymMatrix<S>,
    mode: Mode,
) -> Result<Option<IndexSet>, CompletionError> {
    let graph = p.pattern_graph();
    for clique in maximal_cliques(&graph) {
        let set = IndexSet::new(clique)?;
        let block = p
            .to_matrix_on(&set)
            .expect("clique entries observed, diagonal present");
        let witness = match mode {
            Mode::Pd => check_pd_classic(&block).witness,
            Mode::Psd => check_psd_strong(&block).0.witness,
        };
        if let Some(local) = witness {
            let global: Vec<usize> =
                local.indices().iter().map(|&k| set.indices()[k - 1]).collect();
            return Ok(Some(IndexSet::new(global)?));
        }
    }
    Ok(None)
}

impl<S: Scalar> PartialSymMatrix<S> {
    fn to_matrix_on(&self, set: &IndexSet) -> Option<SymMatrix<S>> {
        let idx = set.indices();
        let rows: Option<Vec<Vec<S>>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.get(i, j).cloned()).collect())
            .collect();
        SymMatrix::from_rows(rows?).ok()
    }
}

/// Maximal cliques (Bron-Kerbosch), each sorted, in deterministic order.
fn maximal_cliques(g: &PatternGraph) -> Vec<Vec<usize>> {
    fn bk(
        g: &PatternGraph,
        r: &mut Vec<usize>,
        p: Vec<usize>,
        x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        let mut p = p;
        let mut x = x;
        while let Some(&v) = p.first() {
            r.push(v);
            let np: Vec<usize> = p.iter().copied().filter(|&u| g.has_edge(u, v)).collect();
            let nx: Vec<usize> = x.iter().copied().filter(|&u| g.has_edge(u, v)).collect();
            bk(g, r, np, nx, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    let all: Vec<usize> = (1..=g.vertex_count()).collect();
    bk(g, &mut Vec::new(), all, Vec::new(), &mut out);
    out
}

fn run_completion<S: Scalar>(
    p: &PartialSymMatrix<S>,
    g: &GridConfig<S>,
    mode: Mode,
) -> Result<CompletionOutcome<S>, CompletionError> {
    let diag = p.missing_diagonal();
    if !diag.is_empty() {
        return Err(CompletionError::MissingDiagonal(diag));
    }
    if let Some(witness) = observed_violation(p, mode)? {
        return Ok(CompletionOutcome::CertifiedInfeasible { witness });
    }
    if p.is_complete() {
        let matrix = p.to_matrix()?;
        // observed_violation covered the full matrix
        debug_assert!(block_check(&matrix, mode));
        return Ok(CompletionOutcome::Completed {
            matrix,
            assignment: Vec::new(),
            feasible_prefixes: Vec::new(),
        });
    }

    let level = completion_level(p, g)?;
    let m = p.dim();
    let dims: Vec<usize> = level.axes.iter().map(|a| a.len()).collect();
    let mut idx = vec![0usize; dims.len()];
    let mut feasible_prefixes: Vec<Vec<S>> = Vec::new();
    let mut completed: Option<(SymMatrix<S>, Vec<S>)> = None;

    // inverse permutation, to map the completed matrix back
    let mut inv = vec![0usize; m];
    for (k, &orig) in level.permutation.iter().enumerate() {
        inv[orig - 1] = k + 1;
    }

    loop {
        let assignment: Vec<S> = idx
            .iter()
            .zip(&level.axes)
            .map(|(&t, axis)| axis[t].clone())
            .collect();
        if prefix_feasible(&level, &assignment, mode)? {
            feasible_prefixes.push(assignment.clone());
            if completed.is_none() {
                completed = solve_corner(&level, &assignment, mode, &inv)?;
            }
        }
        if !advance(&mut idx, &dims) {
            break;
        }
    }

    match completed {
        Some((matrix, assignment)) => {
            Ok(CompletionOutcome::Completed { matrix, assignment, feasible_prefixes })
        }
        None => Ok(CompletionOutcome::InfeasibleAtResolution { points_per_axis: g.points_per_axis }),
    }
}

/// With a feasible prefix fixed, solve the corner exactly from its interval
/// and verify the completed matrix. Returns `None` if verification fails
/// (possible only from float tolerance wobble at marginal prefixes).
type CornerSolution<S> = Option<(SymMatrix<S>, Vec<S>)>;

fn solve_corner<S: Scalar>(
    level: &CompletionLevel<S>,
    assignment: &[S],
    mode: Mode,
    inv: &[usize],
) -> Result<CornerSolution<S>, CompletionError> {
    let mut filled = level.permuted.clone();
    for (&(i, j), v) in level.gridded.iter().zip(assignment) {
        filled.set(i, j, v.clone());
    }
    let m = filled.dim();
    filled.set(1, m, S::zero()); // placeholder; coefficients ignore the corner
    let x = filled.to_matrix()?;
    let interval = match mode {
        Mode::Pd => pd_corner_interval(&x),
        Mode::Psd => psd_corner_interval(&x),
    }?;
    let Some(t) = interval.representative() else {
        return Ok(None);
    };
    let mut done = x;
    done.set(1, m, t.clone());
    if !block_check(&done, mode) {
        return Ok(None);
    }
    let matrix = done.permuted(inv);
    let mut values = assignment.to_vec();
    values.push(t);
    Ok(Some((matrix, values)))
}

/// PD completion by grid search over all but the corner variable.
pub fn complete_pd<S: Scalar>(
    p: &PartialSymMatrix<S>,
    g: &GridConfig<S>,
) -> Result<CompletionOutcome<S>, CompletionError> {
    run_completion(p, g, Mode::Pd)
}

/// PSD completion; interval endpoints are included and, under the exact
/// backend, evaluated exactly.
pub fn complete_psd<S: Scalar>(
    p: &PartialSymMatrix<S>,
    g: &GridConfig<S>,
) -> Result<CompletionOutcome<S>, CompletionError> {
    run_completion(p, g, Mode::Psd)
}

/// One sampled point of the two-variable feasible region.
#[derive(Debug, Clone)]
pub struct RegionPoint<S> {
    pub v1: S,
    pub v2: S,
    /// Block `X_{1:(m-1)}` of the permuted matrix passes.
    pub feasible_first: bool,
    /// Block `X_{2:m}` passes.
    pub feasible_second: bool,
}

impl<S> RegionPoint<S> {
    pub fn feasible_both(&self) -> bool {
        self.feasible_first && self.feasible_second
    }
}

/// Samples the feasibility of two gridded variables (1-based labels into
/// `x_1..x_K`); any other gridded variables are existentially quantified
/// over their own axes. The corner variable is eliminated analytically by
/// interval nonemptiness, i.e. block feasibility.
pub fn feasible_region<S: Scalar>(
    p: &PartialSymMatrix<S>,
    vars: (usize, usize),
    g: &GridConfig<S>,
) -> Result<Vec<RegionPoint<S>>, CompletionError> {
    let level = completion_level(p, g)?;
    let k = level.gridded.len() + 1;
    for label in [vars.0, vars.1] {
        if label == 0 || label > k {
            return Err(CompletionError::BadVariableLabel(label, k));
        }
        if label == k {
            return Err(CompletionError::CornerVariable(label));
        }
    }
    let (a, b) = (vars.0 - 1, vars.1 - 1);
    let others: Vec<usize> = (0..level.gridded.len()).filter(|&i| i != a && i != b).collect();
    let other_dims: Vec<usize> = others.iter().map(|&i| level.axes[i].len()).collect();
    let mode = g.mode;

    let mut out = Vec::new();
    for va in &level.axes[a] {
        for vb in &level.axes[b] {
            let mut feas1 = false;
            let mut feas2 = false;
            let mut idx = vec![0usize; others.len()];
            loop {
                let mut assignment = vec![S::zero(); level.gridded.len()];
                assignment[a] = va.clone();
                assignment[b] = vb.clone();
                for (slot, &gi) in idx.iter().zip(&others) {
                    assignment[gi] = level.axes[gi][*slot].clone();
                }
                if !feas1 && single_block_feasible(&level, &assignment, 1, mode)? {
                    feas1 = true;
                }
                if !feas2 && single_block_feasible(&level, &assignment, 2, mode)? {
                    feas2 = true;
                }
                if (feas1 && feas2) || !advance(&mut idx, &other_dims) {
                    break;
                }
            }
            out.push(RegionPoint {
                v1: va.clone(),
                v2: vb.clone(),
                feasible_first: feas1,
                feasible_second: feas2,
            });
        }
    }
    Ok(out)
}

/// Partial order DAG over the upper-triangular positions: `(i', j')`
/// precedes `(i, j)` iff `i <= i' <= j' <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryOrderDag {
    pub m: usize,
}

impl EntryOrderDag {
    pub fn new(m: usize) -> Self {
        EntryOrderDag { m }
    }

    pub fn nodes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.m {
            for i in 1..=(self.m - k) {
                out.push((i, i + k));
            }
        }
        out
    }

    /// Direct predecessors: `(i, j-1)` and `(i+1, j)` when `i < j`.
    pub fn predecessors(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        if i < j {
            vec![(i, j - 1), (i + 1, j)]
        } else {
            Vec::new()
        }
    }

    /// Reflexive-transitive predecessor relation.
    pub fn is_predecessor(&self, pred: (usize, usize), node: (usize, usize)) -> bool {
        node.0 <= pred.0 && pred.0 <= pred.1 && pred.1 <= node.1
    }
}

/// The `k`-diagonal positions `{(i, i+k)}` of an `m x m` matrix.
pub fn k_diagonal<S: Scalar>(
    x: &SymMatrix<S>,
    k: usize,
) -> Result<Vec<(usize, usize)>, CompletionError> {
    let m = x.dim();
    if k > m - 1 {
        return Err(CompletionError::KOutOfRange { k, max: m - 1 });
    }
    Ok((1..=(m - k)).map(|i| (i, i + k)).collect())
}

/// Governing constraint for one entry of a 4x4 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryRule {
    pub entry: (usize, usize),
    pub constraint: ElementConstraint,
}

fn rule_minor(entry: (usize, usize), kind: ConstraintKind, idx: &[usize]) -> EntryRule {
    EntryRule { entry, constraint: ElementConstraint::minor(kind, idx.to_vec()) }
}

fn rule_entry(entry: (usize, usize), kind: ConstraintKind) -> EntryRule {
    EntryRule { entry, constraint: ElementConstraint::entry(kind, entry.0, entry.1) }
}

/// Decision list mapping each entry of a 4x4 matrix to the determinant
/// constraint that governs it, given its DAG predecessors. PSD mode branches
/// on `X_{2,2}`, `X_{3,3}` and `det(X_{2:3,2:3})`; the branch entries must be
/// observed.
pub fn entry_ranges_4x4<S: Scalar>(
    p: &PartialSymMatrix<S>,
    mode: Mode,
) -> Result<Vec<EntryRule>, CompletionError> {
    use ConstraintKind::*;
    if p.dim() != 4 {
        return Err(CompletionError::WrongDimension { expected: 4, got: p.dim() });
    }
    if mode == Mode::Pd {
        return Ok(vec![
            rule_entry((1, 1), EntryGt0),
            rule_entry((2, 2), EntryGt0),
            rule_entry((3, 3), EntryGt0),
            rule_entry((4, 4), EntryGt0),
            rule_minor((1, 2), DetGt0, &[1, 2]),
            rule_minor((2, 3), DetGt0, &[2, 3]),
            rule_minor((3, 4), DetGt0, &[3, 4]),
            rule_minor((1, 3), DetGt0, &[1, 2, 3]),
            rule_minor((2, 4), DetGt0, &[2, 3, 4]),
            rule_minor((1, 4), DetGt0, &[1, 2, 3, 4]),
        ]);
    }

    let scale = p.max_abs_known();
    let sign_of = |i: usize, j: usize| -> Result<Sign, CompletionError> {
        p.get(i, j)
            .map(|v| v.sign_scaled(&scale))
            .ok_or(CompletionError::BranchEntryMissing(i, j))
    };

    let x22 = sign_of(2, 2)?;
    let x33 = sign_of(3, 3)?;
    if x22.is_zero() {
        // zero row/column 2; the (1,4) branch splits on X_{3,3}
        let corner = if x33.is_zero() {
            rule_minor((1, 4), DetGe0, &[1, 4])
        } else {
            rule_minor((1, 4), DetGe0, &[1, 3, 4])
        };
        return Ok(vec![
            rule_entry((1, 1), EntryGe0),
            rule_entry((2, 2), EntryEq0),
            rule_entry((3, 3), EntryGe0),
            rule_entry((4, 4), EntryGe0),
            rule_entry((1, 2), EntryEq0),
            rule_entry((2, 3), EntryEq0),
            rule_minor((3, 4), DetGe0, &[3, 4]),
            rule_minor((1, 3), DetGe0, &[1, 3]),
            rule_entry((2, 4), EntryEq0),
            corner,
        ]);
    }
    if x33.is_zero() {
        // zero row/column 3 (mirror case); X_{2,2} != 0 here
        return Ok(vec![
            rule_entry((1, 1), EntryGe0),
            rule_entry((2, 2), EntryGe0),
            rule_entry((3, 3), EntryEq0),
            rule_entry((4, 4), EntryGe0),
            rule_minor((1, 2), DetGe0, &[1, 2]),
            rule_entry((2, 3), EntryEq0),
            rule_entry((3, 4), EntryEq0),
            rule_entry((1, 3), EntryEq0),
            rule_minor((2, 4), DetGe0, &[2, 4]),
            rule_minor((1, 4), DetGe0, &[1, 2, 4]),
        ]);
    }

    // X22, X33 nonzero: the (1,4) branch needs det(X_{2:3,2:3})
    if p.get(2, 3).is_none() {
        return Err(CompletionError::BranchEntryMissing(2, 3));
    }
    let inner = p.range_matrix(2, 3)?;
    let inner_det_zero = inner.det().sign_scaled(&inner.det_scale(2)).is_zero();
    let corner = if inner_det_zero {
        rule_minor((1, 4), DetGe0, &[1, 2, 4])
    } else {
        rule_minor((1, 4), DetGe0, &[1, 2, 3, 4])
    };
    Ok(vec![
        rule_entry((1, 1), EntryGe0),
        rule_entry((2, 2), EntryGe0),
        rule_entry((3, 3), EntryGe0),
        rule_entry((4, 4), EntryGe0),
        rule_minor((1, 2), DetGe0, &[1, 2]),
        rule_minor((2, 3), DetGe0, &[2, 3]),
        rule_minor((3, 4), DetGe0, &[3, 4]),
        rule_minor((1, 3), DetGe0, &[1, 2, 3]),
        rule_minor((2, 4), DetGe0, &[2, 3, 4]),
        corner,
    ])
}
