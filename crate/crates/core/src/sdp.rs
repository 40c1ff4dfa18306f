//! Elementwise reparameterization of the "X is PSD" constraint for 4x4
//! matrices: five exhaustive constraint systems, split on whether the two
//! middle diagonal entries are positive or zero.
//!
//! Any 4x4 symmetric matrix is PSD iff it satisfies at least one of the five
//! systems, and every matrix satisfying a single system is PSD.

use thiserror::Error;

use crate::constraint::{ConstraintKind, ConstraintTarget, ElementConstraint};
use crate::matrix::SymMatrix;
use crate::scalar::Scalar;

pub const SDP_CASE_DIMENSION: usize = 4;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("case systems are derived for m = 4 only, got m = {0}")]
    WrongDimension(usize),
    #[error("unknown serialization format {0:?}")]
    UnknownFormat(String),
    #[error("malformed case system payload: {0}")]
    Malformed(String),
}

/// One of the five constraint systems covering PSD 4x4 matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSystem {
    pub id: usize,
    pub description: String,
    pub constraints: Vec<ElementConstraint>,
}

/// Per-constraint evaluation record.
#[derive(Debug, Clone)]
pub struct ConstraintReport {
    pub constraint: ElementConstraint,
    pub holds: bool,
}

use ConstraintKind::*;

fn minor(kind: ConstraintKind, idx: &[usize]) -> ElementConstraint {
    ElementConstraint::minor(kind, idx.to_vec())
}

fn entry(kind: ConstraintKind, i: usize, j: usize) -> ElementConstraint {
    ElementConstraint::entry(kind, i, j)
}

/// The five-case enumeration for m = 4, split on the signs of `X_{2,2}` and
/// `X_{3,3}` and on `det(X_{2:3,2:3})`.
///
/// Case 2 carries `det(X_{1:2}) >= 0` and `det(X_{3:4}) >= 0` explicitly:
/// with `det(X_{2:3}) = 0` they are not implied by the 3x3 minors (unlike in
/// case 1, where the discriminant identity forces them), and dropping them
/// admits non-PSD matrices.
pub fn psd_cases_m4() -> Vec<CaseSystem> {
    vec![
        CaseSystem {
            id: 1,
            description: "X22, X33 > 0 and det(X_{2:3}) > 0".into(),
            constraints: vec![
                entry(EntryGe0, 1, 1),
                entry(EntryGe0, 4, 4),
                entry(EntryGt0, 2, 2),
                entry(EntryGt0, 3, 3),
                minor(DetGt0, &[2, 3]),
                minor(DetGe0, &[1, 2, 3]),
                minor(DetGe0, &[2, 3, 4]),
                minor(DetGe0, &[1, 2, 3, 4]),
            ],
        },
        CaseSystem {
            id: 2,
            description: "X22, X33 > 0 and det(X_{2:3}) = 0".into(),
            constraints: vec![
                entry(EntryGe0, 1, 1),
                entry(EntryGe0, 4, 4),
                entry(EntryGt0, 2, 2),
                entry(EntryGt0, 3, 3),
                minor(DetEq0, &[2, 3]),
                minor(DetGe0, &[1, 2]),
                minor(DetGe0, &[3, 4]),
                minor(DetGe0, &[1, 2, 3]),
                minor(DetGe0, &[2, 3, 4]),
                minor(DetGe0, &[1, 2, 4]),
            ],
        },
        CaseSystem {
            id: 3,
            description: "X33 = 0 (zero row/column 3), X22 > 0".into(),
            constraints: vec![
                entry(EntryGe0, 1, 1),
                entry(EntryGe0, 4, 4),
                entry(EntryGt0, 2, 2),
                minor(DetGe0, &[1, 2]),
                minor(DetGe0, &[2, 4]),
                minor(DetGe0, &[1, 2, 4]),
                entry(EntryEq0, 3, 3),
                entry(EntryEq0, 1, 3),
                entry(EntryEq0, 2, 3),
                entry(EntryEq0, 3, 4),
            ],
        },
        CaseSystem {
            id: 4,
            description: "X22 = 0 (zero row/column 2), X33 > 0".into(),
            constraints: vec![
                entry(EntryGe0, 1, 1),
                entry(EntryGe0, 4, 4),
                entry(EntryGt0, 3, 3),
                minor(DetGe0, &[1, 3]),
                minor(DetGe0, &[3, 4]),
                minor(DetGe0, &[1, 3, 4]),
                entry(EntryEq0, 2, 2),
                entry(EntryEq0, 1, 2),
                entry(EntryEq0, 2, 3),
                entry(EntryEq0, 2, 4),
            ],
        },
        CaseSystem {
            id: 5,
            description: "X22 = X33 = 0 (zero rows/columns 2 and 3)".into(),
            constraints: vec![
                entry(EntryGe0, 1, 1),
                entry(EntryGe0, 4, 4),
                minor(DetGe0, &[1, 4]),
                entry(EntryEq0, 2, 2),
                entry(EntryEq0, 3, 3),
                entry(EntryEq0, 1, 2),
                entry(EntryEq0, 1, 3),
                entry(EntryEq0, 2, 3),
                entry(EntryEq0, 2, 4),
                entry(EntryEq0, 3, 4),
            ],
        },
    ]
}

/// Evaluates every constraint of a case against `x`.
pub fn evaluate_case<S: Scalar>(
    x: &SymMatrix<S>,
    case: &CaseSystem,
) -> (bool, Vec<ConstraintReport>) {
    let reports: Vec<ConstraintReport> = case
        .constraints
        .iter()
        .map(|c| ConstraintReport { constraint: c.clone(), holds: c.holds(x) })
        .collect();
    (reports.iter().all(|r| r.holds), reports)
}

/// True iff any of the five cases holds; by the coverage property this
/// equals the PSD verdict for 4x4 matrices.
pub fn psd_case_cover_check<S: Scalar>(x: &SymMatrix<S>) -> Result<bool, SdpError> {
    if x.dim() != SDP_CASE_DIMENSION {
        return Err(SdpError::WrongDimension(x.dim()));
    }
    Ok(psd_cases_m4().iter().any(|case| evaluate_case(x, case).0))
}

/// Serializes the case systems; `json` or `csv`.
pub fn emit_cases(format: &str) -> Result<String, SdpError> {
    let cases = psd_cases_m4();
    match format {
        "json" => Ok(cases_to_json(&cases).to_string()),
        "csv" => {
            let mut out = String::from("case,kind,indices\n");
            for case in &cases {
                for c in &case.constraints {
                    let idx: Vec<String> = c.indices().iter().map(|i| i.to_string()).collect();
                    out.push_str(&format!("{},{},{}\n", case.id, c.kind.as_str(), idx.join(" ")));
                }
            }
            Ok(out)
        }
        other => Err(SdpError::UnknownFormat(other.to_owned())),
    }
}

pub fn cases_to_json(cases: &[CaseSystem]) -> serde_json::Value {
    serde_json::Value::Array(
        cases
            .iter()
            .map(|case| {
                serde_json::json!({
                    "case": case.id,
                    "description": case.description,
                    "constraints": case.constraints.iter().map(|c| {
                        serde_json::json!({
                            "kind": c.kind.as_str(),
                            "indices": c.indices(),
                        })
                    }).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

/// Parses the JSON emitted by [`emit_cases`]; round-trips exactly.
pub fn parse_cases_json(text: &str) -> Result<Vec<CaseSystem>, SdpError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| SdpError::Malformed(e.to_string()))?;
    let arr = value.as_array().ok_or_else(|| SdpError::Malformed("expected array".into()))?;
    let mut out = Vec::with_capacity(arr.len());
    for item in arr {
        let id = item["case"]
            .as_u64()
            .ok_or_else(|| SdpError::Malformed("missing case id".into()))? as usize;
        let description = item["description"].as_str().unwrap_or_default().to_owned();
        let mut constraints = Vec::new();
        for c in item["constraints"]
            .as_array()
            .ok_or_else(|| SdpError::Malformed("missing constraints".into()))?
        {
            let kind = c["kind"]
                .as_str()
                .and_then(ConstraintKind::parse_kind)
                .ok_or_else(|| SdpError::Malformed("bad kind".into()))?;
            let indices: Vec<usize> = c["indices"]
                .as_array()
                .ok_or_else(|| SdpError::Malformed("bad indices".into()))?
                .iter()
                .map(|v| v.as_u64().map(|x| x as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| SdpError::Malformed("bad index".into()))?;
            let constraint = if kind.is_det() {
                ElementConstraint::minor(kind, indices)
            } else {
                if indices.len() != 2 {
                    return Err(SdpError::Malformed("entry constraint needs two indices".into()));
                }
                ElementConstraint::entry(kind, indices[0], indices[1])
            };
            constraints.push(constraint);
        }
        out.push(CaseSystem { id, description, constraints });
    }
    Ok(out)
}

/// A case's entry pins as positions `(i, j)` with required value zero.
pub fn pinned_zero_entries(case: &CaseSystem) -> Vec<(usize, usize)> {
    case.constraints
        .iter()
        .filter_map(|c| match (&c.kind, &c.target) {
            (ConstraintKind::EntryEq0, ConstraintTarget::Entry(i, j)) => Some((*i, *j)),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    #[test]
    fn five_cases() {
        let cases = psd_cases_m4();
        assert_eq!(cases.len(), 5);
        // case 2 includes det(X_{2:3}) = 0 and det(X_{1,2,4}) >= 0
        let case2 = &cases[1];
        assert!(case2.constraints.contains(&minor(DetEq0, &[2, 3])));
        assert!(case2.constraints.contains(&minor(DetGe0, &[1, 2, 4])));
        // case 4 pins row/column 2 to zero
        let pins = pinned_zero_entries(&cases[3]);
        assert_eq!(pins, vec![(2, 2), (1, 2), (2, 3), (2, 4)]);
    }

    #[test]
    fn identity_satisfies_case1_zero_satisfies_case5() {
        let cases = psd_cases_m4();
        let id4 = SymMatrix::<Exact>::identity(4);
        assert!(evaluate_case(&id4, &cases[0]).0);
        let zero = SymMatrix::from_fn(4, |_, _| Exact::from_int(0)).unwrap();
        assert!(evaluate_case(&zero, &cases[4]).0);
    }

    #[test]
    fn hankel_block_fails_all_cases() {
        let x = SymMatrix::from_fn(4, |i, j| Exact::from_int((i + j - 1) as i64)).unwrap();
        for case in psd_cases_m4() {
            assert!(!evaluate_case(&x, &case).0, "case {} should fail", case.id);
        }
        assert!(!psd_case_cover_check(&x).unwrap());
    }

    #[test]
    fn cover_check_examples() {
        // indefinite via 2x2 minor -1
        let rows = vec![
            vec![0, 1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, 0, 0],
            vec![0, 0, 0, 0],
        ];
        let x = SymMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Exact::from_int).collect())
                .collect(),
        )
        .unwrap();
        assert!(!psd_case_cover_check(&x).unwrap());

        // diag(1,0,1,1) goes through case 4
        let d = SymMatrix::from_fn(4, |i, j| {
            Exact::from_int(if i == j && i != 2 { 1 } else { 0 })
        })
        .unwrap();
        let cases = psd_cases_m4();
        assert!(evaluate_case(&d, &cases[3]).0);
        assert!(psd_case_cover_check(&d).unwrap());
    }

    #[test]
    fn wrong_dimension_rejected() {
        let x = SymMatrix::<Exact>::identity(3);
        assert!(matches!(psd_case_cover_check(&x), Err(SdpError::WrongDimension(3))));
    }

    #[test]
    fn json_round_trip() {
        let text = emit_cases("json").unwrap();
        let parsed = parse_cases_json(&text).unwrap();
        assert_eq!(parsed, psd_cases_m4());
        assert!(emit_cases("yaml").is_err());
    }

    #[test]
    fn csv_one_row_per_constraint() {
        let csv = emit_cases("csv").unwrap();
        let expected: usize = psd_cases_m4().iter().map(|c| c.constraints.len()).sum();
        assert_eq!(csv.lines().count(), expected + 1);
    }

    #[test]
    fn literal_case2_counterexample_is_caught() {
        // All-ones with X11 = 0: satisfies the case-2 list without the guards but has
        // det(X_{1:2}) = -1; the explicit pair constraints reject it.
        let x = SymMatrix::from_fn(4, |i, j| {
            Exact::from_int(if i == 1 && j == 1 { 0 } else { 1 })
        })
        .unwrap();
        assert!(!psd_case_cover_check(&x).unwrap());
        let (_, reports) = evaluate_case(&x, &psd_cases_m4()[1]);
        let pair = reports
            .iter()
            .find(|r| r.constraint == minor(DetGe0, &[1, 2]))
            .unwrap();
        assert!(!pair.holds);
    }
}
