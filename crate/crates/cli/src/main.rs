//! `psdcert`: determinant-based PD/PSD certification, corner feasibility
//! intervals, matrix completion, and elementwise PSD case systems.
//!
//! Exit codes: 0 success/positive verdict, 1 negative verdict or certified
//! infeasibility, 2 input or usage error, 3 criterion disagreement (with
//! `--criterion both`), 4 completion infeasible at the chosen grid
//! resolution.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use psdcert_core::completion::{
    complete_pd, complete_psd, extend_reduced_completion, feasible_region,
    reduce_missing_diagonal, CompletionOutcome, GridConfig, Mode, PartialSymMatrix,
};
use psdcert_core::criterion::{check_pd_classic, check_psd_classic, check_psd_strong};
use psdcert_core::io::{
    interval_json, matrix_to_json, matrix_to_text, parse_partial_auto, region_csv, scalar_json,
    verdict_json,
};
use psdcert_core::matrix::ConsecutiveRange;
use psdcert_core::quadratic::{
    corner_quadratic, discriminant_identity_gap, pd_corner_interval, psd_corner_interval,
    Bound, Interval,
};
use psdcert_core::scalar::{Exact, Scalar};
use psdcert_core::sdp::{emit_cases, evaluate_case, psd_case_cover_check, psd_cases_m4};

#[derive(Parser)]
#[command(name = "psdcert", version, about = "Determinant-based PD/PSD certification")]
struct Cli {
    /// Scalar backend. Default: exact rationals for m <= 10, f64 above.
    /// The PSDCERT_BACKEND environment variable overrides the default; this
    /// flag overrides both.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Pd,
    Psd,
}

impl ModeArg {
    fn to_mode(self) -> Mode {
        match self {
            ModeArg::Pd => Mode::Pd,
            ModeArg::Psd => Mode::Psd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Strong,
    Classic,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a fully observed symmetric matrix for PD/PSD.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// PSD criterion: strong (m(m+1)/2 determinants), classic
        /// (all 2^m - 1 principal minors), or both (compare; exit 3 on
        /// disagreement). PD mode always uses leading principal minors.
        #[arg(long, value_enum, default_value_t = CriterionArg::Strong)]
        criterion: CriterionArg,
        /// Dimension cap for the exponential classic PSD criterion.
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
    /// Print the corner-entry quadratic (a, b, c), its discriminant, the two
    /// overlapping block determinants, and the discriminant identity gap.
    Quadratic {
        file: PathBuf,
        /// Entry "i,j" to treat as the corner after permutation
        /// (default: 1,m).
        #[arg(long)]
        corner: Option<String>,
    },
    /// Feasibility interval for the unique missing entry of a matrix.
    Range {
        file: PathBuf,
        /// The missing entry, as "i,j".
        #[arg(long)]
        entry: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Complete a partially observed matrix to PD/PSD by grid search.
    Complete {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Grid points per missing-entry axis.
        #[arg(long, default_value_t = 40)]
        grid: usize,
        /// Also sample the feasible region of two variables, as labels
        /// "1,2" into the missing-entry order.
        #[arg(long)]
        region: Option<String>,
        /// Write the completed matrix (text format) to this file.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write the region CSV to this file (default: stdout).
        #[arg(long)]
        region_output: Option<PathBuf>,
    },
    /// Emit the five elementwise PSD case systems for 4x4 matrices.
    SdpCases {
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Output format: json or csv.
        #[arg(long, default_value = "json")]
        format: String,
        /// Evaluate every case on the matrix in this file instead.
        #[arg(long)]
        eval: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn fail(e: impl Display) -> String {
    e.to_string()
}

/// Rough dimension sniff (row count) to pick the default backend before the
/// backend-typed parse happens.
fn sniff_dim(text: &str) -> usize {
    if text.trim_start().starts_with('{') {
        serde_json::from_str::<serde_json::Value>(text)
            .ok()
            .and_then(|v| v.get("entries").and_then(|e| e.as_array().map(Vec::len)))
            .unwrap_or(0)
    } else {
        text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#')).count()
    }
}

fn pick_backend(flag: Option<BackendArg>, dim: usize) -> BackendArg {
    if let Some(b) = flag {
        return b;
    }
    match std::env::var("PSDCERT_BACKEND").ok().as_deref() {
        Some("exact") => BackendArg::Exact,
        Some("float") => BackendArg::Float,
        _ => {
            if dim <= 10 {
                BackendArg::Exact
            } else {
                BackendArg::Float
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn parse_pair(text: &str, what: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("{what} must be \"i,j\", got {text:?}"));
    }
    let i = parts[0].parse::<usize>().map_err(fail)?;
    let j = parts[1].parse::<usize>().map_err(fail)?;
    Ok((i, j))
}

fn dispatch(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Check { file, mode, criterion, cap } => {
            let text = read_file(&file)?;
            match pick_backend(cli.backend, sniff_dim(&text)) {
                BackendArg::Exact => cmd_check::<Exact>(&text, mode, criterion, cap),
                BackendArg::Float => cmd_check::<f64>(&text, mode, criterion, cap),
            }
        }
        Cmd::Quadratic { file, corner } => {
            let text = read_file(&file)?;
            match pick_backend(cli.backend, sniff_dim(&text)) {
                BackendArg::Exact => cmd_quadratic::<Exact>(&text, corner.as_deref()),
                BackendArg::Float => cmd_quadratic::<f64>(&text, corner.as_deref()),
            }
        }
        Cmd::Range { file, entry, mode } => {
            let text = read_file(&file)?;
            match pick_backend(cli.backend, sniff_dim(&text)) {
                BackendArg::Exact => cmd_range::<Exact>(&text, &entry, mode),
                BackendArg::Float => cmd_range::<f64>(&text, &entry, mode),
            }
        }
        Cmd::Complete { file, mode, grid, region, output, region_output } => {
            let text = read_file(&file)?;
            let args = CompleteArgs { mode, grid, region, output, region_output };
            match pick_backend(cli.backend, sniff_dim(&text)) {
                BackendArg::Exact => cmd_complete::<Exact>(&text, &args),
                BackendArg::Float => cmd_complete::<f64>(&text, &args),
            }
        }
        Cmd::SdpCases { m, format, eval } => match eval {
            None => cmd_sdp_cases(m, &format),
            Some(path) => {
                let text = read_file(&path)?;
                match pick_backend(cli.backend, sniff_dim(&text)) {
                    BackendArg::Exact => cmd_sdp_eval::<Exact>(&text, m),
                    BackendArg::Float => cmd_sdp_eval::<f64>(&text, m),
                }
            }
        },
    }
}

fn load_matrix<S: Scalar>(text: &str) -> Result<psdcert_core::matrix::SymMatrix<S>, String> {
    let p: PartialSymMatrix<S> = parse_partial_auto(text).map_err(fail)?;
    p.to_matrix().map_err(|e| format!("{e}"))
}

fn cmd_check<S: Scalar>(
    text: &str,
    mode: ModeArg,
    criterion: CriterionArg,
    cap: usize,
) -> Result<u8, String> {
    let x = load_matrix::<S>(text)?;
    let m = x.dim();
    if mode == ModeArg::Pd {
        let verdict = check_pd_classic(&x);
        let positive = verdict.is_positive;
        println!(
            "{}",
            json!({"mode": "pd", "criterion": "classic", "report": verdict_json(&verdict, m)})
        );
        return Ok(if positive { 0 } else { 1 });
    }
    let strong = || {
        let (v, stats) = check_psd_strong(&x);
        (v, stats.det_evaluations)
    };
    let classic = || -> Result<_, String> {
        let (v, stats) = check_psd_classic(&x, cap).map_err(fail)?;
        Ok((v, stats.det_evaluations))
    };
    match criterion {
        CriterionArg::Strong => {
            let (v, evals) = strong();
            let positive = v.is_positive;
            println!(
                "{}",
                json!({"mode": "psd", "criterion": "strong", "report": verdict_json(&v, evals)})
            );
            Ok(if positive { 0 } else { 1 })
        }
        CriterionArg::Classic => {
            let (v, evals) = classic()?;
            let positive = v.is_positive;
            println!(
                "{}",
                json!({"mode": "psd", "criterion": "classic", "report": verdict_json(&v, evals)})
            );
            Ok(if positive { 0 } else { 1 })
        }
        CriterionArg::Both => {
            let (vs, es) = strong();
            let (vc, ec) = classic()?;
            let agree = vs.is_positive == vc.is_positive;
            println!(
                "{}",
                json!({
                    "mode": "psd",
                    "criterion": "both",
                    "agree": agree,
                    "strong": verdict_json(&vs, es),
                    "classic": verdict_json(&vc, ec),
                })
            );
            if !agree {
                Ok(3)
            } else {
                Ok(if vs.is_positive { 0 } else { 1 })
            }
        }
    }
}

/// Permutation placing `i` first and `j` last.
fn corner_permutation(m: usize, i: usize, j: usize) -> Result<Vec<usize>, String> {
    if i == j || i < 1 || j < 1 || i > m || j > m {
        return Err(format!("corner entry ({i},{j}) must be off-diagonal within 1..={m}"));
    }
    let mut perm = vec![i];
    perm.extend((1..=m).filter(|&k| k != i && k != j));
    perm.push(j);
    Ok(perm)
}

fn cmd_quadratic<S: Scalar>(text: &str, corner: Option<&str>) -> Result<u8, String> {
    let x = load_matrix::<S>(text)?;
    let m = x.dim();
    let (i, j) = match corner {
        Some(c) => parse_pair(c, "--corner")?,
        None => (1, m),
    };
    let x = x.permuted(&corner_permutation(m, i, j)?);
    let q = corner_quadratic(&x).map_err(fail)?;
    let gap = discriminant_identity_gap(&x).map_err(fail)?;
    let left = x.range_submatrix(ConsecutiveRange::new(1, m - 1, m).map_err(fail)?).det();
    let right = x.range_submatrix(ConsecutiveRange::new(2, m, m).map_err(fail)?).det();
    let gap_ok = gap.sign_scaled(&x.det_scale(m)).is_zero();
    println!(
        "{}",
        json!({
            "corner": [i, j],
            "a": scalar_json(&q.a),
            "b": scalar_json(&q.b),
            "c": scalar_json(&q.c),
            "discriminant": scalar_json(&q.discriminant()),
            "det_block_1": scalar_json(&left),
            "det_block_2": scalar_json(&right),
            "identity_gap": scalar_json(&gap),
            "identity_ok": gap_ok,
        })
    );
    Ok(if gap_ok { 0 } else { 1 })
}

fn interval_display<S: Scalar>(iv: &Interval<S>) -> String {
    match iv {
        Interval::Empty => "empty".to_string(),
        Interval::Range { lo, hi, open_lo, open_hi } => {
            let side = |b: &Bound<S>, inf: &str| match b {
                Bound::Finite(e) => e.display(),
                _ => inf.to_string(),
            };
            format!(
                "{}{}, {}{}",
                if *open_lo { "(" } else { "[" },
                side(lo, "-inf"),
                side(hi, "+inf"),
                if *open_hi { ")" } else { "]" },
            )
        }
    }
}

fn cmd_range<S: Scalar>(text: &str, entry: &str, mode: ModeArg) -> Result<u8, String> {
    let p: PartialSymMatrix<S> = parse_partial_auto(text).map_err(fail)?;
    let (i, j) = parse_pair(entry, "--entry")?;
    let (i, j) = (i.min(j), i.max(j));
    let holes = p.missing_positions();
    match holes.as_slice() {
        [] => {
            // fully observed: the interval still makes sense, treating the
            // given entry as free
        }
        [h] if *h == (i, j) => {}
        [h] => return Err(format!("the missing entry is ({},{}), not ({i},{j})", h.0, h.1)),
        _ => {
            return Err(format!(
                "matrix has {} missing entries; `psdcert range` needs exactly one — \
                 use `psdcert complete`",
                holes.len()
            ))
        }
    }
    let m = p.dim();
    let mut p = p.permuted(&corner_permutation(m, i, j)?);
    p.set(1, m, S::zero()); // placeholder; the interval ignores the corner value
    let x = p.to_matrix().map_err(fail)?;
    let iv = match mode.to_mode() {
        Mode::Pd => pd_corner_interval(&x).map_err(fail)?,
        Mode::Psd => psd_corner_interval(&x).map_err(fail)?,
    };
    println!(
        "{}",
        json!({
            "entry": [i, j],
            "mode": if mode == ModeArg::Pd { "pd" } else { "psd" },
            "interval": interval_json(&iv),
            "display": interval_display(&iv),
        })
    );
    Ok(0)
}

struct CompleteArgs {
    mode: ModeArg,
    grid: usize,
    region: Option<String>,
    output: Option<PathBuf>,
    region_output: Option<PathBuf>,
}

fn cmd_complete<S: Scalar>(text: &str, args: &CompleteArgs) -> Result<u8, String> {
    let p: PartialSymMatrix<S> = parse_partial_auto(text).map_err(fail)?;
    let mode = args.mode.to_mode();
    let (reduced, report) = reduce_missing_diagonal(&p);
    let reduced_rows = !report.removed.is_empty();
    let config = GridConfig::with_points(mode, args.grid);

    if let Some(region_vars) = &args.region {
        let vars = parse_pair(region_vars, "--region")?;
        let points = feasible_region(&reduced, vars, &config).map_err(fail)?;
        let csv = region_csv(&points);
        match &args.region_output {
            Some(path) => std::fs::write(path, &csv)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
            None => print!("{csv}"),
        }
    }

    let outcome = match mode {
        Mode::Pd => complete_pd(&reduced, &config).map_err(fail)?,
        Mode::Psd => complete_psd(&reduced, &config).map_err(fail)?,
    };
    match outcome {
        CompletionOutcome::Completed { matrix, assignment, .. } => {
            let full = if reduced_rows {
                extend_reduced_completion(&p, &matrix, &report, mode).map_err(fail)?
            } else {
                matrix
            };
            let mut obj = json!({
                "status": "completed",
                "matrix": matrix_to_json(&full),
            });
            if !reduced_rows {
                obj["assignment"] = serde_json::Value::Array(
                    assignment.iter().map(|v| scalar_json(v)).collect(),
                );
            }
            println!("{obj}");
            if let Some(path) = &args.output {
                std::fs::write(path, matrix_to_text(&full))
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            Ok(0)
        }
        CompletionOutcome::InfeasibleAtResolution { points_per_axis } => {
            println!(
                "{}",
                json!({"status": "infeasible_at_resolution", "grid": points_per_axis})
            );
            Ok(4)
        }
        CompletionOutcome::CertifiedInfeasible { witness } => {
            println!(
                "{}",
                json!({"status": "certified_infeasible", "witness": witness.indices().to_vec()})
            );
            Ok(1)
        }
    }
}

fn cmd_sdp_cases(m: usize, format: &str) -> Result<u8, String> {
    if m != 4 {
        return Err(format!("case systems are derived for m = 4 only, got m = {m}"));
    }
    println!("{}", emit_cases(format).map_err(fail)?);
    Ok(0)
}

fn cmd_sdp_eval<S: Scalar>(text: &str, m: usize) -> Result<u8, String> {
    if m != 4 {
        return Err(format!("case systems are derived for m = 4 only, got m = {m}"));
    }
    let x = load_matrix::<S>(text)?;
    let cover = psd_case_cover_check(&x).map_err(fail)?;
    let cases: Vec<serde_json::Value> = psd_cases_m4()
        .iter()
        .map(|case| {
            let (satisfied, reports) = evaluate_case(&x, case);
            json!({
                "case": case.id,
                "satisfied": satisfied,
                "constraints": reports
                    .iter()
                    .map(|r| json!({
                        "constraint": r.constraint.to_string(),
                        "holds": r.holds,
                    }))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    println!("{}", json!({"covered": cover, "cases": cases}));
    Ok(if cover { 0 } else { 1 })
}
