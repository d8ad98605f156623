//! Executable checks of the bounds and convergence statements.
//!
//! Every check returns data (reports, table rows) instead of panicking, so the
//! same code drives the unit tests, the CLI and the acceptance suite.

pub mod bounds;
pub mod conjecture;
pub mod convergence;
pub mod pinned;

pub use bounds::{
    default_bound_suite, kin_bound_reports_for, bound_suite, bound_suite_configs, verify_kin_lower_bound, verify_norm_bounds, SuiteConfig,
};
pub use conjecture::{conjecture_csv, conjecture_trend, trend_verdict, ConjectureRow, MRule, TrendVerdict};
pub use convergence::{
    concentration_csv, spectral_concentration_check, strong_convergence_csv, strong_convergence_residual,
    ConcentrationLevel, ConcentrationReport, ConcentrationRow, CountStatus, StrongConvergenceRow,
};
pub use pinned::{
    default_schedule, hausdorff_distance, pinned_csv, pinned_levels, pinned_spectrum_convergence,
    quasi_free_levels_below, PinSchedule, PinnedRow,
};

use crate::error::Result;
use crate::fock::FockBasis;
use crate::jacobi::DENSE_LIMIT;
use crate::linalg::{lanczos_lowest, sorted_symmetric_eigen, LanczosOptions, LinearOperator, SparseOperator};
use crate::output::{fmt_f64, CsvTable};
use serde::Serialize;

/// Base seed for all randomised checks; configuration `i` uses `DEFAULT_SEED + i`.
pub const DEFAULT_SEED: u64 = 2003;

/// Reports with `margin ≥ −PASS_TOL` pass.
pub const PASS_TOL: f64 = 1e-12;

/// Parameters recorded with each bound evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundParams {
    pub two_j: u32,
    pub delta: f64,
    pub r: f64,
    pub window: String,
    pub n_cap: usize,
    pub n: Option<usize>,
    pub sample: String,
}

/// One evaluation of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: String,
    pub params: BoundParams,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl BoundReport {
    pub fn new(bound: &str, params: BoundParams, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        BoundReport { bound: bound.to_string(), params, lhs, rhs, margin, pass: margin >= -PASS_TOL }
    }
}

pub fn bound_reports_csv(reports: &[BoundReport]) -> CsvTable {
    let mut t = CsvTable::new([
        "bound", "two_j", "delta", "r", "window", "n_cap", "n", "sample", "lhs", "rhs", "margin", "pass",
    ]);
    for b in reports {
        let p = &b.params;
        t.push(vec![
            b.bound.clone(),
            p.two_j.to_string(),
            fmt_f64(p.delta),
            fmt_f64(p.r),
            p.window.clone(),
            p.n_cap.to_string(),
            p.n.map_or(String::new(), |n| n.to_string()),
            p.sample.clone(),
            fmt_f64(b.lhs),
            fmt_f64(b.rhs),
            fmt_f64(b.margin),
            b.pass.to_string(),
        ]);
    }
    t
}

/// `{suite, total, passed, failed, worst_margin}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_margin: f64,
}

impl SuiteSummary {
    pub fn from_reports(suite: &str, reports: &[BoundReport]) -> Self {
        let passed = reports.iter().filter(|r| r.pass).count();
        SuiteSummary {
            suite: suite.to_string(),
            total: reports.len(),
            passed,
            failed: reports.len() - passed,
            worst_margin: reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn from_counts(suite: &str, total: usize, passed: usize, worst_margin: f64) -> Self {
        SuiteSummary { suite: suite.to_string(), total, passed, failed: total - passed, worst_margin }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serialises")
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Decay exponent `p` of `y ∝ J^{−p}` fitted on log-log data.
pub fn decay_exponent(js: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = js.iter().zip(ys).map(|(j, y)| (j.ln(), y.ln())).collect();
    -fit_slope(&pts)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Copies the coefficients of `v` (on `from`) into the larger basis `to`.
pub(crate) fn embed(from: &FockBasis, to: &FockBasis, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; to.dim()];
    for (i, c) in from.iter().enumerate() {
        if v[i] != 0.0 {
            let j = to.index_of(c).expect("target basis contains the source basis");
            out[j] = v[i];
        }
    }
    out
}

/// All eigenvalues of `op` that are `≤ bound`, ascending. Dense below
/// `DENSE_LIMIT`, otherwise Lanczos with a growing number of requested pairs.
pub(crate) fn eigenvalues_below(op: &SparseOperator, bound: f64) -> Result<Vec<f64>> {
    let dim = LinearOperator::dim(op);
    if dim <= DENSE_LIMIT {
        let (vals, _) = sorted_symmetric_eigen(op.to_dense());
        return Ok(vals.into_iter().filter(|&v| v <= bound).collect());
    }
    let mut k = 16;
    loop {
        let opts = LanczosOptions { k: k.min(dim), max_iter: 1500, ..Default::default() };
        let out = lanczos_lowest(op, &opts, &[])?;
        let last = *out.eigenvalues.last().unwrap_or(&f64::INFINITY);
        if last > bound || k >= dim || k >= 256 {
            return Ok(out.eigenvalues.into_iter().filter(|&v| v <= bound).collect());
        }
        k *= 2;
    }
}
