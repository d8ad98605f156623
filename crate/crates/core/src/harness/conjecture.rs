//! Trend of the spin gap `γ_{J,M}/J` towards the Jacobi gap as `J` grows.

use crate::error::{Error, Result};
use crate::jacobi::jacobi_gap;
use crate::kinkmath::ModelParams;
use crate::output::{fmt_f64, CsvTable};
use crate::spin::sector_gap;

/// How the magnetization sector is chosen at each `2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MRule {
    /// `2M` closest to `2J Σ_{x∈Λ} cos θ_x` with the parity of `|Λ|·2J`.
    Pinned,
    /// The same `2M` for every `J`.
    Fixed(i64),
}

impl MRule {
    pub fn m2(&self, params: &ModelParams) -> i64 {
        match *self {
            MRule::Fixed(m2) => m2,
            MRule::Pinned => {
                let target: f64 = params.window.sites().map(|x| params.cos_theta(x as f64)).sum::<f64>() * params.two_j as f64;
                let parity = (params.window.len() as i64 * params.two_j as i64).rem_euclid(2);
                let below = target.floor() as i64;
                [below - 1, below, below + 1, below + 2]
                    .into_iter()
                    .filter(|m| m.rem_euclid(2) == parity)
                    .min_by(|a, b| (*a as f64 - target).abs().total_cmp(&(*b as f64 - target).abs()))
                    .expect("two candidates of each parity")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConjectureRow {
    pub two_j: u32,
    pub m2: i64,
    pub dim: usize,
    pub gamma: f64,
    pub gamma_over_j: f64,
    pub jacobi_gap: f64,
    /// `|γ_{J,M}/J − γ̃|`.
    pub diff: f64,
}

/// Sector gaps `γ_{J,M}` along `two_j_list`, compared with the Jacobi gap.
pub fn conjecture_trend(params: &ModelParams, two_j_list: &[u32], rule: MRule) -> Result<Vec<ConjectureRow>> {
    let gamma_tilde = jacobi_gap(params)?;
    two_j_list
        .iter()
        .map(|&two_j| {
            let p = params.with_two_j(two_j);
            let m2 = rule.m2(&p);
            let g = sector_gap(&p, m2)?;
            if !g.ground_simple {
                return Err(Error::InvalidParameter(format!("sector 2M = {m2} at 2J = {two_j} has no simple zero ground state")));
            }
            let gamma_over_j = g.gap / p.j();
            Ok(ConjectureRow {
                two_j,
                m2,
                dim: g.dim,
                gamma: g.gap,
                gamma_over_j,
                jacobi_gap: gamma_tilde,
                diff: (gamma_over_j - gamma_tilde).abs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TrendVerdict {
    /// Consecutive pairs where the difference grows.
    pub inversions: usize,
    /// Whether every inversion is within `band` relative growth.
    pub inversions_within_band: bool,
    pub pass: bool,
}

/// Passes if `diff` is non-increasing along the rows except for at most one
/// step whose relative growth is below `band`.
pub fn trend_verdict(rows: &[ConjectureRow], band: f64) -> TrendVerdict {
    let growth: Vec<f64> = rows.windows(2).filter(|w| w[1].diff > w[0].diff).map(|w| w[1].diff / w[0].diff - 1.0).collect();
    let within = growth.iter().all(|&g| g <= band);
    TrendVerdict { inversions: growth.len(), inversions_within_band: within, pass: growth.len() <= 1 && within }
}

pub fn conjecture_csv(rows: &[ConjectureRow]) -> CsvTable {
    let mut t = CsvTable::new(["two_j", "M", "dim", "gamma", "gamma_over_j", "jacobi_gap", "diff"]);
    for r in rows {
        t.push(vec![
            r.two_j.to_string(),
            crate::spin::hamiltonian::format_m(r.m2),
            r.dim.to_string(),
            fmt_f64(r.gamma),
            fmt_f64(r.gamma_over_j),
            fmt_f64(r.jacobi_gap),
            fmt_f64(r.diff),
        ]);
    }
    t
}
