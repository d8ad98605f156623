//! Low-lying spectrum of `H_J/J + h_J sup_x N_x` against the quasi-free spectrum.

use super::eigenvalues_below;
use crate::error::{Error, Result};
use crate::fock::{build_spin_parts, sup_number_operator, FockBasis};
use crate::jacobi::spectral_report;
use crate::kinkmath::ModelParams;
use crate::output::{fmt_f64, CsvTable};
use rayon::prelude::*;

/// Occupation cut `n_J` and pinning strength `h_J` used at one `2J`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PinSchedule {
    pub two_j: u32,
    pub n_j: usize,
    pub h_j: f64,
}

impl PinSchedule {
    /// Requires `0 < n_J < J` and `h_J ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        if self.n_j == 0 || 2 * self.n_j >= self.two_j as usize {
            return Err(Error::InvalidParameter(format!(
                "need 0 < n_J < J (got n_J = {}, 2J = {})",
                self.n_j, self.two_j
            )));
        }
        if !(self.h_j >= 0.0) {
            return Err(Error::InvalidParameter(format!("pinning strength must be non-negative (got {})", self.h_j)));
        }
        Ok(())
    }
}

/// `n_J = max(1, [(J/ln J)^{1/3}])` and `h_J = 1.25 E_max ((ln J/J)/(ln 2/2))^{1/6}`,
/// so `h_J → 0` while `h_J n_J` stays above `E_max`. For `J < 2` the factor is 1.
pub fn default_schedule(two_j_list: &[u32], e_max: f64) -> Vec<PinSchedule> {
    two_j_list
        .iter()
        .map(|&two_j| {
            let j = two_j as f64 / 2.0;
            let (n_j, factor) = if j < 2.0 {
                (1, 1.0)
            } else {
                let n = ((j / j.ln()).cbrt().floor() as usize).max(1);
                (n, ((j.ln() / j) / (2f64.ln() / 2.0)).powf(1.0 / 6.0))
            };
            PinSchedule { two_j, n_j, h_j: 1.25 * e_max * factor }
        })
        .collect()
}

/// Eigenvalues `≤ e_max` of `H_J/J + h_J sup_x N_x` on the window, restricted to
/// at most `2n_J` bosons per site. No check that the pinning is strong enough,
/// so `h_J = 0` can serve as a control.
pub fn pinned_levels(params: &ModelParams, schedule: &PinSchedule, e_max: f64) -> Result<Vec<f64>> {
    schedule.validate()?;
    let p = params.with_two_j(schedule.two_j);
    let basis = FockBasis::full(p.window, 2 * schedule.n_j)?;
    let op = build_spin_parts(&p, &basis)?.total()?.add_scaled(&sup_number_operator(&basis, schedule.h_j)?, 1.0)?;
    eigenvalues_below(&op, e_max)
}

/// Distinct eigenvalues `≤ e_max` of the quasi-free Hamiltonian on the window:
/// `0` and all sums of positive one-particle energies.
pub fn quasi_free_levels_below(params: &ModelParams, e_max: f64) -> Result<Vec<f64>> {
    let rep = spectral_report(params, params.window.len(), false)?;
    let modes: Vec<f64> = rep.eigenvalues.iter().copied().filter(|&l| l >= rep.gap).collect();
    let mut levels = vec![0.0];
    fn extend(modes: &[f64], start: usize, sum: f64, e_max: f64, out: &mut Vec<f64>) {
        for (i, &m) in modes.iter().enumerate().skip(start) {
            let s = sum + m;
            if s > e_max {
                break;
            }
            out.push(s);
            extend(modes, i, s, e_max, out);
        }
    }
    extend(&modes, 0, 0.0, e_max, &mut levels);
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(levels)
}

/// Hausdorff distance between two finite sets; `0` if both are empty and
/// infinite if exactly one is.
pub fn hausdorff_distance(a: &[f64], b: &[f64]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    let directed = |x: &[f64], y: &[f64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PinnedRow {
    pub two_j: u32,
    pub n_j: usize,
    pub h_j: f64,
    pub dim: usize,
    /// Pinned eigenvalues below `E_max`, with multiplicity.
    pub levels: Vec<f64>,
    /// Distinct quasi-free levels below `E_max`.
    pub reference: Vec<f64>,
    pub hausdorff: f64,
}

/// Pinned spectra below `e_max` for each schedule entry, compared with the
/// quasi-free levels. Entries with `h_J n_J ≤ E_max` are rejected.
pub fn pinned_spectrum_convergence(params: &ModelParams, e_max: f64, schedule: &[PinSchedule]) -> Result<Vec<PinnedRow>> {
    for s in schedule {
        s.validate()?;
        if s.h_j * s.n_j as f64 <= e_max {
            return Err(Error::InvalidParameter(format!(
                "pinning too weak at 2J = {}: h_J n_J = {} ≤ E_max = {e_max}",
                s.two_j,
                s.h_j * s.n_j as f64
            )));
        }
    }
    let reference = quasi_free_levels_below(params, e_max)?;
    schedule
        .par_iter()
        .map(|s| {
            let levels = pinned_levels(params, s, e_max)?;
            Ok(PinnedRow {
                two_j: s.two_j,
                n_j: s.n_j,
                h_j: s.h_j,
                dim: FockBasis::full(params.window, 2 * s.n_j)?.dim(),
                hausdorff: hausdorff_distance(&levels, &reference),
                levels,
                reference: reference.clone(),
            })
        })
        .collect()
}

pub fn pinned_csv(rows: &[PinnedRow]) -> CsvTable {
    let mut t = CsvTable::new(["two_j", "n_j", "h_j", "dim", "n_levels", "n_reference", "lowest", "hausdorff"]);
    for r in rows {
        t.push(vec![
            r.two_j.to_string(),
            r.n_j.to_string(),
            fmt_f64(r.h_j),
            r.dim.to_string(),
            r.levels.len().to_string(),
            r.reference.len().to_string(),
            r.levels.first().map_or(String::new(), |&v| fmt_f64(v)),
            fmt_f64(r.hausdorff),
        ]);
    }
    t
}
