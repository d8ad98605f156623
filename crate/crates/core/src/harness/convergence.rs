//! Strong convergence of `H_J/J` to the quasi-free Hamiltonian on finite
//! occupation vectors, and spectral concentration near its eigenvalues.

use super::pinned::PinSchedule;
use super::{decay_exponent, eigenvalues_below, norm};
use crate::error::{Error, Result};
use crate::fock::{build_boson_hamiltonian, build_spin_parts, g_factor, sup_number_operator, FockBasis};
use crate::jacobi::spectral_report;
use crate::kinkmath::ModelParams;
use crate::linalg::SumConstraint;
use crate::output::{fmt_f64, CsvTable};
use rayon::prelude::*;

/// Residuals of one `J` for a fixed occupation vector.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StrongConvergenceRow {
    pub two_j: u32,
    pub n_psi: usize,
    /// `‖(H_J/J − H̃)ψ‖`.
    pub residual_h: f64,
    /// `(3+Δ⁻¹)N²/J + 2√(1−Δ⁻²)|v₀|₁((N+1)(2N)²/J)^{1/2}`.
    pub bound_h: f64,
    /// `‖(S³_tot/J − μ)ψ‖`, including the sites outside the window.
    pub residual_s3: f64,
    /// `(N + 2(N+1)^{1/2}|v₀|₁√(J/2))/J`.
    pub bound_s3: f64,
    /// `(N + 2(N+1)^{1/2}|v₀|₁)/J`, which omits the `√(J/2)` of `S̃¹`.
    pub bound_s3_without_scale: f64,
}

impl StrongConvergenceRow {
    pub fn within_bounds(&self) -> bool {
        self.residual_h <= self.bound_h * (1.0 + 1e-12) && self.residual_s3 <= self.bound_s3 * (1.0 + 1e-12)
    }
}

/// Basis reachable from `N`-particle states by one application of `H_J/J`.
fn image_basis(params: &ModelParams, n: usize) -> Result<FockBasis> {
    let cap = (n + 1).min(params.two_j as usize).max(1);
    FockBasis::new(params.window, cap, SumConstraint::AtMost(n + 1))
}

/// `Σ_x w_x (g^{1/2}a_x + a*_x g^{1/2}) psi`.
fn apply_b(basis: &FockBasis, two_j: u32, weights: &[f64], psi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; basis.dim()];
    let mut work = vec![0u16; basis.sites()];
    for (col, cfg) in basis.iter().enumerate() {
        if psi[col] == 0.0 {
            continue;
        }
        for (x, &w) in weights.iter().enumerate() {
            let n = cfg[x] as usize;
            let mut moves = Vec::with_capacity(2);
            if n < basis.n_cap {
                moves.push((n + 1, ((n + 1) as f64 * g_factor(two_j, n)).sqrt()));
            }
            if n > 0 {
                moves.push((n - 1, (n as f64 * g_factor(two_j, n - 1)).sqrt()));
            }
            for (new_n, amp) in moves {
                if amp == 0.0 {
                    continue;
                }
                work.copy_from_slice(cfg);
                work[x] = new_n as u16;
                if let Some(row) = basis.index_of(&work) {
                    out[row] += w * amp * psi[col];
                }
            }
        }
    }
    out
}

/// `Σ_{x∉Λ} f(x)` summed outward until the terms drop below `1e-17`.
fn outside_sum(params: &ModelParams, f: impl Fn(f64) -> f64) -> f64 {
    let (a, b) = (params.window.a, params.window.b);
    let mut total = 0.0;
    for k in 1.. {
        let t = f((a - k) as f64) + f((b + k) as f64);
        total += t;
        if t.abs() < 1e-17 {
            break;
        }
    }
    total
}

/// Residuals `‖(H_J/J − H̃)ψ‖` and `‖(S³_tot/J − μ)ψ‖` for the occupation
/// vector `occupation = [(site, n_site), …]` at each `2J`.
pub fn strong_convergence_residual(
    params: &ModelParams,
    two_j_list: &[u32],
    occupation: &[(i64, u16)],
) -> Result<Vec<StrongConvergenceRow>> {
    let w = params.window;
    for &(x, _) in occupation {
        if x < w.a + 2 || x > w.b - 2 {
            return Err(Error::SiteOutOfRange { site: x, a: w.a + 2, b: w.b - 2 });
        }
    }
    let n_psi: usize = occupation.iter().map(|o| o.1 as usize).sum();
    two_j_list
        .par_iter()
        .map(|&two_j| {
            if (two_j as usize) < n_psi.max(1) {
                return Err(Error::InvalidParameter(format!("2J = {two_j} cannot hold {n_psi} bosons")));
            }
            let p = params.with_two_j(two_j);
            let j = p.j();
            let basis = image_basis(&p, n_psi)?;
            let mut cfg = vec![0u16; basis.sites()];
            for &(x, n) in occupation {
                cfg[w.index(x)?] += n;
            }
            let psi = basis.basis_vector(&cfg)?;
            let parts = build_spin_parts(&p, &basis)?;
            let diff = parts.total()?.add_scaled(&build_boson_hamiltonian(&p, &basis)?, -1.0)?;
            let residual_h = norm(&diff.apply_vec(&psi));

            let cos: Vec<f64> = w.sites().map(|x| p.cos_theta(x as f64)).collect();
            let sin: Vec<f64> = w.sites().map(|x| -p.sin_theta(x as f64) / (2.0 * j).sqrt()).collect();
            let mut s3 = apply_b(&basis, two_j, &sin, &psi);
            for (i, c) in basis.iter().enumerate() {
                let nc: f64 = c.iter().zip(&cos).map(|(&n, c)| n as f64 * c).sum();
                s3[i] -= nc / j * psi[i];
            }
            let tail = outside_sum(&p, |x| p.sin_theta(x).powi(2)) / (2.0 * j);
            let residual_s3 = (norm(&s3).powi(2) + tail).sqrt();

            let n = n_psi as f64;
            let l1 = p.zero_mode_l1();
            let f = p.field();
            Ok(StrongConvergenceRow {
                two_j,
                n_psi,
                residual_h,
                bound_h: (3.0 + p.delta_inv()) * n * n / j + 2.0 * f * l1 * ((n + 1.0) * (2.0 * n).powi(2) / j).sqrt(),
                residual_s3,
                bound_s3: (n + 2.0 * (n + 1.0).sqrt() * l1 * (j / 2.0).sqrt()) / j,
                bound_s3_without_scale: (n + 2.0 * (n + 1.0).sqrt() * l1) / j,
            })
        })
        .collect()
}

pub fn strong_convergence_csv(rows: &[StrongConvergenceRow]) -> CsvTable {
    let mut t = CsvTable::new([
        "two_j", "n_psi", "residual_h", "bound_h", "residual_s3", "bound_s3", "bound_s3_without_scale", "within",
    ]);
    for r in rows {
        t.push(vec![
            r.two_j.to_string(),
            r.n_psi.to_string(),
            fmt_f64(r.residual_h),
            fmt_f64(r.bound_h),
            fmt_f64(r.residual_s3),
            fmt_f64(r.bound_s3),
            fmt_f64(r.bound_s3_without_scale),
            r.within_bounds().to_string(),
        ]);
    }
    t
}

/// Which eigenvalue of the quasi-free Hamiltonian to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcentrationLevel {
    /// `E = 0` with the vacuum.
    Vacuum,
    /// `E = λ_k`, the `k`-th one-particle eigenvalue (`k ≥ 1`), with `a*(v_k)Ω`.
    OneParticle(usize),
}

/// Eigenvalues closer than this are treated as one degenerate level.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CountStatus {
    Agree,
    Disagree,
    /// Another quasi-free eigenvalue lies within `10 δ_J` of `E`.
    Untestable,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConcentrationRow {
    pub two_j: u32,
    /// `‖(H_J/J − E)ψ_E‖`.
    pub residual_full: f64,
    /// `‖(H_kin + H_dyn − E)ψ_E‖`.
    pub residual_kin_dyn: f64,
    pub delta_j: f64,
    pub n_j: usize,
    pub h_j: f64,
    /// Eigenvalues of the pinned `H_J/J` on `H[n_J]` in `(E − δ_J, E + δ_J)`.
    pub count: usize,
    /// Same count for the quasi-free Hamiltonian on the same space.
    pub multiplicity: usize,
    /// Distance from `E` to the nearest distinct quasi-free eigenvalue.
    pub nearest_other: f64,
    pub status: CountStatus,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConcentrationReport {
    pub energy: f64,
    pub n_e: usize,
    pub gamma: f64,
    /// `N_E ≤ E/γ̃`.
    pub n_e_bound_holds: bool,
    pub rows: Vec<ConcentrationRow>,
    /// Fitted decay exponents in `J` (NaN with fewer than three points or residuals at rounding level).
    pub exponent_full: f64,
    pub exponent_kin_dyn: f64,
}

/// Residuals of the quasi-free eigenvector `ψ_E` under `H_J/J` and eigenvalue
/// counts of the pinned Hamiltonian in `(E − δ_J, E + δ_J)` with `δ_J = ln J/J`.
pub fn spectral_concentration_check(
    params: &ModelParams,
    level: ConcentrationLevel,
    schedule: &[PinSchedule],
) -> Result<ConcentrationReport> {
    let rep = spectral_report(params, params.window.len(), true)?;
    let gamma = rep.gap;
    let (energy, n_e, mode) = match level {
        ConcentrationLevel::Vacuum => (0.0, 0usize, None),
        ConcentrationLevel::OneParticle(k) => {
            if k == 0 || k >= rep.eigenvalues.len() {
                return Err(Error::InvalidParameter(format!("one-particle level {k} is not an excited mode")));
            }
            let vecs = rep.eigenvectors.as_ref().expect("requested vectors");
            (rep.eigenvalues[k], 1, Some(vecs[k].clone()))
        }
    };
    let rows: Vec<ConcentrationRow> = schedule
        .par_iter()
        .map(|s| concentration_row(params, s, energy, n_e, mode.as_deref()))
        .collect::<Result<_>>()?;
    let js: Vec<f64> = rows.iter().map(|r| r.two_j as f64 / 2.0).collect();
    let fit = |ys: Vec<f64>| {
        if ys.len() >= 3 && ys.iter().all(|&y| y > 1e-12) {
            decay_exponent(&js, &ys)
        } else {
            f64::NAN
        }
    };
    Ok(ConcentrationReport {
        energy,
        n_e,
        gamma,
        n_e_bound_holds: n_e as f64 <= energy / gamma + 1e-12,
        exponent_full: fit(rows.iter().map(|r| r.residual_full).collect()),
        exponent_kin_dyn: fit(rows.iter().map(|r| r.residual_kin_dyn).collect()),
        rows,
    })
}

fn concentration_row(
    params: &ModelParams,
    s: &PinSchedule,
    energy: f64,
    n_e: usize,
    mode: Option<&[f64]>,
) -> Result<ConcentrationRow> {
    s.validate()?;
    let p = params.with_two_j(s.two_j);
    let j = p.j();
    let basis = image_basis(&p, n_e)?;
    let mut psi = vec![0.0; basis.dim()];
    match mode {
        None => psi = basis.vacuum(),
        Some(v) => {
            let mut cfg = vec![0u16; basis.sites()];
            for (x, &c) in v.iter().enumerate() {
                cfg[x] = 1;
                psi[basis.index_of(&cfg).expect("one particle fits")] = c;
                cfg[x] = 0;
            }
        }
    }
    let parts = build_spin_parts(&p, &basis)?;
    let shifted = |op: crate::linalg::SparseOperator| -> Result<f64> {
        let mut r = op.apply_vec(&psi);
        r.iter_mut().zip(&psi).for_each(|(r, c)| *r -= energy * c);
        Ok(norm(&r))
    };
    let residual_full = shifted(parts.total()?)?;
    let residual_kin_dyn = shifted(parts.kin.add_scaled(&parts.dyn_, 1.0)?)?;

    let delta_j = j.ln() / j;
    let space = FockBasis::full(p.window, 2 * s.n_j)?;
    let pin = sup_number_operator(&space, s.h_j)?;
    let pinned = build_spin_parts(&p, &space)?.total()?.add_scaled(&pin, 1.0)?;
    let reference = build_boson_hamiltonian(&p, &space)?;
    let reach = energy + 10.0 * delta_j;
    let spin_vals = eigenvalues_below(&pinned, reach)?;
    let ref_vals = eigenvalues_below(&reference, reach)?;
    let inside = |v: &[f64]| v.iter().filter(|&&x| (x - energy).abs() < delta_j).count();
    let (count, multiplicity) = (inside(&spin_vals), inside(&ref_vals));
    let nearest_other = ref_vals
        .iter()
        .map(|&x| (x - energy).abs())
        .filter(|&d| d > DEGENERACY_TOL)
        .fold(f64::INFINITY, f64::min);
    let status = if nearest_other < 10.0 * delta_j {
        CountStatus::Untestable
    } else if count == multiplicity {
        CountStatus::Agree
    } else {
        CountStatus::Disagree
    };
    Ok(ConcentrationRow {
        two_j: s.two_j,
        residual_full,
        residual_kin_dyn,
        delta_j,
        n_j: s.n_j,
        h_j: s.h_j,
        count,
        multiplicity,
        nearest_other,
        status,
    })
}

pub fn concentration_csv(rep: &ConcentrationReport) -> CsvTable {
    let mut t = CsvTable::new([
        "two_j", "energy", "residual_full", "residual_kin_dyn", "delta_j", "n_j", "h_j", "count", "multiplicity",
        "nearest_other", "status",
    ]);
    for r in &rep.rows {
        t.push(vec![
            r.two_j.to_string(),
            fmt_f64(rep.energy),
            fmt_f64(r.residual_full),
            fmt_f64(r.residual_kin_dyn),
            fmt_f64(r.delta_j),
            r.n_j.to_string(),
            fmt_f64(r.h_j),
            r.count.to_string(),
            r.multiplicity.to_string(),
            fmt_f64(r.nearest_other),
            format!("{:?}", r.status).to_lowercase(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::pinned::default_schedule;
    use crate::kinkmath::{make_params, Window};

    fn p(a: i64, b: i64) -> ModelParams {
        make_params(2, 1.25, 0.5, Window::new(a, b).unwrap()).unwrap()
    }

    #[test]
    fn vacuum_residuals() {
        let m = p(-8, 9);
        let rows = strong_convergence_residual(&m, &[2, 8], &[]).unwrap();
        for r in &rows {
            assert_eq!(r.residual_h, 0.0);
            // ‖Σ_x sin θ_x a*_x Ω‖/√(2J) = |v₀|₂/√(2J)
            let expected = (m.zero_mode_l2_sq() / r.two_j as f64).sqrt();
            assert!((r.residual_s3 - expected).abs() < 1e-12);
            assert!(r.within_bounds());
        }
    }

    #[test]
    fn single_boson_sweep() {
        let m = p(-8, 9);
        let rows = strong_convergence_residual(&m, &[2, 4, 8, 16], &[(0, 1)]).unwrap();
        assert!(rows.iter().all(|r| r.within_bounds()), "{rows:?}");
        assert!(rows.windows(2).all(|w| w[1].residual_h < w[0].residual_h));
        for w in rows.windows(2) {
            let ratio = w[0].residual_h / w[1].residual_h;
            assert!((1.3..=2.1).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn printed_s3_bound_fails_at_large_j() {
        let m = p(-8, 9);
        let rows = strong_convergence_residual(&m, &[4096], &[]).unwrap();
        assert!(rows[0].residual_s3 > rows[0].bound_s3_without_scale);
        assert!(rows[0].residual_s3 <= rows[0].bound_s3);
    }

    #[test]
    fn support_must_stay_inside() {
        assert!(strong_convergence_residual(&p(-3, 3), &[4], &[(2, 1)]).is_err());
        assert!(strong_convergence_residual(&p(-3, 3), &[1], &[(0, 2)]).is_err());
    }

    #[test]
    fn concentration_vacuum() {
        let m = p(-2, 2);
        let rep = spectral_concentration_check(&m, ConcentrationLevel::Vacuum, &default_schedule(&[4, 8], 0.5)).unwrap();
        assert!(rep.n_e_bound_holds);
        for r in &rep.rows {
            assert_eq!(r.residual_full, 0.0);
            assert!(r.count >= 1 && r.multiplicity >= 1);
        }
    }

    #[test]
    fn concentration_first_excitation() {
        let m = p(-2, 2);
        let rep = spectral_concentration_check(&m, ConcentrationLevel::OneParticle(1), &default_schedule(&[4, 8, 16], 1.0))
            .unwrap();
        assert!(rep.n_e_bound_holds && rep.n_e == 1);
        // H_dyn cancels the diagonal shift of H_kin on one boson, so only H_tran contributes
        assert!(rep.rows.iter().all(|r| r.residual_kin_dyn < 1e-13));
        assert!(rep.exponent_kin_dyn.is_nan());
        assert!((rep.exponent_full - 0.5).abs() <= 0.1, "{}", rep.exponent_full);
        for r in &rep.rows {
            assert_eq!(r.status, CountStatus::Untestable);
        }
        assert!(concentration_csv(&rep).render().lines().count() == 4);
        assert!(spectral_concentration_check(&m, ConcentrationLevel::OneParticle(0), &[]).is_err());
    }
}
