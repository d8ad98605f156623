//! Operator inequalities for the kinematical, dynamical and transition parts
//! on the space `H[n_J]` of states with at most `2 n_J` bosons per site.

use super::{embed, norm, BoundParams, BoundReport, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::fock::{build_boson_hamiltonian, build_spin_parts, g_factor, zero_mode_projection_term, FockBasis};
use crate::jacobi::{build_jacobi, jacobi_gap};
use crate::kinkmath::{make_params, ModelParams, Window};
use crate::linalg::{random_unit_vector, tridiag};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn check_n_j(params: &ModelParams, n_j: usize) -> Result<()> {
    if n_j == 0 || 2 * n_j >= params.two_j as usize {
        return Err(Error::InvalidParameter(format!(
            "need 0 < n_J < J (got n_J = {n_j}, 2J = {})",
            params.two_j
        )));
    }
    Ok(())
}

fn record(params: &ModelParams, n_j: usize, n: Option<usize>, sample: String) -> BoundParams {
    BoundParams {
        two_j: params.two_j,
        delta: params.delta,
        r: params.r,
        window: params.window.to_string(),
        n_cap: 2 * n_j,
        n,
        sample,
    }
}

/// Operators needed for the kinematical bounds on one cap-`2n_J` basis.
struct KinSetup {
    basis: FockBasis,
    kin: crate::linalg::SparseOperator,
    projection: crate::linalg::SparseOperator,
    n_tot: Vec<f64>,
    gamma: f64,
    h_norm: f64,
}

impl KinSetup {
    fn new(params: &ModelParams, n_j: usize) -> Result<Self> {
        check_n_j(params, n_j)?;
        let basis = FockBasis::full(params.window, 2 * n_j)?;
        let kin = build_spin_parts(params, &basis)?.kin;
        let projection = zero_mode_projection_term(params, &basis)?;
        let h = build_jacobi(params)?;
        let h_norm = *tridiag::eigenvalues(&h.diag, &h.off)?.last().expect("non-empty window");
        Ok(KinSetup { n_tot: basis.total_number(), basis, kin, projection, gamma: jacobi_gap(params)?, h_norm })
    }

    fn reports(&self, params: &ModelParams, n_j: usize, psi: &[f64], sample: &str) -> [BoundReport; 2] {
        let e_kin = self.kin.expectation(psi);
        let n_mean: f64 = psi.iter().zip(&self.n_tot).map(|(c, n)| c * c * n).sum();
        let p_mean = self.projection.expectation(psi);
        let lower = (self.gamma * g_factor(params.two_j, 2 * n_j) - 1.0 / params.j()) * n_mean - self.gamma * p_mean;
        [
            BoundReport::new("kin_lower", record(params, n_j, None, sample.to_string()), lower, e_kin),
            BoundReport::new("kin_upper", record(params, n_j, None, sample.to_string()), e_kin, self.h_norm * n_mean),
        ]
    }
}

/// Lower and upper bounds on `⟨ψ, H_kin ψ⟩` for `sample_count` random unit
/// vectors of `H[n_J]`: `(γ̃ g_J(2n_J) − 1/J)⟨N⟩ − γ̃⟨A*G^{1/2}P₀G^{1/2}A⟩ ≤ ⟨H_kin⟩ ≤ ‖h̃‖⟨N⟩`.
pub fn verify_kin_lower_bound(params: &ModelParams, n_j: usize, sample_count: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let setup = KinSetup::new(params, n_j)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..sample_count)
        .flat_map(|s| {
            let psi = random_unit_vector(&mut rng, setup.basis.dim());
            setup.reports(params, n_j, &psi, &format!("random#{s}"))
        })
        .collect())
}

/// The kinematical bounds for a given state on the cap-`2n_J` basis of the window.
pub fn kin_bound_reports_for(params: &ModelParams, n_j: usize, psi: &[f64], sample: &str) -> Result<Vec<BoundReport>> {
    let setup = KinSetup::new(params, n_j)?;
    if psi.len() != setup.basis.dim() {
        return Err(Error::InvalidParameter(format!("state has length {}, basis {}", psi.len(), setup.basis.dim())));
    }
    Ok(setup.reports(params, n_j, psi, sample).to_vec())
}

/// Norm bounds for random states:
/// `‖(H̃ − H_kin)ψ_N‖ ≤ 2(1+Δ⁻¹) n_J N/J` and `‖H_dyn ψ_N‖ ≤ 4 n_J N/J` for
/// unit `N`-particle states, and `‖H_tran ψ‖ ≤ 2√(1−Δ⁻²)|v₀|₁((2n_J+1)(4n_J)²/J)^{1/2}`
/// for unit states of `H[n_J]`. Images are evaluated on a basis with one more
/// boson per site, so no part of `Hψ` is truncated.
pub fn verify_norm_bounds(params: &ModelParams, n_j: usize, n: usize, sample_count: usize, seed: u64) -> Result<Vec<BoundReport>> {
    check_n_j(params, n_j)?;
    if n > 2 * n_j * params.window.len() {
        return Err(Error::InvalidParameter(format!("N = {n} exceeds the capacity of H[n_J]")));
    }
    let w = params.window;
    let j = params.j();
    let cap = 2 * n_j;
    let sector = FockBasis::sector(w, cap, n)?;
    let sector_img = FockBasis::sector(w, cap + 1, n)?;
    let parts = build_spin_parts(params, &sector_img)?;
    let diff = build_boson_hamiltonian(params, &sector_img)?.add_scaled(&parts.kin, -1.0)?;
    let space = FockBasis::full(w, cap)?;
    let space_img = FockBasis::full(w, cap + 1)?;
    let tran = build_spin_parts(params, &space_img)?.tran;

    let kin_rhs = 2.0 * (1.0 + params.delta_inv()) * (n_j * n) as f64 / j;
    let dyn_rhs = 4.0 * (n_j * n) as f64 / j;
    let nj = n_j as f64;
    let tran_rhs = 2.0 * params.field() * params.zero_mode_l1() * ((2.0 * nj + 1.0) * (4.0 * nj).powi(2) / j).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(3 * sample_count);
    for s in 0..sample_count {
        let psi_n = embed(&sector, &sector_img, &random_unit_vector(&mut rng, sector.dim()));
        let psi = embed(&space, &space_img, &random_unit_vector(&mut rng, space.dim()));
        let sample = format!("random#{s}");
        out.push(BoundReport::new(
            "kin_minus_quasi_free",
            record(params, n_j, Some(n), sample.clone()),
            norm(&diff.apply_vec(&psi_n)),
            kin_rhs,
        ));
        out.push(BoundReport::new(
            "dyn_norm",
            record(params, n_j, Some(n), sample.clone()),
            norm(&parts.dyn_.apply_vec(&psi_n)),
            dyn_rhs,
        ));
        out.push(BoundReport::new("tran_norm", record(params, n_j, None, sample), norm(&tran.apply_vec(&psi)), tran_rhs));
    }
    Ok(out)
}

/// One configuration of the randomised bound suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub two_j: u32,
    pub delta: f64,
    pub r: f64,
    pub window: (i64, i64),
    pub n_j: usize,
    pub n: usize,
    pub samples: usize,
}

/// Five configurations with `2J ≤ 16`, `|Λ| ≤ 5`, `n_J ≤ 3`; 20 samples each
/// give 100 reports per configuration.
pub fn bound_suite_configs() -> Vec<SuiteConfig> {
    let c = |two_j, delta, r, window, n_j, n| SuiteConfig { two_j, delta, r, window, n_j, n, samples: 20 };
    vec![
        c(6, 1.25, 0.5, (-2, 2), 2, 2),
        c(8, 1.25, 0.5, (-1, 2), 2, 2),
        c(16, 2.0, 0.0, (-2, 2), 3, 3),
        c(4, 1.5, 0.3, (-1, 3), 1, 2),
        c(12, 1.25, 0.25, (-2, 1), 3, 2),
    ]
}

/// Runs every configuration with seed `seed + index`; results keep the
/// configuration order regardless of scheduling.
pub fn bound_suite(configs: &[SuiteConfig], seed: u64) -> Result<Vec<BoundReport>> {
    let per_config: Vec<Result<Vec<BoundReport>>> = configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let p = make_params(c.two_j, c.delta, c.r, Window::new(c.window.0, c.window.1)?)?;
            let s = seed + i as u64;
            let mut reports = verify_kin_lower_bound(&p, c.n_j, c.samples, s)?;
            reports.extend(verify_norm_bounds(&p, c.n_j, c.n, c.samples, s)?);
            Ok(reports)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_config {
        out.extend(r?);
    }
    Ok(out)
}

/// The default suite with the default seed.
pub fn default_bound_suite() -> Result<Vec<BoundReport>> {
    bound_suite(&bound_suite_configs(), DEFAULT_SEED)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::creation;

    fn p(two_j: u32, a: i64, b: i64) -> ModelParams {
        make_params(two_j, 1.25, 0.5, Window::new(a, b).unwrap()).unwrap()
    }

    #[test]
    fn vacuum_saturates_both_bounds() {
        let m = p(6, -2, 2);
        let basis = FockBasis::full(m.window, 4).unwrap();
        let reports = kin_bound_reports_for(&m, 2, &basis.vacuum(), "vacuum").unwrap();
        for r in reports {
            assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
            assert!(r.pass);
        }
    }

    #[test]
    fn zero_mode_particle() {
        let m = p(6, -2, 2);
        let basis = FockBasis::full(m.window, 4).unwrap();
        let v0 = crate::jacobi::zero_mode(&m);
        let mut psi = vec![0.0; basis.dim()];
        for (x, v) in v0.vector.iter().enumerate() {
            let ax = creation(&basis, x).apply_vec(&basis.vacuum());
            psi.iter_mut().zip(&ax).for_each(|(p, a)| *p += v / v0.l2 * a);
        }
        let reports = kin_bound_reports_for(&m, 2, &psi, "zero_mode").unwrap();
        // on one boson H_kin = h̃ − diag(ε)/(2J), and h̃ annihilates the zero mode
        let shift: f64 = m.window.sites().zip(&v0.vector).map(|(x, v)| build_jacobi(&m).unwrap().diag[m.window.index(x).unwrap()] * v * v).sum();
        let lower = &reports[0];
        assert!((lower.rhs + shift / (v0.l2.powi(2) * 6.0)).abs() < 1e-13, "⟨H_kin⟩ = {}", lower.rhs);
        assert!(lower.pass && reports[1].pass);
    }

    #[test]
    fn random_kin_sweep_passes() {
        let reports = verify_kin_lower_bound(&p(6, -2, 2), 2, 200, DEFAULT_SEED).unwrap();
        assert_eq!(reports.len(), 400);
        assert!(reports.iter().all(|r| r.pass), "{:?}", reports.iter().find(|r| !r.pass));
    }

    #[test]
    fn norm_bounds_sweep_passes() {
        let reports = verify_norm_bounds(&p(8, -1, 2), 2, 2, 100, DEFAULT_SEED).unwrap();
        assert_eq!(reports.len(), 300);
        assert!(reports.iter().all(|r| r.pass), "{:?}", reports.iter().find(|r| !r.pass));
        let zero = verify_norm_bounds(&p(8, -1, 2), 2, 0, 3, 1).unwrap();
        assert!(zero.iter().filter(|r| r.bound != "tran_norm").all(|r| r.lhs == 0.0));
    }

    #[test]
    fn kin_difference_scales_as_inverse_j() {
        let lhs: Vec<f64> = [4u32, 8, 16]
            .iter()
            .map(|&tj| verify_norm_bounds(&p(tj, -1, 2), 1, 2, 1, 7).unwrap()[0].lhs)
            .collect();
        assert!((lhs[0] / lhs[1] - 2.0).abs() < 0.05 && (lhs[1] / lhs[2] - 2.0).abs() < 0.05, "{lhs:?}");
    }

    #[test]
    fn rejects_large_n_j() {
        assert!(verify_kin_lower_bound(&p(4, 0, 2), 2, 1, 0).is_err());
        assert!(verify_norm_bounds(&p(4, 0, 2), 0, 1, 1, 0).is_err());
    }

    #[test]
    fn suite_is_deterministic() {
        let configs: Vec<SuiteConfig> = bound_suite_configs().into_iter().map(|c| SuiteConfig { samples: 2, ..c }).collect();
        let a = bound_suite(&configs, 11).unwrap();
        let b = bound_suite(&configs, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
    }
}
