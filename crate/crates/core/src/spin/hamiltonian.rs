use super::basis::{SectorBasis, DEFAULT_DIM_CAP};
use super::site::{RotatedSpin, SpinSite};
use crate::error::{Error, Result};
use crate::kinkmath::ModelParams;
use crate::linalg::{lanczos_lowest, sorted_symmetric_eigen, LanczosOptions, SparseOperator};
use crate::output::{fmt_f64, CsvTable};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Sectors up to this dimension are diagonalised densely.
pub const DENSE_SECTOR_LIMIT: usize = 600;

fn check_assembly(params: &ModelParams) -> Result<()> {
    if params.two_j == 0 {
        return Err(Error::InvalidParameter("spin operations need 2J >= 1".into()));
    }
    if params.window.len() < 2 {
        return Err(Error::InvalidParameter(format!("window {} needs at least two sites", params.window)));
    }
    Ok(())
}

/// `H = Σ_x H_{x,x+1}` on the given basis, assembled directly from matrix
/// elements. Works for sector and full bases alike.
pub fn build_xxz_sector(params: &ModelParams, basis: &SectorBasis) -> Result<SparseOperator> {
    check_assembly(params)?;
    if basis.window != params.window || basis.two_j != params.two_j {
        return Err(Error::BasisMismatch("basis and parameters disagree on window or spin".into()));
    }
    let j = params.j();
    let tj = params.two_j as f64;
    let f = params.field();
    let hop = -0.5 * params.delta_inv();
    let l = basis.sites();
    let mut triplets = Vec::with_capacity(basis.dim() * l);
    let mut work: Vec<u16> = vec![0; l];
    for (col, cfg) in basis.iter().enumerate() {
        let mut diag = 0.0;
        for x in 0..l - 1 {
            let (kx, ky) = (cfg[x] as f64, cfg[x + 1] as f64);
            let (mx, my) = (j - kx, j - ky);
            diag += j * j - mx * my + j * f * (mx - my);
            // S⁺_x S⁻_y lowers k_x and raises k_y; the reverse process is its transpose
            if cfg[x] > 0 && (cfg[x + 1] as u32) < params.two_j {
                let amp = (kx * (tj - kx + 1.0)).sqrt() * ((tj - ky) * (ky + 1.0)).sqrt();
                work.copy_from_slice(cfg);
                work[x] -= 1;
                work[x + 1] += 1;
                let row = basis.index_of(&work).ok_or_else(|| {
                    Error::BasisMismatch("hopping left the magnetisation sector".into())
                })?;
                triplets.push((row, col, hop * amp));
                triplets.push((col, row, hop * amp));
            }
        }
        triplets.push((col, col, diag));
    }
    SparseOperator::from_triplets(basis.tag(), basis.dim(), triplets, true)
}

/// `H` on the full tensor space, refusing dimensions above [`DEFAULT_DIM_CAP`].
pub fn build_xxz_hamiltonian(params: &ModelParams) -> Result<SparseOperator> {
    check_assembly(params)?;
    let basis = SectorBasis::full(params.window, params.two_j, DEFAULT_DIM_CAP)?;
    build_xxz_sector(params, &basis)
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Dense two-site matrix of `H_{x,x+1}` in the product basis `k_x·(2J+1) + k_{x+1}`.
pub fn bond_matrix(params: &ModelParams) -> DMatrix<f64> {
    let s = SpinSite::new(params.two_j);
    let d = s.dim();
    let id = DMatrix::identity(d, d);
    let j = params.j();
    let f = params.field();
    &id.kronecker(&id) * (j * j)
        - (kron(&s.s1, &s.s1) - kron(&s.i_s2, &s.i_s2)) * params.delta_inv()
        - kron(&s.s3, &s.s3)
        + (kron(&s.s3, &id) - kron(&id, &s.s3)) * (j * f)
}

/// The same bond written with rotated operators `S̃` at the kink angles of
/// sites `x` and `x+1`.
pub fn rotated_bond_matrix(params: &ModelParams, x: i64) -> DMatrix<f64> {
    let s = SpinSite::new(params.two_j);
    let d = s.dim();
    let id = DMatrix::identity(d, d);
    let (xf, yf) = (x as f64, x as f64 + 1.0);
    let (a, b): (RotatedSpin, RotatedSpin) = (s.rotated(params.theta(xf)), s.rotated(params.theta(yf)));
    let (cx, cy) = (params.cos_theta(xf), params.cos_theta(yf));
    let (sx, sy) = (params.sin_theta(xf), params.sin_theta(yf));
    let j = params.j();
    let f = params.field();
    let gamma = params.gamma_bond(xf);
    &id.kronecker(&id) * (j * j)
        - (kron(&a.sp, &b.sm) + kron(&a.sm, &b.sp)) * (0.5 * params.delta_inv())
        - kron(&a.s3, &b.s3) * gamma
        + (kron(&a.s3, &id) * cx - kron(&id, &b.s3) * cy) * (j * f)
        + (kron(&a.s1, &b.s3) * sx - kron(&a.s3, &b.s1) * sy) * f
        - (kron(&a.s1, &id) * sx - kron(&id, &b.s1) * sy) * (j * f)
}

/// Sums two-site operators over the bonds of the window; `bonds[i]` acts on
/// window positions `i, i+1`. Terms that leave the basis are rejected.
pub fn assemble_bonds(basis: &SectorBasis, bonds: &[DMatrix<f64>], symmetric: bool) -> Result<SparseOperator> {
    let l = basis.sites();
    if bonds.len() + 1 != l {
        return Err(Error::InvalidParameter(format!("{} bond terms for {l} sites", bonds.len())));
    }
    let d = basis.two_j as usize + 1;
    let mut triplets = Vec::new();
    let mut work: Vec<u16> = vec![0; l];
    for (col, cfg) in basis.iter().enumerate() {
        for (x, h) in bonds.iter().enumerate() {
            let local_col = cfg[x] as usize * d + cfg[x + 1] as usize;
            for local_row in 0..d * d {
                let v = h[(local_row, local_col)];
                if v == 0.0 {
                    continue;
                }
                work.copy_from_slice(cfg);
                work[x] = (local_row / d) as u16;
                work[x + 1] = (local_row % d) as u16;
                match basis.index_of(&work) {
                    Some(row) => triplets.push((row, col, v)),
                    None if v.abs() < 1e-14 => {}
                    None => return Err(Error::BasisMismatch("local term leaves the basis".into())),
                }
            }
        }
    }
    SparseOperator::from_triplets(basis.tag(), basis.dim(), triplets, false).map(|op| {
        if symmetric {
            symmetrize(op)
        } else {
            op
        }
    })
}

fn symmetrize(op: SparseOperator) -> SparseOperator {
    let n = op.to_dense().nrows();
    let t: Vec<(usize, usize, f64)> = op.triplets().flat_map(|(i, j, v)| [(i, j, 0.5 * v), (j, i, 0.5 * v)]).collect();
    SparseOperator::from_triplets(op.tag().clone(), n, t, true).expect("symmetrised")
}

/// `H` on the full space assembled from the rotated-operator form of each bond.
pub fn rotated_hamiltonian(params: &ModelParams) -> Result<SparseOperator> {
    check_assembly(params)?;
    let basis = SectorBasis::full(params.window, params.two_j, DEFAULT_DIM_CAP)?;
    let bonds: Vec<DMatrix<f64>> = params.window.sites().take(basis.sites() - 1).map(|x| rotated_bond_matrix(params, x)).collect();
    assemble_bonds(&basis, &bonds, true)
}

/// Matrix of `H` in the rotated product basis `U|k⟩`, `U = ⊗_x e^{−iθ_x S²_x}`.
///
/// Index `n` of the result is the configuration with `n_x` applications of
/// `S̃⁻_x` to the rotated top state, which is the boson occupation basis.
pub fn rotated_frame_hamiltonian(params: &ModelParams) -> Result<SparseOperator> {
    check_assembly(params)?;
    let basis = SectorBasis::full(params.window, params.two_j, DEFAULT_DIM_CAP)?;
    let site = SpinSite::new(params.two_j);
    let h = bond_matrix(params);
    let bonds: Vec<DMatrix<f64>> = params
        .window
        .sites()
        .take(basis.sites() - 1)
        .map(|x| {
            let u = site.rotation(params.theta(x as f64)).kronecker(&site.rotation(params.theta(x as f64 + 1.0)));
            u.transpose() * &h * u
        })
        .collect();
    assemble_bonds(&basis, &bonds, true)
}

/// `S³_tot` as a diagonal over the basis.
pub fn total_s3(basis: &SectorBasis) -> Vec<f64> {
    basis.m2_totals().into_iter().map(|m| m as f64 / 2.0).collect()
}

/// Unnormalised log-coefficients `Σ_x [½ ln C(2J, k_x) + x k_x ln q]` of the ground state.
pub fn ground_state_log_coefficients(params: &ModelParams, basis: &SectorBasis) -> Vec<f64> {
    let ln_binom: Vec<f64> = (0..=params.two_j).map(|k| ln_binomial(params.two_j, k)).collect();
    let ln_q = params.q.ln();
    let sites: Vec<f64> = params.window.sites().map(|x| x as f64).collect();
    basis
        .iter()
        .map(|cfg| {
            cfg.iter().zip(&sites).map(|(&k, &x)| 0.5 * ln_binom[k as usize] + x * k as f64 * ln_q).sum()
        })
        .collect()
}

pub fn ln_binomial(n: u32, k: u32) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Normalised zero-energy vector `Φ^(M)` of the sector `2M = m2`.
pub fn ground_state(params: &ModelParams, m2: i64) -> Result<(SectorBasis, Vec<f64>)> {
    let basis = SectorBasis::sector(params.window, params.two_j, m2)?;
    let v = normalized_from_logs(&ground_state_log_coefficients(params, &basis));
    Ok((basis, v))
}

pub(crate) fn normalized_from_logs(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let v: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Result of [`ground_state_check`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GroundCheck {
    pub m2: i64,
    pub dim: usize,
    pub residual: f64,
    pub max_diag: f64,
}

/// `‖H Φ^(M)‖` in the sector together with the largest diagonal entry of `H`.
pub fn ground_state_check(params: &ModelParams, m2: i64) -> Result<GroundCheck> {
    let (basis, phi) = ground_state(params, m2)?;
    let h = build_xxz_sector(params, &basis)?;
    let hv = h.apply_vec(&phi);
    Ok(GroundCheck {
        m2,
        dim: basis.dim(),
        residual: hv.iter().map(|x| x * x).sum::<f64>().sqrt(),
        max_diag: h.diagonal().into_iter().fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SectorSolver {
    Dense,
    Lanczos,
}

/// Gap `γ_{J,M}` of one sector.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SectorGap {
    pub two_j: u32,
    pub delta: f64,
    pub sites: usize,
    pub m2: i64,
    pub dim: usize,
    /// Lowest eigenvalue of the sector.
    pub e0: f64,
    pub gap: f64,
    pub zero_tol: f64,
    /// Whether `e0` lies in the zero band and the next eigenvalue is above `10·zero_tol`.
    pub ground_simple: bool,
    pub solver: SectorSolver,
    pub iterations: usize,
}

/// Smallest eigenvalue of the sector Hamiltonian above its zero ground state.
///
/// Small sectors are diagonalised densely. Larger ones use Lanczos on the
/// orthogonal complement of the exact ground state `Φ^(M)`, whose zero energy
/// is checked separately.
pub fn sector_gap(params: &ModelParams, m2: i64) -> Result<SectorGap> {
    let (basis, phi) = ground_state(params, m2)?;
    let dim = basis.dim();
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("sector 2M = {m2} has dimension {dim} < 2")));
    }
    let h = build_xxz_sector(params, &basis)?;
    let zero_tol = 1e-8 * h.norm_inf();
    let (e0, gap, solver, iterations) = if dim <= DENSE_SECTOR_LIMIT {
        let (vals, _) = sorted_symmetric_eigen(h.to_dense());
        (vals[0], vals[1], SectorSolver::Dense, 0)
    } else {
        let e0 = h.expectation(&phi);
        let hv = h.apply_vec(&phi);
        let res = hv.iter().map(|x| x * x).sum::<f64>().sqrt();
        let e0 = if res <= zero_tol { e0 } else { f64::NAN };
        let opts = LanczosOptions { k: 1, max_iter: 800, ..Default::default() };
        let out = lanczos_lowest(&h, &opts, &[phi])?;
        (e0, out.eigenvalues[0], SectorSolver::Lanczos, out.iterations)
    };
    Ok(SectorGap {
        two_j: params.two_j,
        delta: params.delta,
        sites: basis.sites(),
        m2,
        dim,
        e0,
        gap,
        zero_tol,
        ground_simple: e0.abs() <= zero_tol && gap > 10.0 * zero_tol,
        solver,
        iterations,
    })
}

/// Gaps of several sectors, computed in parallel and returned in input order.
pub fn sector_gaps(params: &ModelParams, m2_list: &[i64]) -> Vec<Result<SectorGap>> {
    m2_list.par_iter().map(|&m2| sector_gap(params, m2)).collect()
}

pub fn sector_gap_csv(rows: &[SectorGap]) -> CsvTable {
    let mut t = CsvTable::new(["two_j", "delta", "sites", "M", "dim", "e0", "gap", "gap_over_j"]);
    for g in rows {
        t.push(vec![
            g.two_j.to_string(),
            fmt_f64(g.delta),
            g.sites.to_string(),
            format_m(g.m2),
            g.dim.to_string(),
            fmt_f64(g.e0),
            fmt_f64(g.gap),
            fmt_f64(g.gap / (g.two_j as f64 / 2.0)),
        ]);
    }
    t
}

/// `M` from its doubled value, e.g. `1/2` for `m2 = 1`.
pub fn format_m(m2: i64) -> String {
    if m2 % 2 == 0 {
        (m2 / 2).to_string()
    } else {
        format!("{m2}/2")
    }
}

/// Ground-state dump: configuration as doubled magnetisations, and coefficient.
pub fn ground_state_csv(basis: &SectorBasis, v: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(["configuration", "coefficient"]);
    for (i, c) in v.iter().enumerate() {
        let cfg: Vec<String> = basis.m2_values(i).iter().map(|m| format_m(*m)).collect();
        t.push(vec![cfg.join(" "), fmt_f64(*c)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinkmath::{make_params, Window};
    use crate::spin::basis::admissible_m2;

    fn p(two_j: u32, delta: f64, r: f64, a: i64, b: i64) -> ModelParams {
        make_params(two_j, delta, r, Window::new(a, b).unwrap()).unwrap()
    }

    #[test]
    fn two_spin_halves_by_hand() {
        let m = p(1, 1.25, 0.0, 1, 2);
        let h = build_xxz_hamiltonian(&m).unwrap();
        let (vals, _) = sorted_symmetric_eigen(h.to_dense());
        for v in &vals[..3] {
            assert!(v.abs() < 1e-14);
        }
        // the M = 0 block is [[½+½f, −0.4], [−0.4, ½−½f]] with f = 0.6, so its trace is 1
        assert!((vals[3] - 1.0).abs() < 1e-14);
        let g = sector_gap(&m, 0).unwrap();
        assert!((g.gap - 1.0).abs() < 1e-14);
        assert!(g.ground_simple);
    }

    #[test]
    fn all_up_is_annihilated_and_commutes_with_s3() {
        let m = p(2, 1.6, 0.4, 0, 3);
        let h = build_xxz_hamiltonian(&m).unwrap();
        let basis = SectorBasis::full(m.window, 2, 1000).unwrap();
        let mut up = vec![0.0; basis.dim()];
        up[0] = 1.0;
        assert_eq!(h.apply_vec(&up).iter().map(|x| x.abs()).fold(0.0, f64::max), 0.0);
        assert!(h.commutator_with_diagonal(&total_s3(&basis)) <= 1e-13);
        let (vals, _) = sorted_symmetric_eigen(h.to_dense());
        assert!(vals[0] > -1e-10);
    }

    #[test]
    fn ground_state_two_sites() {
        let m = p(1, 1.25, 0.0, 1, 2);
        let (basis, v) = ground_state(&m, 0).unwrap();
        assert_eq!(basis.m2_values(0), vec![1, -1]);
        // ∝ (q², q) = (q, 1)
        assert!((v[0] / v[1] - 0.5).abs() < 1e-15);
        let (_, top) = ground_state(&m, 2).unwrap();
        assert_eq!(top, vec![1.0]);
        assert!(ground_state(&m, 4).is_err());
    }

    #[test]
    fn ground_states_exact_in_every_sector() {
        for two_j in 1..=3 {
            let m = p(two_j, 1.25, 0.3, -2, 3);
            for m2 in admissible_m2(m.window, two_j) {
                let g = ground_state_check(&m, m2).unwrap();
                assert!(g.residual <= 1e-10 * g.max_diag.max(1.0), "{two_j} {m2}: {}", g.residual);
            }
        }
    }

    #[test]
    fn rotated_assembly_matches_direct() {
        let m = p(1, 1.5, 0.3, 0, 2);
        let direct = build_xxz_hamiltonian(&m).unwrap();
        let rotated = rotated_hamiltonian(&m).unwrap();
        assert!(direct.max_abs_diff(&rotated).unwrap() <= 1e-10);
        for two_j in [2, 3] {
            let m = p(two_j, 1.25, -0.4, -1, 2);
            let d = build_xxz_hamiltonian(&m).unwrap();
            assert!(d.max_abs_diff(&rotated_hamiltonian(&m).unwrap()).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn rotated_assembly_at_far_kink_is_unrotated() {
        // kink far to the right: all θ_x = π up to e^{−η·200}, i.e. rotations by π
        let m = p(1, 2.0, -200.0, 0, 2);
        let d = build_xxz_hamiltonian(&m).unwrap();
        assert!(d.max_abs_diff(&rotated_hamiltonian(&m).unwrap()).unwrap() <= 1e-12);
        let s = SpinSite::new(2);
        assert_eq!(s.rotated(0.0).s3, s.s3);
    }

    #[test]
    fn rotated_frame_preserves_spectrum() {
        let m = p(2, 1.25, 0.5, 0, 2);
        let a = sorted_symmetric_eigen(build_xxz_hamiltonian(&m).unwrap().to_dense()).0;
        let b = sorted_symmetric_eigen(rotated_frame_hamiltonian(&m).unwrap().to_dense()).0;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn spin_half_gap_closed_form() {
        // the M = 0 gap of the spin-½ kink chain on L sites is 1 − Δ⁻¹cos(π/L)
        for l in [8i64, 10] {
            let m = p(1, 1.25, 0.0, 1, l);
            let g = sector_gap(&m, 0).unwrap();
            let exact = 1.0 - 0.8 * (std::f64::consts::PI / l as f64).cos();
            assert!((g.gap - exact).abs() < 1e-9, "{l}: {} vs {exact}", g.gap);
            assert!(g.ground_simple);
        }
    }

    #[test]
    fn dense_and_lanczos_sector_paths_agree() {
        let m = p(2, 1.25, 0.5, -2, 3);
        let g = sector_gap(&m, 0).unwrap();
        assert_eq!(g.solver, SectorSolver::Dense);
        let (basis, phi) = ground_state(&m, 0).unwrap();
        let h = build_xxz_sector(&m, &basis).unwrap();
        let out = lanczos_lowest(&h, &LanczosOptions { k: 1, ..Default::default() }, &[phi]).unwrap();
        assert!((out.eigenvalues[0] - g.gap).abs() < 1e-9);
    }

    #[test]
    fn csv_layout() {
        let m = p(1, 1.25, 0.0, 1, 2);
        let g = sector_gap(&m, 0).unwrap();
        let csv = sector_gap_csv(&[g]).render();
        assert!(csv.starts_with("two_j,delta,sites,M,dim,e0,gap,gap_over_j\n1,"));
        let (basis, v) = ground_state(&m, 0).unwrap();
        let dump = ground_state_csv(&basis, &v).render();
        assert!(dump.contains("1/2 -1/2,"));
    }
}
