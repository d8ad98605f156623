//! Truncated boson Fock spaces and the boson forms of the kink Hamiltonian.
//!
//! `a*_x`, `a_x` act on occupation configurations with a per-site cap. The
//! factor `g_J(n) = 1 − n/(2J)` turns boson operators into the rotated spin
//! operators: `S̃⁻_x/√(2J) = a*_x g_J(N_x)^{1/2}` and `J − S̃³_x = N_x`.

use crate::error::{Error, Result};
use crate::jacobi::build_jacobi;
use crate::kinkmath::{ModelParams, Window};
use crate::linalg::{sorted_symmetric_eigen, BasisTag, ConfigSpace, SparseOperator, SumConstraint};
use crate::output::{fmt_f64, CsvTable};
use crate::spin::{self, SectorBasis, SpinSite, DEFAULT_DIM_CAP};
use nalgebra::DMatrix;

/// Occupation configurations `{n_x}` with `n_x ≤ n_cap`, ordered like the spin
/// configurations (left end most significant, `n` ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    pub window: Window,
    pub n_cap: usize,
    space: ConfigSpace,
}

impl FockBasis {
    pub fn new(window: Window, n_cap: usize, constraint: SumConstraint) -> Result<Self> {
        let space = ConfigSpace::new(window.len(), n_cap, constraint, DEFAULT_DIM_CAP)?;
        Ok(FockBasis { window, n_cap, space })
    }

    /// Exactly `n` particles.
    pub fn sector(window: Window, n_cap: usize, n: usize) -> Result<Self> {
        FockBasis::new(window, n_cap, SumConstraint::Exact(n))
    }

    pub fn full(window: Window, n_cap: usize) -> Result<Self> {
        FockBasis::new(window, n_cap, SumConstraint::Any)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn sites(&self) -> usize {
        self.window.len()
    }

    pub fn constraint(&self) -> SumConstraint {
        self.space.constraint()
    }

    pub fn config(&self, i: usize) -> &[u16] {
        self.space.config(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> {
        self.space.iter()
    }

    pub fn index_of(&self, n: &[u16]) -> Option<usize> {
        self.space.index_of(n)
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::Fock { n_cap: self.n_cap, window: self.window, constraint: self.constraint() }
    }

    pub fn total_number(&self) -> Vec<f64> {
        self.iter().map(|c| c.iter().map(|&n| n as f64).sum()).collect()
    }

    pub fn number_at(&self, x: usize) -> Vec<f64> {
        self.iter().map(|c| c[x] as f64).collect()
    }

    /// Basis vector of a configuration.
    pub fn basis_vector(&self, n: &[u16]) -> Result<Vec<f64>> {
        let i = self
            .index_of(n)
            .ok_or_else(|| Error::InvalidParameter(format!("configuration {n:?} not in the basis")))?;
        let mut v = vec![0.0; self.dim()];
        v[i] = 1.0;
        Ok(v)
    }

    pub fn vacuum(&self) -> Vec<f64> {
        self.basis_vector(&vec![0; self.sites()]).expect("vacuum is in every basis")
    }
}

/// `g_J(n) = (2J − n)/(2J)` for `n ≤ 2J`, zero above.
pub fn g_factor(two_j: u32, n: usize) -> f64 {
    if n as u32 > two_j {
        0.0
    } else {
        (two_j - n as u32) as f64 / two_j as f64
    }
}

/// Pushes the matrix element of moving one particle `from → to` with amplitude
/// `amp(n_from, n_to)`; configurations outside the basis are dropped.
fn hop_triplets(
    basis: &FockBasis,
    bonds: &[(usize, usize)],
    amp: impl Fn(usize, usize) -> f64,
    out: &mut Vec<(usize, usize, f64)>,
) {
    let mut work = vec![0u16; basis.sites()];
    for (col, cfg) in basis.iter().enumerate() {
        for &(x, y) in bonds {
            for (from, to) in [(x, y), (y, x)] {
                if cfg[from] == 0 || cfg[to] as usize >= basis.n_cap {
                    continue;
                }
                let a = amp(cfg[from] as usize, cfg[to] as usize);
                if a == 0.0 {
                    continue;
                }
                work.copy_from_slice(cfg);
                work[from] -= 1;
                work[to] += 1;
                if let Some(row) = basis.index_of(&work) {
                    out.push((row, col, a));
                }
            }
        }
    }
}

fn bonds(l: usize) -> Vec<(usize, usize)> {
    (0..l.saturating_sub(1)).map(|x| (x, x + 1)).collect()
}

/// Quasi-free Hamiltonian `Σ h̃_Λ(x,y) a*_x a_y` restricted to the basis. The
/// vacuum has energy exactly 0.
pub fn build_boson_hamiltonian(params: &ModelParams, basis: &FockBasis) -> Result<SparseOperator> {
    check_window(params, basis)?;
    let h = build_jacobi(params)?;
    let di = params.delta_inv();
    let mut t: Vec<(usize, usize, f64)> = basis
        .iter()
        .enumerate()
        .map(|(i, c)| (i, i, c.iter().zip(&h.diag).map(|(&n, d)| n as f64 * d).sum()))
        .collect();
    hop_triplets(basis, &bonds(basis.sites()), |nf, nt| -di * ((nf * (nt + 1)) as f64).sqrt(), &mut t);
    SparseOperator::from_triplets(basis.tag(), basis.dim(), t, true)
}

fn check_window(params: &ModelParams, basis: &FockBasis) -> Result<()> {
    if params.window != basis.window {
        return Err(Error::BasisMismatch(format!("window {} vs basis window {}", params.window, basis.window)));
    }
    Ok(())
}

/// Warns when eigenvalues up to `e_max` may need more than `n_cap` particles per site.
pub fn cap_warning(params: &ModelParams, n_cap: usize, e_max: f64) -> Option<String> {
    let min_eps = crate::kinkmath::kink_profile(params).eps.into_iter().fold(f64::INFINITY, f64::min);
    (e_max > n_cap as f64 * min_eps).then(|| {
        format!("spectrum window {e_max} exceeds n_cap * min eps = {}; raise the occupation cap", n_cap as f64 * min_eps)
    })
}

/// The three parts of `H/J` written on the boson space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinParts {
    pub kin: SparseOperator,
    pub dyn_: SparseOperator,
    pub tran: SparseOperator,
}

impl SpinParts {
    pub fn total(&self) -> Result<SparseOperator> {
        self.kin.add_scaled(&self.dyn_, 1.0)?.add_scaled(&self.tran, 1.0)
    }
}

/// Kinematical, dynamical and transition interactions of `H/J`.
///
/// `kin = A* G^{1/2} h̃ G^{1/2} A − (2J)⁻¹ Σ_x h̃(x,x) N_x`,
/// `dyn = Σ_x γ_{x,x+1}(N_x − N_{x+1})²/(2J) + √(1−Δ⁻²)(cos θ_b N_b² − cos θ_a N_a²)/(2J)`,
/// `tran = √(1−Δ⁻²)/√(2J) Σ_x [sin θ_{x+1} B_{x+1} N_x − sin θ_x B_x N_{x+1}]`
/// with `B = g^{1/2} a + a* g^{1/2}`. On an exact-`N` basis `tran` vanishes.
pub fn build_spin_parts(params: &ModelParams, basis: &FockBasis) -> Result<SpinParts> {
    check_window(params, basis)?;
    if basis.n_cap > params.two_j as usize {
        return Err(Error::InvalidParameter(format!(
            "occupation cap {} exceeds 2J = {}",
            basis.n_cap, params.two_j
        )));
    }
    let tj = params.two_j;
    let two_j = tj as f64;
    let h = build_jacobi(params)?;
    let di = params.delta_inv();
    let f = params.field();
    let w = params.window;
    let l = basis.sites();
    let g = |n: usize| g_factor(tj, n);
    let xs: Vec<f64> = w.sites().map(|x| x as f64).collect();
    let cos: Vec<f64> = xs.iter().map(|&x| params.cos_theta(x)).collect();
    let sin: Vec<f64> = xs.iter().map(|&x| params.sin_theta(x)).collect();
    let gamma: Vec<f64> = xs[..l - 1].iter().map(|&x| params.gamma_bond(x)).collect();

    let mut kin: Vec<(usize, usize, f64)> = Vec::new();
    let mut dyn_: Vec<(usize, usize, f64)> = Vec::new();
    for (i, c) in basis.iter().enumerate() {
        let n: Vec<f64> = c.iter().map(|&v| v as f64).collect();
        let d_kin: f64 = c.iter().zip(&h.diag).map(|(&nx, d)| d * nx as f64 * g(nx as usize)).sum();
        kin.push((i, i, d_kin));
        let mut d_dyn: f64 = (0..l - 1).map(|x| gamma[x] * (n[x] - n[x + 1]).powi(2)).sum::<f64>() / two_j;
        d_dyn += f * (cos[l - 1] * n[l - 1] * n[l - 1] - cos[0] * n[0] * n[0]) / two_j;
        dyn_.push((i, i, d_dyn));
    }
    hop_triplets(
        basis,
        &bonds(l),
        |nf, nt| -di * (nf as f64 * g(nf - 1)).sqrt() * ((nt + 1) as f64 * g(nt)).sqrt(),
        &mut kin,
    );

    let mut tran: Vec<(usize, usize, f64)> = Vec::new();
    let pref = f / two_j.sqrt();
    let mut work = vec![0u16; l];
    for (col, cfg) in basis.iter().enumerate() {
        for x in 0..l - 1 {
            // (site whose boson changes, coefficient, site whose number multiplies)
            for (z, coeff, other) in [(x + 1, sin[x + 1], x), (x, -sin[x], x + 1)] {
                let n_other = cfg[other] as f64;
                if n_other == 0.0 {
                    continue;
                }
                let nz = cfg[z] as usize;
                let mut push = |new_nz: usize, amp: f64| {
                    if amp == 0.0 {
                        return;
                    }
                    work.copy_from_slice(cfg);
                    work[z] = new_nz as u16;
                    if let Some(row) = basis.index_of(&work) {
                        tran.push((row, col, pref * coeff * n_other * amp));
                    }
                };
                if nz < basis.n_cap {
                    push(nz + 1, ((nz + 1) as f64 * g(nz)).sqrt());
                }
                if nz > 0 {
                    push(nz - 1, (nz as f64 * g(nz - 1)).sqrt());
                }
            }
        }
    }
    let tag = basis.tag();
    let dim = basis.dim();
    Ok(SpinParts {
        kin: SparseOperator::from_triplets(tag.clone(), dim, kin, true)?,
        dyn_: SparseOperator::from_triplets(tag.clone(), dim, dyn_, true)?,
        tran: SparseOperator::from_triplets(tag, dim, tran, true)?,
    })
}

/// `A* G^{1/2} P₀ G^{1/2} A` with `P₀ = |v₀⟩⟨v₀|/‖v₀‖²` the projection onto the
/// window zero mode.
pub fn zero_mode_projection_term(params: &ModelParams, basis: &FockBasis) -> Result<SparseOperator> {
    check_window(params, basis)?;
    let z = crate::jacobi::zero_mode(params);
    let norm2 = z.l2 * z.l2;
    let v = &z.vector;
    let tj = params.two_j;
    let g = |n: usize| g_factor(tj, n);
    let l = basis.sites();
    let mut t = Vec::new();
    for (i, c) in basis.iter().enumerate() {
        // a*_x g(N_x) a_x on n_x gives n_x g(n_x − 1)
        let diag: f64 = (0..l)
            .filter(|&x| c[x] > 0)
            .map(|x| v[x] * v[x] / norm2 * c[x] as f64 * g(c[x] as usize - 1))
            .sum();
        t.push((i, i, diag));
    }
    let pairs: Vec<(usize, usize)> = (0..l).flat_map(|x| (x + 1..l).map(move |y| (x, y))).collect();
    let mut work = vec![0u16; l];
    for (col, cfg) in basis.iter().enumerate() {
        for &(x, y) in &pairs {
            for (from, to) in [(x, y), (y, x)] {
                if cfg[from] == 0 || cfg[to] as usize >= basis.n_cap {
                    continue;
                }
                let (nf, nt) = (cfg[from] as usize, cfg[to] as usize);
                let amp = v[from] * v[to] / norm2 * (nf as f64 * g(nf - 1)).sqrt() * ((nt + 1) as f64 * g(nt)).sqrt();
                work.copy_from_slice(cfg);
                work[from] -= 1;
                work[to] += 1;
                if let Some(row) = basis.index_of(&work) {
                    t.push((row, col, amp));
                }
            }
        }
    }
    SparseOperator::from_triplets(basis.tag(), basis.dim(), t, true)
}

/// Diagonal operator `h · max_x N_x`.
pub fn sup_number_operator(basis: &FockBasis, h: f64) -> Result<SparseOperator> {
    if !(h >= 0.0) {
        return Err(Error::InvalidParameter(format!("pinning strength must be non-negative (got {h})")));
    }
    let d: Vec<f64> = basis.iter().map(|c| h * c.iter().copied().max().unwrap_or(0) as f64).collect();
    Ok(SparseOperator::diagonal_operator(basis.tag(), &d))
}

/// `a*_x` on a basis closed under adding particles up to the cap; the result is
/// truncated to the basis.
pub fn creation(basis: &FockBasis, x: usize) -> SparseOperator {
    let mut t = Vec::new();
    let mut work = vec![0u16; basis.sites()];
    for (col, cfg) in basis.iter().enumerate() {
        if cfg[x] as usize >= basis.n_cap {
            continue;
        }
        work.copy_from_slice(cfg);
        work[x] += 1;
        if let Some(row) = basis.index_of(&work) {
            t.push((row, col, ((cfg[x] + 1) as f64).sqrt()));
        }
    }
    SparseOperator::from_triplets(basis.tag(), basis.dim(), t, false).expect("indices inside basis")
}

/// `Σ_x v_x g_J(N_x)^{1/2} a_x` applied to `psi`.
pub fn apply_weighted_annihilation(basis: &FockBasis, two_j: u32, v: &[f64], psi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; basis.dim()];
    let mut work = vec![0u16; basis.sites()];
    for (col, cfg) in basis.iter().enumerate() {
        if psi[col] == 0.0 {
            continue;
        }
        for x in 0..basis.sites() {
            let n = cfg[x] as usize;
            if n == 0 || v[x] == 0.0 {
                continue;
            }
            work.copy_from_slice(cfg);
            work[x] -= 1;
            if let Some(row) = basis.index_of(&work) {
                out[row] += v[x] * (n as f64 * g_factor(two_j, n - 1)).sqrt() * psi[col];
            }
        }
    }
    out
}

/// Spin configurations with `k_x` lowerings correspond to boson occupations
/// `n_x = k_x` in the rotated frame; with cap `2J` both bases enumerate the
/// same index set.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinBosonMap {
    pub spin: SectorBasis,
    pub fock: FockBasis,
}

/// Bijection between the full spin basis and the Fock basis with cap `2J`.
pub fn spin_boson_map(two_j: u32, window: Window) -> Result<SpinBosonMap> {
    let spin = SectorBasis::full(window, two_j, DEFAULT_DIM_CAP)?;
    let fock = FockBasis::full(window, two_j as usize)?;
    debug_assert_eq!(spin.dim(), fock.dim());
    Ok(SpinBosonMap { spin, fock })
}

impl SpinBosonMap {
    /// Index of the boson configuration matching spin configuration `i`.
    pub fn fock_index(&self, i: usize) -> usize {
        self.fock.index_of(self.spin.config(i)).expect("bases enumerate the same configurations")
    }

    /// Re-expresses an operator written in the rotated spin basis on the Fock basis.
    pub fn to_fock(&self, op: SparseOperator) -> Result<SparseOperator> {
        if op.tag() != &self.spin.tag() {
            return Err(Error::BasisMismatch(format!("{:?} is not the full spin basis", op.tag())));
        }
        Ok(op.retag(self.fock.tag()))
    }

    /// Largest deviation in `S̃⁻_x/√(2J) = a*_x g^{1/2}` and `J − S̃³_x = N_x`
    /// over all sites, with the spin side computed by explicit rotation.
    pub fn verify_site_operators(&self, params: &ModelParams) -> Result<f64> {
        let two_j = self.spin.two_j;
        let s = SpinSite::new(two_j);
        let d = s.dim();
        let id = DMatrix::<f64>::identity(d, d);
        let l = self.spin.sites();
        let mut worst: f64 = 0.0;
        for (x, site) in params.window.sites().enumerate() {
            let r = s.rotation(params.theta(site as f64));
            let rs = s.rotated(params.theta(site as f64));
            // rotated-frame matrices: Rᵀ S̃ R
            let sm_frame = r.transpose() * &rs.sm * &r / (two_j as f64).sqrt();
            let s3_frame = &id * s.j() - r.transpose() * &rs.s3 * &r;
            let spin_sm = self.site_operator(x, &sm_frame)?;
            let spin_n = self.site_operator(x, &s3_frame)?;
            let mut t = Vec::new();
            let mut work = vec![0u16; l];
            for (col, cfg) in self.fock.iter().enumerate() {
                let n = cfg[x] as usize;
                if n < two_j as usize {
                    work.copy_from_slice(cfg);
                    work[x] += 1;
                    let row = self.fock.index_of(&work).expect("below cap");
                    t.push((row, col, ((n + 1) as f64 * g_factor(two_j, n)).sqrt()));
                }
            }
            let boson_sm = SparseOperator::from_triplets(self.fock.tag(), self.fock.dim(), t, false)?;
            let boson_n = SparseOperator::diagonal_operator(self.fock.tag(), &self.fock.number_at(x));
            worst = worst.max(self.to_fock(spin_sm)?.max_abs_diff(&boson_sm)?);
            worst = worst.max(self.to_fock(spin_n)?.max_abs_diff(&boson_n)?);
        }
        Ok(worst)
    }

    fn site_operator(&self, x: usize, local: &DMatrix<f64>) -> Result<SparseOperator> {
        let mut t = Vec::new();
        let mut work = vec![0u16; self.spin.sites()];
        for (col, cfg) in self.spin.iter().enumerate() {
            for k in 0..local.nrows() {
                let v = local[(k, cfg[x] as usize)];
                if v == 0.0 {
                    continue;
                }
                work.copy_from_slice(cfg);
                work[x] = k as u16;
                let row = self.spin.index_of(&work).expect("full basis");
                t.push((row, col, v));
            }
        }
        SparseOperator::from_triplets(self.spin.tag(), self.spin.dim(), t, false)
    }
}

/// `(1/J)·H` in the rotated frame, mapped to the Fock basis with cap `2J`.
pub fn spin_hamiltonian_on_fock(params: &ModelParams) -> Result<SparseOperator> {
    let map = spin_boson_map(params.two_j, params.window)?;
    let h = spin::rotated_frame_hamiltonian(params)?;
    Ok(map.to_fock(h)?.scaled(1.0 / params.j()))
}

/// Largest entrywise difference of each boson part against the spin Hamiltonian.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BosonComparison {
    pub two_j: u32,
    pub sites: usize,
    pub total_diff: f64,
    pub kin_vs_quasi_free: f64,
    pub site_operator_diff: f64,
}

/// Compares `H_kin + H_dyn + H_tran` with `(1/J)H` under the spin-boson map.
pub fn boson_compare(params: &ModelParams) -> Result<BosonComparison> {
    let map = spin_boson_map(params.two_j, params.window)?;
    let parts = build_spin_parts(params, &map.fock)?;
    let spin_h = spin_hamiltonian_on_fock(params)?;
    let quasi_free = build_boson_hamiltonian(params, &map.fock)?;
    Ok(BosonComparison {
        two_j: params.two_j,
        sites: map.fock.sites(),
        total_diff: spin_h.max_abs_diff(&parts.total()?)?,
        kin_vs_quasi_free: parts.kin.max_abs_diff(&quasi_free)?,
        site_operator_diff: map.verify_site_operators(params)?,
    })
}

pub fn operator_difference_csv(c: &BosonComparison) -> CsvTable {
    let mut t = CsvTable::new(["term", "max_abs_diff"]);
    t.push(vec!["spin_minus_kin_dyn_tran".into(), fmt_f64(c.total_diff)]);
    t.push(vec!["kin_minus_quasi_free".into(), fmt_f64(c.kin_vs_quasi_free)]);
    t.push(vec!["site_operators".into(), fmt_f64(c.site_operator_diff)]);
    t
}

/// Lowest `k` eigenvalues of the quasi-free Hamiltonian in each listed sector
/// (`None` for the whole capped space).
pub fn boson_spectrum_csv(params: &ModelParams, n_cap: usize, sectors: &[Option<usize>], k: usize) -> Result<CsvTable> {
    let mut t = CsvTable::new(["n_cap", "sites", "n_sector", "index", "value"]);
    for &sector in sectors {
        let basis = match sector {
            Some(n) => FockBasis::sector(params.window, n_cap, n)?,
            None => FockBasis::full(params.window, n_cap)?,
        };
        let h = build_boson_hamiltonian(params, &basis)?;
        let (vals, _) = sorted_symmetric_eigen(h.to_dense());
        let label = sector.map_or("full".to_string(), |n| n.to_string());
        for (i, v) in vals.iter().take(k).enumerate() {
            t.push(vec![n_cap.to_string(), basis.sites().to_string(), label.clone(), i.to_string(), fmt_f64(*v)]);
        }
    }
    Ok(t)
}
