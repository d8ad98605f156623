//! Coherent spin states along the classical kink, grand-canonical ground
//! states and fluctuation operators.
//!
//! All expectations are taken in the normalised product state
//! `⊗_x |(θ_x, 0)⟩`, which equals the normalised grand-canonical vector at
//! `z = q^r`. Because that state is a product, finite-volume expectations of
//! single-site quantities agree with the infinite-volume ones exactly.

use crate::error::{Error, Result};
use crate::kinkmath::ModelParams;
use crate::output::{fmt_f64, CsvTable};
use crate::spin::{build_xxz_hamiltonian, ln_binomial, SectorBasis, SpinSite, DEFAULT_DIM_CAP};
use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;

pub type C64 = Complex<f64>;

const I: C64 = Complex { re: 0.0, im: 1.0 };

/// `|(θ, φ)⟩ = Σ_m C(2J, J−m)^{1/2} cos^{J+m}(θ/2) sin^{J−m}(θ/2) e^{i(J−m)φ} |m⟩`,
/// stored over `k = J − m = 0..2J`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    pub two_j: u32,
    pub theta: f64,
    pub phi: f64,
    pub coefficients: Vec<C64>,
}

impl CoherentState {
    pub fn new(two_j: u32, theta: f64, phi: f64) -> Self {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let coefficients = (0..=two_j)
            .map(|k| {
                let mag = (0.5 * ln_binomial(two_j, k)).exp() * c.powi((two_j - k) as i32) * s.powi(k as i32);
                C64::from_polar(1.0, k as f64 * phi) * mag
            })
            .collect();
        CoherentState { two_j, theta, phi, coefficients }
    }

    /// Unit vector `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        [st * self.phi.cos(), st * self.phi.sin(), ct]
    }

    pub fn vector(&self) -> DVector<C64> {
        DVector::from_vec(self.coefficients.clone())
    }
}

/// Orthonormal frame at one site: `f¹` and `f²` span the tangent plane, `f³ = u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub f1: [f64; 3],
    pub f2: [f64; 3],
    pub f3: [f64; 3],
}

impl Frame {
    pub fn at_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Frame { f1: [c, 0.0, -s], f2: [0.0, 1.0, 0.0], f3: [s, 0.0, c] }
    }

    /// `ṽ¹ + iṽ²`, the tangent projection written as a complex number.
    pub fn tangent(&self, v: [f64; 3]) -> C64 {
        C64::new(dot3(v, self.f1), dot3(v, self.f2))
    }
}

/// Frames `{f¹_x, f²_x, f³_x}` for every site of the window.
pub fn frames(params: &ModelParams) -> Vec<Frame> {
    params.window.sites().map(|x| Frame::at_angle(params.theta(x as f64))).collect()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// `v·S` as a complex matrix.
pub fn v_dot_s(site: &SpinSite, v: [f64; 3]) -> DMatrix<C64> {
    let re = (&site.s1 * v[0] + &site.s3 * v[2]).map(|x| C64::new(x, 0.0));
    re + site.s2() * C64::new(v[1], 0.0)
}

fn full_basis(params: &ModelParams) -> Result<SectorBasis> {
    SectorBasis::full(params.window, params.two_j, DEFAULT_DIM_CAP)
}

/// Product of per-site vectors on the full tensor basis.
pub fn product_state(basis: &SectorBasis, sites: &[Vec<C64>]) -> Vec<C64> {
    basis
        .iter()
        .map(|cfg| cfg.iter().zip(sites).map(|(&k, v)| v[k as usize]).product())
        .collect()
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= n);
}

/// `Ψ_Λ(z) = Σ_M z^M Φ^(M)`, normalised, on the full tensor basis. The common
/// factor `z^{|Λ|J}` is dropped, which only changes the global phase.
pub fn grand_canonical_vector(params: &ModelParams, z: C64) -> Result<Vec<C64>> {
    if !(z.norm() > 0.0) || !z.norm().is_finite() {
        return Err(Error::InvalidParameter(format!("z must be non-zero and finite (got {z})")));
    }
    let basis = full_basis(params)?;
    let lnq = params.q.ln();
    let (lnz, argz) = (z.norm().ln(), z.arg());
    let xs: Vec<f64> = params.window.sites().map(|x| x as f64).collect();
    let logs: Vec<(f64, f64)> = basis
        .iter()
        .map(|cfg| {
            cfg.iter().zip(&xs).fold((0.0, 0.0), |(m, a), (&k, &x)| {
                let k = k as u32;
                (m + 0.5 * ln_binomial(params.two_j, k) + k as f64 * (x * lnq - lnz), a - k as f64 * argz)
            })
        })
        .collect();
    let top = logs.iter().map(|l| l.0).fold(f64::NEG_INFINITY, f64::max);
    let mut v: Vec<C64> = logs.iter().map(|&(m, a)| C64::from_polar((m - top).exp(), a)).collect();
    normalize(&mut v);
    Ok(v)
}

/// `⊗_x |(θ_x, φ)⟩` on the full tensor basis.
pub fn coherent_product(params: &ModelParams, phi: f64) -> Result<Vec<C64>> {
    let basis = full_basis(params)?;
    let sites: Vec<Vec<C64>> = params
        .window
        .sites()
        .map(|x| CoherentState::new(params.two_j, params.theta(x as f64), phi).coefficients)
        .collect();
    Ok(product_state(&basis, &sites))
}

/// `min_c ‖a − c b‖` over unit-modulus `c`.
pub fn distance_up_to_phase(a: &[C64], b: &[C64]) -> f64 {
    let overlap: C64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm_sqr()).sum::<f64>().sqrt()
}

/// `‖H Ψ‖` for a complex vector on the full tensor basis, with `H` the kink Hamiltonian.
pub fn energy_residual(params: &ModelParams, psi: &[C64]) -> Result<f64> {
    let h = build_xxz_hamiltonian(params)?;
    let re: Vec<f64> = psi.iter().map(|c| c.re).collect();
    let im: Vec<f64> = psi.iter().map(|c| c.im).collect();
    let (hr, hi) = (h.apply_vec(&re), h.apply_vec(&im));
    Ok(hr.iter().zip(&hi).map(|(a, b)| a * a + b * b).sum::<f64>().sqrt())
}

/// Result of comparing the embedded grand-canonical states on two intervals.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OverlapReport {
    pub a_n: i64,
    pub a_m: i64,
    /// `‖σ̄_{Λ_m} − σ̄_{Λ_n}‖`.
    pub lhs: f64,
    pub lhs_sq: f64,
    /// `2J q^{2a_n}(1 − q^{2(a_m−a_n)})/(1 − q²)·(q^{2r} + q^{2−2r})`.
    pub bound: f64,
    /// `lhs² ≤ bound`, the inequality the estimate actually controls.
    pub holds: bool,
}

/// Distance between the embedded product states on `[−a_n+1, a_n]` and
/// `[−a_m+1, a_m]`, evaluated in closed form with `φ = 0`.
pub fn overlap_decay_check(params: &ModelParams, a_n: i64, a_m: i64) -> Result<OverlapReport> {
    if a_n > a_m || a_n < 1 {
        return Err(Error::InvalidParameter(format!("need 1 <= a_n <= a_m (got {a_n}, {a_m})")));
    }
    let q = params.q;
    let j = params.j();
    let r = params.r;
    // ln of the overlap with the boundary states: left sites meet |−J⟩, right sites |J⟩
    let ln_overlap: f64 = -j
        * ((a_n..a_m).map(|x| q.powf(2.0 * (x as f64 + r)).ln_1p()).sum::<f64>()
            + (a_n + 1..=a_m).map(|x| q.powf(2.0 * (x as f64 - r)).ln_1p()).sum::<f64>());
    let lhs_sq = -2.0 * ln_overlap.exp_m1();
    let bound = 2.0 * j * q.powf(2.0 * a_n as f64) * (-(q.powf(2.0 * (a_m - a_n) as f64) - 1.0)) / (1.0 - q * q)
        * (q.powf(2.0 * r) + q.powf(2.0 - 2.0 * r));
    Ok(OverlapReport {
        a_n,
        a_m,
        lhs: lhs_sq.sqrt(),
        lhs_sq,
        bound,
        holds: lhs_sq <= bound * (1.0 + 1e-12),
    })
}

/// `α_x(φ) = sin(φ/2)/(cos(φ/2) + i cos θ_x sin(φ/2))`.
pub fn alpha(phi: f64, cos_theta: f64) -> C64 {
    let (s, c) = (phi / 2.0).sin_cos();
    C64::new(s, 0.0) / C64::new(c, cos_theta * s)
}

/// `‖e^{iφS³_tot}σ − ∏_x(cos(φ/2) + i cos θ_x sin(φ/2))^{2J} e^{−iΣ α_x sin θ_x S̃⁻_x}σ‖`
/// with both sides assembled on the full tensor basis from dense exponentials.
pub fn phase_rotation_check(params: &ModelParams, phi: f64) -> Result<f64> {
    if !(phi.abs() < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!("phi must lie in (-pi, pi) (got {phi})")));
    }
    let basis = full_basis(params)?;
    let two_j = params.two_j;
    let site = SpinSite::new(two_j);
    let sigma = coherent_product(params, 0.0)?;
    let m_tot: Vec<f64> = basis.iter().map(|c| c.iter().map(|&k| params.j() - k as f64).sum()).collect();
    let lhs: Vec<C64> = sigma.iter().zip(&m_tot).map(|(s, &m)| s * C64::from_polar(1.0, phi * m)).collect();

    let (sh, ch) = (phi / 2.0).sin_cos();
    let mut prefactor = C64::new(1.0, 0.0);
    let mut local = Vec::new();
    for x in params.window.sites() {
        let theta = params.theta(x as f64);
        let (st, ct) = theta.sin_cos();
        prefactor *= C64::new(ch, ct * sh).powu(two_j);
        let sm_rot = site.rotated(theta).sm.map(|v| C64::new(v, 0.0));
        let gen = sm_rot * (-I * alpha(phi, ct) * st);
        let top = CoherentState::new(two_j, theta, 0.0).vector();
        local.push((gen.exp() * top).iter().copied().collect::<Vec<_>>());
    }
    let rhs = product_state(&basis, &local);
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - prefactor * b).norm_sqr()).sum::<f64>().sqrt())
}

/// `F_J(v) = J^{−1/2} Σ_x (v_x·S_x − ω(v_x·S_x))` for finitely supported `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationOperator {
    pub two_j: u32,
    /// `(site, v_x)` pairs; sites are lattice coordinates.
    pub support: Vec<(i64, [f64; 3])>,
}

impl FluctuationOperator {
    pub fn new(two_j: u32, support: Vec<(i64, [f64; 3])>) -> Self {
        FluctuationOperator { two_j, support }
    }

    fn check(&self, params: &ModelParams) -> Result<()> {
        if self.two_j != params.two_j {
            return Err(Error::InvalidParameter(format!("2J mismatch: {} vs {}", self.two_j, params.two_j)));
        }
        for &(x, _) in &self.support {
            if !params.window.contains(x) {
                return Err(Error::SiteOutOfRange { site: x, a: params.window.a, b: params.window.b });
            }
        }
        Ok(())
    }

    fn field_at(&self, x: i64) -> [f64; 3] {
        self.support.iter().filter(|s| s.0 == x).fold([0.0; 3], |acc, s| [acc[0] + s.1[0], acc[1] + s.1[1], acc[2] + s.1[2]])
    }

    /// Single-site block `(v_x·S − J v_x·u_x)/√J`.
    pub fn local_matrix(&self, params: &ModelParams, x: i64) -> DMatrix<C64> {
        let site = SpinSite::new(self.two_j);
        let v = self.field_at(x);
        let u = Frame::at_angle(params.theta(x as f64)).f3;
        let j = params.j();
        let centred = v_dot_s(&site, v) - DMatrix::<C64>::identity(site.dim(), site.dim()) * C64::new(j * dot3(v, u), 0.0);
        centred / C64::new(j.sqrt(), 0.0)
    }

    /// Dense matrix of `F_J(v)` on the full tensor space of the window.
    pub fn full_matrix(&self, params: &ModelParams) -> Result<DMatrix<C64>> {
        self.check(params)?;
        let d = self.two_j as usize + 1;
        let l = params.window.len();
        let dim = d.checked_pow(l as u32).filter(|&n| n <= 4096).ok_or(Error::DimensionCap {
            dim: d.saturating_pow(l as u32),
            cap: 4096,
        })?;
        let mut out = DMatrix::<C64>::zeros(dim, dim);
        for (pos, x) in params.window.sites().enumerate() {
            let local = self.local_matrix(params, x);
            let left = DMatrix::<C64>::identity(d.pow(pos as u32), d.pow(pos as u32));
            let right = DMatrix::<C64>::identity(d.pow((l - pos - 1) as u32), d.pow((l - pos - 1) as u32));
            out += left.kronecker(&local).kronecker(&right);
        }
        Ok(out)
    }

    /// `Σ_x ⟨v_x, w_x⟩_x` with `⟨v, w⟩_x = v·w − (v·u)(w·u) + i(v×w)·u`.
    pub fn inner(&self, other: &FluctuationOperator, params: &ModelParams) -> C64 {
        let mut sites: Vec<i64> = self.support.iter().chain(&other.support).map(|s| s.0).collect();
        sites.sort_unstable();
        sites.dedup();
        sites
            .into_iter()
            .map(|x| {
                let (v, w) = (self.field_at(x), other.field_at(x));
                let u = Frame::at_angle(params.theta(x as f64)).f3;
                C64::new(dot3(v, w) - dot3(v, u) * dot3(w, u), dot3(cross3(v, w), u))
            })
            .sum()
    }

    /// The same inner product from the tangent projections, `Σ_x conj(ṽ_x) w̃_x`.
    pub fn tangent_inner(&self, other: &FluctuationOperator, params: &ModelParams) -> C64 {
        let mut sites: Vec<i64> = self.support.iter().chain(&other.support).map(|s| s.0).collect();
        sites.sort_unstable();
        sites.dedup();
        sites
            .into_iter()
            .map(|x| {
                let f = Frame::at_angle(params.theta(x as f64));
                f.tangent(self.field_at(x)).conj() * f.tangent(other.field_at(x))
            })
            .sum()
    }

    /// Limit covariance `⟨v, v⟩`.
    pub fn covariance(&self, params: &ModelParams) -> f64 {
        self.inner(self, params).re
    }

    /// Support sites in ascending order with their summed vectors.
    pub fn sites(&self) -> Vec<(i64, [f64; 3])> {
        let mut xs: Vec<i64> = self.support.iter().map(|s| s.0).collect();
        xs.sort_unstable();
        xs.dedup();
        xs.into_iter().map(|x| (x, self.field_at(x))).collect()
    }
}

/// `ω(e^{iv·S})` for one coherent state: dense expectation and the closed form
/// `(cos(|v|/2) + i (v·u/|v|) sin(|v|/2))^{2J}`.
pub fn single_site_characteristic(two_j: u32, theta: f64, phi: f64, v: [f64; 3]) -> (C64, C64) {
    let site = SpinSite::new(two_j);
    let state = CoherentState::new(two_j, theta, phi);
    let psi = state.vector();
    let dense = psi.dotc(&((v_dot_s(&site, v) * I).exp() * &psi));
    let nv = norm3(v);
    let formula = if nv == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        let vu = dot3(v, state.direction());
        C64::new((nv / 2.0).cos(), vu / nv * (nv / 2.0).sin()).powu(two_j)
    };
    (dense, formula)
}

/// `ω(e^{iF_J(v)})` three ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicValues {
    /// Dense exponential of each single-site block, multiplied over the support.
    pub exact: C64,
    /// Closed form with the centring phase `e^{−i√J v·u}` restored.
    pub single_site_formula: C64,
    /// `e^{−⟨v,v⟩/4} = e^{−ω(F_J(v)²)/2}`.
    pub gaussian_limit: f64,
}

/// Characteristic function of a fluctuation operator in the kink state.
pub fn characteristic_function(params: &ModelParams, f: &FluctuationOperator) -> Result<CharacteristicValues> {
    f.check(params)?;
    let j = params.j();
    let mut exact = C64::new(1.0, 0.0);
    let mut formula = C64::new(1.0, 0.0);
    for (x, v) in f.sites() {
        let theta = params.theta(x as f64);
        let psi = CoherentState::new(params.two_j, theta, 0.0).vector();
        exact *= psi.dotc(&((f.local_matrix(params, x) * I).exp() * &psi));
        let scaled = [v[0] / j.sqrt(), v[1] / j.sqrt(), v[2] / j.sqrt()];
        let nv = norm3(scaled);
        if nv > 0.0 {
            let vu = dot3(scaled, Frame::at_angle(theta).f3);
            formula *= C64::from_polar(1.0, -j * vu)
                * C64::new((nv / 2.0).cos(), vu / nv * (nv / 2.0).sin()).powu(params.two_j);
        }
    }
    Ok(CharacteristicValues { exact, single_site_formula: formula, gaussian_limit: (-f.covariance(params) / 4.0).exp() })
}

/// One row of the central-limit sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CltRow {
    pub two_j: u32,
    pub site_count: usize,
    pub v_hash: String,
    pub exact_re: f64,
    pub exact_im: f64,
    pub gauss: f64,
    pub abs_err: f64,
}

/// Short stable hash (FNV-1a) of a direction field, for labelling rows.
pub fn direction_hash(support: &[(i64, [f64; 3])]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for (x, v) in support {
        for b in x.to_le_bytes().into_iter().chain(v.iter().flat_map(|c| c.to_bits().to_le_bytes())) {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    format!("{h:016x}")
}

/// `|ω(e^{iF_J(v)}) − e^{−⟨v,v⟩/4}|` for every `(2J, v)` pair, in input order.
pub fn clt_sweep(params: &ModelParams, two_j_list: &[u32], fields: &[Vec<(i64, [f64; 3])>]) -> Result<Vec<CltRow>> {
    let cells: Vec<_> =
        two_j_list.iter().flat_map(|&tj| fields.iter().map(move |f| (tj, f))).collect();
    cells
        .par_iter()
        .map(|&(tj, support)| {
            let p = params.with_two_j(tj);
            let f = FluctuationOperator::new(tj, support.clone());
            let c = characteristic_function(&p, &f)?;
            Ok(CltRow {
                two_j: tj,
                site_count: f.sites().len(),
                v_hash: direction_hash(support),
                exact_re: c.exact.re,
                exact_im: c.exact.im,
                gauss: c.gaussian_limit,
                abs_err: (c.exact - c.gaussian_limit).norm(),
            })
        })
        .collect()
}

pub fn clt_csv(rows: &[CltRow]) -> CsvTable {
    let mut t = CsvTable::new(["two_j", "site_count", "v_hash", "exact_re", "exact_im", "gauss", "abs_err"]);
    for r in rows {
        t.push(vec![
            r.two_j.to_string(),
            r.site_count.to_string(),
            r.v_hash.clone(),
            fmt_f64(r.exact_re),
            fmt_f64(r.exact_im),
            fmt_f64(r.gauss),
            fmt_f64(r.abs_err),
        ]);
    }
    t
}
