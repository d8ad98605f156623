//! The one-particle Jacobi operator of the kink on a finite window.
//!
//! On `ℤ` the operator is `(h v)_x = ε_x v_x − Δ⁻¹(v_{x−1} + v_{x+1})`. The
//! finite-volume version keeps only the one-sided wells `ε⁺_a`, `ε⁻_b` at the
//! window ends, which makes `sech(η(x−r))` an exact zero mode on every window.

use crate::error::{Error, Result};
use crate::kinkmath::{kink_profile, make_params, ModelParams, Window};
use crate::linalg::{lanczos_lowest, tridiag, BasisTag, LanczosOptions, LinearOperator, SparseOperator};
use crate::output::{fmt_f64, CsvTable};
use rayon::prelude::*;

/// Dimension above which [`spectral_report`] switches to Lanczos.
pub const DENSE_LIMIT: usize = 2000;
/// Relative size of the numerical zero band, in units of `‖h‖_∞`.
pub const ZERO_TOL_REL: f64 = 1e-8;
/// Distance below the continuum edge an eigenvalue must keep to count as isolated.
pub const EDGE_MARGIN: f64 = 1e-3;
/// Isolated eigenvectors need an inverse participation ratio of at least `IPR_FACTOR / L`.
pub const IPR_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub window: Window,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |v| v.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn to_sparse(&self) -> SparseOperator {
        let n = self.dim();
        let mut t: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, self.diag[i])).collect();
        for (i, &e) in self.off.iter().enumerate() {
            t.push((i, i + 1, e));
            t.push((i + 1, i, e));
        }
        SparseOperator::from_triplets(BasisTag::OneParticle { window: self.window }, n, t, true)
            .expect("tridiagonal assembly is symmetric")
    }
}

impl LinearOperator for SymTridiagonal {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
    }
}

/// Assembles `h̃_Λ`: bulk wells `ε_x`, one-sided wells at the ends, hopping `−Δ⁻¹`.
pub fn build_jacobi(params: &ModelParams) -> Result<SymTridiagonal> {
    let w = params.window;
    if w.len() < 2 {
        return Err(Error::InvalidParameter(format!("window {w} needs at least two sites")));
    }
    let profile = kink_profile(params);
    Ok(SymTridiagonal { window: w, diag: profile.eps, off: vec![-params.delta_inv(); w.len() - 1] })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMode {
    /// `sech(η(x−r))` on the window, not normalised.
    pub vector: Vec<f64>,
    pub l1: f64,
    pub l2: f64,
    /// Norms of the same profile summed over all of `ℤ`.
    pub l1_lattice: f64,
    pub l2_lattice: f64,
}

pub fn zero_mode(params: &ModelParams) -> ZeroMode {
    let vector: Vec<f64> = params.window.sites().map(|x| params.sin_theta(x as f64)).collect();
    ZeroMode {
        l1: vector.iter().sum(),
        l2: vector.iter().map(|v| v * v).sum::<f64>().sqrt(),
        l1_lattice: params.zero_mode_l1(),
        l2_lattice: params.zero_mode_l2_sq().sqrt(),
        vector,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Solver {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Auto,
    Force(Solver),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IsolatedEigenvalue {
    pub value: f64,
    pub ipr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Lowest `k` eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// Smallest eigenvalue above the zero band.
    pub gap: f64,
    pub continuum_edge: f64,
    /// Eigenvalues between the zero band and `continuum_edge − EDGE_MARGIN` whose
    /// eigenvectors are localised.
    pub isolated_below_edge: Vec<IsolatedEigenvalue>,
    /// Lowest eigenvalue above the zero band that is not isolated.
    pub continuum_onset: Option<f64>,
    pub solver: Solver,
    pub zero_tol: f64,
    pub ipr_threshold: f64,
    pub iterations: usize,
}

impl SpectralReport {
    pub fn n_isolated(&self) -> usize {
        self.isolated_below_edge.len()
    }
}

pub fn ipr(v: &[f64]) -> f64 {
    let n2: f64 = v.iter().map(|x| x * x).sum();
    v.iter().map(|x| x.powi(4)).sum::<f64>() / (n2 * n2)
}

/// Lowest `k` eigenvalues, the gap and the isolated-eigenvalue classification.
pub fn spectral_report(params: &ModelParams, k: usize, want_vectors: bool) -> Result<SpectralReport> {
    spectral_report_with(params, k, want_vectors, SolverChoice::Auto)
}

pub fn spectral_report_with(
    params: &ModelParams,
    k: usize,
    want_vectors: bool,
    choice: SolverChoice,
) -> Result<SpectralReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("eigenvalue count k must be at least 1".into()));
    }
    let h = build_jacobi(params)?;
    let n = h.dim();
    let solver = match choice {
        SolverChoice::Force(s) => s,
        SolverChoice::Auto if n <= DENSE_LIMIT => Solver::Dense,
        SolverChoice::Auto => Solver::Lanczos,
    };
    let zero_tol = ZERO_TOL_REL * h.norm_inf();
    let edge = 2.0 * (1.0 - params.delta_inv());
    let ipr_threshold = IPR_FACTOR / n as f64;

    // eigenpairs covering the requested k and everything below the edge
    let (values, vectors, iterations) = match solver {
        Solver::Dense => {
            let values = tridiag::eigenvalues(&h.diag, &h.off)?;
            let below = values.iter().filter(|&&v| v < edge).count();
            let nvec = below.max(k).min(n);
            let (_, vecs) = tridiag::lowest_with_vectors(&h.diag, &h.off, nvec)?;
            (values, vecs, 0)
        }
        Solver::Lanczos => {
            let mut want = (k + 2).max(4).min(n);
            loop {
                let opts = LanczosOptions { k: want, want_vectors: true, max_iter: 1000.max(4 * want), ..Default::default() };
                let res = lanczos_lowest(&h, &opts, &[])?;
                let top = *res.eigenvalues.last().unwrap();
                if top >= edge || want == n {
                    break (res.eigenvalues, res.eigenvectors.unwrap(), res.iterations);
                }
                want = (2 * want).min(n);
            }
        }
    };

    let mut isolated = Vec::new();
    let mut onset = None;
    let mut gap = f64::NAN;
    for (i, &v) in values.iter().enumerate() {
        if v < zero_tol {
            continue;
        }
        if gap.is_nan() {
            gap = v;
        }
        let p = vectors.get(i).map(|x| ipr(x));
        match p {
            Some(p) if v < edge - EDGE_MARGIN && p >= ipr_threshold => {
                isolated.push(IsolatedEigenvalue { value: v, ipr: p })
            }
            _ => {
                onset = Some(v);
                break;
            }
        }
    }
    let kk = k.min(values.len());
    Ok(SpectralReport {
        eigenvalues: values[..kk].to_vec(),
        eigenvectors: want_vectors.then(|| vectors[..kk.min(vectors.len())].to_vec()),
        gap,
        continuum_edge: edge,
        isolated_below_edge: isolated,
        continuum_onset: onset,
        solver,
        zero_tol,
        ipr_threshold,
        iterations,
    })
}

/// The finite-volume gap `γ̃_Λ`.
pub fn jacobi_gap(params: &ModelParams) -> Result<f64> {
    Ok(spectral_report(params, 2, false)?.gap)
}

/// One `(Δ⁻¹, r)` cell of a phase-diagram scan.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCell {
    pub delta_inv: f64,
    pub r: f64,
    pub result: Result<PhaseCellData>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCellData {
    pub gap: f64,
    pub continuum_edge: f64,
    pub n_isolated: usize,
    pub eigenvalues: Vec<f64>,
}

/// Scans the grid row-major (outer loop over `Δ⁻¹`). Cells are solved in
/// parallel; failures are kept per cell.
pub fn phase_diagram(delta_inv_grid: &[f64], r_grid: &[f64], window: Window, k: usize) -> Result<Vec<PhaseCell>> {
    if delta_inv_grid.is_empty() || r_grid.is_empty() {
        return Err(Error::InvalidParameter("phase diagram grids must be non-empty".into()));
    }
    if let Some(bad) = delta_inv_grid.iter().find(|&&d| !(d > 0.0 && d < 1.0)) {
        return Err(Error::InvalidParameter(format!("delta_inv grid value {bad} outside (0, 1)")));
    }
    let cells: Vec<(f64, f64)> = delta_inv_grid.iter().flat_map(|&d| r_grid.iter().map(move |&r| (d, r))).collect();
    Ok(cells
        .par_iter()
        .map(|&(delta_inv, r)| {
            let result = make_params(1, 1.0 / delta_inv, r, window)
                .and_then(|p| spectral_report(&p, k.max(1), false))
                .map(|rep| PhaseCellData {
                    gap: rep.gap,
                    continuum_edge: rep.continuum_edge,
                    n_isolated: rep.n_isolated(),
                    eigenvalues: rep.eigenvalues,
                });
            PhaseCell { delta_inv, r, result }
        })
        .collect())
}

pub fn phase_diagram_csv(cells: &[PhaseCell], k: usize) -> CsvTable {
    let mut header: Vec<String> = ["delta_inv", "r", "gap", "continuum_edge", "n_isolated"].map(String::from).to_vec();
    header.extend((0..k).map(|i| format!("ev{i}")));
    let mut t = CsvTable::new(header);
    for c in cells {
        let mut row = vec![fmt_f64(c.delta_inv), fmt_f64(c.r)];
        match &c.result {
            Ok(d) => {
                row.extend([fmt_f64(d.gap), fmt_f64(d.continuum_edge), d.n_isolated.to_string()]);
                row.extend((0..k).map(|i| d.eigenvalues.get(i).map_or("NaN".into(), |v| fmt_f64(*v))));
            }
            Err(_) => row.extend(std::iter::repeat_n("NaN".to_string(), 3 + k)),
        }
        t.push(row);
    }
    t
}

/// Single-row table for one spectral report.
pub fn spectral_report_csv(params: &ModelParams, rep: &SpectralReport) -> CsvTable {
    let k = rep.eigenvalues.len();
    let mut header: Vec<String> = ["delta_inv", "r", "gap", "continuum_edge", "n_isolated"].map(String::from).to_vec();
    header.extend((0..k).map(|i| format!("ev{i}")));
    let mut t = CsvTable::new(header);
    let mut row = vec![
        fmt_f64(params.delta_inv()),
        fmt_f64(params.r),
        fmt_f64(rep.gap),
        fmt_f64(rep.continuum_edge),
        rep.n_isolated().to_string(),
    ];
    row.extend(rep.eigenvalues.iter().map(|v| fmt_f64(*v)));
    t.push(row);
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(delta: f64, r: f64, a: i64, b: i64) -> ModelParams {
        make_params(1, delta, r, Window::new(a, b).unwrap()).unwrap()
    }

    fn residual(h: &SymTridiagonal, v: &[f64]) -> f64 {
        let mut y = vec![0.0; v.len()];
        h.apply(v, &mut y);
        y.iter().map(|x| x * x).sum::<f64>().sqrt() / v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn three_site_matrix_by_hand() {
        let m = p(1.25, 0.0, -1, 1);
        let h = build_jacobi(&m).unwrap();
        assert_eq!(h.off, vec![-0.8, -0.8]);
        assert!((h.diag[1] - 1.28).abs() < 1e-14);
        // ε⁺₋₁ = cosh(ln2)/(1.25 cosh 0) = 1.25/1.25 = 1 and likewise ε⁻₁
        assert!((h.diag[0] - 1.0).abs() < 1e-14);
        assert!((h.diag[2] - 1.0).abs() < 1e-14);
        let s = h.to_sparse();
        assert_eq!(s.asymmetry(), 0.0);
    }

    #[test]
    fn strong_anisotropy_bulk_near_two() {
        let m = p(50.0, 0.3, -10, 10);
        let h = build_jacobi(&m).unwrap();
        for (i, x) in m.window.sites().enumerate().skip(1).take(19) {
            if (x as f64 - 0.3).abs() >= 2.0 {
                assert!((h.diag[i] - 2.0).abs() < 0.01);
            }
        }
    }

    #[test]
    fn zero_mode_values_and_exactness() {
        let m = p(1.25, 0.0, -5, 5);
        let z = zero_mode(&m);
        let i0 = m.window.index(0).unwrap();
        assert!((z.vector[i0] - 1.0).abs() < 1e-15);
        assert!((z.vector[i0 + 1] - 0.8).abs() < 1e-15);
        assert!((z.vector[i0 + 2] - 8.0 / 17.0).abs() < 1e-15);
        // the one-sided boundary rows make v₀ exact on any window
        assert!(residual(&build_jacobi(&m).unwrap(), &z.vector) < 1e-14);
        assert!(z.l1 < z.l1_lattice && z.l2 < z.l2_lattice);
    }

    #[test]
    fn zero_mode_translation() {
        let m = p(1.7, 0.25, -8, 8);
        let shifted = m.with_r(1.25);
        let a = zero_mode(&m).vector;
        let b = zero_mode(&shifted).vector;
        for i in 0..a.len() - 1 {
            assert!((a[i] - b[i + 1]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_mode_residual_below_truncation_bound() {
        let l = 40;
        let m = p(1.25, 0.3, -l, l);
        let h = build_jacobi(&m).unwrap();
        let res = residual(&h, &zero_mode(&m).vector);
        assert!(res <= 10.0 * (-m.eta * (l as f64 - 1.0)).exp());
    }

    #[test]
    fn report_for_five_quarters() {
        let m = p(1.25, 0.5, -60, 60);
        let rep = spectral_report(&m, 4, true).unwrap();
        assert!((rep.continuum_edge - 0.4).abs() < 1e-15);
        assert!(rep.eigenvalues[0] >= -1e-10 && rep.eigenvalues[0] <= rep.zero_tol);
        assert!(rep.gap > rep.zero_tol && rep.gap < 0.4);
        assert_eq!(rep.solver, Solver::Dense);
        assert!(rep.n_isolated() >= 1);
        assert_eq!(rep.isolated_below_edge[0].value, rep.gap);
        let onset = rep.continuum_onset.unwrap();
        assert!(onset > 0.4 - EDGE_MARGIN && onset < 0.41);
        // the 2-site window reproduces the 2x2 matrix directly
        let small = spectral_report(&p(1.25, 0.5, 0, 1), 2, false).unwrap();
        assert!(small.eigenvalues[0].abs() < 1e-14);
    }

    #[test]
    fn lanczos_and_dense_agree() {
        let m = p(1.4, 0.2, -300, 300);
        let dense = spectral_report_with(&m, 4, false, SolverChoice::Force(Solver::Dense)).unwrap();
        let lan = spectral_report_with(&m, 4, false, SolverChoice::Force(Solver::Lanczos)).unwrap();
        assert_eq!(lan.solver, Solver::Lanczos);
        for (a, b) in dense.eigenvalues.iter().zip(&lan.eigenvalues) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!((dense.gap - lan.gap).abs() < 1e-9);
        assert_eq!(dense.n_isolated(), lan.n_isolated());
    }

    #[test]
    fn gap_stable_under_window_growth() {
        for delta_inv in [0.3, 0.5, 0.6] {
            let m = p(1.0 / delta_inv, 0.5, -40, 40);
            let g1 = jacobi_gap(&m).unwrap();
            let g2 = jacobi_gap(&m.with_window(Window::new(-80, 80).unwrap())).unwrap();
            assert!((g1 - g2).abs() <= 1e-8, "{delta_inv}: {g1} vs {g2}");
        }
        // the weakly bound state at Δ⁻¹ = 0.8 has a decay length of about ten sites
        let m = p(1.25, 0.5, -40, 40);
        let g40 = jacobi_gap(&m).unwrap();
        let g80 = jacobi_gap(&m.with_window(Window::new(-80, 80).unwrap())).unwrap();
        let g160 = jacobi_gap(&m.with_window(Window::new(-160, 160).unwrap())).unwrap();
        assert!((g40 - g80).abs() > 1e-6);
        assert!((g80 - g160).abs() <= 1e-8);
    }

    #[test]
    fn phase_diagram_order_and_reflection() {
        let w = Window::new(-59, 60).unwrap();
        let dgrid = [0.3, 0.6, 0.8];
        let rgrid = [0.1, 0.3, 0.5, 0.7, 0.9];
        let cells = phase_diagram(&dgrid, &rgrid, w, 3).unwrap();
        assert_eq!(cells.len(), 15);
        for (i, c) in cells.iter().enumerate() {
            assert_eq!(c.delta_inv, dgrid[i / 5]);
            assert_eq!(c.r, rgrid[i % 5]);
            let d = c.result.as_ref().unwrap();
            assert!(d.n_isolated >= 1, "{} {}", c.delta_inv, c.r);
            assert!(d.gap / d.continuum_edge > 0.0 && d.gap / d.continuum_edge <= 1.0);
        }
        for row in 0..3 {
            for j in 0..5 {
                let a = cells[row * 5 + j].result.as_ref().unwrap();
                let b = cells[row * 5 + 4 - j].result.as_ref().unwrap();
                assert_eq!(a.n_isolated, b.n_isolated);
                assert!((a.gap - b.gap).abs() < 1e-10);
            }
        }
        // strong anisotropy near the kink centre binds a second state
        assert_eq!(cells[0].result.as_ref().unwrap().n_isolated, 2);
        assert_eq!(cells[2].result.as_ref().unwrap().n_isolated, 1);
        let csv = phase_diagram_csv(&cells, 3).render();
        assert!(csv.starts_with("delta_inv,r,gap,continuum_edge,n_isolated,ev0,ev1,ev2\n"));
        assert_eq!(csv.lines().count(), 16);
        assert!(phase_diagram(&[1.2], &[0.0], w, 1).is_err());
    }

    #[test]
    fn binding_below_edge_margin_is_not_classified() {
        // at Δ⁻¹ = 0.9 the bound state sits about 1e-3 below the edge, inside the margin
        let m = p(1.0 / 0.9, 0.5, -160, 160);
        let rep = spectral_report(&m, 3, false).unwrap();
        assert!(rep.gap < rep.continuum_edge);
        assert!(rep.continuum_edge - rep.gap < EDGE_MARGIN);
        assert_eq!(rep.n_isolated(), 0);
    }

    #[test]
    fn zero_mode_residual_decays_at_rate_eta() {
        // boundary rows are exact, so measure the bulk operator on the same vector instead
        let m = p(1.25, 0.3, -1, 1);
        let pts: Vec<(f64, f64)> = [10i64, 20, 30, 40]
            .iter()
            .map(|&l| {
                let mm = m.with_window(Window::new(-l, l).unwrap());
                let mut h = build_jacobi(&mm).unwrap();
                let n = h.dim();
                h.diag[0] = mm.eps(-l as f64);
                h.diag[n - 1] = mm.eps(l as f64);
                (l as f64, residual(&h, &zero_mode(&mm).vector).ln())
            })
            .collect();
        let slope = crate::harness::fit_slope(&pts);
        assert!((slope + m.eta).abs() < 0.05 * m.eta, "slope {slope} vs eta {}", m.eta);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn psd_and_zero_mode(delta in 1.01f64..10.0, r in 0.0f64..1.0, half in 3i64..30) {
            let m = p(delta, r, -half, half);
            let h = build_jacobi(&m).unwrap();
            let vals = tridiag::eigenvalues(&h.diag, &h.off).unwrap();
            prop_assert!(vals[0] >= -1e-10);
            prop_assert!(vals[0] <= ZERO_TOL_REL * h.norm_inf());
            prop_assert!(residual(&h, &zero_mode(&m).vector) < 1e-13);
            for (i, x) in m.window.sites().enumerate().skip(1).take(h.dim() - 2) {
                prop_assert!((h.diag[i] - m.eps(x as f64)).abs() < 1e-15);
            }
        }
    }
}
