//! Lanczos iteration with full reorthogonalisation for the low end of the
//! spectrum of a real symmetric operator.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A real symmetric operator that can be applied to vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    pub k: usize,
    /// Ritz pairs count as converged when `‖A y − θ y‖ ≤ tol · max(1, |θ_max|)`.
    pub tol: f64,
    pub max_iter: usize,
    pub want_vectors: bool,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { k: 1, tol: 1e-10, max_iter: 600, want_vectors: false, seed: 0x1a2c }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Lowest `k` eigenpairs of `op` restricted to the orthogonal complement of
/// `deflate` (which should span an invariant subspace, e.g. known eigenvectors).
pub fn lanczos_lowest(
    op: &dyn LinearOperator,
    opts: &LanczosOptions,
    deflate: &[Vec<f64>],
) -> Result<LanczosResult> {
    let n = op.dim();
    let mut defl: Vec<Vec<f64>> = Vec::with_capacity(deflate.len());
    for v in deflate {
        if v.len() != n {
            return Err(Error::InvalidParameter(format!(
                "deflation vector of length {} for dimension {n}",
                v.len()
            )));
        }
        let mut w = v.clone();
        orthogonalize(&mut w, &defl);
        if normalize(&mut w) > 1e-12 {
            defl.push(w);
        }
    }
    let avail = n - defl.len();
    if opts.k == 0 || avail == 0 {
        return Ok(LanczosResult { eigenvalues: vec![], eigenvectors: None, residuals: vec![], iterations: 0 });
    }
    let k = opts.k.min(avail);
    let max_iter = opts.max_iter.max(k + 1).min(avail);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = fresh_start(&mut rng, n, &defl, &basis);
    let mut w = vec![0.0; n];
    let mut norm_est: f64 = 0.0;
    let mut last: Option<(Vec<f64>, DMatrix<f64>, Vec<f64>)> = None;

    for j in 0..max_iter {
        op.apply(&q, &mut w);
        let a: f64 = dot(&w, &q);
        basis.push(q.clone());
        alpha.push(a);
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= a * qi;
        }
        if let Some(prev) = basis.len().checked_sub(2).map(|i| &basis[i]) {
            let b = *beta.last().unwrap();
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= b * pi;
            }
        }
        // two passes of classical Gram-Schmidt keep the basis orthogonal to working precision
        for _ in 0..2 {
            orthogonalize(&mut w, &defl);
            orthogonalize(&mut w, &basis);
        }
        let b = norm(&w);
        norm_est = norm_est.max(a.abs() + b);

        let m = basis.len();
        let exhausted = m == avail;
        let check = exhausted || j + 1 == max_iter || (m >= k && (m.is_multiple_of(5) || b < 1e-12 * norm_est.max(1.0)));
        if check {
            let (theta, s) = tridiag_eig(&alpha, &beta);
            let scale = opts.tol * norm_est.max(1.0);
            let res: Vec<f64> = (0..k.min(m)).map(|i| (b * s[(m - 1, i)]).abs()).collect();
            let converged = m >= k && res.iter().all(|&r| r <= scale);
            if converged || exhausted {
                let res = if exhausted && !converged { vec![0.0; res.len()] } else { res };
                last = Some((theta, s, res));
                break;
            }
            if j + 1 == max_iter {
                let worst = res.iter().copied().fold(0.0, f64::max);
                return Err(Error::NoConvergence { iterations: m, residual: worst });
            }
        }
        if b < 1e-12 * norm_est.max(1.0) {
            // invariant subspace found: continue from a new direction
            q = fresh_start(&mut rng, n, &defl, &basis);
            beta.push(0.0);
        } else {
            q = w.iter().map(|v| v / b).collect();
            beta.push(b);
        }
    }

    let (theta, s, residuals) = last.expect("loop exits through a convergence check");
    let eigenvalues: Vec<f64> = theta[..k].to_vec();
    let eigenvectors = opts.want_vectors.then(|| {
        (0..k)
            .map(|i| {
                let mut y = vec![0.0; n];
                for (jj, v) in basis.iter().enumerate() {
                    let c = s[(jj, i)];
                    y.iter_mut().zip(v).for_each(|(yi, vi)| *yi += c * vi);
                }
                normalize(&mut y);
                y
            })
            .collect()
    });
    Ok(LanczosResult { eigenvalues, eigenvectors, residuals, iterations: basis.len() })
}

fn tridiag_eig(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let theta = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let s = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    (theta, s)
}

fn fresh_start(rng: &mut ChaCha8Rng, n: usize, defl: &[Vec<f64>], basis: &[Vec<f64>]) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            orthogonalize(&mut v, defl);
            orthogonalize(&mut v, basis);
        }
        if normalize(&mut v) > 1e-8 {
            return v;
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(v: &mut [f64]) -> f64 {
    let nrm = norm(v);
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for v in basis {
        let c = dot(w, v);
        w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diag(Vec<f64>);
    impl LinearOperator for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    struct Path(usize);
    impl LinearOperator for Path {
        fn dim(&self) -> usize {
            self.0
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            let n = self.0;
            for i in 0..n {
                let mut v = 2.0 * x[i];
                if i > 0 {
                    v -= x[i - 1];
                }
                if i + 1 < n {
                    v -= x[i + 1];
                }
                y[i] = v;
            }
        }
    }

    #[test]
    fn lowest_of_laplacian() {
        let n = 400;
        let opts = LanczosOptions { k: 3, want_vectors: true, max_iter: 400, ..Default::default() };
        let r = lanczos_lowest(&Path(n), &opts, &[]).unwrap();
        for k in 0..3 {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((r.eigenvalues[k] - exact).abs() < 1e-9, "{k}: {} vs {exact}", r.eigenvalues[k]);
        }
        let v = &r.eigenvectors.unwrap()[0];
        let mut y = vec![0.0; n];
        Path(n).apply(v, &mut y);
        let res: f64 = y.iter().zip(v).map(|(a, b)| (a - r.eigenvalues[0] * b).powi(2)).sum::<f64>().sqrt();
        assert!(res < 1e-8);
    }

    #[test]
    fn small_space_is_solved_exactly() {
        let op = Diag(vec![3.0, 1.0, 2.0, 5.0]);
        let r = lanczos_lowest(&op, &LanczosOptions { k: 4, ..Default::default() }, &[]).unwrap();
        for (a, b) in r.eigenvalues.iter().zip([1.0, 2.0, 3.0, 5.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_eigenvalues_recovered_after_breakdown() {
        let op = Diag(vec![1.0, 1.0, 2.0, 2.0, 3.0]);
        let r = lanczos_lowest(&op, &LanczosOptions { k: 5, ..Default::default() }, &[]).unwrap();
        for (a, b) in r.eigenvalues.iter().zip([1.0, 1.0, 2.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn deflation_skips_known_ground_state() {
        let op = Diag(vec![0.0, 4.0, 1.5, 7.0]);
        let e0 = vec![1.0, 0.0, 0.0, 0.0];
        let r = lanczos_lowest(&op, &LanczosOptions { k: 1, ..Default::default() }, &[e0]).unwrap();
        assert!((r.eigenvalues[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let n = 3000;
        let opts = LanczosOptions { k: 1, max_iter: 10, tol: 1e-14, ..Default::default() };
        match lanczos_lowest(&Path(n), &opts, &[]) {
            Err(Error::NoConvergence { iterations, residual }) => {
                assert_eq!(iterations, 10);
                assert!(residual > 0.0);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let opts = LanczosOptions { k: 2, ..Default::default() };
        let a = lanczos_lowest(&Path(300), &opts, &[]).unwrap();
        let b = lanczos_lowest(&Path(300), &opts, &[]).unwrap();
        assert_eq!(a, b);
    }
}
