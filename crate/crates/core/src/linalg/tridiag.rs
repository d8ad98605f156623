//! Dense symmetric tridiagonal eigensolver.
//!
//! Eigenvalues come from the implicit QL iteration with Wilkinson shifts; the
//! eigenvectors that are actually needed are recovered afterwards by inverse
//! iteration, which keeps the cost at O(n²) + O(n) per vector.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_SWEEPS: usize = 60;

/// All eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e.len() + 1 == d.len()`), sorted ascending.
pub fn eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if e.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "off-diagonal has length {} for dimension {n}",
            e.len()
        )));
    }
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::NoConvergence { iterations: iter, residual: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Normalised eigenvector for the (already accurate) eigenvalue `lambda`.
///
/// `previous` holds eigenvectors of nearby eigenvalues; the result is made
/// orthogonal to them so that tight clusters still yield an orthonormal set.
pub fn eigenvector(d: &[f64], e: &[f64], lambda: f64, previous: &[Vec<f64>], seed: u64) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = d.iter().map(|x| x.abs()).chain(e.iter().map(|x| 2.0 * x.abs())).fold(0.0, f64::max);
    let shift = lambda + scale.max(1.0) * 1e-14;
    let lu = TridiagLu::factor(d, e, shift);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    for _ in 0..4 {
        orthogonalize(&mut x, previous);
        normalize(&mut x);
        lu.solve(&mut x);
    }
    orthogonalize(&mut x, previous);
    normalize(&mut x);
    // fix the sign so the largest component is positive
    let (imax, _) = x.iter().enumerate().fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
    if x[imax] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}

/// Eigenvalues together with the eigenvectors of the lowest `k` of them.
pub fn lowest_with_vectors(d: &[f64], e: &[f64], k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let vals = eigenvalues(d, e)?;
    let scale = d.iter().map(|x| x.abs()).chain(e.iter().map(|x| 2.0 * x.abs())).fold(1.0, f64::max);
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(k);
    for i in 0..k.min(vals.len()) {
        let cluster: Vec<Vec<f64>> = (0..i)
            .filter(|&j| (vals[i] - vals[j]).abs() < 1e-8 * scale)
            .map(|j| vecs[j].clone())
            .collect();
        vecs.push(eigenvector(d, e, vals[i], &cluster, 0x5eed + i as u64));
    }
    Ok((vals, vecs))
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c: f64 = x.iter().zip(b).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
    }
}

fn normalize(x: &mut [f64]) {
    let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nrm > 0.0 {
        x.iter_mut().for_each(|v| *v /= nrm);
    }
}

/// LU factorisation with partial pivoting of `T − σ I`, `T` tridiagonal.
struct TridiagLu {
    l: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(d: &[f64], e: &[f64], shift: f64) -> Self {
        let n = d.len();
        let tiny = f64::EPSILON * d.iter().chain(e).map(|v| v.abs()).fold(1.0, f64::max);
        let mut diag: Vec<f64> = d.iter().map(|v| v - shift).collect();
        let mut sup: Vec<f64> = e.to_vec();
        let mut sub: Vec<f64> = e.to_vec();
        let mut sup2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if sub[i].abs() > diag[i].abs() {
                swapped[i] = true;
                std::mem::swap(&mut diag[i], &mut sub[i]);
                std::mem::swap(&mut sup[i], &mut diag[i + 1]);
                if i + 2 < n {
                    sup2[i] = sup[i + 1];
                    sup[i + 1] = 0.0;
                }
                // the row now at position i+1 is the former row i: (sub_i_old=diag_i_old, sup_old, 0)
            }
            if diag[i] == 0.0 {
                diag[i] = tiny;
            }
            let m = sub[i] / diag[i];
            l[i] = m;
            diag[i + 1] -= m * sup[i];
            if i + 2 < n {
                sup[i + 1] -= m * sup2[i];
            }
        }
        if diag[n - 1] == 0.0 {
            diag[n - 1] = tiny;
        }
        TridiagLu { l, u0: diag, u1: sup, u2: sup2, swapped }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.l[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= self.u2[i] * x[i + 2];
            }
            x[i] = v / self.u0[i];
        }
    }
}
