//! Linear algebra used by the model modules.

pub mod configs;
pub mod lanczos;
pub mod sparse;
pub mod tridiag;

pub use configs::{ConfigSpace, SumConstraint};
pub use lanczos::{lanczos_lowest, LanczosOptions, LanczosResult, LinearOperator};
pub use sparse::{BasisTag, SparseOperator};

use nalgebra::DMatrix;

/// Eigen-decomposition of a dense symmetric matrix with ascending eigenvalues;
/// column `i` of the returned matrix belongs to eigenvalue `i`.
pub fn sorted_symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Uniformly distributed unit vector in `ℝⁿ`.
pub fn random_unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let nrm = lanczos::norm(&v);
        if nrm > 1e-300 {
            return v.into_iter().map(|x| x / nrm).collect();
        }
    }
}
