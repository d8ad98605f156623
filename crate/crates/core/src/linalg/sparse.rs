//! Compressed sparse row operators tagged with the basis they act on.

use super::configs::SumConstraint;
use super::lanczos::LinearOperator;
use crate::error::{Error, Result};
use crate::kinkmath::Window;
use nalgebra::DMatrix;

/// Identity of the basis an operator is written in. Operators can only be
/// compared or added when their tags agree.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisTag {
    /// Site basis `{δ_x}` of the one-particle space.
    OneParticle { window: Window },
    /// Spin configurations; `m2` is the doubled magnetisation of a sector.
    Spin { two_j: u32, window: Window, m2: Option<i64> },
    /// Boson occupations with per-site cap.
    Fock { n_cap: usize, window: Window, constraint: SumConstraint },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    tag: BasisTag,
    dim: usize,
    symmetric: bool,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseOperator {
    /// Assembles from unsorted triplets, summing duplicates. With `symmetric`
    /// set the input must already contain both `(i,j)` and `(j,i)`; the flag is
    /// verified exactly.
    pub fn from_triplets(
        tag: BasisTag,
        dim: usize,
        mut triplets: Vec<(usize, usize, f64)>,
        symmetric: bool,
    ) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::InvalidParameter(format!("entry ({r}, {c}) outside dimension {dim}")));
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let op = SparseOperator { tag, dim, symmetric, row_ptr, cols, vals };
        // entries built from the same factors in a different order may differ in the last bit
        if symmetric && op.asymmetry() > 1e-14 * op.max_abs_entry().max(1.0) {
            return Err(Error::InvalidParameter("operator flagged symmetric is not".into()));
        }
        Ok(op)
    }

    pub fn diagonal_operator(tag: BasisTag, diag: &[f64]) -> Self {
        let triplets = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        SparseOperator::from_triplets(tag, diag.len(), triplets, true).expect("diagonal is symmetric")
    }

    pub fn tag(&self) -> &BasisTag {
        &self.tag
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(pos) => self.vals[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim).map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A − Aᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        self.triplets().map(|(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    fn check_same_basis(&self, other: &SparseOperator) -> Result<()> {
        if self.tag != other.tag || self.dim != other.dim {
            return Err(Error::BasisMismatch(format!("{:?} (dim {}) vs {:?} (dim {})", self.tag, self.dim, other.tag, other.dim)));
        }
        Ok(())
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &SparseOperator, s: f64) -> Result<SparseOperator> {
        self.check_same_basis(other)?;
        let triplets = self.triplets().chain(other.triplets().map(|(i, j, v)| (i, j, s * v))).collect();
        SparseOperator::from_triplets(self.tag.clone(), self.dim, triplets, self.symmetric && other.symmetric)
    }

    pub fn scaled(&self, s: f64) -> SparseOperator {
        SparseOperator { vals: self.vals.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &SparseOperator) -> Result<f64> {
        Ok(self.add_scaled(other, -1.0)?.max_abs_entry())
    }

    /// `max |[A, D]|` for the diagonal operator `D = diag(d)`.
    pub fn commutator_with_diagonal(&self, d: &[f64]) -> f64 {
        self.triplets().map(|(i, j, v)| (v * (d[j] - d[i])).abs()).fold(0.0, f64::max)
    }

    /// Same matrix, relabelled as acting on an equivalent basis.
    pub fn retag(self, tag: BasisTag) -> SparseOperator {
        SparseOperator { tag, ..self }
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.apply(x, &mut y);
        y
    }

    /// `⟨x, A x⟩`.
    pub fn expectation(&self, x: &[f64]) -> f64 {
        self.apply_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }
}
