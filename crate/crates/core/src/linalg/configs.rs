//! Enumeration and ranking of occupation configurations.
//!
//! A configuration assigns an integer `0..=cap` to every site of a window.
//! Configurations are ordered lexicographically with the leftmost site most
//! significant and values ascending. Ranking uses a table of completion counts,
//! so looking up an index costs O(sites · cap) and needs no hash map.

use crate::error::{Error, Result};

/// Constraint on the total occupation `Σ_x n_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumConstraint {
    Exact(usize),
    AtMost(usize),
    Any,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigSpace {
    sites: usize,
    cap: usize,
    constraint: SumConstraint,
    budget: usize,
    // completions[i * (budget + 1) + rem]: admissible fillings of sites i.. with remaining budget rem
    completions: Vec<usize>,
    configs: Vec<u16>,
}

impl ConfigSpace {
    /// Enumerates every admissible configuration; fails if there would be more than `max_dim`.
    pub fn new(sites: usize, cap: usize, constraint: SumConstraint, max_dim: usize) -> Result<Self> {
        if cap > u16::MAX as usize {
            return Err(Error::InvalidParameter(format!("occupation cap {cap} too large")));
        }
        let budget = match constraint {
            SumConstraint::Exact(n) | SumConstraint::AtMost(n) => n,
            SumConstraint::Any => sites * cap,
        };
        let exact = matches!(constraint, SumConstraint::Exact(_));
        let width = budget + 1;
        let mut completions = vec![0usize; (sites + 1) * width];
        for rem in 0..=budget {
            completions[sites * width + rem] = usize::from(!exact || rem == 0);
        }
        for i in (0..sites).rev() {
            for rem in 0..=budget {
                let mut total: usize = 0;
                for v in 0..=cap.min(rem) {
                    total = total.saturating_add(completions[(i + 1) * width + rem - v]);
                }
                completions[i * width + rem] = total;
            }
        }
        let dim = completions[budget];
        if dim > max_dim {
            return Err(Error::DimensionCap { dim, cap: max_dim });
        }
        let mut space = ConfigSpace { sites, cap, constraint, budget, completions, configs: Vec::with_capacity(dim * sites) };
        if dim > 0 {
            let mut current = vec![0u16; sites];
            space.fill(0, budget, &mut current);
        }
        Ok(space)
    }

    /// Number of configurations without enumerating them.
    pub fn count(sites: usize, cap: usize, constraint: SumConstraint) -> usize {
        let budget = match constraint {
            SumConstraint::Exact(n) | SumConstraint::AtMost(n) => n,
            SumConstraint::Any => return (cap + 1).saturating_pow(sites as u32),
        };
        let exact = matches!(constraint, SumConstraint::Exact(_));
        let mut next: Vec<usize> = (0..=budget).map(|rem| usize::from(!exact || rem == 0)).collect();
        for _ in 0..sites {
            next = (0..=budget)
                .map(|rem| (0..=cap.min(rem)).fold(0usize, |acc, v| acc.saturating_add(next[rem - v])))
                .collect();
        }
        next[budget]
    }

    fn fill(&mut self, i: usize, rem: usize, current: &mut [u16]) {
        if i == self.sites {
            if self.completions[i * (self.budget + 1) + rem] == 1 {
                self.configs.extend_from_slice(current);
            }
            return;
        }
        for v in 0..=self.cap.min(rem) {
            if self.completions[(i + 1) * (self.budget + 1) + rem - v] == 0 {
                continue;
            }
            current[i] = v as u16;
            self.fill(i + 1, rem - v, current);
        }
    }

    pub fn dim(&self) -> usize {
        if self.sites == 0 {
            return self.completions[self.budget];
        }
        self.configs.len() / self.sites
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn constraint(&self) -> SumConstraint {
        self.constraint
    }

    pub fn config(&self, index: usize) -> &[u16] {
        &self.configs[index * self.sites..(index + 1) * self.sites]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> {
        self.configs.chunks_exact(self.sites.max(1)).take(self.dim())
    }

    /// Index of a configuration, or `None` if it violates the cap or constraint.
    pub fn index_of(&self, config: &[u16]) -> Option<usize> {
        if config.len() != self.sites {
            return None;
        }
        let width = self.budget + 1;
        let mut rem = self.budget;
        let mut rank = 0usize;
        for (i, &c) in config.iter().enumerate() {
            let c = c as usize;
            if c > self.cap || c > rem {
                return None;
            }
            for v in 0..c {
                rank += self.completions[(i + 1) * width + rem - v];
            }
            rem -= c;
        }
        if self.completions[self.sites * width + rem] == 0 {
            return None;
        }
        Some(rank)
    }
}
