use crate::error::{Error, Result};
use crate::kinkmath::Window;
use crate::linalg::{BasisTag, ConfigSpace, SumConstraint};

/// Default bound on the dimension of any enumerated spin space.
pub const DEFAULT_DIM_CAP: usize = 1_000_000;

/// Spin configurations on a window, optionally restricted to a magnetisation
/// sector.
///
/// Configurations are stored through the lowering counts `k_x = J − m_x`,
/// ordered lexicographically with the left end most significant and `k`
/// ascending (so `m` descending).
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    pub window: Window,
    pub two_j: u32,
    /// Doubled total magnetisation `2M`, or `None` for the full tensor space.
    pub m2: Option<i64>,
    space: ConfigSpace,
}

impl SectorBasis {
    pub fn sector(window: Window, two_j: u32, m2: i64) -> Result<Self> {
        let total = lowering_total(window, two_j, m2)?;
        let space = ConfigSpace::new(window.len(), two_j as usize, SumConstraint::Exact(total), usize::MAX)?;
        Ok(SectorBasis { window, two_j, m2: Some(m2), space })
    }

    pub fn full(window: Window, two_j: u32, max_dim: usize) -> Result<Self> {
        let space = ConfigSpace::new(window.len(), two_j as usize, SumConstraint::Any, max_dim)?;
        Ok(SectorBasis { window, two_j, m2: None, space })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn sites(&self) -> usize {
        self.window.len()
    }

    /// Lowering counts `k_x` of configuration `i`.
    pub fn config(&self, i: usize) -> &[u16] {
        self.space.config(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> {
        self.space.iter()
    }

    pub fn index_of(&self, k: &[u16]) -> Option<usize> {
        self.space.index_of(k)
    }

    /// Doubled magnetisations `2m_x` of configuration `i`.
    pub fn m2_values(&self, i: usize) -> Vec<i64> {
        self.config(i).iter().map(|&k| self.two_j as i64 - 2 * k as i64).collect()
    }

    /// Doubled `S³_tot` eigenvalue of every configuration.
    pub fn m2_totals(&self) -> Vec<i64> {
        let full = (self.sites() as i64) * self.two_j as i64;
        self.iter().map(|c| full - 2 * c.iter().map(|&k| k as i64).sum::<i64>()).collect()
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::Spin { two_j: self.two_j, window: self.window, m2: self.m2 }
    }

    pub fn space(&self) -> &ConfigSpace {
        &self.space
    }
}

/// Admissible doubled magnetisations `−|Λ|·2J, …, |Λ|·2J` in steps of 2.
pub fn admissible_m2(window: Window, two_j: u32) -> Vec<i64> {
    let max = window.len() as i64 * two_j as i64;
    (0..=max).map(|t| max - 2 * t).collect()
}

fn lowering_total(window: Window, two_j: u32, m2: i64) -> Result<usize> {
    let max = window.len() as i64 * two_j as i64;
    if m2.abs() > max || (max - m2) % 2 != 0 {
        return Err(Error::MagnetizationOutOfRange { m2, max });
    }
    Ok(((max - m2) / 2) as usize)
}

/// Dimension of a sector without enumerating it.
pub fn sector_dim(window: Window, two_j: u32, m2: i64) -> Result<usize> {
    let total = lowering_total(window, two_j, m2)?;
    Ok(ConfigSpace::count(window.len(), two_j as usize, SumConstraint::Exact(total)))
}
