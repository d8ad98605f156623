//! Spin-J operators, the kink Hamiltonian, its ground states and sector gaps.
//!
//! The bond Hamiltonian is
//! `J² − Δ⁻¹(S¹S¹ + S²S²) − S³S³ + J√(1−Δ⁻²)(S³_x − S³_{x+1})`.

pub mod basis;
pub mod hamiltonian;
pub mod site;

pub use basis::{admissible_m2, sector_dim, SectorBasis, DEFAULT_DIM_CAP};
pub use hamiltonian::{
    assemble_bonds, bond_matrix, build_xxz_hamiltonian, build_xxz_sector, ground_state, ground_state_check,
    ground_state_csv, ground_state_log_coefficients, ln_binomial, rotated_bond_matrix, rotated_frame_hamiltonian,
    rotated_hamiltonian, sector_gap, sector_gap_csv, sector_gaps, total_s3, GroundCheck, SectorGap, SectorSolver,
};
pub use site::{RotatedSpin, SpinSite};
