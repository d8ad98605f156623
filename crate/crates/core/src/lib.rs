//! Numerical laboratory for the ferromagnetic spin-J XXZ chain with kink
//! boundary conditions, its classical kink profile and its large-spin boson
//! limit.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coherent;
pub mod error;
pub mod fock;
pub mod harness;
pub mod jacobi;
pub mod kinkmath;
pub mod linalg;
pub mod output;
pub mod spin;

pub use error::{Error, Result};
pub use kinkmath::{check_angle_identities, kink_profile, make_params, KinkProfile, ModelParams, Window};
