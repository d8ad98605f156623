//! The spin Hamiltonian divided by J, rewritten exactly as kinematical,
//! dynamical and transition boson parts, and how far H_kin is from the
//! quasi-free Hamiltonian as J grows.
//!
//! cargo run --example boson_decomposition

use xxzlab::fock::{boson_compare, build_boson_hamiltonian, build_spin_parts, FockBasis};
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    for two_j in [1, 2, 3, 4] {
        let c = boson_compare(&make_params(two_j, 1.25, 0.5, Window::new(-1, 2)?)?)?;
        println!("2J = {two_j}: |H/J - (kin + dyn + tran)|_max = {:.2e}", c.total_diff);
    }
    let window = Window::new(-1, 1)?;
    let basis = FockBasis::full(window, 2)?;
    for two_j in [4, 8, 16, 32] {
        let p = make_params(two_j, 1.25, 0.5, window)?;
        let diff = build_spin_parts(&p, &basis)?.kin.max_abs_diff(&build_boson_hamiltonian(&p, &basis)?)?;
        println!("2J = {two_j:>2}: |H_kin - H~|_max on two bosons per site = {diff:.4e}");
    }
    Ok(())
}
