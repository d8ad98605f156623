//! Low spectrum of the one-particle Jacobi operator: zero mode, gap and continuum.
//!
//! cargo run --example jacobi_spectrum

use xxzlab::jacobi::{build_jacobi, spectral_report, zero_mode};
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    let p = make_params(1, 1.25, 0.5, Window::symmetric(60)?)?;
    let v0 = zero_mode(&p);
    let hv = build_jacobi(&p)?.to_sparse().apply_vec(&v0.vector);
    let residual = hv.iter().map(|x| x * x).sum::<f64>().sqrt() / v0.l2;
    println!("zero mode: |v0|_1 = {:.6}, |v0|_2 = {:.6}, |h v0|/|v0| = {residual:.2e}", v0.l1, v0.l2);

    let rep = spectral_report(&p, 6, false)?;
    println!("lowest eigenvalues: {:.6?}", rep.eigenvalues);
    println!("gap {:.6}, continuum edge {:.6}", rep.gap, rep.continuum_edge);
    for iso in &rep.isolated_below_edge {
        println!("isolated eigenvalue {:.6} (IPR {:.3})", iso.value, iso.ipr);
    }
    Ok(())
}
