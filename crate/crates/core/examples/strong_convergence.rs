//! H/J against the quasi-free Hamiltonian on fixed boson states as J grows.
//!
//! cargo run --release --example strong_convergence

use xxzlab::harness::{decay_exponent, strong_convergence_csv, strong_convergence_residual};
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    let p = make_params(2, 1.25, 0.5, Window::symmetric(8)?)?;
    let list = [4, 8, 16, 32, 64];
    for occupation in [vec![(0, 1)], vec![(0, 1), (1, 1)], vec![(-1, 2)]] {
        let rows = strong_convergence_residual(&p, &list, &occupation)?;
        print!("{}", strong_convergence_csv(&rows).render());
        let js: Vec<f64> = list.iter().map(|&t| t as f64 / 2.0).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.residual_h).collect();
        println!("occupation {occupation:?}: decay exponent {:.3}\n", decay_exponent(&js, &ys));
    }
    Ok(())
}
