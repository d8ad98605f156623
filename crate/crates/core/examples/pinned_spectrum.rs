//! Low spectrum of H/J with a pinning field against quasi-free levels, with a
//! pinning-free control.
//!
//! cargo run --release --example pinned_spectrum

use xxzlab::harness::{default_schedule, pinned_csv, pinned_levels, pinned_spectrum_convergence, PinSchedule};
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    let p = make_params(2, 1.25, 0.5, Window::symmetric(2)?)?;
    for e_max in [0.36, 1.0] {
        let rows = pinned_spectrum_convergence(&p, e_max, &default_schedule(&[4, 8, 16, 64], e_max))?;
        println!("E_max = {e_max}");
        print!("{}", pinned_csv(&rows).render());
    }
    let control = pinned_levels(&p, &PinSchedule { two_j: 8, n_j: 2, h_j: 0.0 }, 1.0)?;
    println!("no pinning, 2J = 8, four bosons per site: {} levels below 1.0, lowest {:.4?}", control.len(), &control[..control.len().min(4)]);
    Ok(())
}
