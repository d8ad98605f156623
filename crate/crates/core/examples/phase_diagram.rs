//! Jacobi gap and number of isolated eigenvalues over a (1/Δ, r) grid, as CSV.
//!
//! cargo run --example phase_diagram > phase.csv

use xxzlab::jacobi::{phase_diagram, phase_diagram_csv};
use xxzlab::Window;

fn main() -> xxzlab::Result<()> {
    let delta_inv: Vec<f64> = (1..=8).map(|i| 0.1 * i as f64).collect();
    let r: Vec<f64> = (0..=4).map(|i| 0.25 * i as f64).collect();
    let cells = phase_diagram(&delta_inv, &r, Window::symmetric(60)?, 3)?;
    print!("{}", phase_diagram_csv(&cells, 3).render());
    Ok(())
}
