//! The explicit zero-energy ground state in every magnetization sector.
//!
//! cargo run --example ground_states

use xxzlab::spin::{admissible_m2, ground_state_check};
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    let p = make_params(2, 1.25, 0.5, Window::new(-2, 3)?)?;
    println!("{:>4} {:>6} {:>12}", "2M", "dim", "|H phi|");
    for m2 in admissible_m2(p.window, p.two_j) {
        let g = ground_state_check(&p, m2)?;
        println!("{m2:>4} {:>6} {:>12.2e}", g.dim, g.residual);
    }
    Ok(())
}
