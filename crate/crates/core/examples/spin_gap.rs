//! Spin-1/2 kink gap in the M = 0 sector against the closed form 1 − Δ⁻¹cos(π/L).
//!
//! cargo run --release --example spin_gap

use xxzlab::spin::sector_gap;
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    let delta = 1.25;
    println!("{:>3} {:>6} {:>10} {:>10}", "L", "dim", "gap", "formula");
    for l in (4..=14).step_by(2) {
        let p = make_params(1, delta, 0.5, Window::new(-(l / 2) + 1, l / 2)?)?;
        let g = sector_gap(&p, 0)?;
        let formula = 1.0 - (std::f64::consts::PI / l as f64).cos() / delta;
        println!("{l:>3} {:>6} {:>10.6} {:>10.6}", g.dim, g.gap, formula);
    }
    println!("infinite-chain limit: {:.6}", 1.0 - 1.0 / delta);
    Ok(())
}
