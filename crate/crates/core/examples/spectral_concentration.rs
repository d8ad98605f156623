//! Residuals of quasi-free eigenvectors under H/J and pinned eigenvalue counts.
//!
//! cargo run --release --example spectral_concentration

use xxzlab::harness::{concentration_csv, default_schedule, spectral_concentration_check, ConcentrationLevel};
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    let p = make_params(2, 1.25, 0.5, Window::symmetric(2)?)?;
    for level in [ConcentrationLevel::Vacuum, ConcentrationLevel::OneParticle(1), ConcentrationLevel::OneParticle(2)] {
        let rep = spectral_concentration_check(&p, level, &default_schedule(&[4, 8, 16, 32], 1.5))?;
        println!("{level:?}: E = {:.6}, full residual exponent {:.3}", rep.energy, rep.exponent_full);
        print!("{}", concentration_csv(&rep).render());
    }
    Ok(())
}
