//! Grand-canonical ground states as products of coherent states, the overlap
//! estimate for growing windows and the phase rotation identity.
//!
//! cargo run --example coherent_states

use xxzlab::coherent::{energy_residual, grand_canonical_vector, overlap_decay_check, phase_rotation_check, C64};
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    let p = make_params(2, 1.25, 0.5, Window::new(-1, 2)?)?;
    for phi in [0.0, 0.7, 2.0] {
        let z = C64::from_polar(p.q.powf(p.r), -phi);
        let psi = grand_canonical_vector(&p, z)?;
        println!("phi = {phi}: |H Psi(z)| = {:.2e}, phase rotation error {:.2e}", energy_residual(&p, &psi)?, phase_rotation_check(&p, phi)?);
    }
    for (a_n, a_m) in [(1, 2), (2, 4), (3, 8)] {
        let o = overlap_decay_check(&p, a_n, a_m)?;
        println!("windows {a_n} -> {a_m}: distance² {:.3e} <= {:.3e}: {}", o.lhs_sq, o.bound, o.holds);
    }
    Ok(())
}
