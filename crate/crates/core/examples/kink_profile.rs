//! Classical kink angles, the one-sided wells and the angle identities.
//!
//! cargo run --example kink_profile

use xxzlab::{check_angle_identities, kink_profile, make_params, Window};

fn main() -> xxzlab::Result<()> {
    let p = make_params(2, 1.25, 0.5, Window::symmetric(4)?)?;
    println!("q = {:.6}, eta = {:.6}, mu = {:.6}", p.q, p.eta, p.mu());
    let prof = kink_profile(&p);
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}", "x", "cos", "sin", "eps", "gamma");
    for (i, x) in prof.window.sites().enumerate() {
        let gamma = prof.gamma_bond.get(i).copied().unwrap_or(f64::NAN);
        println!("{x:>3} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", prof.cos_theta[i], prof.sin_theta[i], prof.eps[i], gamma);
    }
    let worst = (p.window.a + 1..p.window.b).map(|x| check_angle_identities(&p, x).map(|r| r.max())).collect::<Result<Vec<_>, _>>()?;
    println!("largest identity residual: {:.2e}", worst.into_iter().fold(0.0, f64::max));
    Ok(())
}
