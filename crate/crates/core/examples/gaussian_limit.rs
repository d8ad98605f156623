//! Characteristic functions of fluctuation operators approach a Gaussian as J grows.
//!
//! cargo run --example gaussian_limit

use xxzlab::coherent::{clt_csv, clt_sweep};
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    let p = make_params(1, 1.25, 0.5, Window::new(-1, 1)?)?;
    let fields = vec![vec![(0, [1.0, 0.5, 0.7])], vec![(-1, [0.4, 0.0, 0.2]), (1, [0.0, 0.6, -0.3])]];
    let rows = clt_sweep(&p, &[1, 4, 16, 64, 256], &fields)?;
    print!("{}", clt_csv(&rows).render());
    Ok(())
}
