//! Spin gap over J in the kink sector against the Jacobi gap on the same window.
//!
//! cargo run --release --example gap_trend

use xxzlab::harness::{conjecture_csv, conjecture_trend, trend_verdict, MRule};
use xxzlab::{make_params, Window};

fn main() -> xxzlab::Result<()> {
    let p = make_params(1, 1.25, 0.5, Window::new(-2, 3)?)?;
    let rows = conjecture_trend(&p, &[1, 2, 3, 4, 5], MRule::Pinned)?;
    print!("{}", conjecture_csv(&rows).render());
    println!("{:?}", trend_verdict(&rows, 0.05));
    Ok(())
}
