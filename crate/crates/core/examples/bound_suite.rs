//! Randomised checks of the kinematical, dynamical and transition bounds.
//!
//! cargo run --release --example bound_suite

use xxzlab::harness::{default_bound_suite, SuiteSummary};

fn main() -> xxzlab::Result<()> {
    let reports = default_bound_suite()?;
    for name in ["kin_lower", "kin_upper", "kin_minus_quasi_free", "dyn_norm", "tran_norm"] {
        let subset: Vec<_> = reports.iter().filter(|r| r.bound == name).cloned().collect();
        println!("{}", SuiteSummary::from_reports(name, &subset).to_json());
    }
    println!("{}", SuiteSummary::from_reports("all", &reports).to_json());
    Ok(())
}
