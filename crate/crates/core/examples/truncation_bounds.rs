// Bounds on the non-central geometric terms and the continuous spectrum
// for one field at the least regular truncation parameter.

use lmp::bounds::{geometric_terms, spectral_remainder_bound, truncation_threshold, BoundContext};
use lmp::fields::field_invariants;
use lmp::{Error, GroupKind, Result};

pub fn run_example() -> Result<()> {
    let rho = 8.0;
    for d in [-1003, 229] {
        let inv = field_invariants(d)?;
        let ctx = BoundContext::new(GroupKind::SL2, inv.signature, 3.0)?;
        let t = truncation_threshold(&inv, rho)?;
        let terms = geometric_terms(&inv, t, rho, &ctx)?;
        println!("D = {d}: ϖ(T) = {:.4}, geometric total = {}", t.varpi, terms.total());
        for r in &terms.reports {
            println!("  {r}");
            if r.is_failure() {
                return Err(Error::Consistency(r.to_string()));
            }
        }
        println!("  {}", spectral_remainder_bound(&inv, GroupKind::SL2));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
