// Class numbers, regulators and the class number formula for a few
// quadratic fields.

use lmp::fields::{field_invariants, fundamental_unit, reduced_definite_forms};
use lmp::{Error, Result};

pub fn run_example() -> Result<()> {
    for d in [-3, -4, -23, -163, 5, 13, 229] {
        let inv = field_invariants(d)?;
        println!(
            "D = {d:>4}: h = {}, w = {}, R = {:.10}, L(1,χ) = {}",
            inv.h, inv.w, inv.regulator_eff().value, inv.l1
        );
    }
    let forms = reduced_definite_forms(-23);
    if forms.len() != 3 {
        return Err(Error::Consistency(format!("h(-23) = {}", forms.len())));
    }
    let eps = fundamental_unit(229);
    println!("ε(229) = ({} + {}√229)/2, norm {}", eps.x, eps.y, eps.norm);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
