// Certified values of `L(1, χ_D)`, `L(2, χ_D)` and `ζ_F(2)`, with the
// Euler product as an independent enclosure.

use lmp::lfun::{dirichlet_l, euler_product_l2, l_at_one, zeta_f_at_2, DEFAULT_TOL};
use lmp::{Error, Result};

pub fn run_example() -> Result<()> {
    for d in [-4, -3, 5, 8, -1003, 99993] {
        let l1 = l_at_one(d)?;
        let l2 = dirichlet_l(d, 2.0, DEFAULT_TOL)?;
        let z = zeta_f_at_2(d, DEFAULT_TOL)?;
        println!("D = {d:>6}: L(1) = {l1}, L(2) = {l2}, ζ_F(2) = {z}");
        let euler = euler_product_l2(d, 10_000)?;
        if !euler.overlaps(&l2) {
            return Err(Error::Consistency(format!("Euler product {euler} misses {l2}")));
        }
    }
    // Catalan's constant
    let g = dirichlet_l(-4, 2.0, 1e-12)?;
    if !g.contains(0.915_965_594_177_219) {
        return Err(Error::Consistency(format!("L(2, χ₋₄) = {g}")));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
