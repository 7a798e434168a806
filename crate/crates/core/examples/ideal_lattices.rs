// Ideals as Euclidean lattices: first minima and ball counts against the
// norm-based bounds.

use lmp::lattices::{check_point_count_bounds, count_ball, first_minimum, IdealLattice};
use lmp::{Error, Result};

pub fn run_example() -> Result<()> {
    let lattices = [
        IdealLattice::ring_of_integers(-4, 1.0),
        IdealLattice::ring_of_integers(5, 1.0),
        IdealLattice::split_prime(-7, 2, vec![1.0])?,
        IdealLattice::split_prime(13, 3, vec![0.5, 2.0])?,
    ];
    for lat in &lattices {
        let lam = first_minimum(lat)?;
        println!(
            "D = {:>3}, N(a) = {}, |a| = {}: λ₁ = {lam}, #B(2) = {}",
            lat.disc,
            lat.ideal_norm,
            lat.idele_norm(),
            count_ball(lat, 2.0)
        );
        for r in check_point_count_bounds(lat, 2.0)? {
            if r.is_failure() {
                return Err(Error::Consistency(r.to_string()));
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
