// The finite set of characteristic polynomials that can meet the support
// of a test function of radius `R`, and its classification over a field.

use lmp::fields::{field_invariants, Signature};
use lmp::sigma::{classify_all, d0_threshold, enum_integers_in_ball, sigma0_set, verify_inclusion, ClassKind};
use lmp::{Error, GroupKind, Result};

pub fn run_example() -> Result<()> {
    let r = 2.0;
    let sig = Signature::IMAGINARY_QUADRATIC;
    let ball = enum_integers_in_ball(d0_threshold(r), r, sig)?;
    println!("{} integers of norm ≤ {r} in fields with |D| ≤ {}", ball.len(), d0_threshold(r));
    let set = sigma0_set(r, GroupKind::SL2, sig)?;
    println!("Σ₀ has {} classes", set.len());
    for d in [-3, -4, -7, -23] {
        let inv = field_invariants(d)?;
        let classes = classify_all(&inv, &set);
        let count = |k: ClassKind| classes.iter().filter(|(_, c)| *c == k).count();
        println!(
            "D = {d:>3}: {} elliptic, {} split, {} unipotent",
            count(ClassKind::RegEll),
            count(ClassKind::RegSplit),
            count(ClassKind::Unip)
        );
        let rep = verify_inclusion(&inv, r, d0_threshold(r))?;
        if rep.is_failure() {
            return Err(Error::Consistency(rep.to_string()));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
