// Counting the vertices of the Bruhat–Tits tree fixed by an elliptic
// element and comparing with the closed-form orbital integral.

use lmp::bt_orbital::{count_fixed_vertices, fixed_subtree_dot, orbital_oracle, EllipticElement, FixedCount};
use lmp::{Error, Result};

pub fn run_example() -> Result<()> {
    for p in [2, 3, 5] {
        for d in 0..3 {
            for r in orbital_oracle(p, d, false, 3)? {
                println!("{r}");
                if r.is_failure() {
                    return Err(Error::Consistency(r.to_string()));
                }
            }
        }
    }
    // X² + 1 is unramified at 3 with trivial conductor: only the root is fixed
    let i = EllipticElement::companion(0, 1);
    if count_fixed_vertices(&i, 3, 3)? != FixedCount::Finite(1) {
        return Err(Error::Consistency("X² + 1 at p = 3".into()));
    }
    let conj = i.conjugate([[1, 3], [0, 1]])?;
    println!("{}", fixed_subtree_dot(&conj, 3, 2)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
