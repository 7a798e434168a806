// Regular elliptic contributions, with the residue of `ζ_{F(γ)}` taken from
// an ingested table of quartic fields and cross-checked against the product
// of the quadratic `L(1, χ)` values.

use lmp::bt_orbital::global_elliptic_bound;
use lmp::fields::field_invariants;
use lmp::io_cli::ingest_field_table;
use lmp::sigma::PolynomialClass;
use lmp::{Error, GroupKind, Result};

pub fn run_example() -> Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/quartic_fields.jsonl");
    let table = ingest_field_table(path)?.quartics();
    let gaussian = field_invariants(-4)?;
    // X² − X + 1 generates ℚ(i, ζ₃) over ℚ(i)
    let gamma = PolynomialClass::rational(-1, 1);
    let q = table.iter().find(|q| q.disc == 144);
    for g in GroupKind::all() {
        let r = global_elliptic_bound(&gaussian, g, &gamma, q, 1000)?;
        println!("{r}");
        if r.is_failure() {
            return Err(Error::Consistency(r.to_string()));
        }
    }
    // without an exact residue the bound-only path is used
    let r = global_elliptic_bound(&field_invariants(-7)?, GroupKind::SL2, &gamma, None, 0)?;
    println!("{r}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
