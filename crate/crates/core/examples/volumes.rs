// Quotient volumes, compact-subgroup volumes and the normalizing volume
// `ν_F`, with the quotient-measure inequalities.

use lmp::fields::field_invariants;
use lmp::volumes::{quot_meas_check, volume_pack};
use lmp::{Error, GroupKind, Result};

pub fn run_example() -> Result<()> {
    for d in [-4, -3, 5, -7, 12] {
        let inv = field_invariants(d)?;
        for g in GroupKind::all() {
            let v = volume_pack(g, &inv)?;
            println!("D = {d:>3} {g}: vol = {}, vol(K_f) = {}, ν = {}", v.vol_quotient, v.vol_kf, v.nu);
            for r in quot_meas_check(g, &inv) {
                if r.is_failure() {
                    return Err(Error::Consistency(r.to_string()));
                }
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
