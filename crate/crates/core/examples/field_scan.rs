// A small scan over imaginary quadratic fields, written as CSV to stdout.

use lmp::fields::Signature;
use lmp::io_cli::{run_scan, ScanConfig};
use lmp::{GroupKind, Result};

pub fn run_example() -> Result<()> {
    let mut cfg = ScanConfig::new(GroupKind::SL2, Signature::IMAGINARY_QUADRATIC, -200, -50);
    cfg.radius = 3.0;
    let outcome = run_scan(&cfg)?;
    let s = &outcome.summary;
    println!(
        "{} fields, {} reports, {} failing, C = {:?}, fit = {:?}",
        s.fields,
        outcome.reports.len(),
        s.failures,
        s.constant,
        s.decay_fit
    );
    for r in outcome.reports.iter().filter(|r| r.is_failure()) {
        println!("  {r}");
    }
    outcome.write_csv(std::io::sink())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
