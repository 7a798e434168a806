// Reading a JSON-lines table of externally computed number fields.

use lmp::io_cli::{ingest_field_table, ingest_reader};
use lmp::{Error, Result};

pub fn run_example() -> Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/quartic_fields.jsonl");
    let table = ingest_field_table(path)?;
    for f in &table.fields {
        let q = f.to_quartic().expect("quartic");
        println!("{} ({}): res ζ = {}", f.label, f.source, q.residue());
    }
    let bad = r#"{"label":"x","degree":3,"disc":-23,"signature":[1,1],"h":1,"R":0.28,"w":2}
{"label":"y","degree":5,"disc":-23,"signature":[1,1],"h":1,"R":0.28,"w":2}
"#;
    let rep = ingest_reader(bad.as_bytes())?;
    println!("accepted {}, rejected {:?}", rep.fields.len(), rep.rejected);
    if rep.fields.len() != 1 || rep.rejected.len() != 1 {
        return Err(Error::Consistency("ingestion gate".into()));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
