//! Runs and verifies the two-step Fano protocol for RCP(3;1), first through
//! the library and then from the bundled protocol file.

use delcards::analysis::{verify_protocol, Protocol, ProtocolDoc};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fano.json");
    let doc: ProtocolDoc = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let p = Protocol::from_doc(&doc)?;
    let inst = p.instance()?;

    let (run, report) = verify_protocol(&inst, &p, true)?;
    for s in &run.steps {
        println!("step {} by {}: {} worlds, blocks {}", s.step, s.by, s.worlds, serde_json::to_string(&s.blocks)?);
        println!("  {}", s.formula);
    }
    println!("actual world now {}", run.actual);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
