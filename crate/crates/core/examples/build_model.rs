//! Builds RCP(3;1), prints its partition sizes and Anne's information set at
//! the actual deal, then dumps a small instance as JSON.

use delcards::cards::{anne, bill, cath};
use delcards::{build_rcp, Deal, Hand};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = build_rcp(3, 1, None)?;
    let m = &inst.model;
    println!("RCP(3;1): {} worlds, actual deal {}", m.len(), inst.actual);
    for x in [anne(), bill(), cath()] {
        let p = m.partition_of(&x)?;
        println!("  {x}: {} blocks of size {}", p.len(), p[0].len());
    }
    let block = m.component_of(&anne(), &inst.actual)?;
    println!("a cannot tell apart: {}", block.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", "));

    let deal = Deal { a: Hand::new(vec![2])?, b: Hand::new(vec![0])?, c: Hand::new(vec![1])? };
    let small = build_rcp(1, 1, Some(deal))?;
    println!("{}", serde_json::to_string_pretty(&small.model)?);
    Ok(())
}
