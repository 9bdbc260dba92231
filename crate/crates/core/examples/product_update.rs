//! Product update with a public announcement and with a semi-private action:
//! Anne looks at whether she holds card 0, the others only see her look.

use std::collections::BTreeMap;

use delcards::cards::{anne, bill, cath};
use delcards::formula::{eval, parse};
use delcards::update::Action;
use delcards::{build_rcp, product_update, public_announcement, ActionId, ActionModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = build_rcp(1, 1, None)?;
    let m = &inst.model;
    println!("RCP(1;1): {} worlds", m.len());

    let ann = product_update(m, &public_announcement(parse("~has(c,0)")?))?;
    println!("after announcing ~has(c,0): {:?}", ann.worlds().iter().map(|w| w.to_string()).collect::<Vec<_>>());

    let yes = ActionId::new("yes")?;
    let no = ActionId::new("no")?;
    let look = ActionModel::new(
        vec![Action { id: yes.clone(), pre: parse("has(b,1)")? }, Action { id: no.clone(), pre: parse("~has(b,1)")? }],
        BTreeMap::from([
            (anne(), vec![vec![yes.clone()], vec![no.clone()]]),
            (bill(), vec![vec![yes.clone(), no.clone()]]),
            (cath(), vec![vec![yes, no]]),
        ]),
    )?;
    let after = product_update(m, &look)?;
    println!("after a learns whether b holds 1: {} worlds", after.len());
    for w in after.worlds() {
        let knows = eval(&after, w, &parse("K[a] has(b,1) | K[a] ~has(b,1)")?)?;
        let c_knows = eval(&after, w, &parse("K[c] (K[a] has(b,1) | K[a] ~has(b,1))")?)?;
        println!("  {w:<14} a settled: {knows:<5} c knows a settled: {c_knows}");
    }
    Ok(())
}
