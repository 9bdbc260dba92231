//! Evaluates formulas at a world, and as a whole extension, in RCP(3;1).

use delcards::build_rcp;
use delcards::formula::{eval, extension, parse};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = build_rcp(3, 1, None)?;
    let m = &inst.model;
    let w = &inst.actual;
    for text in [
        "has(a,0)",
        "K[a] has(a,0)",
        "K[a] has(b,3)",
        "K[a] ~has(c,0)",
        "K[c] (has(a,0) | has(b,0))",
        "K[b] K[a] has(a,0) -> has(a,0)",
    ] {
        let f = parse(text)?;
        let holds = eval(m, w, &f)?;
        let count = extension(m, &f)?.into_iter().filter(|&b| b).count();
        println!("{:<40} at {w}: {holds:<5}  true in {count}/{} worlds", f.to_string(), m.len());
    }

    let goal = inst.knows_deal(&delcards::cards::anne());
    println!("a knows the deal at w*: {}", eval(m, w, &goal)?);

    match parse("K[a] (has(a,0) &") {
        Ok(_) => unreachable!(),
        Err(e) => println!("parse error: {e}"),
    }
    Ok(())
}
