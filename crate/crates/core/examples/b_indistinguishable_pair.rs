//! After any safe announcement by Anne in RCP(2;12), two deals with the same
//! hand for Bill survive. In RCP(3;1) the Fano announcement has no such pair.

use delcards::analysis::{find_b_indistinguishable_pair, random_valid_announcement};
use delcards::{build_rcp, Hand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = build_rcp(2, 12, None)?;
    for seed in 0..5 {
        let first = random_valid_announcement(&inst, &mut ChaCha8Rng::seed_from_u64(seed));
        match find_b_indistinguishable_pair(&inst, &first)? {
            Some(p) => println!("seed {seed}: {} hands; {} and {} share b-hand {}", first.len(), p.s1, p.s2, p.b_hand),
            None => println!("seed {seed}: {} hands; no pair", first.len()),
        }
    }

    let fano: Vec<Hand> = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]]
        .into_iter()
        .map(|h| Hand::new(h.to_vec()))
        .collect::<Result<_, _>>()?;
    let small = build_rcp(3, 1, None)?;
    println!("RCP(3;1) Fano: {:?}", find_b_indistinguishable_pair(&small, &fano)?);
    Ok(())
}
