//! Follows a pair of deals Bill cannot tell apart through Anne's announcement
//! and a sampled reply by Bill, then sweeps many seeds.
//!
//! ```bash
//! cargo run --release --example two_announcement_trace -- 20 7
//! ```

use delcards::analysis::{random_valid_announcement, two_announcement_sweep, two_announcement_trace};
use delcards::build_rcp;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let samples: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let inst = build_rcp(2, 12, None)?;
    let first = random_valid_announcement(&inst, &mut ChaCha8Rng::seed_from_u64(seed));
    let t = two_announcement_trace(&inst, &first, seed)?;
    println!("first announcement: {} hands; reply with {} actions", t.first_hands.len(), t.reply_actions);
    println!("worlds: {:?}", t.models.iter().map(|m| m.worlds).collect::<Vec<_>>());
    if let Some(p) = &t.pair {
        println!("pair {} / {}: intact {:?}, b knows at s1 {:?}", p.s1, p.s2, t.pair_intact, t.b_knows_deal_at_s1);
    }

    let sweep = two_announcement_sweep(&inst, None, samples, seed)?;
    println!("{}/{} traces keep b ignorant at a surviving pair", sweep.holding, sweep.samples);
    Ok(())
}
