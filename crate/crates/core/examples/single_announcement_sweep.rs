//! No single announcement by Anne lets her learn the deal: every candidate
//! leaves her information set at w* with all of its original deals.
//!
//! ```bash
//! cargo run --release --example single_announcement_sweep -- 3 1 3 10000 0
//! ```

use delcards::analysis::{single_announcement_sweep, SweepSpec};
use delcards::build_rcp;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let arg = |i: usize, d: u64| args.get(i).copied().unwrap_or(d);
    let (k, l) = (arg(0, 3) as u32, arg(1, 1) as u32);
    let spec = SweepSpec { exhaustive_max_extra: arg(2, 2) as usize, samples: arg(3, 1000) as usize, seed: arg(4, 0) };

    let inst = build_rcp(k, l, None)?;
    let r = single_announcement_sweep(&inst, spec)?;
    println!("RCP({k};{l}): {} exhaustive + {} sampled candidates", r.exhaustive_candidates, r.sampled_candidates);
    println!("a's component size at w*: {:?} (expected {})", r.component_sizes, r.expected_component_size);
    println!("violations: {}", r.violations);
    Ok(())
}
