//! The counting inequality ⌈(2k+l)/k⌉·C(k+l,k) > C(2k+l,k) at the threshold
//! l = ⌈2k²/ln k⌉, and below it.

use delcards::analysis::{inequality_check, threshold_l};

fn main() {
    println!("{:>3} {:>5} {:>24} {:>24}  holds", "k", "l", "lhs", "rhs");
    for k in 2..=12 {
        let w = inequality_check(k, None);
        println!("{:>3} {:>5} {:>24} {:>24}  {}", w.k, w.l, w.lhs, w.rhs, w.holds);
    }
    for k in [2, 3, 5] {
        let first_fail = (1..threshold_l(k)).rev().find(|&l| !inequality_check(k, Some(l)).holds);
        println!("k={k}: largest failing l below the threshold: {first_fail:?}");
    }
}
