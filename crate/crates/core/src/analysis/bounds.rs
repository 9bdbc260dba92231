use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::cards::binomial;

/// Both sides of `⌈(2k+l)/k⌉ · C(k+l,k) > C(2k+l,k)`, in exact integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityWitness {
    pub k: u64,
    pub l: u64,
    #[serde(serialize_with = "decimal")]
    pub lhs: BigUint,
    #[serde(serialize_with = "decimal")]
    pub rhs: BigUint,
    pub holds: bool,
}

fn decimal<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(n)
}

/// Smallest integer `l` with `l ≥ 2k²/ln k`, for `k ≥ 2`.
///
/// If the float result lands within 1e-9 (relative) of an integer boundary
/// the answer is bumped by one, so the returned `l` never undershoots.
pub fn threshold_l(k: u64) -> u64 {
    assert!(k >= 2, "threshold is defined for k >= 2");
    let bound = 2.0 * (k as f64).powi(2) / (k as f64).ln();
    let l = bound.ceil();
    if (l - bound) <= 1e-9 * bound {
        l as u64 + 1
    } else {
        l as u64
    }
}

/// Evaluates the counting inequality at `(k, l)`; `l` defaults to
/// [`threshold_l`]`(k)`.
pub fn inequality_check(k: u64, l: Option<u64>) -> InequalityWitness {
    assert!(k >= 1, "k must be positive");
    let l = l.unwrap_or_else(|| threshold_l(k));
    let groups = (2 * k + l).div_ceil(k);
    let lhs = BigUint::from(groups) * binomial(k + l, k);
    let rhs = binomial(2 * k + l, k);
    let holds = lhs > rhs;
    InequalityWitness { k, l, lhs, rhs, holds }
}
