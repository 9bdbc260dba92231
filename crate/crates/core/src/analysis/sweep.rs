use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::ToPrimitive;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::cards::{anne, binomial, hand_announcement, Hand, RcpInstance};
use crate::formula::Evaluator;
use crate::kripke::ActionId;
use crate::update::{labelled_announcement, product_update};

/// Which single announcements to try: every hand set containing the actual
/// hand plus at most `exhaustive_max_extra` others, and `samples` random
/// larger sets drawn with `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub exhaustive_max_extra: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpossibilityReport {
    pub k: u32,
    pub l: u32,
    pub spec: SweepSpec,
    pub exhaustive_candidates: usize,
    pub sampled_candidates: usize,
    pub candidates: usize,
    /// `C(k+l, k)`: the size of Anne's information set before any announcement.
    pub expected_component_size: usize,
    /// Histogram of Anne's post-announcement component size at `w*`.
    pub component_sizes: BTreeMap<usize, usize>,
    /// Candidates after which Anne knew the deal.
    pub a_knows_deal: usize,
    pub violations: usize,
    /// Up to ten violating hand sets, canonically ordered.
    pub violation_examples: Vec<Vec<Hand>>,
}

impl ImpossibilityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// The hand sets a sweep with `spec` tries, in order: exhaustive ones first,
/// then the seeded samples. Returns the list and the exhaustive count.
pub fn sweep_candidates(inst: &RcpInstance, spec: SweepSpec) -> (Vec<Vec<Hand>>, usize) {
    let actual_hand = inst.actual_deal.a.clone();
    let others: Vec<Hand> = inst.all_hands().into_iter().filter(|h| *h != actual_hand).collect();

    let mut candidates: Vec<Vec<Hand>> = Vec::new();
    for extra in 0..=spec.exhaustive_max_extra.min(others.len()) {
        for combo in others.iter().combinations(extra) {
            let mut set = vec![actual_hand.clone()];
            set.extend(combo.into_iter().cloned());
            candidates.push(set);
        }
    }
    let exhaustive = candidates.len();

    let min_extra = spec.exhaustive_max_extra + 1;
    if min_extra <= others.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for _ in 0..spec.samples {
            let extra = rng.gen_range(min_extra..=others.len());
            let mut picks = index::sample(&mut rng, others.len(), extra).into_vec();
            picks.sort_unstable();
            let mut set = vec![actual_hand.clone()];
            set.extend(picks.into_iter().map(|i| others[i].clone()));
            candidates.push(set);
        }
    }
    (candidates, exhaustive)
}

/// Executes every candidate single announcement by `a` and records whether
/// Anne's information set at `w*` still has all `C(k+l,k)` deals.
pub fn single_announcement_sweep(inst: &RcpInstance, spec: SweepSpec) -> Result<ImpossibilityReport, AnalysisError> {
    let a = anne();
    let (candidates, exhaustive_candidates) = sweep_candidates(inst, spec);
    let sampled_candidates = candidates.len() - exhaustive_candidates;

    let expected = binomial((inst.k + inst.l) as u64, inst.k as u64).to_usize().expect("component size fits in memory");
    let goal = inst.knows_deal(&a);
    let a_ix = inst.model.require_agent(&a)?;
    let label = ActionId::new("alpha")?;
    let actual = inst.actual.extended(&label);

    let outcomes: Vec<(usize, bool)> = candidates
        .par_iter()
        .map(|hands| -> Result<(usize, bool), AnalysisError> {
            let f = hand_announcement(&a, hands)?;
            let m = product_update(&inst.model, &labelled_announcement(f, label.clone()))?;
            let w = m.index_of(&actual).ok_or_else(|| AnalysisError::ActualEliminated(actual.to_string()))?;
            let bases: BTreeSet<&str> = m.component(a_ix, w).iter().map(|&v| m.world(v).base()).collect();
            let knows = Evaluator::new(&m, &goal)?.at(w);
            Ok((bases.len(), knows))
        })
        .collect::<Result<_, _>>()?;

    let mut component_sizes = BTreeMap::new();
    let mut a_knows_deal = 0;
    let mut bad: Vec<Vec<Hand>> = Vec::new();
    for (hands, &(size, knows)) in candidates.iter().zip(&outcomes) {
        *component_sizes.entry(size).or_insert(0) += 1;
        a_knows_deal += knows as usize;
        if size != expected || knows {
            bad.push(hands.clone());
        }
    }
    bad.sort();
    let violations = bad.len();
    bad.truncate(10);

    Ok(ImpossibilityReport {
        k: inst.k,
        l: inst.l,
        spec,
        exhaustive_candidates,
        sampled_candidates,
        candidates: candidates.len(),
        expected_component_size: expected,
        component_sizes,
        a_knows_deal,
        violations,
        violation_examples: bad,
    })
}
