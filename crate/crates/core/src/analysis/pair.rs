//! Two-announcement traces: after any safe first announcement by `a`, find
//! two worlds Bill cannot tell apart and follow them through Bill's reply.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{inequality_check, lemma2_check, AnalysisError};
use crate::cards::{anne, bill, hand_announcement, Hand, RcpInstance};
use crate::formula::{Evaluator, Formula};
use crate::kripke::{ActionId, AgentId, KripkeModel, WorldId};
use crate::update::{labelled_announcement, product_update, Action, ActionModel};

/// Two distinct deals with the same Bill hand, both compatible with Anne's
/// announcement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub s1: WorldId,
    pub s2: WorldId,
    pub b_hand: Hand,
}

fn check_first(inst: &RcpInstance, hands: &[Hand]) -> Result<Formula, AnalysisError> {
    let f = inst.announcement(&anne(), hands)?;
    let report = lemma2_check(hands, &inst.universe());
    if !report.safe() {
        return Err(AnalysisError::InvalidAnnouncement(format!(
            "hands leak cards {:?} (covers: {}, empty intersection: {})",
            report.leaked_cards, report.covers, report.empty_intersection
        )));
    }
    Ok(f)
}

/// Searches `⋃_{A ∈ hands} T_A` in the initial model for two distinct worlds
/// in the same Bill component. Returns the least pair in world order.
pub fn find_b_indistinguishable_pair(inst: &RcpInstance, hands: &[Hand]) -> Result<Option<PairWitness>, AnalysisError> {
    check_first(inst, hands)?;
    let announced: BTreeSet<&Hand> = hands.iter().collect();
    let m = &inst.model;
    let b = m.require_agent(&bill())?;
    let selected: Vec<bool> =
        m.worlds().iter().map(|w| inst.deal_of(w).map(|d| announced.contains(&d.a))).collect::<Result<_, _>>()?;
    for s1 in (0..m.len()).filter(|&w| selected[w]) {
        if let Some(&s2) = m.component(b, s1).iter().find(|&&v| v > s1 && selected[v]) {
            let b_hand = inst.deal_of(m.world(s1))?.b;
            return Ok(Some(PairWitness { s1: m.world(s1).clone(), s2: m.world(s2).clone(), b_hand }));
        }
    }
    Ok(None)
}

/// A random announcement by `a` that contains her actual hand and meets the
/// cover and intersection conditions.
///
/// Her hand plus a random covering of the remaining cards by `k`-sets makes
/// it safe; a uniformly random number of further hands is then added.
pub fn random_valid_announcement(inst: &RcpInstance, rng: &mut impl Rng) -> Vec<Hand> {
    let k = inst.k as usize;
    let actual = inst.actual_deal.a.clone();
    let mut chosen: BTreeSet<Hand> = BTreeSet::from([actual.clone()]);
    let mut rest: Vec<u32> = inst.universe().into_iter().filter(|&c| !actual.contains(c)).collect();
    rest.shuffle(rng);
    for chunk in rest.chunks(k) {
        let mut cards = chunk.to_vec();
        while cards.len() < k {
            let c = rng.gen_range(0..inst.n_cards());
            if !cards.contains(&c) {
                cards.push(c);
            }
        }
        chosen.insert(Hand::new(cards).expect("distinct cards"));
    }
    let others: Vec<Hand> = inst.all_hands().into_iter().filter(|h| !chosen.contains(h)).collect();
    let extra = rng.gen_range(0..=others.len());
    for i in index::sample(rng, others.len(), extra) {
        chosen.insert(others[i].clone());
    }
    chosen.into_iter().collect()
}

/// A random deterministic reply strategy for Bill on `model`: his possible
/// hands are split into random groups and he announces the group containing
/// his hand. Every agent observes which announcement is made.
pub fn random_b_strategy(
    inst: &RcpInstance,
    model: &KripkeModel,
    rng: &mut impl Rng,
) -> Result<ActionModel, AnalysisError> {
    let b = model.require_agent(&bill())?;
    let hands: Vec<Hand> = model
        .partition(b)
        .blocks()
        .iter()
        .map(|block| inst.deal_of(model.world(block[0])).map(|d| d.b))
        .collect::<Result<BTreeSet<_>, _>>()?
        .into_iter()
        .collect();
    if hands.is_empty() {
        return Err(AnalysisError::InvalidAnnouncement("no world left for Bill to reply in".into()));
    }
    let groups = rng.gen_range(1..=hands.len());
    let mut assigned: BTreeMap<usize, Vec<Hand>> = BTreeMap::new();
    for h in hands {
        assigned.entry(rng.gen_range(0..groups)).or_default().push(h);
    }
    let actions = assigned
        .into_values()
        .enumerate()
        .map(|(j, group)| {
            Ok(Action { id: ActionId::new(format!("beta{j}"))?, pre: hand_announcement(&bill(), &group)? })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(ActionModel::public(actions)?)
}

/// True when every world of each `agent` component satisfies the same
/// action preconditions, i.e. the agent's move is determined by what it knows.
pub fn uniform_on_components(model: &KripkeModel, agent: &AgentId, mu: &ActionModel) -> Result<bool, AnalysisError> {
    let x = model.require_agent(agent)?;
    let exts: Vec<Vec<bool>> =
        mu.actions().iter().map(|a| crate::formula::extension(model, &a.pre)).collect::<Result<_, _>>()?;
    Ok(model.partition(x).blocks().iter().all(|block| exts.iter().all(|e| block.iter().all(|&w| e[w] == e[block[0]]))))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    pub worlds: usize,
    pub blocks: BTreeMap<AgentId, usize>,
}

impl ModelStats {
    fn of(m: &KripkeModel) -> Self {
        ModelStats {
            worlds: m.len(),
            blocks: m.agents().iter().enumerate().map(|(x, a)| (a.clone(), m.partition(x).len())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceReport {
    pub k: u32,
    pub l: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub first_hands: Vec<Hand>,
    /// Whether the counting inequality holds at `(k, l)`.
    pub inequality_holds: bool,
    /// Whether a Bill-indistinguishable pair exists after the first announcement.
    pub hypothesis_met: bool,
    pub pair: Option<PairWitness>,
    /// Initial model, after `a`'s announcement, after `b`'s reply.
    pub models: Vec<ModelStats>,
    pub reply_actions: usize,
    pub reply_uniform_for_b: bool,
    pub pair_intact: Option<bool>,
    pub b_knows_deal_at_s1: Option<bool>,
    pub b_knows_deal_at_s2: Option<bool>,
    /// Goal at the surviving copy of `w*`, if it survived both steps.
    pub b_knows_deal_at_actual: Option<bool>,
    /// The pair survives, stays Bill-related, and Bill does not know the deal at `s1`.
    pub holds: bool,
}

/// Runs `a`'s announcement `first`, then `reply`, and follows the least
/// Bill-indistinguishable pair through both updates.
pub fn two_announcement_trace_with(
    inst: &RcpInstance,
    first: &[Hand],
    reply: &ActionModel,
) -> Result<TraceReport, AnalysisError> {
    let f = check_first(inst, first)?;
    let alpha = ActionId::new("alpha")?;
    let m1 = &inst.model;
    let m2 = product_update(m1, &labelled_announcement(f, alpha))?;
    let m3 = product_update(&m2, reply)?;
    let pair = find_b_indistinguishable_pair(inst, first)?;
    let b = bill();
    let bx = m3.require_agent(&b)?;
    let goal = inst.knows_deal(&b);
    let mut knows = Evaluator::new(&m3, &goal)?;

    let (mut pair_intact, mut at_s1, mut at_s2) = (None, None, None);
    if let Some(p) = &pair {
        let d1 = m3.find_latest(p.s1.base());
        let d2 = m3.find_latest(p.s2.base());
        pair_intact = Some(match (d1, d2) {
            (Some(x), Some(y)) => m3.partition(bx).block_of(x) == m3.partition(bx).block_of(y),
            _ => false,
        });
        at_s1 = d1.map(|w| knows.at(w));
        at_s2 = d2.map(|w| knows.at(w));
    }
    let at_actual = m3.find_latest(inst.actual.base()).map(|w| knows.at(w));
    let holds = pair_intact == Some(true) && at_s1 == Some(false);

    Ok(TraceReport {
        k: inst.k,
        l: inst.l,
        seed: None,
        first_hands: first.to_vec(),
        inequality_holds: inequality_check(inst.k as u64, Some(inst.l as u64)).holds,
        hypothesis_met: pair.is_some(),
        pair,
        models: vec![ModelStats::of(m1), ModelStats::of(&m2), ModelStats::of(&m3)],
        reply_actions: reply.actions().len(),
        reply_uniform_for_b: uniform_on_components(&m2, &b, reply)?,
        pair_intact,
        b_knows_deal_at_s1: at_s1,
        b_knows_deal_at_s2: at_s2,
        b_knows_deal_at_actual: at_actual,
        holds,
    })
}

/// [`two_announcement_trace_with`] using a Bill strategy sampled from `seed`.
pub fn two_announcement_trace(inst: &RcpInstance, first: &[Hand], seed: u64) -> Result<TraceReport, AnalysisError> {
    let f = check_first(inst, first)?;
    let m2 = product_update(&inst.model, &labelled_announcement(f, ActionId::new("alpha")?))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reply = random_b_strategy(inst, &m2, &mut rng)?;
    let mut report = two_announcement_trace_with(inst, first, &reply)?;
    report.seed = Some(seed);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceSweepReport {
    pub k: u32,
    pub l: u32,
    pub samples: usize,
    pub seed: u64,
    pub holding: usize,
    pub hypothesis_unmet: usize,
    /// Per-trace seeds of traces that did not hold.
    pub failing_seeds: Vec<u64>,
    pub passed: bool,
    pub traces: Vec<TraceReport>,
}

/// Runs `samples` traces. Each draws its own seed from `seed`; the trace seed
/// picks Bill's strategy and, when `first` is `None`, Anne's announcement.
pub fn two_announcement_sweep(
    inst: &RcpInstance,
    first: Option<&[Hand]>,
    samples: usize,
    seed: u64,
) -> Result<TraceSweepReport, AnalysisError> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..samples).map(|_| master.gen()).collect();
    let traces: Vec<TraceReport> = seeds
        .par_iter()
        .map(|&s| {
            let hands = match first {
                Some(h) => h.to_vec(),
                None => random_valid_announcement(inst, &mut ChaCha8Rng::seed_from_u64(s ^ 0x5eed)),
            };
            two_announcement_trace(inst, &hands, s)
        })
        .collect::<Result<_, _>>()?;
    let holding = traces.iter().filter(|t| t.holds).count();
    let hypothesis_unmet = traces.iter().filter(|t| !t.hypothesis_met).count();
    let failing_seeds = traces.iter().filter(|t| !t.holds).filter_map(|t| t.seed).collect();
    Ok(TraceSweepReport {
        k: inst.k,
        l: inst.l,
        samples,
        seed,
        holding,
        hypothesis_unmet,
        failing_seeds,
        passed: samples > 0 && holding == samples,
        traces,
    })
}
