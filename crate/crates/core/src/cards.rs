//! The `RCP(k;l)` card-deal problem: Anne (`a`) and Bill (`b`) hold `k`
//! cards each and Cath (`c`) holds `l`, from the pack `{0, ..., 2k+l-1}`.
//!
//! The initial model has one world per deal. Each player can tell two deals
//! apart exactly when their own hand differs.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::kripke::{AgentId, KripkeModel, ModelError, Proposition, WorldId};

pub type CardId = u32;

/// Default bound on the number of worlds [`build_rcp`] will generate.
pub const DEFAULT_WORLD_CAP: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RcpError {
    #[error("k and l must both be at least 1 (got k={k}, l={l})")]
    BadParameters { k: u32, l: u32 },
    #[error("RCP({k};{l}) has {worlds} worlds, above the cap of {cap}")]
    Capacity { k: u32, l: u32, worlds: String, cap: u64 },
    #[error("invalid deal: {0}")]
    InvalidDeal(String),
    #[error("invalid hand: {0}")]
    InvalidHand(String),
    #[error("announcement needs at least one hand")]
    EmptyAnnouncement,
    #[error("hands in an announcement by {agent} must have {expected} cards, found one with {found}")]
    RaggedHands { agent: AgentId, expected: usize, found: usize },
    #[error("{0} is not a player of this instance")]
    NotAPlayer(AgentId),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn anne() -> AgentId {
    AgentId::new("a").expect("valid name")
}

pub fn bill() -> AgentId {
    AgentId::new("b").expect("valid name")
}

pub fn cath() -> AgentId {
    AgentId::new("c").expect("valid name")
}

/// Exact binomial coefficient `C(n, r)`; zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::from(0u32);
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        // exact at every step: acc is C(n, i) before the update
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A set of cards, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<CardId>", into = "Vec<CardId>")]
pub struct Hand(Vec<CardId>);

impl Hand {
    pub fn new(mut cards: Vec<CardId>) -> Result<Self, RcpError> {
        cards.sort_unstable();
        if let Some(w) = cards.windows(2).find(|w| w[0] == w[1]) {
            return Err(RcpError::InvalidHand(format!("card {} listed twice", w[0])));
        }
        Ok(Hand(cards))
    }

    pub fn cards(&self) -> &[CardId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, card: CardId) -> bool {
        self.0.binary_search(&card).is_ok()
    }

    pub fn is_disjoint(&self, other: &Hand) -> bool {
        self.0.iter().all(|&c| !other.contains(c))
    }

    /// Text form inside a world id: digits run together when `compact`,
    /// comma-separated otherwise.
    fn render(&self, compact: bool) -> String {
        self.0.iter().map(|c| c.to_string()).join(if compact { "" } else { "," })
    }

    fn parse(text: &str, compact: bool) -> Result<Self, RcpError> {
        let bad = || RcpError::InvalidHand(text.to_string());
        let cards = if text.is_empty() {
            Vec::new()
        } else if compact && !text.contains(',') {
            text.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect::<Result<_, _>>()?
        } else {
            text.split(',').map(|c| c.trim().parse::<CardId>().map_err(|_| bad())).collect::<Result<_, _>>()?
        };
        Hand::new(cards)
    }
}

impl TryFrom<Vec<CardId>> for Hand {
    type Error = RcpError;
    fn try_from(v: Vec<CardId>) -> Result<Self, Self::Error> {
        Hand::new(v)
    }
}

impl From<Hand> for Vec<CardId> {
    fn from(h: Hand) -> Self {
        h.0
    }
}

impl fmt::Display for Hand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// A deal `(A, B, C)`; JSON form `{"a":[..],"b":[..],"c":[..]}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Deal {
    pub a: Hand,
    pub b: Hand,
    pub c: Hand,
}

impl Deal {
    /// Checks the deal is a partition of `{0..2k+l}` with sizes `k, k, l`.
    pub fn check(&self, k: u32, l: u32) -> Result<(), RcpError> {
        let (k, l) = (k as usize, l as usize);
        if self.a.len() != k || self.b.len() != k || self.c.len() != l {
            return Err(RcpError::InvalidDeal(format!(
                "hand sizes {}/{}/{} do not match k={k}, l={l}",
                self.a.len(),
                self.b.len(),
                self.c.len()
            )));
        }
        let mut all: Vec<CardId> = self.a.cards().iter().chain(self.b.cards()).chain(self.c.cards()).copied().collect();
        all.sort_unstable();
        if all != (0..(2 * k + l) as CardId).collect::<Vec<_>>() {
            return Err(RcpError::InvalidDeal(format!("hands must partition the cards 0..{}", 2 * k + l)));
        }
        Ok(())
    }

    /// The `a={0..k-1}, b={k..2k-1}, c={2k..2k+l-1}` deal.
    pub fn contiguous(k: u32, l: u32) -> Deal {
        let range = |lo: u32, hi: u32| Hand((lo..hi).collect());
        Deal { a: range(0, k), b: range(k, 2 * k), c: range(2 * k, 2 * k + l) }
    }

    pub fn hand_of(&self, agent: &AgentId) -> Option<&Hand> {
        match agent.as_str() {
            "a" => Some(&self.a),
            "b" => Some(&self.b),
            "c" => Some(&self.c),
            _ => None,
        }
    }

    /// Base world id `A|B|C`. With at most ten cards the digits are run
    /// together (`012|345|6`); otherwise cards are comma-separated.
    pub fn base_id(&self, n_cards: u32) -> String {
        let compact = n_cards <= 10;
        format!("{}|{}|{}", self.a.render(compact), self.b.render(compact), self.c.render(compact))
    }

    /// Inverse of [`Deal::base_id`]. In the compact form commas are accepted too.
    pub fn parse_base(text: &str, n_cards: u32) -> Result<Deal, RcpError> {
        let parts: Vec<&str> = text.split('|').collect();
        if parts.len() != 3 {
            return Err(RcpError::InvalidDeal(format!("expected A|B|C, got {text:?}")));
        }
        let compact = n_cards <= 10;
        Ok(Deal {
            a: Hand::parse(parts[0], compact)?,
            b: Hand::parse(parts[1], compact)?,
            c: Hand::parse(parts[2], compact)?,
        })
    }
}

/// A generated `RCP(k;l)` instance with its designated actual deal `w*`.
#[derive(Debug, Clone)]
pub struct RcpInstance {
    pub k: u32,
    pub l: u32,
    pub model: KripkeModel,
    pub actual: WorldId,
    pub actual_deal: Deal,
}

impl RcpInstance {
    pub fn n_cards(&self) -> u32 {
        2 * self.k + self.l
    }

    pub fn universe(&self) -> Vec<CardId> {
        (0..self.n_cards()).collect()
    }

    /// Hand size of a player, `None` for non-players.
    pub fn hand_size(&self, agent: &AgentId) -> Option<usize> {
        match agent.as_str() {
            "a" | "b" => Some(self.k as usize),
            "c" => Some(self.l as usize),
            _ => None,
        }
    }

    pub fn deal_of(&self, world: &WorldId) -> Result<Deal, RcpError> {
        Deal::parse_base(world.base(), self.n_cards())
    }

    /// Every possible hand of `a` (equivalently of `b`), in lexicographic order.
    pub fn all_hands(&self) -> Vec<Hand> {
        (0..self.n_cards()).combinations(self.k as usize).map(Hand).collect()
    }

    /// `hand_announcement` checked against this instance's hand sizes.
    pub fn announcement(&self, agent: &AgentId, hands: &[Hand]) -> Result<Formula, RcpError> {
        let size = self.hand_size(agent).ok_or_else(|| RcpError::NotAPlayer(agent.clone()))?;
        if let Some(h) = hands.iter().find(|h| h.len() != size) {
            return Err(RcpError::RaggedHands { agent: agent.clone(), expected: size, found: h.len() });
        }
        hand_announcement(agent, hands)
    }

    pub fn knows_deal(&self, agent: &AgentId) -> Formula {
        knows_deal(agent, &self.universe(), &[anne(), bill(), cath()])
    }

    pub fn ignorance_goal(&self) -> Formula {
        ignorance_goal(&self.universe(), &anne(), &bill(), &cath())
    }
}

/// Builds `RCP(k;l)` under [`DEFAULT_WORLD_CAP`].
pub fn build_rcp(k: u32, l: u32, deal: Option<Deal>) -> Result<RcpInstance, RcpError> {
    build_rcp_with_cap(k, l, deal, DEFAULT_WORLD_CAP)
}

/// Number of deals of `RCP(k;l)`: `C(2k+l, k) · C(k+l, k)`.
pub fn world_count(k: u32, l: u32) -> BigUint {
    let (k, l) = (k as u64, l as u64);
    binomial(2 * k + l, k) * binomial(k + l, k)
}

pub fn build_rcp_with_cap(k: u32, l: u32, deal: Option<Deal>, cap: u64) -> Result<RcpInstance, RcpError> {
    if k == 0 || l == 0 {
        return Err(RcpError::BadParameters { k, l });
    }
    let count = world_count(k, l);
    if count.to_u64().is_none_or(|c| c > cap) {
        return Err(RcpError::Capacity { k, l, worlds: count.to_string(), cap });
    }
    let actual_deal = deal.unwrap_or_else(|| Deal::contiguous(k, l));
    actual_deal.check(k, l)?;

    let n = 2 * k + l;
    let agents = vec![anne(), bill(), cath()];
    // props sorted by (agent, card): index = agent rank * n + card
    let props: Vec<Proposition> =
        agents.iter().flat_map(|x| (0..n).map(move |i| Proposition::new(x.clone(), i))).collect();

    let mut class_ids: [HashMap<Vec<CardId>, u64>; 3] = Default::default();
    let mut class = |slot: usize, cards: &[CardId]| -> u64 {
        let next = class_ids[slot].len() as u64;
        *class_ids[slot].entry(cards.to_vec()).or_insert(next)
    };

    let mut entries = Vec::with_capacity(count.to_usize().unwrap_or(0));
    for a in (0..n).combinations(k as usize) {
        let rest: Vec<CardId> = (0..n).filter(|c| !a.contains(c)).collect();
        for b in rest.iter().copied().combinations(k as usize) {
            let c: Vec<CardId> = rest.iter().copied().filter(|x| !b.contains(x)).collect();
            let mut val: Vec<u32> = a.to_vec();
            val.extend(b.iter().map(|&i| n + i));
            val.extend(c.iter().map(|&i| 2 * n + i));
            val.sort_unstable();
            let labels = vec![class(0, &a), class(1, &b), class(2, &c)];
            let deal = Deal { a: Hand(a.clone()), b: Hand(b), c: Hand(c) };
            entries.push((WorldId::new(deal.base_id(n))?, val, labels));
        }
    }
    let model = KripkeModel::assemble(agents, props, entries)?;
    let actual = WorldId::new(actual_deal.base_id(n))?;
    Ok(RcpInstance { k, l, model, actual, actual_deal })
}

/// `⋁_{H ∈ hands} ⋀_{i ∈ H} has(x,i)`: "my hand is one of these".
pub fn hand_announcement(agent: &AgentId, hands: &[Hand]) -> Result<Formula, RcpError> {
    let size = hands.first().ok_or(RcpError::EmptyAnnouncement)?.len();
    if let Some(h) = hands.iter().find(|h| h.len() != size) {
        return Err(RcpError::RaggedHands { agent: agent.clone(), expected: size, found: h.len() });
    }
    Ok(Formula::disjunction(
        hands.iter().map(|h| Formula::conjunction(h.cards().iter().map(|&i| Formula::atom(agent, i)))),
    ))
}

/// `⋀_{i ∈ U} ⋁_{y} K_x has(y,i)`: `x` can name the holder of every card.
pub fn knows_deal(x: &AgentId, universe: &[CardId], agents: &[AgentId]) -> Formula {
    Formula::conjunction(
        universe.iter().map(|&i| Formula::disjunction(agents.iter().map(|y| Formula::knows(x, Formula::atom(y, i))))),
    )
}

/// `⋀_{i ∈ U} (has(c,i) ∨ (¬K_c has(a,i) ∧ ¬K_c has(b,i)))`.
pub fn ignorance_goal(universe: &[CardId], a: &AgentId, b: &AgentId, c: &AgentId) -> Formula {
    Formula::conjunction(universe.iter().map(|&i| {
        Formula::or(
            Formula::atom(c, i),
            Formula::and(
                Formula::not(Formula::knows(c, Formula::atom(a, i))),
                Formula::not(Formula::knows(c, Formula::atom(b, i))),
            ),
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{eval, parse};

    fn factorial(n: u64) -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, i| acc * i)
    }

    #[test]
    fn binomial_against_factorial_ratio() {
        assert_eq!(binomial(7, 3), BigUint::from(35u32));
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::from(0u32));
        assert_eq!(binomial(23, 3), BigUint::from(1771u32));
        for n in 0..40u64 {
            for r in 0..=n {
                assert_eq!(binomial(n, r), factorial(n) / (factorial(r) * factorial(n - r)), "C({n},{r})");
            }
        }
    }

    #[test]
    fn binomial_is_exact_beyond_u64() {
        // C(100,50) = 100891344545564193334812497256
        assert_eq!(binomial(100, 50).to_string(), "100891344545564193334812497256");
    }

    #[test]
    fn rcp_1_1_matches_brute_force() {
        let inst = build_rcp(1, 1, None).unwrap();
        // deals of 3 cards into three singletons = 3! = 6
        assert_eq!(inst.model.len(), 6);
        assert_eq!(inst.actual.base(), "0|1|2");
    }

    #[test]
    fn rcp_2_12_size() {
        let inst = build_rcp(2, 12, None).unwrap();
        assert_eq!(inst.model.len(), 120 * 91);
        assert_eq!(inst.actual.base(), "0,1|2,3|4,5,6,7,8,9,10,11,12,13,14,15");
        assert_eq!(inst.deal_of(&inst.actual).unwrap(), inst.actual_deal);
    }

    #[test]
    fn parameters_and_caps() {
        assert!(matches!(build_rcp(0, 1, None), Err(RcpError::BadParameters { .. })));
        assert!(matches!(build_rcp_with_cap(3, 1, None, 100), Err(RcpError::Capacity { .. })));
        assert!(matches!(build_rcp(20, 20, None), Err(RcpError::Capacity { .. })));
        let bad = Deal { a: Hand(vec![0, 1, 2]), b: Hand(vec![2, 3, 4]), c: Hand(vec![6]) };
        assert!(matches!(build_rcp(3, 1, Some(bad)), Err(RcpError::InvalidDeal(_))));
    }

    #[test]
    fn custom_deal_becomes_actual_world() {
        let deal = Deal { a: Hand(vec![4, 5, 6]), b: Hand(vec![0, 1, 2]), c: Hand(vec![3]) };
        let inst = build_rcp(3, 1, Some(deal)).unwrap();
        assert_eq!(inst.actual.base(), "456|012|3");
        assert!(inst.model.index_of(&inst.actual).is_some());
    }

    #[test]
    fn deal_json_and_base_ids() {
        let deal: Deal = serde_json::from_str(r#"{"a":[2,1,0],"b":[3,4,5],"c":[6]}"#).unwrap();
        assert_eq!(deal, Deal::contiguous(3, 1));
        assert_eq!(Deal::parse_base("012|345|6", 7).unwrap(), deal);
        assert_eq!(Deal::parse_base("0,1,2|3,4,5|6", 7).unwrap(), deal);
        assert!(serde_json::from_str::<Deal>(r#"{"a":[1,1],"b":[],"c":[]}"#).is_err());
        assert!(Deal::parse_base("012|345", 7).is_err());
    }

    #[test]
    fn hand_announcement_shapes() {
        let a = anne();
        let h = |v: &[u32]| Hand::new(v.to_vec()).unwrap();
        assert_eq!(hand_announcement(&a, &[h(&[0, 1, 2])]).unwrap(), parse("has(a,0) & has(a,1) & has(a,2)").unwrap());
        assert_eq!(hand_announcement(&cath(), &[h(&[6])]).unwrap(), parse("has(c,6)").unwrap());
        assert!(matches!(hand_announcement(&a, &[]), Err(RcpError::EmptyAnnouncement)));
        assert!(matches!(hand_announcement(&a, &[h(&[0, 1]), h(&[2])]), Err(RcpError::RaggedHands { .. })));
        let inst = build_rcp(3, 1, None).unwrap();
        assert!(inst.announcement(&a, &[h(&[0, 1])]).is_err());
    }

    #[test]
    fn knows_deal_in_single_world_model() {
        let inst = build_rcp(1, 1, None).unwrap();
        let only = crate::update::public_announcement(parse("has(a,0) & has(b,1)").unwrap());
        let m = crate::update::product_update(&inst.model, &only).unwrap();
        assert_eq!(m.len(), 1);
        for x in [anne(), bill(), cath()] {
            assert!(eval(&m, m.world(0), &inst.knows_deal(&x)).unwrap());
        }
    }
}
