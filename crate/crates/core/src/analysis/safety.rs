use serde::Serialize;

use crate::cards::{CardId, Hand};

/// Cover and intersection conditions on a hand-set announcement by `a`.
///
/// If the hands miss a card, Cath learns it is not with Anne; if they share a
/// card, Cath learns it is with Anne.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma2Report {
    pub covers: bool,
    pub empty_intersection: bool,
    /// Cards in no announced hand.
    pub uncovered: Vec<CardId>,
    /// Cards in every announced hand.
    pub common: Vec<CardId>,
    /// `uncovered ∪ common`, sorted.
    pub leaked_cards: Vec<CardId>,
}

impl Lemma2Report {
    pub fn safe(&self) -> bool {
        self.covers && self.empty_intersection
    }
}

pub fn lemma2_check(hands: &[Hand], universe: &[CardId]) -> Lemma2Report {
    let uncovered: Vec<CardId> = universe.iter().copied().filter(|&i| !hands.iter().any(|h| h.contains(i))).collect();
    let common: Vec<CardId> = if hands.is_empty() {
        Vec::new()
    } else {
        universe.iter().copied().filter(|&i| hands.iter().all(|h| h.contains(i))).collect()
    };
    let mut leaked_cards: Vec<CardId> = uncovered.iter().chain(&common).copied().collect();
    leaked_cards.sort_unstable();
    Lemma2Report {
        covers: uncovered.is_empty(),
        empty_intersection: common.is_empty(),
        uncovered,
        common,
        leaked_cards,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hands(spec: &[&str]) -> Vec<Hand> {
        spec.iter().map(|s| Hand::new(s.chars().map(|c| c.to_digit(10).unwrap()).collect()).unwrap()).collect()
    }

    #[test]
    fn fano_set_is_safe() {
        let r = lemma2_check(&hands(&["012", "034", "056", "135", "146", "236", "245"]), &(0..7).collect::<Vec<_>>());
        assert!(r.covers && r.empty_intersection && r.safe());
        assert!(r.leaked_cards.is_empty());
    }

    #[test]
    fn shared_card_leaks() {
        let r = lemma2_check(&hands(&["012", "034", "056"]), &(0..7).collect::<Vec<_>>());
        assert!(r.covers);
        assert_eq!(r.common, vec![0]);
        assert_eq!(r.leaked_cards, vec![0]);
    }

    #[test]
    fn single_hand_leaks_everything() {
        let r = lemma2_check(&hands(&["012"]), &(0..7).collect::<Vec<_>>());
        assert!(!r.covers && !r.empty_intersection);
        assert_eq!(r.uncovered, vec![3, 4, 5, 6]);
        assert_eq!(r.leaked_cards, (0..7).collect::<Vec<_>>());
    }
}
