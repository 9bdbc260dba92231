mod common;

use std::collections::BTreeMap;

use common::{check_update_laws, random_formula, random_model};
use delcards::formula::extension;
use delcards::update::Action;
use delcards::{product_update, public_announcement, ActionId, ActionModel, Formula};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random action model with up to three actions and random per-agent partitions.
fn random_action_model(rng: &mut impl Rng, agents: &[delcards::AgentId]) -> ActionModel {
    let n = rng.gen_range(1..=3);
    let ids: Vec<ActionId> = (0..n).map(|i| ActionId::new(format!("e{i}")).unwrap()).collect();
    let actions = ids.iter().map(|id| Action { id: id.clone(), pre: random_formula(rng, agents, 2) }).collect();
    if rng.gen_bool(0.3) {
        return ActionModel::public(actions).unwrap();
    }
    let relations = agents
        .iter()
        .map(|x| {
            let mut blocks: BTreeMap<usize, Vec<ActionId>> = BTreeMap::new();
            for id in &ids {
                blocks.entry(rng.gen_range(0..n)).or_default().push(id.clone());
            }
            (x.clone(), blocks.into_values().collect())
        })
        .collect();
    ActionModel::new(actions, relations).unwrap()
}

proptest! {
    #[test]
    fn product_update_matches_definition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pm = random_model(&mut rng, 6);
        let m = pm.build();
        let mu = random_action_model(&mut rng, &pm.agents);
        let after = product_update(&m, &mu).unwrap();
        prop_assert_eq!(check_update_laws(&m, &mu, &after), Ok(()));
        prop_assert!(after.validate().is_empty());
    }

    #[test]
    fn announcement_keeps_exactly_the_extension(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pm = random_model(&mut rng, 6);
        let m = pm.build();
        let f = random_formula(&mut rng, &pm.agents, 3);
        let after = product_update(&m, &public_announcement(f.clone())).unwrap();
        let ext = extension(&m, &f).unwrap();
        prop_assert_eq!(after.len(), ext.iter().filter(|&&b| b).count());
        for (w, keep) in m.worlds().iter().zip(ext) {
            prop_assert_eq!(after.find_latest(w.base()).is_some(), keep);
        }
    }

    #[test]
    fn announcing_top_changes_only_tags(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, 6).build();
        let after = product_update(&m, &public_announcement(Formula::Top)).unwrap();
        prop_assert_eq!(after.len(), m.len());
        for x in 0..m.agents().len() {
            prop_assert_eq!(after.partition(x).len(), m.partition(x).len());
            prop_assert_eq!(after.partition(x).blocks(), m.partition(x).blocks());
        }
    }

    #[test]
    fn public_announcements_compose(seed in any::<u64>()) {
        // announcing f then g keeps the same bases as announcing f & g whenever
        // g mentions no knowledge (so its truth is unaffected by the first update)
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pm = random_model(&mut rng, 6);
        let m = pm.build();
        let f = random_formula(&mut rng, &pm.agents, 3);
        let g = random_formula(&mut rng, &[], 0);
        let twice = product_update(&product_update(&m, &public_announcement(f.clone())).unwrap(), &public_announcement(g.clone())).unwrap();
        let once = product_update(&m, &public_announcement(Formula::and(f, g))).unwrap();
        let bases = |m: &delcards::KripkeModel| m.worlds().iter().map(|w| w.base().to_string()).collect::<Vec<_>>();
        prop_assert_eq!(bases(&twice), bases(&once));
    }
}

#[test]
fn bot_announcement_empties_the_model() {
    let m = random_model(&mut ChaCha8Rng::seed_from_u64(9), 6).build();
    let after = product_update(&m, &public_announcement(Formula::Bot)).unwrap();
    assert!(after.is_empty());
    assert_eq!(after.agents(), m.agents());
}
