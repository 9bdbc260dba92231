#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use delcards::{AgentId, Formula, KripkeModel, Proposition, WorldId};
use rand::Rng;

pub fn ag(s: &str) -> AgentId {
    AgentId::new(s).unwrap()
}

/// A model kept in the plain textbook form: relations as sets of pairs.
#[derive(Debug, Clone)]
pub struct PairModel {
    pub agents: Vec<AgentId>,
    pub worlds: Vec<(WorldId, BTreeSet<Proposition>)>,
    pub pairs: BTreeMap<AgentId, BTreeSet<(WorldId, WorldId)>>,
}

impl PairModel {
    pub fn build(&self) -> KripkeModel {
        KripkeModel::from_pairs(self.agents.clone(), self.worlds.clone(), &self.pairs).unwrap()
    }

    /// Reference semantics straight from the truth clauses.
    pub fn eval(&self, w: &WorldId, f: &Formula) -> bool {
        match f {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Atom(p) => self.worlds.iter().any(|(v, props)| v == w && props.contains(p)),
            Formula::Not(g) => !self.eval(w, g),
            Formula::And(l, r) => self.eval(w, l) && self.eval(w, r),
            Formula::Or(l, r) => self.eval(w, l) || self.eval(w, r),
            Formula::Implies(l, r) => !self.eval(w, l) || self.eval(w, r),
            Formula::Iff(l, r) => self.eval(w, l) == self.eval(w, r),
            Formula::Knows(x, g) => self.pairs[x].iter().filter(|(u, _)| u == w).all(|(_, v)| self.eval(v, g)),
        }
    }
}

pub const PROP_POOL: [(&str, u32); 5] = [("a", 0), ("a", 1), ("b", 0), ("b", 1), ("c", 0)];

/// A random S5 model with 1..=`max_worlds` worlds over agents among a, b, c.
pub fn random_model(rng: &mut impl Rng, max_worlds: usize) -> PairModel {
    let n = rng.gen_range(1..=max_worlds);
    let all = ["a", "b", "c"];
    let n_agents = rng.gen_range(1..=3);
    let agents: Vec<AgentId> = all[..n_agents].iter().map(|s| ag(s)).collect();
    let ids: Vec<WorldId> = (0..n).map(|i| WorldId::new(format!("w{i}")).unwrap()).collect();
    let worlds = ids
        .iter()
        .map(|w| {
            let props =
                PROP_POOL.iter().filter(|_| rng.gen_bool(0.5)).map(|(x, i)| Proposition::new(ag(x), *i)).collect();
            (w.clone(), props)
        })
        .collect();
    let mut pairs = BTreeMap::new();
    for x in &agents {
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let rel = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| labels[i] == labels[j])
            .map(|(i, j)| (ids[i].clone(), ids[j].clone()))
            .collect();
        pairs.insert(x.clone(), rel);
    }
    PairModel { agents, worlds, pairs }
}

/// A random formula of depth at most `depth` whose modalities use `agents`.
/// Atoms may name facts that hold nowhere.
pub fn random_formula(rng: &mut impl Rng, agents: &[AgentId], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..8) {
            0 => Formula::Top,
            1 => Formula::Bot,
            2 => Formula::atom(&ag("c"), 7),
            _ => {
                let (x, i) = PROP_POOL[rng.gen_range(0..PROP_POOL.len())];
                Formula::atom(&ag(x), i)
            }
        };
    }
    let sub = |rng: &mut _| random_formula(rng, agents, depth - 1);
    match rng.gen_range(0..6) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::iff(sub(rng), sub(rng)),
        _ => Formula::knows(&agents[rng.gen_range(0..agents.len())], sub(rng)),
    }
}

pub fn hands(spec: &[&str]) -> Vec<delcards::Hand> {
    spec.iter().map(|s| delcards::Hand::new(s.chars().map(|c| c.to_digit(10).unwrap()).collect()).unwrap()).collect()
}

pub const FANO: [&str; 7] = ["012", "034", "056", "135", "146", "236", "245"];

/// Checks `after = m ⊗ mu` against the definition of product update:
/// worlds are exactly the pairs `(w, α)` with `w ⊨ pre(α)`, valuations are
/// inherited from `w`, and two pairs are related for an agent exactly when
/// both components are.
pub fn check_update_laws(m: &KripkeModel, mu: &delcards::ActionModel, after: &KripkeModel) -> Result<(), String> {
    use std::collections::HashMap;

    let mut expected: BTreeSet<WorldId> = BTreeSet::new();
    for (ai, a) in mu.actions().iter().enumerate() {
        let ext = delcards::formula::extension(m, &a.pre).map_err(|e| e.to_string())?;
        for (w, keep) in ext.into_iter().enumerate() {
            if keep {
                expected.insert(m.world(w).extended(&mu.actions()[ai].id));
            }
        }
    }
    let got: BTreeSet<WorldId> = after.worlds().iter().cloned().collect();
    if got != expected {
        return Err(format!("survivors differ: {} expected, {} present", expected.len(), got.len()));
    }

    let origin = |w: &WorldId| -> (usize, usize) {
        let (tag, rest) = w.history().split_last().expect("updated worlds carry a tag");
        let src = WorldId::with_history(w.base(), rest.to_vec()).unwrap();
        let ai = mu.actions().iter().position(|a| &a.id == tag).expect("tag names an action");
        (m.index_of(&src).expect("source world exists"), ai)
    };

    for (ix, w) in after.worlds().iter().enumerate() {
        let (src, _) = origin(w);
        let before: Vec<&Proposition> = m.valuation(src).collect();
        let now: Vec<&Proposition> = after.valuation(ix).collect();
        if before != now {
            return Err(format!("valuation of {w} changed"));
        }
    }

    if after.agents() != m.agents() {
        return Err("agent set changed".into());
    }
    for (x, agent) in m.agents().iter().enumerate() {
        // pairs sharing a (source block, action block) key must form exactly one block
        let mut by_key: HashMap<(usize, usize), usize> = HashMap::new();
        let mut by_block: HashMap<usize, (usize, usize)> = HashMap::new();
        for (ix, w) in after.worlds().iter().enumerate() {
            let (src, ai) = origin(w);
            let key =
                (m.partition(x).block_of(src), mu.action_block(agent, ai).ok_or("agent missing from action model")?);
            let block = after.partition(x).block_of(ix);
            if *by_key.entry(key).or_insert(block) != block || *by_block.entry(block).or_insert(key) != key {
                return Err(format!("relation of {agent} at {w} is not the product relation"));
            }
        }
    }
    Ok(())
}
