//! S5 Kripke models.
//!
//! Every accessibility relation is an equivalence relation, so it is stored as
//! its quotient: one partition of the world set per agent. A block of agent
//! `x`'s partition is an information set (a *component*) of `x`.
//!
//! Worlds are kept sorted by [`WorldId`], and the blocks of every partition are
//! sorted by their smallest member, so iteration order is reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid agent name {0:?}")]
    InvalidAgent(String),
    #[error("invalid action label {0:?}")]
    InvalidAction(String),
    #[error("invalid world id {0:?}")]
    InvalidWorld(String),
    #[error("invalid proposition {0:?}, expected has(<agent>,<card>)")]
    InvalidProposition(String),
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("unknown world {0}")]
    UnknownWorld(String),
    #[error("relation of agent {agent} is not an equivalence: {detail}")]
    NotEquivalence { agent: AgentId, detail: String },
    #[error("model violates {} invariant(s): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Name of an agent. Agent names are identifiers (`[A-Za-z_][A-Za-z0-9_]*`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        if is_ident(&name) {
            Ok(AgentId(name))
        } else {
            Err(ModelError::InvalidAgent(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for AgentId {
    type Error = ModelError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        AgentId::new(s)
    }
}

impl From<AgentId> for String {
    fn from(a: AgentId) -> String {
        a.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for AgentId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgentId::new(s)
    }
}

/// Label of an action in an action model; also the tag appended to world
/// histories by a product update.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ActionId(String);

impl ActionId {
    pub fn new(label: impl Into<String>) -> Result<Self, ModelError> {
        let label = label.into();
        let ok = !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if ok {
            Ok(ActionId(label))
        } else {
            Err(ModelError::InvalidAction(label))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ActionId {
    type Error = ModelError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        ActionId::new(s)
    }
}

impl From<ActionId> for String {
    fn from(a: ActionId) -> String {
        a.0
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Atomic fact `has(x,i)`: card `i` is held by agent `x`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Proposition {
    pub agent: AgentId,
    pub card: u32,
}

impl Proposition {
    pub fn new(agent: AgentId, card: u32) -> Self {
        Proposition { agent, card }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "has({},{})", self.agent, self.card)
    }
}

impl FromStr for Proposition {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidProposition(s.to_string());
        let inner = s
            .trim()
            .strip_prefix("has")
            .map(str::trim_start)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.trim_end().strip_suffix(')'))
            .ok_or_else(bad)?;
        let (agent, card) = inner.split_once(',').ok_or_else(bad)?;
        let agent = AgentId::new(agent.trim()).map_err(|_| bad())?;
        let card = card.trim().parse::<u32>().map_err(|_| bad())?;
        Ok(Proposition { agent, card })
    }
}

impl TryFrom<String> for Proposition {
    type Error = ModelError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Proposition> for String {
    fn from(p: Proposition) -> String {
        p.to_string()
    }
}

/// Identity of a world: a base id (for card deals, the rendered deal) plus the
/// labels of every action executed since the initial model.
///
/// The qualified text form is `base@label1@label2...`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldId {
    base: String,
    history: Vec<ActionId>,
}

impl WorldId {
    pub fn new(base: impl Into<String>) -> Result<Self, ModelError> {
        Self::with_history(base, Vec::new())
    }

    pub fn with_history(base: impl Into<String>, history: Vec<ActionId>) -> Result<Self, ModelError> {
        let base = base.into();
        if base.is_empty() || base.contains('@') || base.chars().any(char::is_whitespace) {
            return Err(ModelError::InvalidWorld(base));
        }
        Ok(WorldId { base, history })
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn history(&self) -> &[ActionId] {
        &self.history
    }

    /// The world `(self, action)` of a product update.
    pub fn extended(&self, action: &ActionId) -> WorldId {
        let mut history = Vec::with_capacity(self.history.len() + 1);
        history.extend_from_slice(&self.history);
        history.push(action.clone());
        WorldId { base: self.base.clone(), history }
    }
}

impl fmt::Display for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base)?;
        for a in &self.history {
            write!(f, "@{a}")?;
        }
        Ok(())
    }
}

impl FromStr for WorldId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split('@');
        let base = parts.next().unwrap_or_default();
        let history = parts
            .map(ActionId::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ModelError::InvalidWorld(s.to_string()))?;
        WorldId::with_history(base, history)
    }
}

impl Serialize for WorldId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WorldId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A broken model invariant, reported as data by [`validate_model`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub item: Option<String>,
    pub detail: String,
}

impl Violation {
    pub(crate) fn new(agent: Option<&str>, item: Option<&str>, detail: impl Into<String>) -> Self {
        Violation { agent: agent.map(str::to_string), item: item.map(str::to_string), detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = &self.agent {
            write!(f, "agent {a}: ")?;
        }
        if let Some(w) = &self.item {
            write!(f, "{w}: ")?;
        }
        f.write_str(&self.detail)
    }
}

/// One world of a [`ModelDoc`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldDoc {
    pub id: String,
    #[serde(default)]
    pub history: Vec<ActionId>,
    pub props: Vec<Proposition>,
}

impl WorldDoc {
    /// The qualified key (`base@tag...`) used in `relations`.
    pub fn key(&self) -> String {
        let mut key = self.id.clone();
        for a in &self.history {
            key.push('@');
            key.push_str(a.as_str());
        }
        key
    }
}

/// Plain-data form of a Kripke model; this is also its JSON document.
///
/// Relation blocks reference worlds by their qualified key (see
/// [`WorldDoc::key`]). A `ModelDoc` may break invariants; [`validate_model`]
/// lists them and [`KripkeModel::from_doc`] refuses them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub agents: Vec<AgentId>,
    pub worlds: Vec<WorldDoc>,
    pub relations: BTreeMap<AgentId, Vec<Vec<String>>>,
}

/// Lists every invariant the document breaks. An empty list means
/// [`KripkeModel::from_doc`] will accept it.
pub fn validate_model(doc: &ModelDoc) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen_agents = BTreeSet::new();
    for a in &doc.agents {
        if !seen_agents.insert(a) {
            out.push(Violation::new(Some(a.as_str()), None, "agent listed twice"));
        }
    }

    let mut keys = BTreeSet::new();
    for w in &doc.worlds {
        let key = w.key();
        if WorldId::with_history(w.id.clone(), w.history.clone()).is_err() {
            out.push(Violation::new(None, Some(&key), "malformed world id"));
        }
        if !keys.insert(key.clone()) {
            out.push(Violation::new(None, Some(&key), "world listed twice"));
        }
    }

    for a in &doc.agents {
        if !doc.relations.contains_key(a) {
            out.push(Violation::new(Some(a.as_str()), None, "no partition given"));
        }
    }
    for (a, blocks) in &doc.relations {
        if !seen_agents.contains(a) {
            out.push(Violation::new(Some(a.as_str()), None, "partition for an agent not in the agent set"));
            continue;
        }
        check_blocks(a.as_str(), blocks, &keys, &mut out);
    }
    out
}

/// Shared partition check for models and action models.
pub(crate) fn check_blocks(agent: &str, blocks: &[Vec<String>], universe: &BTreeSet<String>, out: &mut Vec<Violation>) {
    let mut count: BTreeMap<&str, usize> = BTreeMap::new();
    for block in blocks {
        if block.is_empty() {
            out.push(Violation::new(Some(agent), None, "empty block"));
        }
        for item in block {
            if !universe.contains(item) {
                out.push(Violation::new(Some(agent), Some(item), "block member is not declared"));
                continue;
            }
            *count.entry(item.as_str()).or_default() += 1;
        }
    }
    for item in universe {
        match count.get(item.as_str()) {
            None => out.push(Violation::new(Some(agent), Some(item), "not covered by any block")),
            Some(&n) if n > 1 => out.push(Violation::new(
                Some(agent),
                Some(item),
                format!("appears in {n} block positions (blocks overlap)"),
            )),
            _ => {}
        }
    }
}

/// One agent's equivalence relation, stored as its quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Builds the partition grouping worlds with equal labels. Blocks come
    /// out ordered by smallest member, members ascending.
    pub(crate) fn from_labels<K: Eq + std::hash::Hash>(labels: impl IntoIterator<Item = K>) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::new();
        for (w, label) in labels.into_iter().enumerate() {
            let next = blocks.len();
            let b = *ids.entry(label).or_insert(next);
            if b == next {
                blocks.push(Vec::new());
            }
            blocks[b].push(w);
            block_of.push(b);
        }
        Partition { blocks, block_of }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, world: usize) -> usize {
        self.block_of[world]
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// A finite S5 Kripke model `(W, R, V)`.
///
/// Construction validates every invariant, so a `KripkeModel` value is always
/// well formed. Queries are pure.
#[derive(Debug, Clone)]
pub struct KripkeModel {
    agents: Vec<AgentId>,
    props: Vec<Proposition>,
    worlds: Vec<WorldId>,
    valuations: Vec<Vec<u32>>,
    partitions: Vec<Partition>,
    index: HashMap<WorldId, usize>,
}

impl KripkeModel {
    /// Assembles a model from interned parts.
    ///
    /// `props` must be sorted and free of duplicates; every valuation holds
    /// sorted indices into it. `labels[w][x]` is the class label of world `w`
    /// for agent `x` (worlds with equal labels are indistinguishable).
    pub(crate) fn assemble(
        mut agents: Vec<AgentId>,
        props: Vec<Proposition>,
        entries: Vec<(WorldId, Vec<u32>, Vec<u64>)>,
    ) -> Result<Self, ModelError> {
        let mut order: Vec<usize> = (0..agents.len()).collect();
        order.sort_by(|&i, &j| agents[i].cmp(&agents[j]));
        agents.sort();
        if let Some(w) = agents.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::Invalid(vec![Violation::new(Some(w[0].as_str()), None, "agent listed twice")]));
        }

        let mut entries = entries;
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(ModelError::Invalid(vec![Violation::new(
                None,
                Some(&w[0].0.to_string()),
                "world listed twice",
            )]));
        }

        let partitions = order.iter().map(|&x| Partition::from_labels(entries.iter().map(|e| e.2[x]))).collect();
        let mut worlds = Vec::with_capacity(entries.len());
        let mut valuations = Vec::with_capacity(entries.len());
        for (id, val, _) in entries {
            worlds.push(id);
            valuations.push(val);
        }
        let index = worlds.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Ok(KripkeModel { agents, props, worlds, valuations, partitions, index })
    }

    /// Builds a model from its document form, refusing any invariant violation.
    pub fn from_doc(doc: &ModelDoc) -> Result<Self, ModelError> {
        let violations = validate_model(doc);
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        let mut props: Vec<Proposition> = doc.worlds.iter().flat_map(|w| w.props.iter().cloned()).collect();
        props.sort();
        props.dedup();

        let mut agents = doc.agents.clone();
        agents.sort();
        let mut labels: HashMap<&str, Vec<u64>> = HashMap::new();
        for (x, a) in agents.iter().enumerate() {
            for (b, block) in doc.relations[a].iter().enumerate() {
                for key in block {
                    let slot = labels.entry(key.as_str()).or_insert_with(|| vec![0; agents.len()]);
                    slot[x] = b as u64;
                }
            }
        }

        let mut entries = Vec::with_capacity(doc.worlds.len());
        for w in &doc.worlds {
            let id = WorldId::with_history(w.id.clone(), w.history.clone())?;
            let mut val: Vec<u32> = w.props.iter().map(|p| props.binary_search(p).expect("interned") as u32).collect();
            val.sort_unstable();
            val.dedup();
            let key = w.key();
            let lab = labels.get(key.as_str()).cloned().unwrap_or_else(|| vec![0; agents.len()]);
            entries.push((id, val, lab));
        }
        KripkeModel::assemble(agents, props, entries)
    }

    /// Imports a model whose relations are given as explicit pair sets.
    ///
    /// Each relation must already be reflexive, symmetric and transitive;
    /// the importer checks this rather than closing the relation.
    pub fn from_pairs(
        agents: Vec<AgentId>,
        worlds: Vec<(WorldId, BTreeSet<Proposition>)>,
        pairs: &BTreeMap<AgentId, BTreeSet<(WorldId, WorldId)>>,
    ) -> Result<Self, ModelError> {
        let ids: BTreeSet<&WorldId> = worlds.iter().map(|(w, _)| w).collect();
        for a in &agents {
            let rel = pairs
                .get(a)
                .ok_or_else(|| ModelError::NotEquivalence { agent: a.clone(), detail: "no relation given".into() })?;
            let not_eq = |detail: String| ModelError::NotEquivalence { agent: a.clone(), detail };
            for (u, v) in rel {
                for w in [u, v] {
                    if !ids.contains(w) {
                        return Err(ModelError::UnknownWorld(w.to_string()));
                    }
                }
                if !rel.contains(&(v.clone(), u.clone())) {
                    return Err(not_eq(format!("({u},{v}) present but not ({v},{u})")));
                }
            }
            for w in &ids {
                if !rel.contains(&((*w).clone(), (*w).clone())) {
                    return Err(not_eq(format!("missing reflexive pair for {w}")));
                }
            }
            let mut succ: BTreeMap<&WorldId, BTreeSet<&WorldId>> = BTreeMap::new();
            for (u, v) in rel {
                succ.entry(u).or_default().insert(v);
            }
            for (u, vs) in &succ {
                for v in vs {
                    if let Some(ws) = succ.get(v) {
                        if let Some(w) = ws.iter().find(|w| !vs.contains(*w)) {
                            return Err(not_eq(format!("({u},{v}) and ({v},{w}) present but not ({u},{w})")));
                        }
                    }
                }
            }
        }
        for a in pairs.keys() {
            if !agents.contains(a) {
                return Err(ModelError::UnknownAgent(a.clone()));
            }
        }

        let mut relations = BTreeMap::new();
        for a in &agents {
            // classes: each world's successor set is its class
            let mut classes: BTreeSet<Vec<String>> = BTreeSet::new();
            for w in &ids {
                let class: Vec<String> = pairs[a].iter().filter(|(u, _)| u == *w).map(|(_, v)| v.to_string()).collect();
                classes.insert(class);
            }
            relations.insert(a.clone(), classes.into_iter().collect());
        }
        let doc = ModelDoc {
            agents,
            worlds: worlds
                .into_iter()
                .map(|(w, props)| WorldDoc {
                    id: w.base.clone(),
                    history: w.history.clone(),
                    props: props.into_iter().collect(),
                })
                .collect(),
            relations,
        };
        KripkeModel::from_doc(&doc)
    }

    pub fn to_doc(&self) -> ModelDoc {
        let worlds = (0..self.len())
            .map(|w| WorldDoc {
                id: self.worlds[w].base.clone(),
                history: self.worlds[w].history.clone(),
                props: self.valuation(w).cloned().collect(),
            })
            .collect();
        let relations = self
            .agents
            .iter()
            .zip(&self.partitions)
            .map(|(a, p)| {
                let blocks = p.blocks.iter().map(|b| b.iter().map(|&w| self.worlds[w].to_string()).collect()).collect();
                (a.clone(), blocks)
            })
            .collect();
        ModelDoc { agents: self.agents.clone(), worlds, relations }
    }

    /// Re-validates the model through its document form.
    pub fn validate(&self) -> Vec<Violation> {
        validate_model(&self.to_doc())
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn agent_index(&self, agent: &AgentId) -> Option<usize> {
        self.agents.binary_search(agent).ok()
    }

    pub(crate) fn require_agent(&self, agent: &AgentId) -> Result<usize, ModelError> {
        self.agent_index(agent).ok_or_else(|| ModelError::UnknownAgent(agent.clone()))
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[WorldId] {
        &self.worlds
    }

    pub fn world(&self, ix: usize) -> &WorldId {
        &self.worlds[ix]
    }

    pub fn index_of(&self, world: &WorldId) -> Option<usize> {
        self.index.get(world).copied()
    }

    pub(crate) fn require_world(&self, world: &WorldId) -> Result<usize, ModelError> {
        self.index_of(world).ok_or_else(|| ModelError::UnknownWorld(world.to_string()))
    }

    /// Looks a world up by base id alone. When several worlds share the base,
    /// the one with the longest history wins (the last in order on ties).
    pub fn find_latest(&self, base: &str) -> Option<usize> {
        let start = self.worlds.partition_point(|w| w.base.as_str() < base);
        (start..self.len())
            .take_while(|&i| self.worlds[i].base == base)
            .max_by_key(|&i| (self.worlds[i].history.len(), i))
    }

    /// Sorted table of every proposition true somewhere in the model.
    pub fn propositions(&self) -> &[Proposition] {
        &self.props
    }

    pub(crate) fn prop_index(&self, p: &Proposition) -> Option<u32> {
        self.props.binary_search(p).ok().map(|i| i as u32)
    }

    pub(crate) fn raw_valuation(&self, world: usize) -> &[u32] {
        &self.valuations[world]
    }

    pub(crate) fn has_prop(&self, world: usize, prop: u32) -> bool {
        self.valuations[world].binary_search(&prop).is_ok()
    }

    pub fn valuation(&self, world: usize) -> impl Iterator<Item = &Proposition> + '_ {
        self.valuations[world].iter().map(move |&p| &self.props[p as usize])
    }

    pub fn holds(&self, world: usize, p: &Proposition) -> bool {
        self.prop_index(p).is_some_and(|i| self.has_prop(world, i))
    }

    pub fn partition(&self, agent_ix: usize) -> &Partition {
        &self.partitions[agent_ix]
    }

    /// Indices of the worlds agent `agent_ix` cannot tell apart from `world`.
    pub fn component(&self, agent_ix: usize, world: usize) -> &[usize] {
        let p = &self.partitions[agent_ix];
        p.block(p.block_of(world))
    }

    pub fn component_of(&self, agent: &AgentId, world: &WorldId) -> Result<Vec<&WorldId>, ModelError> {
        let x = self.require_agent(agent)?;
        let w = self.require_world(world)?;
        Ok(self.component(x, w).iter().map(|&v| &self.worlds[v]).collect())
    }

    pub fn partition_of(&self, agent: &AgentId) -> Result<Vec<Vec<&WorldId>>, ModelError> {
        let x = self.require_agent(agent)?;
        Ok(self.partitions[x].blocks.iter().map(|b| b.iter().map(|&v| &self.worlds[v]).collect()).collect())
    }
}

impl Serialize for KripkeModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for KripkeModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = ModelDoc::deserialize(d)?;
        KripkeModel::from_doc(&doc).map_err(serde::de::Error::custom)
    }
}
