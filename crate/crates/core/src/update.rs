//! Action models and product update.
//!
//! `M ⊗ μ` keeps the pairs `(w, a)` with `M, w ⊨ pre(a)`; two pairs are
//! indistinguishable for `x` iff both components are. Relations are computed
//! by intersecting source blocks with action blocks, never as pair sets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{extension, parse, EvalError, Formula};
use crate::kripke::{check_blocks, ActionId, AgentId, KripkeModel, ModelError, Partition, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UpdateError {
    #[error("action model agents {action:?} differ from model agents {model:?}")]
    AgentMismatch { model: Vec<String>, action: Vec<String> },
    #[error("invalid action model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub id: ActionId,
    pub pre: Formula,
}

/// How agents relate actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionRelations {
    /// Every agent tells every action apart, whatever the agent set.
    Public,
    /// One partition of the action indices per agent.
    PerAgent(BTreeMap<AgentId, Partition>),
}

/// An action model `(A, R*, pre)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionModel {
    actions: Vec<Action>,
    relations: ActionRelations,
}

impl ActionModel {
    /// An action model in which every agent distinguishes every action.
    pub fn public(actions: Vec<Action>) -> Result<Self, UpdateError> {
        let m = ActionModel { actions, relations: ActionRelations::Public };
        m.check()?;
        Ok(m)
    }

    /// An action model with explicit per-agent partitions over action labels.
    pub fn new(actions: Vec<Action>, relations: BTreeMap<AgentId, Vec<Vec<ActionId>>>) -> Result<Self, UpdateError> {
        let doc = ActionModelDoc {
            actions: actions.iter().map(|a| ActionDoc { id: a.id.clone(), pre: a.pre.to_string() }).collect(),
            relations: Some(
                relations
                    .iter()
                    .map(|(x, blocks)| {
                        (x.clone(), blocks.iter().map(|b| b.iter().map(|a| a.to_string()).collect()).collect())
                    })
                    .collect(),
            ),
        };
        let violations = validate_action_model(&doc);
        if !violations.is_empty() {
            return Err(UpdateError::Invalid(violations));
        }
        let pos = |id: &ActionId| actions.iter().position(|a| &a.id == id).expect("validated");
        let relations = relations
            .into_iter()
            .map(|(x, blocks)| {
                let mut label = vec![0usize; actions.len()];
                for (b, block) in blocks.iter().enumerate() {
                    for id in block {
                        label[pos(id)] = b;
                    }
                }
                (x, Partition::from_labels(label))
            })
            .collect();
        Ok(ActionModel { actions, relations: ActionRelations::PerAgent(relations) })
    }

    fn check(&self) -> Result<(), UpdateError> {
        let violations = validate_action_model(&self.to_doc());
        if violations.is_empty() {
            Ok(())
        } else {
            Err(UpdateError::Invalid(violations))
        }
    }

    pub fn from_doc(doc: &ActionModelDoc) -> Result<Self, UpdateError> {
        let violations = validate_action_model(doc);
        if !violations.is_empty() {
            return Err(UpdateError::Invalid(violations));
        }
        let actions: Vec<Action> =
            doc.actions.iter().map(|a| Action { id: a.id.clone(), pre: parse(&a.pre).expect("validated") }).collect();
        match &doc.relations {
            None => ActionModel::public(actions),
            Some(rel) => {
                let rel = rel
                    .iter()
                    .map(|(x, blocks)| {
                        let blocks = blocks
                            .iter()
                            .map(|b| b.iter().map(|s| ActionId::new(s.clone())).collect::<Result<Vec<_>, _>>())
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok((x.clone(), blocks))
                    })
                    .collect::<Result<BTreeMap<_, _>, ModelError>>()?;
                ActionModel::new(actions, rel)
            }
        }
    }

    pub fn to_doc(&self) -> ActionModelDoc {
        ActionModelDoc {
            actions: self.actions.iter().map(|a| ActionDoc { id: a.id.clone(), pre: a.pre.to_string() }).collect(),
            relations: match &self.relations {
                ActionRelations::Public => None,
                ActionRelations::PerAgent(rel) => Some(
                    rel.iter()
                        .map(|(x, p)| {
                            let blocks = p
                                .blocks()
                                .iter()
                                .map(|b| b.iter().map(|&i| self.actions[i].id.to_string()).collect())
                                .collect();
                            (x.clone(), blocks)
                        })
                        .collect(),
                ),
            },
        }
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn relations(&self) -> &ActionRelations {
        &self.relations
    }

    /// Block of action `a` for `agent`, or `None` when the agent has no
    /// partition in this model.
    pub fn action_block(&self, agent: &AgentId, a: usize) -> Option<usize> {
        match &self.relations {
            ActionRelations::Public => Some(a),
            ActionRelations::PerAgent(rel) => rel.get(agent).map(|p| p.block_of(a)),
        }
    }

    /// True when `agent` cannot tell actions `a1` and `a2` apart.
    pub fn related(&self, agent: &AgentId, a1: usize, a2: usize) -> bool {
        match (self.action_block(agent, a1), self.action_block(agent, a2)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDoc {
    pub id: ActionId,
    pub pre: String,
}

/// JSON form of an action model. Missing `relations` means public: every
/// agent distinguishes every action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionModelDoc {
    pub actions: Vec<ActionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<BTreeMap<AgentId, Vec<Vec<String>>>>,
}

pub fn validate_action_model(doc: &ActionModelDoc) -> Vec<Violation> {
    let mut out = Vec::new();
    if doc.actions.is_empty() {
        out.push(Violation::new(None, None, "action set is empty"));
    }
    let mut ids = BTreeSet::new();
    for a in &doc.actions {
        if !ids.insert(a.id.to_string()) {
            out.push(Violation::new(None, Some(a.id.as_str()), "action listed twice"));
        }
        if let Err(e) = parse(&a.pre) {
            out.push(Violation::new(None, Some(a.id.as_str()), format!("precondition does not parse: {e}")));
        }
    }
    if let Some(rel) = &doc.relations {
        for (x, blocks) in rel {
            check_blocks(x.as_str(), blocks, &ids, &mut out);
        }
    }
    out
}

/// The public announcement of `f`: one action, precondition `f`, which every
/// agent observes.
pub fn public_announcement(f: Formula) -> ActionModel {
    labelled_announcement(f, ActionId::new("ann").expect("valid label"))
}

/// [`public_announcement`] with a chosen history tag.
pub fn labelled_announcement(f: Formula, label: ActionId) -> ActionModel {
    ActionModel { actions: vec![Action { id: label, pre: f }], relations: ActionRelations::Public }
}

/// Product update `M ⊗ μ`.
///
/// A result with zero worlds is a legal value; callers decide whether it is
/// an error.
pub fn product_update(m: &KripkeModel, mu: &ActionModel) -> Result<KripkeModel, UpdateError> {
    if let ActionRelations::PerAgent(rel) = &mu.relations {
        let action_agents: Vec<&AgentId> = rel.keys().collect();
        let model_agents: Vec<&AgentId> = m.agents().iter().collect();
        if action_agents != model_agents {
            return Err(UpdateError::AgentMismatch {
                model: model_agents.iter().map(|a| a.to_string()).collect(),
                action: action_agents.iter().map(|a| a.to_string()).collect(),
            });
        }
    }

    let survivors: Vec<Vec<bool>> = mu.actions.iter().map(|a| extension(m, &a.pre)).collect::<Result<_, _>>()?;

    let n_actions = mu.actions.len() as u64;
    let action_blocks: Vec<Vec<u64>> = m
        .agents()
        .iter()
        .map(|x| (0..mu.actions.len()).map(|a| mu.action_block(x, a).expect("agent checked") as u64).collect())
        .collect();

    let mut entries = Vec::new();
    for (w, id) in m.worlds().iter().enumerate() {
        for (a, action) in mu.actions.iter().enumerate() {
            if !survivors[a][w] {
                continue;
            }
            let labels = (0..m.agents().len())
                .map(|x| m.partition(x).block_of(w) as u64 * n_actions + action_blocks[x][a])
                .collect();
            entries.push((id.extended(&action.id), m.raw_valuation(w).to_vec(), labels));
        }
    }
    Ok(KripkeModel::assemble(m.agents().to_vec(), m.propositions().to_vec(), entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{ModelDoc, WorldDoc};

    fn ag(s: &str) -> AgentId {
        AgentId::new(s).unwrap()
    }

    fn act(s: &str) -> ActionId {
        ActionId::new(s).unwrap()
    }

    fn two_worlds() -> KripkeModel {
        let world = |id: &str, p: &str| WorldDoc { id: id.into(), history: vec![], props: vec![p.parse().unwrap()] };
        let all = || vec![vec!["u".to_string(), "v".to_string()]];
        KripkeModel::from_doc(&ModelDoc {
            agents: vec![ag("a"), ag("b"), ag("c")],
            worlds: vec![world("u", "has(a,0)"), world("v", "has(b,0)")],
            relations: BTreeMap::from([(ag("a"), all()), (ag("b"), all()), (ag("c"), all())]),
        })
        .unwrap()
    }

    #[test]
    fn two_by_two_product() {
        let m = two_worlds();
        let actions = vec![
            Action { id: act("p"), pre: parse("has(a,0)").unwrap() },
            Action { id: act("q"), pre: parse("has(b,0)").unwrap() },
        ];
        let rel = BTreeMap::from([
            (ag("a"), vec![vec![act("p")], vec![act("q")]]),
            (ag("b"), vec![vec![act("p")], vec![act("q")]]),
            (ag("c"), vec![vec![act("p"), act("q")]]),
        ]);
        let mu = ActionModel::new(actions, rel).unwrap();
        let out = product_update(&m, &mu).unwrap();
        assert_eq!(out.len(), 2);
        let ids: Vec<String> = out.worlds().iter().map(|w| w.to_string()).collect();
        assert_eq!(ids, ["u@p", "v@q"]);
        let c = out.agent_index(&ag("c")).unwrap();
        let a = out.agent_index(&ag("a")).unwrap();
        let b = out.agent_index(&ag("b")).unwrap();
        assert_eq!(out.partition(c).len(), 1);
        assert_eq!(out.partition(a).len(), 2);
        assert_eq!(out.partition(b).len(), 2);
        assert!(out.validate().is_empty());
    }

    #[test]
    fn announcement_that_fails_everywhere_gives_empty_model() {
        let out = product_update(&two_worlds(), &public_announcement(Formula::Bot)).unwrap();
        assert!(out.is_empty());
        assert_eq!(out.partition(0).len(), 0);
    }

    #[test]
    fn agent_sets_must_agree() {
        let rel = BTreeMap::from([(ag("a"), vec![vec![act("t")]])]);
        let mu = ActionModel::new(vec![Action { id: act("t"), pre: Formula::Top }], rel).unwrap();
        assert!(matches!(product_update(&two_worlds(), &mu), Err(UpdateError::AgentMismatch { .. })));
    }

    #[test]
    fn validation_cases() {
        let doc = |actions: Vec<(&str, &str)>, rel: Option<Vec<Vec<&str>>>| ActionModelDoc {
            actions: actions.into_iter().map(|(i, p)| ActionDoc { id: act(i), pre: p.into() }).collect(),
            relations: rel.map(|b| {
                BTreeMap::from([(ag("a"), b.into_iter().map(|b| b.into_iter().map(String::from).collect()).collect())])
            }),
        };
        assert!(validate_action_model(&public_announcement(Formula::Top).to_doc()).is_empty());
        assert_eq!(validate_action_model(&doc(vec![], None)).len(), 1);
        let overlap = doc(vec![("p", "top"), ("q", "top"), ("r", "top")], Some(vec![vec!["p", "q"], vec!["q", "r"]]));
        assert_eq!(validate_action_model(&overlap).len(), 1);
        assert_eq!(validate_action_model(&doc(vec![("p", "top &")], None)).len(), 1);
        let dup = doc(vec![("p", "top"), ("p", "bot")], None);
        assert_eq!(validate_action_model(&dup).len(), 1);
    }

    #[test]
    fn doc_round_trip() {
        let text = r#"{"actions":[{"id":"p","pre":"has(a,0)"},{"id":"q","pre":"top"}],
                       "relations":{"a":[["p","q"]],"b":[["p"],["q"]],"c":[["p"],["q"]]}}"#;
        let doc: ActionModelDoc = serde_json::from_str(text).unwrap();
        let mu = ActionModel::from_doc(&doc).unwrap();
        assert_eq!(ActionModel::from_doc(&mu.to_doc()).unwrap(), mu);
        let out = product_update(&two_worlds(), &mu).unwrap();
        assert_eq!(out.len(), 3);
    }
}
