//! Model checking over partition-stored S5 models.
//!
//! A formula is compiled into an arena (children before parents) with agents
//! and atoms resolved against the model. Knowledge is constant on a
//! component, so `K[x]` nodes are decided once per (node, block).

use std::collections::HashMap;

use thiserror::Error;

use super::Formula;
use crate::kripke::{AgentId, KripkeModel, ModelError, WorldId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("formula mentions agent {0}, which the model does not have")]
    UnknownAgent(AgentId),
    #[error("world {0} is not in the model")]
    UnknownWorld(String),
}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownAgent(a) => EvalError::UnknownAgent(a),
            other => EvalError::UnknownWorld(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Const(bool),
    // `None` when the proposition holds nowhere in the model
    Atom(Option<u32>),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Knows(usize, usize),
}

/// A formula compiled against one model.
pub struct Evaluator<'m> {
    model: &'m KripkeModel,
    nodes: Vec<Node>,
    memo: HashMap<(usize, usize), bool>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m KripkeModel, f: &Formula) -> Result<Self, EvalError> {
        let mut nodes = Vec::new();
        compile(model, f, &mut nodes)?;
        Ok(Evaluator { model, nodes, memo: HashMap::new() })
    }

    fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Truth at the world with index `world`.
    pub fn at(&mut self, world: usize) -> bool {
        self.eval_node(self.root(), world)
    }

    fn eval_node(&mut self, n: usize, w: usize) -> bool {
        match self.nodes[n] {
            Node::Const(b) => b,
            Node::Atom(p) => p.is_some_and(|p| self.model.has_prop(w, p)),
            Node::Not(f) => !self.eval_node(f, w),
            Node::And(l, r) => self.eval_node(l, w) && self.eval_node(r, w),
            Node::Or(l, r) => self.eval_node(l, w) || self.eval_node(r, w),
            Node::Implies(l, r) => !self.eval_node(l, w) || self.eval_node(r, w),
            Node::Iff(l, r) => self.eval_node(l, w) == self.eval_node(r, w),
            Node::Knows(x, f) => {
                let part = self.model.partition(x);
                let block = part.block_of(w);
                if let Some(&v) = self.memo.get(&(n, block)) {
                    return v;
                }
                let model = self.model;
                let v = model.partition(x).block(block).iter().all(|&v| self.eval_node(f, v));
                self.memo.insert((n, block), v);
                v
            }
        }
    }

    /// Truth value at every world, in model order.
    pub fn extension(&self) -> Vec<bool> {
        let n = self.model.len();
        let mut values: Vec<Vec<bool>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Const(b) => vec![b; n],
                Node::Atom(None) => vec![false; n],
                Node::Atom(Some(p)) => (0..n).map(|w| self.model.has_prop(w, p)).collect(),
                Node::Not(f) => values[f].iter().map(|b| !b).collect(),
                Node::And(l, r) => zip(&values[l], &values[r], |a, b| a && b),
                Node::Or(l, r) => zip(&values[l], &values[r], |a, b| a || b),
                Node::Implies(l, r) => zip(&values[l], &values[r], |a, b| !a || b),
                Node::Iff(l, r) => zip(&values[l], &values[r], |a, b| a == b),
                Node::Knows(x, f) => {
                    let mut out = vec![false; n];
                    for block in self.model.partition(x).blocks() {
                        let known = block.iter().all(|&w| values[f][w]);
                        for &w in block {
                            out[w] = known;
                        }
                    }
                    out
                }
            };
            values.push(v);
        }
        values.pop().unwrap_or_default()
    }
}

fn zip(l: &[bool], r: &[bool], op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    l.iter().zip(r).map(|(&a, &b)| op(a, b)).collect()
}

fn compile(model: &KripkeModel, f: &Formula, nodes: &mut Vec<Node>) -> Result<usize, EvalError> {
    let bin = |l: &Formula, r: &Formula, nodes: &mut Vec<Node>| -> Result<(usize, usize), EvalError> {
        Ok((compile(model, l, nodes)?, compile(model, r, nodes)?))
    };
    let node = match f {
        Formula::Top => Node::Const(true),
        Formula::Bot => Node::Const(false),
        Formula::Atom(p) => Node::Atom(model.prop_index(p)),
        Formula::Not(g) => Node::Not(compile(model, g, nodes)?),
        Formula::And(l, r) => {
            let (l, r) = bin(l, r, nodes)?;
            Node::And(l, r)
        }
        Formula::Or(l, r) => {
            let (l, r) = bin(l, r, nodes)?;
            Node::Or(l, r)
        }
        Formula::Implies(l, r) => {
            let (l, r) = bin(l, r, nodes)?;
            Node::Implies(l, r)
        }
        Formula::Iff(l, r) => {
            let (l, r) = bin(l, r, nodes)?;
            Node::Iff(l, r)
        }
        Formula::Knows(x, g) => {
            let xi = model.agent_index(x).ok_or_else(|| EvalError::UnknownAgent(x.clone()))?;
            Node::Knows(xi, compile(model, g, nodes)?)
        }
    };
    nodes.push(node);
    Ok(nodes.len() - 1)
}

/// `M, w ⊨ f`.
pub fn eval(model: &KripkeModel, world: &WorldId, f: &Formula) -> Result<bool, EvalError> {
    let w = model.index_of(world).ok_or_else(|| EvalError::UnknownWorld(world.to_string()))?;
    Ok(Evaluator::new(model, f)?.at(w))
}

/// `{ w : M, w ⊨ f }`, as one flag per world in model order.
pub fn extension(model: &KripkeModel, f: &Formula) -> Result<Vec<bool>, EvalError> {
    Ok(Evaluator::new(model, f)?.extension())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::formula::parse;
    use crate::kripke::{ModelDoc, WorldDoc};

    fn ag(s: &str) -> AgentId {
        AgentId::new(s).unwrap()
    }

    // w1: has(a,0); w2: has(b,0); w3: nothing. a: {w1,w2},{w3}; b: {w1},{w2,w3}
    fn model() -> KripkeModel {
        let world = |id: &str, props: &[&str]| WorldDoc {
            id: id.into(),
            history: vec![],
            props: props.iter().map(|p| p.parse().unwrap()).collect(),
        };
        KripkeModel::from_doc(&ModelDoc {
            agents: vec![ag("a"), ag("b")],
            worlds: vec![world("w1", &["has(a,0)"]), world("w2", &["has(b,0)", "has(a,0)"]), world("w3", &[])],
            relations: BTreeMap::from([
                (ag("a"), vec![vec!["w1".into(), "w2".into()], vec!["w3".into()]]),
                (ag("b"), vec![vec!["w1".into()], vec!["w2".into(), "w3".into()]]),
            ]),
        })
        .unwrap()
    }

    fn ext(m: &KripkeModel, s: &str) -> Vec<bool> {
        extension(m, &parse(s).unwrap()).unwrap()
    }

    #[test]
    fn knowledge_clause() {
        let m = model();
        assert_eq!(ext(&m, "K[a] has(a,0)"), vec![true, true, false]);
        assert_eq!(ext(&m, "K[b] has(a,0)"), vec![true, false, false]);
        assert_eq!(ext(&m, "K[a] ~K[b] has(a,0)"), vec![false, false, true]);
        assert_eq!(ext(&m, "top"), vec![true; 3]);
        assert_eq!(ext(&m, "bot"), vec![false; 3]);
    }

    #[test]
    fn point_eval_matches_extension() {
        let m = model();
        for s in ["K[a] has(a,0) -> K[b] has(b,0)", "has(a,0) <-> ~K[b] has(b,0)", "K[a] (has(a,0) | has(b,0))"] {
            let f = parse(s).unwrap();
            let e = extension(&m, &f).unwrap();
            for (w, id) in m.worlds().iter().enumerate() {
                assert_eq!(eval(&m, id, &f).unwrap(), e[w], "{s} at {id}");
            }
        }
    }

    #[test]
    fn unknown_names() {
        let m = model();
        let w1 = WorldId::new("w1").unwrap();
        assert_eq!(eval(&m, &w1, &parse("K[z] top").unwrap()), Err(EvalError::UnknownAgent(ag("z"))));
        assert!(matches!(eval(&m, &WorldId::new("w9").unwrap(), &Formula::Top), Err(EvalError::UnknownWorld(_))));
        // atoms that occur nowhere are false, not errors
        assert!(!eval(&m, &w1, &parse("has(c,99)").unwrap()).unwrap());
    }
}
