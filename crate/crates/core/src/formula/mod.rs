//! The epistemic language: atoms `has(x,i)`, `top`, negation, conjunction
//! and the knowledge modality `K[x]`, plus the derived connectives
//! `bot`, `|`, `->` and `<->`.
//!
//! Derived connectives are kept as tree nodes so that parsing and rendering
//! round-trip; [`Formula::desugar`] rewrites them into the core connectives.

mod eval;
mod parser;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kripke::{AgentId, Proposition};

pub use eval::{eval, extension, EvalError, Evaluator};
pub use parser::{parse, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    Atom(Proposition),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Knows(AgentId, Box<Formula>),
}

impl Formula {
    pub fn atom(agent: &AgentId, card: u32) -> Self {
        Formula::Atom(Proposition::new(agent.clone(), card))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn knows(agent: &AgentId, f: Formula) -> Self {
        Formula::Knows(agent.clone(), Box::new(f))
    }

    /// Left-nested conjunction; `top` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `bot` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::Bot)
    }

    /// Rewrites derived connectives into `top`, atoms, `~`, `&` and `K`:
    /// `bot = ~top`, `p | q = ~(~p & ~q)`, `p -> q = ~p | q`,
    /// `p <-> q = (p & q) | (~p & ~q)`.
    pub fn desugar(&self) -> Formula {
        use Formula::*;
        let or = |l: Formula, r: Formula| Formula::not(Formula::and(Formula::not(l), Formula::not(r)));
        match self {
            Top => Top,
            Bot => Formula::not(Top),
            Atom(p) => Atom(p.clone()),
            Not(f) => Formula::not(f.desugar()),
            And(l, r) => Formula::and(l.desugar(), r.desugar()),
            Or(l, r) => or(l.desugar(), r.desugar()),
            Implies(l, r) => or(Formula::not(l.desugar()), r.desugar()),
            Iff(l, r) => {
                let (l, r) = (l.desugar(), r.desugar());
                or(Formula::and(l.clone(), r.clone()), Formula::and(Formula::not(l), Formula::not(r)))
            }
            Knows(x, f) => Formula::knows(x, f.desugar()),
        }
    }

    /// True if the formula uses only the core connectives.
    pub fn is_core(&self) -> bool {
        use Formula::*;
        match self {
            Top | Atom(_) => true,
            Bot | Or(..) | Implies(..) | Iff(..) => false,
            Not(f) | Knows(_, f) => f.is_core(),
            And(l, r) => l.is_core() && r.is_core(),
        }
    }

    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => 0,
            Not(f) | Knows(_, f) => 1 + f.depth(),
            And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Agents named by `K` operators, in first-occurrence order.
    pub fn modal_agents(&self) -> Vec<&AgentId> {
        fn walk<'f>(f: &'f Formula, out: &mut Vec<&'f AgentId>) {
            use Formula::*;
            match f {
                Top | Bot | Atom(_) => {}
                Not(g) => walk(g, out),
                Knows(x, g) => {
                    if !out.contains(&x) {
                        out.push(x);
                    }
                    walk(g, out)
                }
                And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) => {
                    walk(l, out);
                    walk(r, out)
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Canonical text: binary connectives fully parenthesised, unary
    /// operators written without parentheses.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            Top => f.write_str("top"),
            Bot => f.write_str("bot"),
            Atom(p) => write!(f, "{p}"),
            Not(g) => write!(f, "~{g}"),
            And(l, r) => write!(f, "({l} & {r})"),
            Or(l, r) => write!(f, "({l} | {r})"),
            Implies(l, r) => write!(f, "({l} -> {r})"),
            Iff(l, r) => write!(f, "({l} <-> {r})"),
            Knows(x, g) => write!(f, "K[{x}] {g}"),
        }
    }
}

impl FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ag(s: &str) -> AgentId {
        AgentId::new(s).unwrap()
    }

    #[test]
    fn render_examples() {
        assert_eq!(Formula::atom(&ag("a"), 0).render(), "has(a,0)");
        let f = Formula::knows(&ag("c"), Formula::not(Formula::atom(&ag("a"), 4)));
        assert_eq!(f.render(), "K[c] ~has(a,4)");
        let g = Formula::knows(&ag("a"), Formula::and(Formula::Top, Formula::Bot));
        assert_eq!(g.render(), "K[a] (top & bot)");
    }

    #[test]
    fn desugar_is_core_and_matches_abbreviations() {
        let p = Formula::atom(&ag("a"), 0);
        let q = Formula::atom(&ag("b"), 1);
        let or = Formula::or(p.clone(), q.clone()).desugar();
        assert_eq!(or, Formula::not(Formula::and(Formula::not(p.clone()), Formula::not(q.clone()))));
        let iff = Formula::iff(p.clone(), Formula::implies(q, Formula::Bot));
        assert!(!iff.is_core());
        assert!(iff.desugar().is_core());
    }

    #[test]
    fn builders() {
        assert_eq!(Formula::conjunction([]), Formula::Top);
        assert_eq!(Formula::disjunction([]), Formula::Bot);
        let f = Formula::conjunction((0..3).map(|i| Formula::atom(&ag("a"), i)));
        assert_eq!(f, parse("has(a,0) & has(a,1) & has(a,2)").unwrap());
        assert_eq!(f.depth(), 2);
    }
}
