use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::cards::{anne, bill, build_rcp_with_cap, cath, Deal, Hand, RcpInstance, DEFAULT_WORLD_CAP};
use crate::formula::{parse, Evaluator, Formula};
use crate::kripke::{ActionId, AgentId, KripkeModel, WorldId};
use crate::update::{labelled_announcement, product_update};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnouncementBody {
    Formula(Formula),
    /// "My hand is one of these."
    Hands(Vec<Hand>),
}

/// A truthful public announcement made by one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Announcement {
    pub by: AgentId,
    pub body: AnnouncementBody,
}

impl Announcement {
    pub fn hands(by: AgentId, hands: Vec<Hand>) -> Self {
        Announcement { by, body: AnnouncementBody::Hands(hands) }
    }

    pub fn formula(by: AgentId, f: Formula) -> Self {
        Announcement { by, body: AnnouncementBody::Formula(f) }
    }

    pub fn to_formula(&self, inst: &RcpInstance) -> Result<Formula, AnalysisError> {
        match &self.body {
            AnnouncementBody::Formula(f) => Ok(f.clone()),
            AnnouncementBody::Hands(h) => Ok(inst.announcement(&self.by, h)?),
        }
    }
}

/// An announcement sequence for a given `RCP(k;l)` deal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protocol {
    pub k: u32,
    pub l: u32,
    pub deal: Option<Deal>,
    pub steps: Vec<Announcement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub k: u32,
    pub l: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deal: Option<Deal>,
}

/// One protocol step; exactly one of `hands` and `formula` is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub by: AgentId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hands: Option<Vec<Hand>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
}

/// The protocol file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolDoc {
    pub instance: InstanceDoc,
    pub steps: Vec<StepDoc>,
}

impl Protocol {
    pub fn from_doc(doc: &ProtocolDoc) -> Result<Self, AnalysisError> {
        let steps = doc
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let body = match (&s.hands, &s.formula) {
                    (Some(h), None) => AnnouncementBody::Hands(h.clone()),
                    (None, Some(f)) => AnnouncementBody::Formula(parse(f)?),
                    _ => {
                        return Err(AnalysisError::Malformed(format!(
                            "step {} needs exactly one of \"hands\" and \"formula\"",
                            i + 1
                        )))
                    }
                };
                Ok(Announcement { by: s.by.clone(), body })
            })
            .collect::<Result<_, AnalysisError>>()?;
        Ok(Protocol { k: doc.instance.k, l: doc.instance.l, deal: doc.instance.deal.clone(), steps })
    }

    pub fn to_doc(&self) -> ProtocolDoc {
        ProtocolDoc {
            instance: InstanceDoc { k: self.k, l: self.l, deal: self.deal.clone() },
            steps: self
                .steps
                .iter()
                .map(|s| match &s.body {
                    AnnouncementBody::Hands(h) => StepDoc { by: s.by.clone(), hands: Some(h.clone()), formula: None },
                    AnnouncementBody::Formula(f) => {
                        StepDoc { by: s.by.clone(), hands: None, formula: Some(f.to_string()) }
                    }
                })
                .collect(),
        }
    }

    pub fn instance(&self) -> Result<RcpInstance, AnalysisError> {
        self.instance_with_cap(DEFAULT_WORLD_CAP)
    }

    pub fn instance_with_cap(&self, cap: u64) -> Result<RcpInstance, AnalysisError> {
        Ok(build_rcp_with_cap(self.k, self.l, self.deal.clone(), cap)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepSummary {
    pub step: usize,
    pub label: String,
    pub by: AgentId,
    pub formula: String,
    pub worlds: usize,
    pub blocks: BTreeMap<AgentId, usize>,
}

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub model: KripkeModel,
    /// The surviving copy of `w*`.
    pub actual: WorldId,
    pub steps: Vec<StepSummary>,
    /// World count before the first step and after each step.
    pub world_counts: Vec<usize>,
}

fn block_counts(m: &KripkeModel) -> BTreeMap<AgentId, usize> {
    m.agents().iter().enumerate().map(|(x, a)| (a.clone(), m.partition(x).len())).collect()
}

/// Executes the protocol step by step, refusing announcements the announcer
/// does not know to be true at the actual world.
pub fn run_protocol(inst: &RcpInstance, p: &Protocol) -> Result<ProtocolRun, AnalysisError> {
    if p.k != inst.k || p.l != inst.l {
        return Err(AnalysisError::InstanceMismatch(format!(
            "protocol is for RCP({};{}), instance is RCP({};{})",
            p.k, p.l, inst.k, inst.l
        )));
    }
    if let Some(d) = &p.deal {
        if *d != inst.actual_deal {
            return Err(AnalysisError::InstanceMismatch("protocol deal differs from the instance deal".into()));
        }
    }
    if p.steps.is_empty() {
        return Err(AnalysisError::Malformed("protocol has no steps".into()));
    }

    let mut model = inst.model.clone();
    let mut actual = inst.actual.clone();
    let mut world_counts = vec![model.len()];
    let mut steps = Vec::with_capacity(p.steps.len());
    for (i, ann) in p.steps.iter().enumerate() {
        let step = i + 1;
        let f = ann.to_formula(inst)?;
        let by = model.require_agent(&ann.by)?;
        let w = model.index_of(&actual).ok_or_else(|| AnalysisError::ActualEliminated(actual.to_string()))?;
        let mut ev = Evaluator::new(&model, &f)?;
        if !model.component(by, w).iter().all(|&v| ev.at(v)) {
            return Err(AnalysisError::Untruthful { step, by: ann.by.to_string() });
        }
        let label = ActionId::new(format!("ann{step}"))?;
        model = product_update(&model, &labelled_announcement(f.clone(), label.clone()))?;
        if model.is_empty() {
            return Err(AnalysisError::Inconsistent { step });
        }
        actual = actual.extended(&label);
        world_counts.push(model.len());
        steps.push(StepSummary {
            step,
            label: label.to_string(),
            by: ann.by.clone(),
            formula: f.to_string(),
            worlds: model.len(),
            blocks: block_counts(&model),
        });
    }
    Ok(ProtocolRun { model, actual, steps, world_counts })
}

/// Goal and structural checks at `w*` in a final model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionReport {
    pub world_counts: Vec<usize>,
    pub a_knows_deal: bool,
    pub b_knows_deal: bool,
    pub c_ignorant: bool,
    pub a_component_singleton: bool,
    pub b_component_singleton: bool,
    pub c_component_size: usize,
    /// Goals checked at every surviving world, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strong: Option<bool>,
    pub verdict: bool,
}

/// Evaluates the three goals at `actual` and the component-size conditions a
/// solution must meet. `actual` may be given by base id only; the latest
/// world with that base is used.
pub fn check_solution(
    model: &KripkeModel,
    actual: &WorldId,
    inst: &RcpInstance,
    strong: bool,
) -> Result<SolutionReport, AnalysisError> {
    let w = model
        .index_of(actual)
        .or_else(|| model.find_latest(actual.base()))
        .ok_or_else(|| AnalysisError::ActualEliminated(actual.to_string()))?;
    let (a, b, c) = (anne(), bill(), cath());
    let mut a_knows = Evaluator::new(model, &inst.knows_deal(&a))?;
    let mut b_knows = Evaluator::new(model, &inst.knows_deal(&b))?;
    let mut ignorant = Evaluator::new(model, &inst.ignorance_goal())?;

    let distinct_bases = |x: &AgentId| -> Result<usize, AnalysisError> {
        let xi = model.require_agent(x)?;
        let bases: BTreeSet<&str> = model.component(xi, w).iter().map(|&v| model.world(v).base()).collect();
        Ok(bases.len())
    };
    let a_component_singleton = distinct_bases(&a)? == 1;
    let b_component_singleton = distinct_bases(&b)? == 1;
    let c_component_size = distinct_bases(&c)?;

    let a_knows_deal = a_knows.at(w);
    let b_knows_deal = b_knows.at(w);
    let c_ignorant = ignorant.at(w);
    let strong = strong.then(|| (0..model.len()).all(|v| a_knows.at(v) && b_knows.at(v) && ignorant.at(v)));

    let verdict = a_knows_deal
        && b_knows_deal
        && c_ignorant
        && a_component_singleton
        && b_component_singleton
        && c_component_size > 1
        && strong.unwrap_or(true);
    Ok(SolutionReport {
        world_counts: vec![model.len()],
        a_knows_deal,
        b_knows_deal,
        c_ignorant,
        a_component_singleton,
        b_component_singleton,
        c_component_size,
        strong,
        verdict,
    })
}

/// Runs a protocol and checks its final model.
pub fn verify_protocol(
    inst: &RcpInstance,
    p: &Protocol,
    strong: bool,
) -> Result<(ProtocolRun, SolutionReport), AnalysisError> {
    let run = run_protocol(inst, p)?;
    let mut report = check_solution(&run.model, &run.actual, inst, strong)?;
    report.world_counts = run.world_counts.clone();
    Ok((run, report))
}
