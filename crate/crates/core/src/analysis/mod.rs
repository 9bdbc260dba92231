//! Protocol runs and the impossibility checks for card-deal announcements.

mod bounds;
mod pair;
mod protocol;
mod safety;
mod sweep;

use thiserror::Error;

use crate::cards::RcpError;
use crate::formula::{EvalError, ParseError};
use crate::kripke::ModelError;
use crate::update::UpdateError;

pub use bounds::{inequality_check, threshold_l, InequalityWitness};
pub use pair::{
    find_b_indistinguishable_pair, random_b_strategy, random_valid_announcement, two_announcement_sweep,
    two_announcement_trace, two_announcement_trace_with, ModelStats, PairWitness, TraceReport, TraceSweepReport,
};
pub use protocol::{
    check_solution, run_protocol, verify_protocol, Announcement, AnnouncementBody, InstanceDoc, Protocol, ProtocolDoc,
    ProtocolRun, SolutionReport, StepDoc, StepSummary,
};
pub use safety::{lemma2_check, Lemma2Report};
pub use sweep::{single_announcement_sweep, sweep_candidates, ImpossibilityReport, SweepSpec};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("step {step} ({by}): announcement is not known to be true by its announcer")]
    Untruthful { step: usize, by: String },
    #[error("step {step}: no world survives the announcement")]
    Inconsistent { step: usize },
    #[error("actual world {0} was eliminated")]
    ActualEliminated(String),
    #[error("invalid announcement: {0}")]
    InvalidAnnouncement(String),
    #[error("protocol does not match the instance: {0}")]
    InstanceMismatch(String),
    #[error("malformed protocol: {0}")]
    Malformed(String),
    #[error(transparent)]
    Rcp(#[from] RcpError),
    #[error(transparent)]
    Update(#[from] UpdateError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
