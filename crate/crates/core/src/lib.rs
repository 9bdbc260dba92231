//! Dynamic epistemic logic model checking for card-deal announcement problems.
//!
//! The crate is organised bottom-up:
//!
//! - [`kripke`]: S5 Kripke models stored as one partition of the worlds per agent.
//! - [`formula`]: the epistemic language, its concrete syntax and the model checker.
//! - [`update`]: action models and the product update `M ⊗ μ`.
//! - [`cards`]: the `RCP(k;l)` card-deal instance and its goal formulas.
//! - [`analysis`]: protocol runs, solution checks and the impossibility sweeps.
//! - [`cli`]: the `delcards` command-line front end.
//!
//! Every capability has a runnable example under `examples/`:
//!
//! ```bash
//! cargo run --example fano_protocol
//! ```

pub mod analysis;
pub mod cards;
pub mod cli;
pub mod formula;
pub mod kripke;
pub mod update;

pub use analysis::AnalysisError;
pub use cards::{build_rcp, CardId, Deal, Hand, RcpError, RcpInstance};
pub use formula::{EvalError, Formula, ParseError};
pub use kripke::{ActionId, AgentId, KripkeModel, ModelError, Proposition, Violation, WorldId};
pub use update::{product_update, public_announcement, ActionModel, UpdateError};
