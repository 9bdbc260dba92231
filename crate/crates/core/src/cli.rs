//! The `delcards` command line. [`run`] does all the work and returns the
//! exit code and output, so the front end can be tested without a process.
//!
//! Exit codes: 0 when the check passes, 1 when it fails or a counterexample
//! is found, 2 on usage, format or validation errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    self, find_b_indistinguishable_pair, inequality_check, lemma2_check, single_announcement_sweep,
    two_announcement_sweep, verify_protocol, Protocol, ProtocolDoc, SweepSpec,
};
use crate::cards::{anne, build_rcp_with_cap, cath, Deal, Hand, RcpInstance, DEFAULT_WORLD_CAP};
use crate::formula::{eval, parse, Formula};
use crate::kripke::ActionId;
use crate::kripke::{KripkeModel, ModelDoc, WorldId};
use crate::update::{labelled_announcement, product_update, ActionModel, ActionModelDoc};

pub const WORLD_CAP_ENV: &str = "DELCARDS_WORLD_CAP";

#[derive(Debug, Parser)]
#[command(name = "delcards", version, about = "Epistemic model checker for card-deal announcement protocols")]
pub struct Cli {
    /// Refuse to build models with more worlds than this [env: DELCARDS_WORLD_CAP]
    #[arg(long, global = true)]
    pub world_cap: Option<u64>,
    /// Also write the JSON result to this file
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Card-deal model generation
    #[command(subcommand)]
    Rcp(RcpCommand),
    /// Evaluate a formula at a world of a model file
    Mc(McArgs),
    /// Apply an action model file to a model file
    Update(UpdateArgs),
    /// Run or verify a protocol file
    #[command(subcommand)]
    Protocol(ProtocolCommand),
    /// Impossibility sweeps
    #[command(subcommand)]
    Sweep(SweepCommand),
    /// Cover and intersection conditions of an announcement by a
    Lemma2(Lemma2Args),
    /// Bill-indistinguishable pairs after an announcement by a
    #[command(subcommand)]
    Lemma4(Lemma4Command),
    /// Two-announcement traces with sampled replies by b
    TwoAnn(TwoAnnArgs),
    /// Exact counting inequality at (k, l)
    Ineq(IneqArgs),
}

#[derive(Debug, Subcommand)]
pub enum RcpCommand {
    /// Emit the model JSON of RCP(k;l)
    Build(BuildArgs),
}

#[derive(Debug, Args)]
pub struct KL {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub l: u32,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub kl: KL,
    /// Actual deal, e.g. {"a":[0,1,2],"b":[3,4,5],"c":[6]}
    #[arg(long)]
    pub deal: Option<String>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// World id; without `@` history the latest world with this base is used
    #[arg(long)]
    pub world: String,
    #[arg(long)]
    pub formula: String,
}

#[derive(Debug, Args)]
pub struct UpdateArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Action model JSON file
    #[arg(long, conflicts_with = "announce")]
    pub action: Option<PathBuf>,
    /// Formula to announce publicly
    #[arg(long)]
    pub announce: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum ProtocolCommand {
    /// Execute the steps and report each model, then the solution checks
    Run(ProtocolArgs),
    /// Execute the steps and report only the solution checks
    Verify(ProtocolArgs),
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[arg(long)]
    pub file: PathBuf,
    /// Check the goals at every surviving world, not only the actual one
    #[arg(long)]
    pub strong: bool,
}

#[derive(Debug, Subcommand)]
pub enum SweepCommand {
    /// Every single announcement by a leaves her component intact
    Single(SingleArgs),
}

#[derive(Debug, Args)]
pub struct SingleArgs {
    #[command(flatten)]
    pub kl: KL,
    #[arg(long, default_value_t = 3)]
    pub max_extra: usize,
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Lemma2Args {
    /// Hands as JSON, e.g. [[0,1,2],[0,3,4]]
    #[arg(long)]
    pub hands: String,
    #[command(flatten)]
    pub kl: KL,
}

#[derive(Debug, Subcommand)]
pub enum Lemma4Command {
    /// Find the least pair of worlds b cannot tell apart
    Pair(PairArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[command(flatten)]
    pub kl: KL,
    #[arg(long)]
    pub hands: String,
}

#[derive(Debug, Args)]
pub struct TwoAnnArgs {
    #[command(flatten)]
    pub kl: KL,
    /// First announcement as hands JSON; sampled per trace when omitted
    #[arg(long)]
    pub first: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include every trace in the output
    #[arg(long)]
    pub traces: bool,
}

#[derive(Debug, Args)]
pub struct IneqArgs {
    #[arg(long)]
    pub k: u64,
    /// Defaults to the threshold for k
    #[arg(long, conflicts_with = "k_max")]
    pub l: Option<u64>,
    /// Check every k from --k to this value at its threshold
    #[arg(long)]
    pub k_max: Option<u64>,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CliOutcome { code, stdout: text, stderr: String::new() }
            } else {
                CliOutcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok((passed, value)) => {
            let mut stdout = serde_json::to_string_pretty(&value).expect("JSON values serialize");
            stdout.push('\n');
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &stdout) {
                    return CliOutcome { code: 2, stdout, stderr: format!("error: {}: {e}\n", path.display()) };
                }
            }
            CliOutcome { code: if passed { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err(Failure(msg)) => CliOutcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

/// Entry point for the binary: runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let out = run(argv);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

fn world_cap(cli: &Cli) -> Result<u64, Failure> {
    if let Some(cap) = cli.world_cap {
        return Ok(cap);
    }
    match std::env::var(WORLD_CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure(format!("{WORLD_CAP_ENV}={v:?} is not a number"))),
        Err(_) => Ok(DEFAULT_WORLD_CAP),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn from_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure(format!("malformed {what} JSON: {e}")))
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn instance(cli: &Cli, kl: &KL, deal: Option<Deal>) -> Result<RcpInstance, Failure> {
    Ok(build_rcp_with_cap(kl.k, kl.l, deal, world_cap(cli)?)?)
}

fn execute(cli: &Cli) -> Result<(bool, Value), Failure> {
    match &cli.command {
        Command::Rcp(RcpCommand::Build(args)) => {
            let deal = args.deal.as_deref().map(|d| from_json::<Deal>("deal", d)).transpose()?;
            let inst = instance(cli, &args.kl, deal)?;
            Ok((true, to_value(&inst.model)))
        }
        Command::Mc(args) => {
            let model: KripkeModel = load_model(&args.model)?;
            let f: Formula = parse(&args.formula)?;
            let w = resolve_world(&model, &args.world)?;
            let value = eval(&model, &w, &f)?;
            Ok((value, Value::Bool(value)))
        }
        Command::Update(args) => {
            let model = load_model(&args.model)?;
            let mu = match (&args.action, &args.announce) {
                (Some(p), None) => ActionModel::from_doc(&from_json::<ActionModelDoc>("action model", &read(p)?)?)?,
                (None, Some(f)) => labelled_announcement(parse(f)?, ActionId::new("ann")?),
                _ => return Err(Failure("give exactly one of --action or --announce".into())),
            };
            let next = product_update(&model, &mu)?;
            Ok((true, to_value(&next)))
        }
        Command::Protocol(cmd) => {
            let (args, with_steps) = match cmd {
                ProtocolCommand::Run(a) => (a, true),
                ProtocolCommand::Verify(a) => (a, false),
            };
            let doc: ProtocolDoc = from_json("protocol", &read(&args.file)?)?;
            let p = Protocol::from_doc(&doc)?;
            let inst = p.instance_with_cap(world_cap(cli)?)?;
            let (run, report) = verify_protocol(&inst, &p, args.strong)?;
            let mut value = to_value(&report);
            if with_steps {
                value = json!({
                    "instance": doc.instance,
                    "actual": run.actual,
                    "steps": run.steps,
                    "report": value,
                });
            }
            Ok((report.verdict, value))
        }
        Command::Sweep(SweepCommand::Single(args)) => {
            let inst = instance(cli, &args.kl, None)?;
            let spec = SweepSpec { exhaustive_max_extra: args.max_extra, samples: args.samples, seed: args.seed };
            let report = single_announcement_sweep(&inst, spec)?;
            let mut value = to_value(&report);
            value["passed"] = Value::Bool(report.passed());
            Ok((report.passed(), value))
        }
        Command::Lemma2(args) => {
            let hands: Vec<Hand> = from_json("hands", &args.hands)?;
            let inst = instance(cli, &args.kl, None)?;
            check_hand_sizes(&inst, &hands)?;
            let report = lemma2_check(&hands, &inst.universe());
            let mut value = to_value(&report);
            value["safe"] = Value::Bool(report.safe());
            value["confirmed"] = confirm_leaks(&inst, &hands, &report)?;
            Ok((report.safe(), value))
        }
        Command::Lemma4(Lemma4Command::Pair(args)) => {
            let hands: Vec<Hand> = from_json("hands", &args.hands)?;
            let inst = instance(cli, &args.kl, None)?;
            check_hand_sizes(&inst, &hands)?;
            let pair = find_b_indistinguishable_pair(&inst, &hands)?;
            Ok((pair.is_some(), json!({ "k": inst.k, "l": inst.l, "found": pair.is_some(), "pair": pair })))
        }
        Command::TwoAnn(args) => {
            let first = args.first.as_deref().map(|h| from_json::<Vec<Hand>>("hands", h)).transpose()?;
            let inst = instance(cli, &args.kl, None)?;
            if let Some(h) = &first {
                check_hand_sizes(&inst, h)?;
            }
            let mut report = two_announcement_sweep(&inst, first.as_deref(), args.samples, args.seed)?;
            if !args.traces {
                report.traces.truncate(1);
            }
            Ok((report.passed, to_value(&report)))
        }
        Command::Ineq(args) => {
            if args.k < 2 {
                return Err(Failure("--k must be at least 2".into()));
            }
            match args.k_max {
                None => {
                    let w = inequality_check(args.k, args.l);
                    Ok((w.holds, to_value(&w)))
                }
                Some(k_max) => {
                    let rows: Vec<_> = (args.k..=k_max).map(|k| inequality_check(k, None)).collect();
                    let holds = !rows.is_empty() && rows.iter().all(|w| w.holds);
                    Ok((holds, json!({ "holds": holds, "checks": rows })))
                }
            }
        }
    }
}

fn load_model(path: &Path) -> Result<KripkeModel, Failure> {
    let doc: ModelDoc = from_json("model", &read(path)?)?;
    Ok(KripkeModel::from_doc(&doc)?)
}

fn resolve_world(model: &KripkeModel, text: &str) -> Result<WorldId, Failure> {
    let id: WorldId = text.parse()?;
    if model.index_of(&id).is_some() {
        return Ok(id);
    }
    if id.history().is_empty() {
        if let Some(ix) = model.find_latest(id.base()) {
            return Ok(model.world(ix).clone());
        }
    }
    Err(Failure(format!("unknown world {text:?}")))
}

fn check_hand_sizes(inst: &RcpInstance, hands: &[Hand]) -> Result<(), Failure> {
    if hands.is_empty() {
        return Err(Failure("hand list is empty".into()));
    }
    inst.announcement(&anne(), hands)?;
    Ok(())
}

/// For each leaked card, the model-level fact Cath learns after the
/// announcement, when the announcement is truthful at `w*`.
fn confirm_leaks(inst: &RcpInstance, hands: &[Hand], report: &analysis::Lemma2Report) -> Result<Value, Failure> {
    if !hands.contains(&inst.actual_deal.a) {
        return Ok(Value::Null);
    }
    let label = ActionId::new("alpha")?;
    let m = product_update(&inst.model, &labelled_announcement(inst.announcement(&anne(), hands)?, label.clone()))?;
    let w = inst.actual.extended(&label);
    let (a, c) = (anne(), cath());
    let mut out = serde_json::Map::new();
    let cards = report.uncovered.iter().map(|&i| (i, false)).chain(report.common.iter().map(|&i| (i, true)));
    for (i, with_a) in cards {
        let fact = if with_a { Formula::atom(&a, i) } else { Formula::not(Formula::atom(&a, i)) };
        let f = Formula::knows(&c, fact);
        out.insert(f.to_string(), Value::Bool(eval(&m, &w, &f)?));
    }
    Ok(Value::Object(out))
}
