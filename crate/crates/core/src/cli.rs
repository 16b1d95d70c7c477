//! Driver behind the `gta` binary: run, export, audit and gc.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | i/o, snapshot or internal error |
//! | 2 | usage error |
//! | 3 | parse error in the `.gts` file |
//! | 4 | unresolved rule, constraint, order or program name |
//! | 5 | divergence guard hit |
//! | 6 | search ended with an empty last element |
//! | 7 | unknown grape |
//! | 8 | store audit failed |

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::algebra::{EvalConfig, EvalError, Evaluator, Grape};
use crate::dsl::{parse_gts_with, DslError, GtsDocument};
use crate::export::{self, HistoryGraph};
use crate::graph::OrderRegistry;
use crate::rewrite::apply;
use crate::store::{AuditReport, GraphStore, SnapshotError, StoreError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Ids,
    Json,
    Dot,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ids" => Ok(Format::Ids),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            _ => Err(format!("unknown format `{s}` (expected ids, json or dot)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: DslError },
    #[error("{0}")]
    Unresolved(String),
    #[error("divergence guard: no fixpoint after {0} iterations")]
    Divergence(usize),
    #[error("search failed: the last element is empty")]
    FailedSearch,
    #[error("unknown grape `{0}`")]
    UnknownGrape(String),
    #[error("audit failed with {} violation(s)", .0.violations.len())]
    Audit(AuditReport),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Snapshot(_) | CliError::Internal(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::Unresolved(_) => 4,
            CliError::Divergence(_) => 5,
            CliError::FailedSearch => 6,
            CliError::UnknownGrape(_) => 7,
            CliError::Audit(_) => 8,
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownGrape(g) => CliError::UnknownGrape(g),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::DivergenceGuard(n) => CliError::Divergence(n),
            EvalError::Store(s) => s.into(),
            other => CliError::Unresolved(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub gts_path: PathBuf,
    pub program: String,
    pub max_iterations: usize,
    /// Default order for `dist` without an argument.
    pub order: String,
    pub store_path: Option<PathBuf>,
    pub export: Format,
    /// Start from this stored grape instead of the star grape.
    pub seed_grape: Option<String>,
}

impl RunConfig {
    pub fn new(gts_path: impl Into<PathBuf>, program: impl Into<String>) -> Self {
        RunConfig {
            gts_path: gts_path.into(),
            program: program.into(),
            max_iterations: EvalConfig::default().max_iterations,
            order: OrderRegistry::DEFAULT.to_owned(),
            store_path: None,
            export: Format::Ids,
            seed_grape: None,
        }
    }
}

/// Result of a run. `report` is the text printed on standard output.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub grape: Grape,
    pub report: String,
    pub store: GraphStore,
}

impl RunOutcome {
    /// An empty last element means a search or check found nothing.
    pub fn failed_search(&self) -> bool {
        self.grape.last().is_empty()
    }

    pub fn exit_code(&self) -> u8 {
        if self.failed_search() {
            CliError::FailedSearch.exit_code()
        } else {
            0
        }
    }
}

pub fn load_gts(path: &Path, orders: &OrderRegistry) -> Result<GtsDocument, CliError> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    parse_gts_with(&src, orders).map_err(|source| {
        if source.is_resolution() {
            CliError::Unresolved(format!("{}:{source}", path.display()))
        } else {
            CliError::Parse { path: path.to_owned(), source }
        }
    })
}

fn open_store(path: Option<&Path>) -> Result<GraphStore, CliError> {
    Ok(match path {
        Some(p) => GraphStore::open(p)?,
        None => GraphStore::new(),
    })
}

fn require_store(path: Option<&Path>) -> Result<&Path, CliError> {
    path.ok_or_else(|| CliError::Usage("no store given (use --store or GTA_STORE)".into()))
}

/// Loads the GTS, evaluates the program and persists the result grape under
/// the program's name. Nothing is written when loading or evaluation fails;
/// a run whose last element is empty is still persisted.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    run_with_orders(config, OrderRegistry::builtin())
}

pub fn run_with_orders(config: &RunConfig, orders: OrderRegistry) -> Result<RunOutcome, CliError> {
    if config.max_iterations == 0 {
        return Err(CliError::Usage("--max-iterations must be at least 1".into()));
    }
    let gts = load_gts(&config.gts_path, &orders)?;
    let program = gts
        .program(&config.program)
        .ok_or_else(|| CliError::Unresolved(format!("unknown program `{}`", config.program)))?
        .clone();
    if !orders.contains(&config.order) {
        return Err(CliError::Unresolved(format!("unknown graph order `{}`", config.order)));
    }
    let mut store = open_store(config.store_path.as_deref())?;
    let seed = config.seed_grape.as_deref().map(|name| store.grape(name).cloned()).transpose()?;
    let eval_config =
        EvalConfig { max_iterations: config.max_iterations, default_order: config.order.clone(), ..EvalConfig::default() };
    let grape = {
        let mut ev = Evaluator::new(&gts, &mut store).with_orders(orders).with_config(eval_config);
        let start = match seed {
            Some(g) => g,
            None => ev.star(),
        };
        ev.eval(&program, &start)?
    };
    store.save_grape(config.program.clone(), grape.clone());
    if let Some(p) = &config.store_path {
        store.save(p)?;
    }
    let report = match config.export {
        Format::Ids => format_ids(&grape.last_ids()),
        Format::Json => {
            let body = serde_json::json!({
                "program": config.program,
                "length": grape.len(),
                "last": grape.last_ids(),
            });
            format!("{}\n", serde_json::to_string_pretty(&body).expect("report serializes"))
        }
        Format::Dot => export::history_dot(&store, &config.program)?,
    };
    Ok(RunOutcome { grape, report, store })
}

fn format_ids(ids: &[crate::graph::GraphId]) -> String {
    let parts: Vec<String> = ids.iter().map(|id| id.to_string()).collect();
    format!("({})\n", parts.join(" "))
}

/// What `export` renders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExportKind {
    #[default]
    History,
    Traces,
}

/// Renders the history or the traces of a stored grape.
pub fn export(store_path: Option<&Path>, grape: &str, kind: ExportKind, format: Format) -> Result<String, CliError> {
    let store = GraphStore::load(require_store(store_path)?)?;
    Ok(match (kind, format) {
        (ExportKind::History, Format::Ids) => {
            let mut s = String::new();
            for (i, row) in store.history(grape)?.iter().enumerate() {
                s.push_str(&format!("{i}: {}", format_ids(row)));
            }
            s
        }
        (ExportKind::History, Format::Json) => HistoryGraph::build(&store, grape)?.to_json() + "\n",
        (ExportKind::History, Format::Dot) => HistoryGraph::build(&store, grape)?.to_dot(),
        (ExportKind::Traces, Format::Json) => export::traces_json(&store, grape)? + "\n",
        (ExportKind::Traces, Format::Ids) => export::traces(&store, grape)?
            .iter()
            .map(|t| format!("{} {} {}\n", t.rule, t.input, t.output))
            .collect(),
        (ExportKind::Traces, Format::Dot) => return Err(CliError::Usage("traces export supports ids and json".into())),
    })
}

/// Checks all store invariants. With a GTS, every logged step is replayed.
pub fn audit(store_path: Option<&Path>, gts_path: Option<&Path>) -> Result<String, CliError> {
    let store = GraphStore::load(require_store(store_path)?)?;
    let gts = gts_path.map(|p| load_gts(p, &OrderRegistry::builtin())).transpose()?;
    let report = store.audit_with(|step| {
        let gts = gts.as_ref()?;
        let Some(rule) = gts.rule(&step.rule_name) else {
            return Some(Err(format!("unknown rule `{}`", step.rule_name)));
        };
        let input = store.get(step.input)?;
        Some(apply(rule, input, &step.matching).map_err(|e| e.to_string()))
    });
    if report.is_ok() {
        Ok(format!("ok: {} graphs, {} steps\n", store.len(), store.steps().len()))
    } else {
        Err(CliError::Audit(report))
    }
}

/// Collects every graph not reachable from `roots`, saving the store.
pub fn gc(store_path: Option<&Path>, roots: &[String]) -> Result<String, CliError> {
    let path = require_store(store_path)?;
    let mut store = GraphStore::load(path)?;
    let removed = store.gc(roots)?;
    store.save(path)?;
    Ok(format!("removed {removed} graphs, {} remain\n", store.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let errors = [
            CliError::Internal(String::new()),
            CliError::Usage(String::new()),
            CliError::Parse { path: PathBuf::new(), source: DslError::Invalid { message: String::new(), line: 1, col: 1 } },
            CliError::Unresolved(String::new()),
            CliError::Divergence(1),
            CliError::FailedSearch,
            CliError::UnknownGrape(String::new()),
            CliError::Audit(AuditReport { violations: vec![] }),
        ];
        let codes: Vec<u8> = errors.iter().map(CliError::exit_code).collect();
        assert_eq!(codes, vec![1, 2, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn formats() {
        assert_eq!("dot".parse::<Format>(), Ok(Format::Dot));
        assert!("xml".parse::<Format>().is_err());
    }
}
