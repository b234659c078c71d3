//! `nkg`: validate annotation corpora, build unified graphs, query and
//! evaluate them, and export DOT or node-link JSON.
//!
//! Exit codes: 0 success, 1 domain failure (violations, unknown unit),
//! 2 usage or parse failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use nkg_core::fixtures::{generate, paper_fixture, GenParams};
use nkg_core::{
    evaluate_with, integrate, parse_corpus, parse_corpus_unchecked, run_query, to_dot,
    to_node_link, validate_corpus, AnnotationCorpus, NarrativeGraph, NodeKind, QueryError,
    SynonymMap, Task, UnifiedGraph,
};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    /// Bad arguments, unreadable files, malformed documents.
    #[error("{0}")]
    Usage(String),
    /// Well-formed input that fails a domain check.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::UnknownUnit { .. } => CliError::Domain(e.to_string()),
            QueryError::Malformed(_) => CliError::Usage(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "nkg",
    version,
    about = "Hierarchical narrative knowledge graphs for annotated comics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a corpus; prints one JSON violation per line.
    Validate { corpus: PathBuf },
    /// Build the unified graph of a corpus and write it as JSON.
    Build { corpus: PathBuf, out: PathBuf },
    /// Run a query against a built graph file.
    Query {
        graph: PathBuf,
        #[arg(value_enum)]
        task: TaskArg,
        /// Macro-event label (actions, timeline) or event label (dialogue).
        unit: Option<String>,
    },
    /// Score all four queries against gold sets from the corpus.
    Eval {
        corpus: PathBuf,
        /// Evaluate this graph instead of one built from the corpus.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// JSON object mapping verb variants to canonical verbs.
        #[arg(long)]
        synonyms: Option<PathBuf>,
        /// Include the per-unit breakdown.
        #[arg(long)]
        per_unit: bool,
        /// Print a text table instead of JSON.
        #[arg(long)]
        table: bool,
    },
    /// Export a graph file as DOT or node-link JSON.
    Export {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        /// Comma-separated node kinds to keep (DOT only).
        #[arg(long, value_delimiter = ',')]
        kinds: Vec<String>,
    },
    /// Print a corpus: the bundled example or a seeded synthetic one.
    #[command(group(ArgGroup::new("source").required(true).args(["seed", "paper"])))]
    GenFixture {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        paper: bool,
        /// Number of macro-events for --seed.
        #[arg(long, default_value_t = 3, requires = "seed")]
        macros: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Actions,
    Dialogue,
    Characters,
    Timeline,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Actions => Task::Actions,
            TaskArg::Dialogue => Task::Dialogue,
            TaskArg::Characters => Task::Characters,
            TaskArg::Timeline => Task::Timeline,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_corpus(path: &Path) -> Result<AnnotationCorpus> {
    parse_corpus(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Loads a corpus and refuses it if validation reports errors.
fn load_valid_corpus(path: &Path) -> Result<AnnotationCorpus> {
    let corpus = load_corpus(path)?;
    let report = validate_corpus(&corpus);
    for v in &report.violations {
        eprintln!("{v}");
    }
    if report.has_errors() {
        return Err(CliError::Domain(format!(
            "{}: corpus is invalid",
            path.display()
        )));
    }
    Ok(corpus)
}

fn load_graph(path: &Path) -> Result<UnifiedGraph> {
    let graph = NarrativeGraph::from_json(&read(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    UnifiedGraph::from_graph(graph).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str) -> Result<()> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Usage(format!("stdout: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { corpus: path } => {
            let corpus = parse_corpus_unchecked(&read(&path)?)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let report = validate_corpus(&corpus);
            let mut out = String::new();
            for v in &report.violations {
                out.push_str(&serde_json::to_string(v).expect("violation serializes"));
                out.push('\n');
            }
            emit(&out)?;
            if report.is_empty() {
                Ok(())
            } else {
                Err(CliError::Domain(format!(
                    "{} violation(s)",
                    report.violations.len()
                )))
            }
        }
        Command::Build { corpus, out } => {
            let corpus = load_valid_corpus(&corpus)?;
            let graph = integrate(&corpus).map_err(|e| CliError::Domain(e.to_string()))?;
            fs::write(&out, graph.graph().to_json())
                .map_err(|e| CliError::Usage(format!("{}: {e}", out.display())))
        }
        Command::Query { graph, task, unit } => {
            let task = Task::from(task);
            if task != Task::Characters && unit.is_none() {
                return Err(CliError::Usage(format!("task `{task}` needs a unit label")));
            }
            let graph = load_graph(&graph)?;
            let result = run_query(&graph, task, unit.as_deref())?;
            emit(&result.to_json())
        }
        Command::Eval {
            corpus,
            graph,
            synonyms,
            per_unit,
            table,
        } => {
            let corpus = load_valid_corpus(&corpus)?;
            let graph = match graph {
                Some(path) => load_graph(&path)?,
                None => integrate(&corpus).map_err(|e| CliError::Domain(e.to_string()))?,
            };
            let synonyms = match synonyms {
                Some(path) => SynonymMap::from_json(&read(&path)?)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
                None => SynonymMap::default(),
            };
            let mut report = evaluate_with(&graph, &corpus, &synonyms)?;
            if !per_unit {
                report = report.without_units();
            }
            emit(&if table {
                report.to_table()
            } else {
                report.to_json()
            })
        }
        Command::Export {
            graph,
            format,
            kinds,
        } => {
            let graph = load_graph(&graph)?;
            match format {
                Format::Json => emit(&to_node_link(graph.graph())),
                Format::Dot => {
                    let kinds = kinds
                        .iter()
                        .map(|k| k.trim().parse::<NodeKind>().map_err(CliError::Usage))
                        .collect::<Result<Vec<_>>>()?;
                    let filter = (!kinds.is_empty()).then_some(kinds.as_slice());
                    emit(&to_dot(graph.graph(), filter))
                }
            }
        }
        Command::GenFixture {
            seed,
            paper,
            macros,
        } => {
            let corpus = if paper {
                paper_fixture()
            } else {
                let params = GenParams::new(seed.expect("clap enforces the group"), macros);
                params.check().map_err(CliError::Usage)?;
                generate(&params)
            };
            emit(&corpus.to_json())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nkg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
