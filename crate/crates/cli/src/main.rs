use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use argweave_core::api::{self, ApiError, IngestSummary};
use argweave_core::corpus::{load_schemes, Corpus, CorpusLoader, CorpusStore};
use argweave_core::credibility;
use argweave_core::query::{self, QueryError};
use argweave_core::schemes::SchemeRegistry;
use argweave_server::{AppState, DEFAULT_LISTEN};
use chrono::{DateTime, NaiveDate, Utc};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "argweave",
    version,
    about = "Load, score and query a scheme-based argument corpus"
)]
struct Cli {
    /// Corpus file to load.
    #[arg(long, global = true, env = "ARGWEAVE_CORPUS")]
    corpus: Option<PathBuf>,

    /// Extra taxonomy file; repeatable.
    #[arg(long = "taxonomy", global = true)]
    taxonomies: Vec<PathBuf>,

    /// Scheme definitions replacing the built-in schemes.
    #[arg(long, global = true)]
    schemes: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// Reference time for relative dates (RFC 3339 or YYYY-MM-DD); defaults
    /// to the current UTC time.
    #[arg(long, global = true)]
    now: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load and validate the corpus, then print a summary.
    Ingest,
    /// Write the corpus back out in canonical form.
    Save {
        /// Destination file.
        out: PathBuf,
    },
    /// Score one argument and show how each critical question was answered.
    Credibility { argument: String },
    /// Run a FIND ARGUMENTS query.
    Query { text: String },
    /// Serve the HTTP API until interrupted.
    Serve {
        #[arg(long, env = "ARGWEAVE_LISTEN", default_value = DEFAULT_LISTEN)]
        listen: SocketAddr,
        /// Directory of built web UI assets to serve under /ui/.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

/// Exit 1: the corpus or configuration could not be loaded.
/// Exit 2: the request itself failed against a loaded corpus.
enum Failure {
    Load(String),
    Domain(String),
}

impl Failure {
    fn load(e: impl std::fmt::Display) -> Self {
        Failure::Load(e.to_string())
    }
}

fn parse_now(text: Option<&str>) -> Result<DateTime<Utc>, Failure> {
    let Some(text) = text else {
        return Ok(Utc::now());
    };
    if let Ok(d) = DateTime::parse_from_rfc3339(text) {
        return Ok(d.with_timezone(&Utc));
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d")
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc())
        .map_err(|_| {
            Failure::Load(format!(
                "--now: expected RFC 3339 or YYYY-MM-DD, got {text:?}"
            ))
        })
}

fn loader(cli: &Cli) -> Result<CorpusLoader, Failure> {
    let schemes = match &cli.schemes {
        Some(path) => load_schemes(path).map_err(Failure::load)?,
        None => SchemeRegistry::builtin(),
    };
    CorpusLoader::new(schemes)
        .with_taxonomy_files(&cli.taxonomies)
        .map_err(Failure::load)
}

fn corpus_path(cli: &Cli) -> Result<&PathBuf, Failure> {
    cli.corpus.as_ref().ok_or_else(|| {
        Failure::Load("no corpus given; pass --corpus PATH or set ARGWEAVE_CORPUS".into())
    })
}

fn load(cli: &Cli) -> Result<(Corpus, CorpusLoader), Failure> {
    let loader = loader(cli)?;
    let corpus = loader.load_path(corpus_path(cli)?).map_err(Failure::load)?;
    Ok((corpus, loader))
}

fn domain(e: ApiError) -> Failure {
    Failure::Domain(e.to_string())
}

fn syntax_failure(text: &str, e: QueryError) -> Failure {
    if let QueryError::Syntax(s) = &e {
        let caret = " ".repeat(text[..s.offset.min(text.len())].chars().count());
        return Failure::Domain(format!("{s}\n  {text}\n  {caret}^"));
    }
    domain(e.into())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let now = parse_now(cli.now.as_deref())?;
    match &cli.command {
        Command::Ingest => {
            let (corpus, _) = load(cli)?;
            let summary = IngestSummary::of(&corpus);
            match cli.output {
                Output::Json => print!("{}", summary.to_json()),
                Output::Text => println!("{summary}"),
            }
        }
        Command::Save { out } => {
            let (corpus, _) = load(cli)?;
            corpus.save(out).map_err(Failure::load)?;
            match cli.output {
                Output::Json => print!("{}", api::file_op_json("saved", out, corpus.version())),
                Output::Text => println!(
                    "saved {} arguments to {}",
                    corpus.arguments().count(),
                    out.display()
                ),
            }
        }
        Command::Credibility { argument } => {
            let (corpus, _) = load(cli)?;
            match cli.output {
                Output::Json => print!(
                    "{}",
                    api::credibility_json(&corpus, argument).map_err(domain)?
                ),
                Output::Text => {
                    let report = credibility::credibility(argument, &corpus)
                        .map_err(|e| domain(e.into()))?;
                    print!("{}", credibility::explain(&report));
                }
            }
        }
        Command::Query { text } => {
            let (corpus, _) = load(cli)?;
            let parsed =
                query::parse_at(text, Some(now)).map_err(|e| syntax_failure(text, e.into()))?;
            match cli.output {
                Output::Json => print!("{}", api::query_json(&corpus, text, now).map_err(domain)?),
                Output::Text => {
                    let hits = query::evaluate(&parsed, &corpus).map_err(|e| domain(e.into()))?;
                    println!("{parsed}");
                    if hits.is_empty() {
                        println!("no matching arguments");
                    }
                    for (i, h) in hits.iter().enumerate() {
                        let score = h
                            .credibility
                            .as_ref()
                            .map_or_else(|| "unrated".to_string(), credibility::decimal6);
                        println!(
                            "{:>3}. {:<16} {:>9}  {}  {}",
                            i + 1,
                            h.argument,
                            score,
                            h.posted_at.format("%Y-%m-%d %H:%M"),
                            h.author
                        );
                    }
                }
            }
        }
        Command::Serve { listen, ui_dir } => {
            let (corpus, loader) = load(cli)?;
            let mut state = AppState::new(Arc::new(CorpusStore::new(corpus)), loader)
                .with_corpus_path(corpus_path(cli)?.clone());
            if let Some(dir) = ui_dir {
                state = state.with_ui_dir(dir.clone());
            }
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(Failure::load)?;
            runtime
                .block_on(argweave_server::serve(*listen, state))
                .map_err(|e| Failure::Load(format!("cannot serve on {listen}: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors are configuration errors: exit 1, keeping 2 for domain errors.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| "argweave=info,argweave_server=info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Load(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
