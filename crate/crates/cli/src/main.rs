mod local;
mod remote;

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use taxotrace_core::analysis::{EncodingMode, ReportOptions, UMethod, UTestConfig};
use taxotrace_core::annotation::Treatment;
use taxotrace_server::{AppState, ServiceConfig, ServiceFiles};

#[derive(Debug, Parser)]
#[command(name = "taxotrace", version, about = "Trace-link recommender for requirements and a domain taxonomy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the noun index of a taxonomy.
    Index {
        #[arg(long)]
        taxonomy: PathBuf,
        /// Analyzer configuration (JSON).
        #[arg(long)]
        analyzer: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Batch suggestions for a requirement file, one JSON object per line.
    Suggest {
        requirements: PathBuf,
        #[arg(long, conflicts_with = "index", required_unless_present = "index")]
        taxonomy: Option<PathBuf>,
        /// Prebuilt index from `taxotrace index`.
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        analyzer: Option<PathBuf>,
        /// Word vectors in `<count> <dim>` text format.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Feedback event log (JSON lines).
        #[arg(long)]
        history: Option<PathBuf>,
        /// Recommender configuration (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Compute the analysis report from an exported dataset.
    Analyze {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        judgments: Option<PathBuf>,
        /// Requirement file; fixes table order and term counts.
        #[arg(long)]
        requirements: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        experts: usize,
        #[arg(long, value_enum, default_value_t = Encoding::OneHot)]
        encoding: Encoding,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        utest: Method,
        #[arg(long, default_value_t = 200_000)]
        exact_cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-requirement data tables as CSV files here.
        #[arg(long)]
        tables_dir: Option<PathBuf>,
    },
    #[command(flatten)]
    Remote(remote::RemoteCommand),
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long)]
    taxonomy: PathBuf,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    requirements: PathBuf,
    /// Expert judgments used by the report.
    #[arg(long)]
    judgments: Option<PathBuf>,
    /// Directory for the annotation and feedback logs; in-memory when absent.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Service configuration (JSON with `analyzer`, `recommender`, `report`, `search_limit`).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "info")]
    log_level: tracing::Level,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Encoding {
    OneHot,
    NumericCode,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Arm {
    Ccr,
    Search,
}

impl From<Arm> for Treatment {
    fn from(a: Arm) -> Self {
        match a {
            Arm::Ccr => Treatment::Ccr,
            Arm::Search => Treatment::Search,
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Index { taxonomy, analyzer, out } => local::index(&taxonomy, analyzer.as_deref(), out.as_deref()),
        Command::Suggest { requirements, taxonomy, index, analyzer, embeddings, history, config, out } => {
            local::suggest(&local::SuggestArgs {
                requirements: &requirements,
                taxonomy: taxonomy.as_deref(),
                index: index.as_deref(),
                analyzer: analyzer.as_deref(),
                embeddings: embeddings.as_deref(),
                history: history.as_deref(),
                config: config.as_deref(),
                out: out.as_deref(),
            })
        }
        Command::Analyze { dataset, judgments, requirements, experts, encoding, utest, exact_cap, out, tables_dir } => {
            let options = ReportOptions {
                experts,
                encoding: match encoding {
                    Encoding::OneHot => EncodingMode::OneHot,
                    Encoding::NumericCode => EncodingMode::NumericCode,
                },
                utest: UTestConfig {
                    method: match utest {
                        Method::Auto => UMethod::Auto,
                        Method::Exact => UMethod::Exact,
                        Method::Normal => UMethod::Normal,
                    },
                    exact_cap,
                },
            };
            local::analyze(&local::AnalyzeArgs {
                dataset: &dataset,
                judgments: judgments.as_deref(),
                requirements: requirements.as_deref(),
                options,
                out: out.as_deref(),
                tables_dir: tables_dir.as_deref(),
            })
        }
        Command::Serve(args) => serve(args),
        Command::Remote(cmd) => runtime()?.block_on(remote::run(cmd)),
    }
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

fn serve(args: ServeArgs) -> Result<()> {
    tracing_subscriber::fmt().with_max_level(args.log_level).with_writer(std::io::stderr).init();
    let config: ServiceConfig = match &args.config {
        Some(p) => local::read_json(p)?,
        None => ServiceConfig::default(),
    };
    let files = ServiceFiles {
        taxonomy: args.taxonomy,
        requirements: args.requirements,
        embeddings: args.embeddings,
        judgments: args.judgments,
        data_dir: args.data_dir,
    };
    let state = Arc::new(AppState::load(config, &files)?);
    runtime()?.block_on(async move {
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr).await.with_context(|| format!("binding {addr}"))?;
        tracing::info!("listening on http://{}", listener.local_addr()?);
        taxotrace_server::serve(listener, state, async {
            tokio::signal::ctrl_c().await.ok();
        })
        .await?;
        Ok(())
    })
}
