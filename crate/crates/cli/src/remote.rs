//! Verbs that talk to a running service.

use anyhow::{bail, Result};
use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use taxotrace_client::Client;
use taxotrace_core::annotation::{parse_associations, Association};
use taxotrace_core::recommender::FeedbackAction;
use taxotrace_core::wire::AnnotationRequest;

use crate::Arm;

#[derive(Debug, Args)]
pub struct Conn {
    /// Service root URL.
    #[arg(long, default_value = "http://127.0.0.1:8080")]
    server: String,
    /// Session token from `taxotrace session`.
    #[arg(long, env = "TAXOTRACE_TOKEN", hide_env_values = true)]
    token: Option<String>,
}

impl Conn {
    fn client(&self) -> Client {
        let client = Client::new(&self.server);
        match &self.token {
            Some(t) => client.with_token(t),
            None => client,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Action {
    Accept,
    Reject,
}

#[derive(Debug, Subcommand)]
pub enum RemoteCommand {
    /// Create or resume a participant session and print its token.
    Session {
        #[arg(long)]
        participant: String,
        #[arg(long, value_enum)]
        treatment: Option<Arm>,
        #[command(flatten)]
        conn: Conn,
    },
    /// Open (or show) the current task.
    Task {
        #[command(flatten)]
        conn: Conn,
    },
    /// Accept or reject an open suggestion.
    Decide {
        #[arg(long)]
        requirement: String,
        #[arg(long)]
        stem: String,
        #[arg(long)]
        code: String,
        #[arg(long, value_enum)]
        action: Action,
        #[command(flatten)]
        conn: Conn,
    },
    /// Submit the open task.
    Annotate {
        #[arg(long)]
        requirement: String,
        #[arg(long, allow_hyphen_values = true)]
        correct: i64,
        #[arg(long, allow_hyphen_values = true)]
        complete: i64,
        /// `stem[@position]:code` entries joined by `;`; defaults to the
        /// accepted suggestions.
        #[arg(long)]
        associations: Option<String>,
        /// Manual duration in seconds.
        #[arg(long)]
        duration: Option<f64>,
        #[command(flatten)]
        conn: Conn,
    },
    /// Full-text taxonomy search.
    Search {
        query: String,
        #[arg(long)]
        limit: Option<usize>,
        #[command(flatten)]
        conn: Conn,
    },
    /// Fetch the analysis report.
    Report {
        #[command(flatten)]
        conn: Conn,
    },
    /// Download the dataset export (CSV).
    Export {
        #[arg(long, value_enum)]
        treatment: Option<Arm>,
        #[command(flatten)]
        conn: Conn,
    },
}

fn print<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

pub async fn run(cmd: RemoteCommand) -> Result<()> {
    match cmd {
        RemoteCommand::Session { participant, treatment, conn } => {
            print(&conn.client().create_session(&participant, treatment.map(Into::into)).await?)
        }
        RemoteCommand::Task { conn } => print(&conn.client().task().await?),
        RemoteCommand::Decide { requirement, stem, code, action, conn } => {
            let action = match action {
                Action::Accept => FeedbackAction::Accept,
                Action::Reject => FeedbackAction::Reject,
            };
            print(&conn.client().decide(&requirement, &stem, &code, action).await?)
        }
        RemoteCommand::Annotate { requirement, correct, complete, associations, duration, conn } => {
            let associations: Option<Vec<Association>> = associations.as_deref().map(parse_associations).transpose()?;
            if duration.is_some_and(|d| d < 0.0) {
                bail!("--duration must be non-negative");
            }
            let request = AnnotationRequest {
                requirement_id: requirement,
                conf_correct: correct,
                conf_complete: complete,
                associations,
                duration_override_s: duration,
            };
            print(&conn.client().annotate(&request).await?)
        }
        RemoteCommand::Search { query, limit, conn } => print(&conn.client().search(&query, limit).await?),
        RemoteCommand::Report { conn } => print(&conn.client().report().await?),
        RemoteCommand::Export { treatment, conn } => {
            print!("{}", conn.client().export(treatment.map(Into::into)).await?);
            Ok(())
        }
    }
}
