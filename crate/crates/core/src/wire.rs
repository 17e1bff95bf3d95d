//! JSON bodies of the `/v1` HTTP interface.
//!
//! Session-scoped endpoints take the token from `Authorization: Bearer`.

use serde::{Deserialize, Serialize};

use crate::analysis::Report;
use crate::annotation::{Association, Requirement, Treatment};
use crate::recommender::{FeedbackAction, Suggestion};
use crate::taxonomy::SearchHit;
use crate::textproc::NounOccurrence;

pub const API_PREFIX: &str = "/v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSession {
    pub participant: String,
    /// Forces the arm; by default the smaller group is chosen.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub treatment: Option<Treatment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub token: String,
    pub participant: String,
    pub treatment: Treatment,
    pub total_tasks: usize,
    pub completed: usize,
}

/// A suggestion with the object's label and description for display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestionCard {
    #[serde(flatten)]
    pub suggestion: Suggestion,
    pub label: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    /// 0-based index in the global requirement order.
    pub index: usize,
    pub total: usize,
    pub treatment: Treatment,
    pub requirement: Requirement,
    /// Recognised noun spans; empty for the search arm.
    pub nouns: Vec<NounOccurrence>,
    /// Ranked suggestions; `None` for the search arm.
    pub suggestions: Option<Vec<SuggestionCard>>,
    pub accepted: Vec<Association>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TaskResponse {
    Open(Box<Task>),
    Complete { completed: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRequest {
    pub requirement_id: String,
    pub stem: String,
    pub object_code: String,
    pub action: FeedbackAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionResponse {
    pub suggestions: Vec<SuggestionCard>,
    pub accepted: Vec<Association>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRequest {
    pub requirement_id: String,
    pub conf_correct: i64,
    pub conf_complete: i64,
    /// Defaults to the suggestions accepted during the task.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub associations: Option<Vec<Association>>,
    /// Manual duration in seconds replacing the measured one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_override_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationAck {
    pub requirement_id: String,
    pub duration_seconds: f64,
    pub completed: usize,
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub query: String,
    pub hits: Vec<SearchHit>,
}

pub type ReportResponse = Report;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub taxonomy_objects: usize,
    pub requirements: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    /// Stable machine-readable kind, e.g. `unauthorized`.
    pub error: String,
    pub message: String,
}
