//! Async client for the `/v1` HTTP interface of the taxotrace service.

use reqwest::header::AUTHORIZATION;
use reqwest::{Method, RequestBuilder, Response, StatusCode};
use serde::de::DeserializeOwned;
use taxotrace_core::annotation::Treatment;
use taxotrace_core::recommender::FeedbackAction;
use taxotrace_core::wire::{
    AnnotationAck, AnnotationRequest, CreateSession, DecisionRequest, DecisionResponse, ErrorBody, Health,
    ReportResponse, SearchResponse, SessionInfo, TaskResponse,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    /// The service answered with an error body.
    #[error("{status}: {kind}: {message}")]
    Api { status: StatusCode, kind: String, message: String },
    #[error("this call needs a session token")]
    NoToken,
    #[error(transparent)]
    Transport(#[from] reqwest::Error),
}

impl ClientError {
    /// The service's error kind, e.g. `unauthorized`.
    pub fn kind(&self) -> Option<&str> {
        match self {
            ClientError::Api { kind, .. } => Some(kind),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    token: Option<String>,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the server root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        let base = base.into().trim_end_matches('/').to_string();
        Self { base, token: None, http: reqwest::Client::new() }
    }

    pub fn with_token(mut self, token: impl Into<String>) -> Self {
        self.token = Some(token.into());
        self
    }

    pub fn token(&self) -> Option<&str> {
        self.token.as_deref()
    }

    fn request(&self, method: Method, path: &str) -> RequestBuilder {
        self.http.request(method, format!("{}/v1/{path}", self.base))
    }

    fn authed(&self, method: Method, path: &str) -> Result<RequestBuilder, ClientError> {
        let token = self.token.as_ref().ok_or(ClientError::NoToken)?;
        Ok(self.request(method, path).header(AUTHORIZATION, format!("Bearer {token}")))
    }

    async fn checked(req: RequestBuilder) -> Result<Response, ClientError> {
        let resp = req.send().await?;
        let status = resp.status();
        if status.is_success() {
            return Ok(resp);
        }
        let text = resp.text().await.unwrap_or_default();
        Err(match serde_json::from_str::<ErrorBody>(&text) {
            Ok(body) => ClientError::Api { status, kind: body.error, message: body.message },
            Err(_) => ClientError::Api { status, kind: "http".into(), message: text },
        })
    }

    async fn json<T: DeserializeOwned>(req: RequestBuilder) -> Result<T, ClientError> {
        Ok(Self::checked(req).await?.json().await?)
    }

    pub async fn health(&self) -> Result<Health, ClientError> {
        Self::json(self.request(Method::GET, "health")).await
    }

    /// Creates or resumes the participant's session. Does not store the
    /// token; use [`Client::with_token`].
    pub async fn create_session(
        &self,
        participant: &str,
        treatment: Option<Treatment>,
    ) -> Result<SessionInfo, ClientError> {
        let body = CreateSession { participant: participant.to_string(), treatment };
        Self::json(self.request(Method::POST, "session").json(&body)).await
    }

    pub async fn task(&self) -> Result<TaskResponse, ClientError> {
        Self::json(self.authed(Method::GET, "task")?).await
    }

    pub async fn decide(
        &self,
        requirement_id: &str,
        stem: &str,
        object_code: &str,
        action: FeedbackAction,
    ) -> Result<DecisionResponse, ClientError> {
        let body = DecisionRequest {
            requirement_id: requirement_id.to_string(),
            stem: stem.to_string(),
            object_code: object_code.to_string(),
            action,
        };
        Self::json(self.authed(Method::POST, "decision")?.json(&body)).await
    }

    pub async fn annotate(&self, request: &AnnotationRequest) -> Result<AnnotationAck, ClientError> {
        Self::json(self.authed(Method::POST, "annotation")?.json(request)).await
    }

    pub async fn search(&self, query: &str, limit: Option<usize>) -> Result<SearchResponse, ClientError> {
        let mut req = self.authed(Method::GET, "search")?.query(&[("q", query)]);
        if let Some(limit) = limit {
            req = req.query(&[("limit", limit)]);
        }
        Self::json(req).await
    }

    pub async fn report(&self) -> Result<ReportResponse, ClientError> {
        Self::json(self.request(Method::GET, "report")).await
    }

    /// The dataset export as CSV text.
    pub async fn export(&self, treatment: Option<Treatment>) -> Result<String, ClientError> {
        let mut req = self.request(Method::GET, "export");
        if let Some(t) = treatment {
            req = req.query(&[("treatment", t.to_string())]);
        }
        Ok(Self::checked(req).await?.text().await?)
    }
}
