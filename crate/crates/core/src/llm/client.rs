use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::ENCODED_MAX;
use crate::error::CoreError;
use crate::proposer::{
    MeanProposer, ProposalRequest, ProposedMean, ProposerError, ResponseParseError,
};

use super::parse::{last_integer_list, parse_mean_response};
use super::prompt::{build_prompt, SYSTEM_MESSAGE};

fn default_retries() -> usize {
    2
}

fn default_timeout() -> u64 {
    120
}

fn default_key_env() -> String {
    "LLM_API_KEY".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmConfig {
    /// Full URL of a chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    /// Name of the environment variable holding the API key.
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
}

impl LlmConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            temperature: 0.0,
            max_retries: default_retries(),
            timeout_secs: default_timeout(),
            api_key_env: default_key_env(),
        }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if self.temperature != 0.0 {
            return Err(CoreError::InvalidConfig(format!(
                "temperature must be 0, got {}",
                self.temperature
            )));
        }
        if self.endpoint.is_empty() || self.model.is_empty() {
            return Err(CoreError::InvalidConfig("endpoint and model are required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    fn new(role: &str, content: impl Into<String>) -> Self {
        Self {
            role: role.into(),
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<ChatMessage>,
}

/// Sends one chat request and returns the assistant's text.
pub trait ChatTransport {
    fn send(&mut self, request: &ChatRequest) -> Result<String, String>;
}

/// Blocking HTTP transport for OpenAI-style `chat/completions` endpoints.
pub struct HttpTransport {
    http: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
}

impl HttpTransport {
    pub fn new(cfg: &LlmConfig) -> Result<Self, ProposerError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| ProposerError::Transport(e.to_string()))?;
        let api_key = std::env::var(&cfg.api_key_env).ok().filter(|k| !k.is_empty());
        if api_key.is_none() {
            log::warn!("{} is not set; sending unauthenticated requests", cfg.api_key_env);
        }
        Ok(Self {
            http,
            endpoint: cfg.endpoint.clone(),
            api_key,
        })
    }
}

impl ChatTransport for HttpTransport {
    fn send(&mut self, request: &ChatRequest) -> Result<String, String> {
        let mut req = self.http.post(&self.endpoint).json(request);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| e.to_string())?;
        let status = resp.status();
        let body = resp.text().map_err(|e| e.to_string())?;
        if !status.is_success() {
            return Err(format!("HTTP {}: {body}", status.as_u16()));
        }
        let value: serde_json::Value =
            serde_json::from_str(&body).map_err(|e| format!("invalid JSON response: {e}"))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| "response has no choices[0].message.content".to_string())
    }
}

/// Append-only JSON Lines log of every request/response pair.
pub struct AuditLog {
    file: File,
}

impl AuditLog {
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { file })
    }

    fn write(
        &mut self,
        generation: usize,
        attempt: usize,
        request: &ChatRequest,
        outcome: &Result<String, String>,
    ) -> std::io::Result<()> {
        let unix_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        let mut entry = json!({
            "unix_ms": unix_ms,
            "generation": generation,
            "attempt": attempt,
            "request": request,
        });
        match outcome {
            Ok(text) => entry["response"] = json!(text),
            Err(e) => entry["error"] = json!(e),
        }
        writeln!(self.file, "{entry}")
    }
}

fn format_reminder(err: &ResponseParseError, d: usize) -> String {
    format!(
        "Your previous answer could not be used ({err}). Reply with exactly one list of {d} \
         comma-separated integers between 0 and {ENCODED_MAX}, enclosed in square brackets, \
         and nothing else."
    )
}

enum Failure {
    Transport(String),
    Parse(ResponseParseError),
}

/// Mean proposer that queries a chat model.
pub struct LlmProposer<T> {
    cfg: LlmConfig,
    transport: T,
    audit: Option<AuditLog>,
    attempts_made: usize,
}

impl<T: ChatTransport> LlmProposer<T> {
    pub fn new(cfg: LlmConfig, transport: T) -> Self {
        Self {
            cfg,
            transport,
            audit: None,
            attempts_made: 0,
        }
    }

    pub fn with_audit(mut self, audit: AuditLog) -> Self {
        self.audit = Some(audit);
        self
    }

    /// Total requests sent so far, retries included.
    pub fn attempts_made(&self) -> usize {
        self.attempts_made
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }
}

impl<T: ChatTransport> MeanProposer for LlmProposer<T> {
    fn propose(&mut self, req: &ProposalRequest<'_>) -> Result<ProposedMean, ProposerError> {
        if req.records.is_empty() {
            return Err(ProposerError::EmptyRecords);
        }
        self.cfg.validate()?;
        let d = req.bounds.dim();
        let bundle = build_prompt(req.records, req.bounds, d, req.description)?;
        let mut messages = vec![
            ChatMessage::new("system", SYSTEM_MESSAGE),
            ChatMessage::new("user", bundle.text),
        ];
        let attempts = self.cfg.max_retries + 1;
        let mut last = Failure::Transport("no attempt made".into());

        for attempt in 1..=attempts {
            let request = ChatRequest {
                model: self.cfg.model.clone(),
                temperature: self.cfg.temperature,
                messages: messages.clone(),
            };
            self.attempts_made += 1;
            let outcome = self.transport.send(&request);
            if let Some(audit) = &mut self.audit {
                audit.write(req.generation, attempt, &request, &outcome)?;
            }
            let text = match outcome {
                Ok(text) => text,
                Err(e) => {
                    log::warn!("attempt {attempt}/{attempts}: transport error: {e}");
                    last = Failure::Transport(e);
                    continue;
                }
            };
            match parse_mean_response(&text, d) {
                Ok(mean) => return Ok(mean),
                Err(ResponseParseError::OutOfRange { .. }) if attempt == attempts => {
                    // Right arity, some components out of range: clamp rather than abort.
                    let list = last_integer_list(&text).unwrap_or_default();
                    log::warn!("clamping out-of-range proposal {list:?} into [0, {ENCODED_MAX}]");
                    return Ok(ProposedMean {
                        encoded: list.iter().map(|v| v.clamp(&0, &ENCODED_MAX)).copied().collect(),
                        raw_response: text,
                    });
                }
                Err(e) => {
                    log::warn!("attempt {attempt}/{attempts}: unusable response: {e}");
                    messages.push(ChatMessage::new("assistant", text));
                    messages.push(ChatMessage::new("user", format_reminder(&e, d)));
                    last = Failure::Parse(e);
                }
            }
        }
        Err(match last {
            Failure::Transport(e) => ProposerError::Transport(e),
            Failure::Parse(last) => ProposerError::RetriesExhausted { attempts, last },
        })
    }
}
