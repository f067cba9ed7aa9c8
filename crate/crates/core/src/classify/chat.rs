//! Remote chat-model adapters (OpenAI-compatible `/chat/completions`).
//!
//! Requests use temperature 0 and a single user message. Responses are
//! cached by a hash of (prompt, input), failed calls are retried once, and
//! the number of in-flight requests is bounded.

use std::collections::HashMap;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Classifier, ClassifierError, ContextExtractor, Prediction, RevisionInput};
use crate::revision::{RevisionAction, RevisionPair, RevisionPurpose};
use crate::text::Document;

/// Fixed instruction for the evidence/reasoning stage.
pub const EVIDENCE_PROMPT: &str = "You need to identify whether the given sentence is an evidence or reasoning sentence. Your output should be chosen from the list [evidence, reasoning]";

/// Instruction for argument-context extraction. `{essay}` and `{sentence}`
/// are substituted before sending.
pub const CONTEXT_PROMPT: &str = "Read the essay and the revised sentence below. Think step by step about which claim the sentence supports, then output only the sentences from the essay that state that claim or that the revised sentence responds to.\n\nEssay:\n{essay}\n\nRevised sentence:\n{sentence}";

pub const ENV_URL: &str = "DRAFTWISE_CHAT_URL";
pub const ENV_KEY: &str = "DRAFTWISE_CHAT_KEY";
pub const ENV_MODEL: &str = "DRAFTWISE_CHAT_MODEL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<ChatMessage>,
}

impl ChatRequest {
    pub fn single(model: &str, content: String) -> Self {
        Self {
            model: model.to_string(),
            temperature: 0.0,
            messages: vec![ChatMessage {
                role: "user".into(),
                content,
            }],
        }
    }
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Debug, Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

/// Sends one request and returns the assistant text.
pub trait ChatTransport: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, ClassifierError>;
}

#[derive(Debug, Clone)]
pub struct ChatSettings {
    pub base_url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
    pub max_in_flight: usize,
}

impl ChatSettings {
    /// Reads endpoint and key from the environment; `None` when no URL is set.
    pub fn from_env() -> Option<Self> {
        let base_url = std::env::var(ENV_URL).ok().filter(|s| !s.is_empty())?;
        Some(Self {
            base_url,
            api_key: std::env::var(ENV_KEY).ok(),
            model: std::env::var(ENV_MODEL).unwrap_or_else(|_| "gpt-3.5-turbo".into()),
            timeout: Duration::from_secs(10),
            max_in_flight: 4,
        })
    }
}

pub struct HttpChatTransport {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
}

impl HttpChatTransport {
    pub fn new(settings: &ChatSettings) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(settings.timeout).build();
        Self {
            agent,
            endpoint: format!("{}/chat/completions", settings.base_url.trim_end_matches('/')),
            api_key: settings.api_key.clone(),
        }
    }
}

impl ChatTransport for HttpChatTransport {
    fn complete(&self, request: &ChatRequest) -> Result<String, ClassifierError> {
        let mut call = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            call = call.set("Authorization", &format!("Bearer {key}"));
        }
        let response = call.send_json(request).map_err(|e| match e {
            ureq::Error::Transport(t) if t.kind() == ureq::ErrorKind::Io => ClassifierError::Timeout,
            other => ClassifierError::Transport(other.to_string()),
        })?;
        let body: ChatResponse = response
            .into_json()
            .map_err(|e| ClassifierError::Malformed(e.to_string()))?;
        body.choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| ClassifierError::Malformed("no choices".into()))
    }
}

struct Permits {
    available: Mutex<usize>,
    freed: Condvar,
}

impl Permits {
    fn new(n: usize) -> Self {
        Self {
            available: Mutex::new(n.max(1)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> PermitGuard<'_> {
        let mut n = self.available.lock().expect("permit lock");
        while *n == 0 {
            n = self.freed.wait(n).expect("permit lock");
        }
        *n -= 1;
        PermitGuard(self)
    }
}

struct PermitGuard<'a>(&'a Permits);

impl Drop for PermitGuard<'_> {
    fn drop(&mut self) {
        *self.0.available.lock().expect("permit lock") += 1;
        self.0.freed.notify_one();
    }
}

/// Shared client: cache, retry and concurrency bound around a transport.
#[derive(Clone)]
pub struct ChatClient {
    inner: Arc<ClientInner>,
}

struct ClientInner {
    transport: Arc<dyn ChatTransport>,
    model: String,
    cache: Mutex<HashMap<[u8; 32], String>>,
    permits: Permits,
}

impl ChatClient {
    pub fn new(transport: Arc<dyn ChatTransport>, model: impl Into<String>, max_in_flight: usize) -> Self {
        Self {
            inner: Arc::new(ClientInner {
                transport,
                model: model.into(),
                cache: Mutex::new(HashMap::new()),
                permits: Permits::new(max_in_flight),
            }),
        }
    }

    pub fn from_settings(settings: &ChatSettings) -> Self {
        Self::new(
            Arc::new(HttpChatTransport::new(settings)),
            settings.model.clone(),
            settings.max_in_flight,
        )
    }

    fn key(prompt: &str, input: &str) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(prompt.as_bytes());
        h.update([0u8]);
        h.update(input.as_bytes());
        h.finalize().into()
    }

    /// Send `prompt` followed by `input` as one user message.
    pub fn ask(&self, prompt: &str, input: &str) -> Result<String, ClassifierError> {
        let key = Self::key(prompt, input);
        if let Some(hit) = self.inner.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let content = if input.is_empty() {
            prompt.to_string()
        } else {
            format!("{prompt}\n\n{input}")
        };
        let request = ChatRequest::single(&self.inner.model, content);
        let reply = {
            let _permit = self.inner.permits.acquire();
            self.inner
                .transport
                .complete(&request)
                .or_else(|_| self.inner.transport.complete(&request))?
        };
        self.inner
            .cache
            .lock()
            .expect("cache lock")
            .insert(key, reply.clone());
        Ok(reply)
    }

    pub fn cached_len(&self) -> usize {
        self.inner.cache.lock().expect("cache lock").len()
    }
}

/// Map a free-text reply onto exactly one of the two labels.
pub fn parse_purpose(reply: &str) -> Result<RevisionPurpose, ClassifierError> {
    let lower = reply.to_lowercase();
    let words: Vec<&str> = lower
        .split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .collect();
    let evidence = words.contains(&"evidence");
    let reasoning = words.contains(&"reasoning");
    match (evidence, reasoning) {
        (true, false) => Ok(RevisionPurpose::Evidence),
        (false, true) => Ok(RevisionPurpose::Reasoning),
        _ => Err(ClassifierError::Malformed(reply.to_string())),
    }
}

fn revision_input_text(rev: &RevisionPair) -> String {
    let old = rev.aligned.old_text.as_deref().unwrap_or("");
    let new = rev.aligned.new_text.as_deref().unwrap_or("");
    match rev.action {
        RevisionAction::Add => format!("Sentence: {new}"),
        RevisionAction::Delete => format!("Sentence: {old}"),
        RevisionAction::Modify => format!("Original sentence: {old}\nRevised sentence: {new}"),
    }
}

pub struct ChatEvidenceClassifier {
    client: ChatClient,
}

impl ChatEvidenceClassifier {
    pub fn new(client: ChatClient) -> Self {
        Self { client }
    }
}

impl Classifier<RevisionPurpose> for ChatEvidenceClassifier {
    fn name(&self) -> &str {
        "chat-evidence"
    }

    fn deterministic(&self) -> bool {
        // temperature 0 plus response cache
        true
    }

    fn classify(&self, input: &RevisionInput<'_>) -> Result<Prediction<RevisionPurpose>, ClassifierError> {
        let reply = self.client.ask(EVIDENCE_PROMPT, &revision_input_text(input.revision))?;
        Ok(Prediction {
            label: parse_purpose(&reply)?,
            confidence: 1.0,
        })
    }
}

pub struct ChatContextExtractor {
    client: ChatClient,
    template: String,
}

impl ChatContextExtractor {
    pub fn new(client: ChatClient) -> Self {
        Self {
            client,
            template: CONTEXT_PROMPT.to_string(),
        }
    }

    pub fn with_template(mut self, template: impl Into<String>) -> Self {
        self.template = template.into();
        self
    }
}

impl ContextExtractor for ChatContextExtractor {
    fn name(&self) -> &str {
        "chat-context"
    }

    fn extract(&self, essay: &Document, rev: &RevisionPair) -> Result<String, ClassifierError> {
        let prompt = self
            .template
            .replace("{essay}", &essay.raw_text)
            .replace("{sentence}", rev.focus_text());
        let reply = self.client.ask(&prompt, "")?;
        let reply = reply.trim();
        if reply.is_empty() {
            return Err(ClassifierError::Malformed("empty context".into()));
        }
        Ok(reply.to_string())
    }
}
