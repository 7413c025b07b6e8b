//! Minimal chat-completions client: bearer auth, bounded deterministic
//! retry backoff, and an in-flight permit limit.

use std::fmt;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ENV_API_BASE: &str = "SMRC_API_BASE";
pub const ENV_API_KEY: &str = "SMRC_API_KEY";
pub const ENV_MODEL: &str = "SMRC_MODEL";

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("request timed out")]
    Timeout,
    #[error("http {status}: {body}")]
    Http { status: u16, body: String },
    #[error("completion was empty")]
    EmptyCompletion,
    #[error("transport: {0}")]
    Transport(String),
}

/// Endpoint settings. The API key never appears in debug output.
#[derive(Clone)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    pub api_key: String,
    pub timeout: Duration,
    pub max_retries: u32,
    pub temperature: f64,
    /// Base delay for exponential backoff between retries.
    pub backoff_base: Duration,
    /// Seed for the bounded backoff jitter, for reproducible retry timing.
    pub jitter_seed: u64,
    /// Maximum concurrent in-flight requests.
    pub max_in_flight: usize,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model_name: model_name.into(),
            api_key: String::new(),
            timeout: Duration::from_secs(60),
            max_retries: 3,
            temperature: 0.0,
            backoff_base: Duration::from_millis(100),
            jitter_seed: 0,
            max_in_flight: 4,
        }
    }

    /// Reads SMRC_API_BASE / SMRC_API_KEY / SMRC_MODEL.
    pub fn from_env() -> Result<Self, LlmError> {
        let base_url = std::env::var(ENV_API_BASE)
            .map_err(|_| LlmError::Transport(format!("{ENV_API_BASE} is not set")))?;
        let model_name = std::env::var(ENV_MODEL)
            .map_err(|_| LlmError::Transport(format!("{ENV_MODEL} is not set")))?;
        let mut config = Self::new(base_url, model_name);
        if let Ok(key) = std::env::var(ENV_API_KEY) {
            config.api_key = key;
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.base_url.trim().is_empty() {
            return Err(LlmError::Transport("base_url must be non-empty".into()));
        }
        if self.timeout.is_zero() {
            return Err(LlmError::Transport("timeout must be positive".into()));
        }
        Ok(())
    }
}

impl fmt::Debug for EndpointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EndpointConfig")
            .field("base_url", &self.base_url)
            .field("model_name", &self.model_name)
            .field("api_key", &"***")
            .field("timeout", &self.timeout)
            .field("max_retries", &self.max_retries)
            .field("temperature", &self.temperature)
            .field("max_in_flight", &self.max_in_flight)
            .finish()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        Self {
            role: "user".into(),
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self {
            role: "assistant".into(),
            content: content.into(),
        }
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Deserialize)]
struct ResponseMessage {
    content: Option<String>,
}

/// Counting semaphore for the in-flight request limit.
struct Permits {
    available: Mutex<usize>,
    signal: Condvar,
}

impl Permits {
    fn new(count: usize) -> Self {
        Self {
            available: Mutex::new(count.max(1)),
            signal: Condvar::new(),
        }
    }

    fn acquire(&self) {
        let mut available = self.available.lock().expect("permit lock poisoned");
        while *available == 0 {
            available = self.signal.wait(available).expect("permit lock poisoned");
        }
        *available -= 1;
    }

    fn release(&self) {
        *self.available.lock().expect("permit lock poisoned") += 1;
        self.signal.notify_one();
    }
}

pub struct ChatClient {
    config: EndpointConfig,
    http: reqwest::blocking::Client,
    permits: Permits,
    jitter: Mutex<ChaCha8Rng>,
}

impl ChatClient {
    pub fn new(config: EndpointConfig) -> Result<Self, LlmError> {
        config.validate()?;
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        Ok(Self {
            permits: Permits::new(config.max_in_flight),
            jitter: Mutex::new(ChaCha8Rng::seed_from_u64(config.jitter_seed)),
            config,
            http,
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    /// The exact JSON body a call with these messages sends.
    pub fn request_body(&self, messages: &[ChatMessage]) -> serde_json::Value {
        serde_json::to_value(ChatRequest {
            model: &self.config.model_name,
            messages,
            temperature: self.config.temperature,
        })
        .expect("request bodies always serialize")
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'))
    }

    /// Sends the messages and returns the first choice's content. Retries
    /// transport errors, timeouts, 408/429, and 5xx with bounded
    /// exponential backoff; other HTTP errors fail immediately.
    pub fn complete(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
        self.permits.acquire();
        let result = self.complete_inner(messages);
        self.permits.release();
        result
    }

    fn complete_inner(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
        let body = self.request_body(messages);
        let mut last_error = LlmError::Transport("no attempt made".into());
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                std::thread::sleep(self.backoff_delay(attempt));
            }
            let mut request = self
                .http
                .post(self.endpoint())
                .header("Content-Type", "application/json");
            if !self.config.api_key.is_empty() {
                request = request.bearer_auth(&self.config.api_key);
            }
            match request.json(&body).send() {
                Err(e) => {
                    last_error = if e.is_timeout() {
                        LlmError::Timeout
                    } else {
                        LlmError::Transport(e.to_string())
                    };
                }
                Ok(response) => {
                    let status = response.status();
                    if status.is_success() {
                        let parsed: ChatResponse = response
                            .json()
                            .map_err(|e| LlmError::Transport(e.to_string()))?;
                        let content = parsed
                            .choices
                            .into_iter()
                            .next()
                            .and_then(|c| c.message.content)
                            .unwrap_or_default();
                        if content.trim().is_empty() {
                            return Err(LlmError::EmptyCompletion);
                        }
                        return Ok(content);
                    }
                    let retryable = status.as_u16() == 408
                        || status.as_u16() == 429
                        || status.is_server_error();
                    let error = LlmError::Http {
                        status: status.as_u16(),
                        body: response.text().unwrap_or_default(),
                    };
                    if !retryable {
                        return Err(error);
                    }
                    last_error = error;
                }
            }
        }
        Err(last_error)
    }

    /// `base * 2^(attempt-1)` plus up to 50% seeded jitter, capped at 10s.
    fn backoff_delay(&self, attempt: u32) -> Duration {
        let base = self.config.backoff_base.as_millis() as u64;
        let exp = base.saturating_mul(1u64 << (attempt - 1).min(16));
        let jitter = self
            .jitter
            .lock()
            .expect("jitter rng poisoned")
            .gen_range(0..=exp / 2);
        Duration::from_millis((exp + jitter).min(10_000))
    }
}
