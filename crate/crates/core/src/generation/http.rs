//! OpenAI-compatible chat-completions client over blocking HTTP.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::client::{ChatMessage, ClientError, Completion, LlmClient, TokenUsage};
use super::config::SamplingParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    /// Full URL of the chat-completions endpoint.
    pub url: String,
    pub model: String,
    /// Name of the environment variable holding the API key. Keys are
    /// never read from config files.
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub backoff_ms: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            url: "http://localhost:8000/v1/chat/completions".into(),
            model: "llama-3.1-70b".into(),
            api_key_env: "MEDDIALOG_API_KEY".into(),
            timeout_secs: 120,
            max_retries: 3,
            backoff_ms: 500,
        }
    }
}

pub struct HttpChatClient {
    config: EndpointConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpChatClient {
    /// Builds a client, taking the key from `config.api_key_env` if set.
    pub fn new(config: EndpointConfig) -> Self {
        let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        Self::with_key(config, api_key)
    }

    pub fn with_key(config: EndpointConfig, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Self { config, api_key, agent }
    }

    fn request_body(&self, messages: &[ChatMessage], params: &SamplingParams) -> String {
        let mut body = json!({ "model": self.config.model, "messages": messages });
        if let Some(t) = params.temperature {
            body["temperature"] = json!(t);
        }
        if let Some(m) = params.max_tokens {
            body["max_tokens"] = json!(m);
        }
        if let Some(s) = params.seed {
            body["seed"] = json!(s);
        }
        body.to_string()
    }

    fn attempt(&self, body: &str) -> Result<(u16, String), String> {
        let mut req = self.agent.post(&self.config.url).content_type("application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = req.send(body).map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok((status, text))
    }
}

#[derive(Deserialize)]
struct ApiResponse {
    choices: Vec<ApiChoice>,
    usage: Option<TokenUsage>,
}

#[derive(Deserialize)]
struct ApiChoice {
    message: ApiMessage,
}

#[derive(Deserialize)]
struct ApiMessage {
    content: Option<String>,
}

fn parse_response(body: &str) -> Result<(String, Option<TokenUsage>), ClientError> {
    let parsed: ApiResponse =
        serde_json::from_str(body).map_err(|e| ClientError::MalformedResponse(e.to_string()))?;
    let text = parsed
        .choices
        .into_iter()
        .next()
        .and_then(|c| c.message.content)
        .ok_or_else(|| ClientError::MalformedResponse("no choices[0].message.content".into()))?;
    Ok((text, parsed.usage))
}

fn retryable(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

impl LlmClient for HttpChatClient {
    fn send(&self, messages: &[ChatMessage], params: &SamplingParams) -> Result<Completion, ClientError> {
        let body = self.request_body(messages, params);
        let started = Instant::now();
        let max_attempts = self.config.max_retries + 1;
        let mut attempts = 0;
        loop {
            attempts += 1;
            let last = attempts >= max_attempts;
            match self.attempt(&body) {
                Ok((status @ (401 | 403), _)) => return Err(ClientError::Auth { status }),
                Ok((status, text)) if (200..300).contains(&status) => {
                    let (text, usage) = parse_response(&text)?;
                    return Ok(Completion {
                        text,
                        latency_ms: started.elapsed().as_millis() as u64,
                        attempts,
                        usage,
                    });
                }
                Ok((status, text)) if !retryable(status) || last => {
                    return Err(ClientError::Http { status, attempts, body: text })
                }
                Err(message) if last => return Err(ClientError::Transport { attempts, message }),
                _ => {}
            }
            let backoff = self.config.backoff_ms.saturating_mul(1 << (attempts - 1).min(16));
            std::thread::sleep(Duration::from_millis(backoff));
        }
    }
}
