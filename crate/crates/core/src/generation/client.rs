//! Chat-completion client abstraction and a scripted stub for tests.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::SamplingParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub latency_ms: u64,
    pub attempts: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub usage: Option<TokenUsage>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClientError {
    #[error("invalid request: {0}")]
    Precondition(String),
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("HTTP {status} after {attempts} attempt(s): {body}")]
    Http { status: u16, attempts: u32, body: String },
    #[error("authentication rejected (HTTP {status})")]
    Auth { status: u16 },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
}

pub trait LlmClient: Send + Sync {
    /// Sends a validated request. Implementations do their own retrying.
    fn send(&self, messages: &[ChatMessage], params: &SamplingParams) -> Result<Completion, ClientError>;

    /// Checks the request shape, then calls [`LlmClient::send`].
    fn complete(&self, messages: &[ChatMessage], params: &SamplingParams) -> Result<Completion, ClientError> {
        match messages.first() {
            None => return Err(ClientError::Precondition("no messages".into())),
            Some(m) if m.role != Role::System => {
                return Err(ClientError::Precondition("first message must be the system message".into()))
            }
            _ => {}
        }
        self.send(messages, params)
    }
}

type Responder = Box<dyn Fn(usize, &[ChatMessage]) -> Result<String, ClientError> + Send + Sync>;

/// In-memory client returning canned text and recording every request.
pub struct StubClient {
    respond: Responder,
    calls: Mutex<Vec<Vec<ChatMessage>>>,
}

impl StubClient {
    /// Answers every call with `text`.
    pub fn fixed(text: impl Into<String>) -> Self {
        let text = text.into();
        Self::from_fn(move |_, _| Ok(text.clone()))
    }

    /// Answers call *i* with `responses[i]`; further calls fail.
    pub fn scripted<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let responses: Vec<String> = responses.into_iter().map(Into::into).collect();
        Self::from_fn(move |i, _| {
            responses.get(i).cloned().ok_or_else(|| ClientError::Transport {
                attempts: 1,
                message: format!("stub has no response for call {i}"),
            })
        })
    }

    /// Answers with `f(call_index, messages)`.
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(usize, &[ChatMessage]) -> Result<String, ClientError> + Send + Sync + 'static,
    {
        Self { respond: Box::new(f), calls: Mutex::new(Vec::new()) }
    }

    pub fn calls(&self) -> Vec<Vec<ChatMessage>> {
        self.calls.lock().expect("stub lock").clone()
    }

    pub fn call_count(&self) -> usize {
        self.calls.lock().expect("stub lock").len()
    }
}

impl LlmClient for StubClient {
    fn send(&self, messages: &[ChatMessage], _params: &SamplingParams) -> Result<Completion, ClientError> {
        let index = {
            let mut calls = self.calls.lock().expect("stub lock");
            calls.push(messages.to_vec());
            calls.len() - 1
        };
        let text = (self.respond)(index, messages)?;
        Ok(Completion { text, latency_ms: 0, attempts: 1, usage: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_message_must_be_system() {
        let stub = StubClient::fixed("ok");
        let p = SamplingParams::default();
        assert!(matches!(stub.complete(&[], &p), Err(ClientError::Precondition(_))));
        assert!(matches!(stub.complete(&[ChatMessage::user("hoi")], &p), Err(ClientError::Precondition(_))));
        assert_eq!(stub.call_count(), 0);
        let c = stub.complete(&[ChatMessage::system("s"), ChatMessage::user("u")], &p).unwrap();
        assert_eq!(c.text, "ok");
        assert_eq!(stub.call_count(), 1);
    }

    #[test]
    fn scripted_runs_out() {
        let stub = StubClient::scripted(["a"]);
        let p = SamplingParams::default();
        let msgs = [ChatMessage::system("s")];
        assert_eq!(stub.complete(&msgs, &p).unwrap().text, "a");
        assert!(matches!(stub.complete(&msgs, &p), Err(ClientError::Transport { .. })));
    }

    #[test]
    fn roles_serialize_lowercase() {
        let json = serde_json::to_string(&ChatMessage::assistant("x")).unwrap();
        assert_eq!(json, r#"{"role":"assistant","content":"x"}"#);
    }
}
