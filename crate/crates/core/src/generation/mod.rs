//! Synthetic dialogue generation: source chunking, summaries, few-shot
//! pairs, per-topic segment prompts with a sliding context tail, and a
//! resumable on-disk job store.

mod chunk;
mod client;
mod config;
mod fewshot;
mod http;
mod job;
mod prompt;
mod store;
mod text;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use chunk::chunk_source;
pub use client::{ChatMessage, ClientError, Completion, LlmClient, Role, StubClient, TokenUsage};
pub use config::{GenerationConfig, SamplingParams, StyleSpec};
pub use fewshot::{
    build_fewshot_pair, fewshot_excerpts, fewshot_spans, summarize, FewShotPair, FewShotSpans, ReviewStatus,
    Summary,
};
pub use http::{EndpointConfig, HttpChatClient};
pub use job::{generate_dialogue, strip_leading_greetings, Exchange, GenerationJob, Generator, JobStatus, Segment};
pub use prompt::{
    assemble_prompt, group_thousands, render, PromptBundle, PromptRequest, PromptTemplates, ShrinkStep,
    TEMPLATE_FILES,
};
pub use store::{topic_slug, JobStore};
pub use text::{head_words, tail_words, word_count, word_spans, TokenEstimator};

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
    #[error("source text is empty")]
    EmptySource,
    #[error("source too short: needs {required} estimated tokens, has {available}")]
    SourceTooShort { required: usize, available: usize },
    #[error("text to summarize is empty")]
    EmptyText,
    #[error("summary of {tokens} estimated tokens exceeds the cap of {cap}")]
    BudgetExceeded { tokens: usize, cap: usize },
    #[error("prompt of {estimated} estimated tokens exceeds the limit of {limit} even after shrinking")]
    ContextOverflow { estimated: usize, limit: usize },
    #[error("template error: {0}")]
    Template(String),
    #[error("{}: {source}", match topic_index { Some(i) => format!("endpoint call for topic #{} failed", i + 1), None => "endpoint call failed".to_string() })]
    Client { topic_index: Option<usize>, source: ClientError },
    #[error("job store error at {path}: {source}")]
    Store { path: PathBuf, source: std::io::Error },
    #[error("cannot (de)serialize job data: {0}")]
    Serde(#[from] serde_json::Error),
}

impl GenerationError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        GenerationError::Store { path: path.to_path_buf(), source }
    }
}
