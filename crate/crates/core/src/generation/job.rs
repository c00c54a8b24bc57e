use serde::{Deserialize, Serialize};

use super::client::{ChatMessage, LlmClient, TokenUsage};
use super::config::GenerationConfig;
use super::fewshot::{build_fewshot_pair, summarize, FewShotPair, Summary};
use super::prompt::{assemble_prompt, PromptRequest, PromptTemplates, ShrinkStep};
use super::store::JobStore;
use super::text::tail_words;
use super::GenerationError;
use crate::dialogue::tokenize;
use crate::lexicon::{Lexicon, LexiconSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub topic: String,
    pub text: String,
}

/// One request/response pair, kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub topic_index: usize,
    pub topic: String,
    pub messages: Vec<ChatMessage>,
    pub response: String,
    pub latency_ms: u64,
    pub attempts: u32,
    pub usage: Option<TokenUsage>,
    #[serde(default)]
    pub shrink_steps: Vec<ShrinkStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobStatus {
    Pending,
    Partial,
    Complete,
}

impl JobStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            JobStatus::Pending => "pending",
            JobStatus::Partial => "partial",
            JobStatus::Complete => "complete",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationJob {
    pub config: GenerationConfig,
    /// Source chunk still to be summarized, when the job starts from raw text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_excerpt: Option<String>,
    /// Raw files few-shot pairs are cut from.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fewshot_sources: Vec<String>,
    #[serde(default)]
    pub source_summary: Option<Summary>,
    #[serde(default)]
    pub fewshot: Vec<FewShotPair>,
    #[serde(default)]
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub exchanges: Vec<Exchange>,
    #[serde(default)]
    pub final_dialogue: Option<String>,
}

impl GenerationJob {
    /// A job with the summary and few-shot pairs already in hand.
    pub fn new(config: GenerationConfig, source_summary: impl Into<String>, fewshot: Vec<FewShotPair>) -> Self {
        Self {
            config,
            source_excerpt: None,
            fewshot_sources: Vec::new(),
            source_summary: Some(Summary::new(source_summary)),
            fewshot,
            segments: Vec::new(),
            exchanges: Vec::new(),
            final_dialogue: None,
        }
    }

    /// A job that first summarizes `source_excerpt` and builds one few-shot
    /// pair per entry of `fewshot_sources`.
    pub fn from_source(config: GenerationConfig, source_excerpt: impl Into<String>, fewshot_sources: Vec<String>) -> Self {
        Self {
            config,
            source_excerpt: Some(source_excerpt.into()),
            fewshot_sources,
            source_summary: None,
            fewshot: Vec::new(),
            segments: Vec::new(),
            exchanges: Vec::new(),
            final_dialogue: None,
        }
    }

    pub fn summary_text(&self) -> &str {
        self.source_summary.as_ref().map_or("", |s| s.text.as_str())
    }

    pub fn status(&self) -> JobStatus {
        if self.final_dialogue.is_some() {
            JobStatus::Complete
        } else if self.segments.is_empty() {
            JobStatus::Pending
        } else {
            JobStatus::Partial
        }
    }

    /// In-order join of the segment texts with the configured separator.
    pub fn joined_segments(&self) -> String {
        let texts: Vec<&str> = self.segments.iter().map(|s| s.text.as_str()).collect();
        texts.join(&self.config.segment_separator)
    }
}

/// Drops leading lines that contain a greeting phrase.
pub fn strip_leading_greetings<'a>(text: &'a str, greetings: &Lexicon) -> &'a str {
    let mut rest = text;
    loop {
        let trimmed = rest.trim_start();
        let (line, tail) = match trimmed.find('\n') {
            Some(i) => (&trimmed[..i], &trimmed[i + 1..]),
            None => (trimmed, ""),
        };
        let tokens = tokenize(line);
        let tokens: Vec<&str> = tokens.iter().map(String::as_str).collect();
        if line.is_empty() || !greetings.contains_any(&tokens) {
            return trimmed;
        }
        rest = tail;
    }
}

/// Runs generation jobs segment by segment, persisting after each one when
/// a store is attached.
pub struct Generator<'a> {
    client: &'a dyn LlmClient,
    templates: PromptTemplates,
    greetings: Lexicon,
    store: Option<JobStore>,
}

impl<'a> Generator<'a> {
    pub fn new(client: &'a dyn LlmClient) -> Self {
        Self {
            client,
            templates: PromptTemplates::builtin(),
            greetings: LexiconSet::builtin().greetings,
            store: None,
        }
    }

    pub fn with_templates(mut self, templates: PromptTemplates) -> Self {
        self.templates = templates;
        self
    }

    pub fn with_greetings(mut self, greetings: Lexicon) -> Self {
        self.greetings = greetings;
        self
    }

    pub fn with_store(mut self, store: JobStore) -> Self {
        self.store = Some(store);
        self
    }

    pub fn store(&self) -> Option<&JobStore> {
        self.store.as_ref()
    }

    fn persist(&self, job: &GenerationJob) -> Result<(), GenerationError> {
        match &self.store {
            Some(store) => store.save(job),
            None => Ok(()),
        }
    }

    /// Summarizes the source excerpt and builds pending few-shot pairs,
    /// persisting after each model call.
    pub fn prepare(&self, job: &mut GenerationJob) -> Result<(), GenerationError> {
        if job.source_summary.is_none() {
            let summary = match &job.source_excerpt {
                Some(text) => summarize(text, self.client, &job.config, &self.templates)?,
                None => Summary::new(""),
            };
            job.source_summary = Some(summary);
            self.persist(job)?;
        }
        while job.fewshot.len() < job.fewshot_sources.len() {
            let source = &job.fewshot_sources[job.fewshot.len()];
            let pair = build_fewshot_pair(source, &job.config, self.client, &self.templates)?;
            job.fewshot.push(pair);
            self.persist(job)?;
        }
        Ok(())
    }

    /// Generates every topic segment not yet present in `job`. Finished
    /// steps are never repeated, so a failed run can be resumed by calling
    /// `run` again on the persisted job.
    pub fn run(&self, job: &mut GenerationJob) -> Result<(), GenerationError> {
        job.config.validate()?;
        self.prepare(job)?;
        let topics = job.config.topics.clone();
        if job.segments.len() > topics.len() {
            return Err(GenerationError::InvalidConfig(format!(
                "job has {} segments but only {} topics",
                job.segments.len(),
                topics.len()
            )));
        }
        for (i, topic) in topics.iter().enumerate().skip(job.segments.len()) {
            let context_tail = match i {
                0 => "",
                _ => tail_words(&job.segments[i - 1].text, job.config.context_tail_words),
            };
            let req = PromptRequest {
                topic,
                summary: job.summary_text(),
                fewshot: &job.fewshot,
                context_tail,
            };
            let (bundle, shrink_steps) = assemble_prompt(&job.config, &self.templates, &req)?;
            let messages = bundle.messages();
            let completion = match self.client.complete(&messages, &job.config.sampling) {
                Ok(c) => c,
                Err(source) => {
                    if let Some(store) = &self.store {
                        store.record_failure(i, topic, &messages, &source.to_string())?;
                        store.save(job)?;
                    }
                    return Err(GenerationError::Client { topic_index: Some(i), source });
                }
            };
            let mut text = completion.text.trim();
            if i > 0 && job.config.suppress_repeated_greetings {
                text = strip_leading_greetings(text, &self.greetings);
            }
            let exchange = Exchange {
                topic_index: i,
                topic: topic.clone(),
                messages,
                response: completion.text.clone(),
                latency_ms: completion.latency_ms,
                attempts: completion.attempts,
                usage: completion.usage,
                shrink_steps,
            };
            if let Some(store) = &self.store {
                store.record_exchange(&exchange)?;
            }
            job.segments.push(Segment { topic: topic.clone(), text: text.to_string() });
            job.exchanges.push(exchange);
            self.persist(job)?;
        }
        job.final_dialogue = Some(job.joined_segments());
        self.persist(job)
    }
}

/// Generates one dialogue in memory with the built-in templates.
pub fn generate_dialogue(
    cfg: &GenerationConfig,
    source_summary: &str,
    fewshot: &[FewShotPair],
    client: &dyn LlmClient,
) -> Result<GenerationJob, GenerationError> {
    let mut job = GenerationJob::new(cfg.clone(), source_summary, fewshot.to_vec());
    Generator::new(client).run(&mut job)?;
    Ok(job)
}
