//! One directory per generation job:
//!
//! ```text
//! <job>/manifest.json          status, topics, completed segment count
//! <job>/config.json            GenerationConfig
//! <job>/job.json               full job state (used for resume)
//! <job>/exchanges/NN-topic.request.json
//! <job>/exchanges/NN-topic.response.txt
//! <job>/exchanges/NN-topic.meta.json
//! <job>/segments/NN-topic.txt
//! <job>/final_dialogue.txt
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::client::ChatMessage;
use super::job::{Exchange, GenerationJob};
use super::GenerationError;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct JobStore {
    root: PathBuf,
}

/// File-name-safe form of a topic name.
pub fn topic_slug(topic: &str) -> String {
    let mut slug = String::new();
    for c in topic.to_lowercase().chars() {
        if c.is_alphanumeric() {
            slug.push(c);
        } else if !slug.ends_with('-') {
            slug.push('-');
        }
    }
    let slug = slug.trim_matches('-');
    if slug.is_empty() { "topic".into() } else { slug.into() }
}

fn stem(index: usize, topic: &str) -> String {
    format!("{:02}-{}", index + 1, topic_slug(topic))
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), GenerationError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| GenerationError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| GenerationError::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    version: u32,
    status: String,
    topics: Vec<String>,
    completed_segments: usize,
}

#[derive(Serialize)]
struct RequestRecord<'a> {
    topic_index: usize,
    topic: &'a str,
    messages: &'a [ChatMessage],
}

impl JobStore {
    /// Creates the job directory and persists the initial state. Fails if
    /// a job already lives there.
    pub fn create(root: impl Into<PathBuf>, job: &GenerationJob) -> Result<Self, GenerationError> {
        let root = root.into();
        if root.join("job.json").exists() {
            return Err(GenerationError::io(
                &root,
                std::io::Error::new(std::io::ErrorKind::AlreadyExists, "a job already exists here"),
            ));
        }
        for dir in [root.clone(), root.join("exchanges"), root.join("segments")] {
            fs::create_dir_all(&dir).map_err(|e| GenerationError::io(&dir, e))?;
        }
        let store = Self { root };
        store.save(job)?;
        Ok(store)
    }

    pub fn open(root: impl Into<PathBuf>) -> Result<(Self, GenerationJob), GenerationError> {
        let root = root.into();
        let path = root.join("job.json");
        let raw = fs::read_to_string(&path).map_err(|e| GenerationError::io(&path, e))?;
        let job: GenerationJob = serde_json::from_str(&raw)?;
        Ok((Self { root }, job))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn save(&self, job: &GenerationJob) -> Result<(), GenerationError> {
        write_atomic(&self.root.join("config.json"), &serde_json::to_vec_pretty(&job.config)?)?;
        for (i, seg) in job.segments.iter().enumerate() {
            let path = self.root.join("segments").join(format!("{}.txt", stem(i, &seg.topic)));
            if !path.exists() {
                write_atomic(&path, seg.text.as_bytes())?;
            }
        }
        if let Some(text) = &job.final_dialogue {
            write_atomic(&self.root.join("final_dialogue.txt"), text.as_bytes())?;
        }
        write_atomic(&self.root.join("job.json"), &serde_json::to_vec_pretty(job)?)?;
        let manifest = Manifest {
            version: MANIFEST_VERSION,
            status: job.status().as_str().into(),
            topics: job.config.topics.clone(),
            completed_segments: job.segments.len(),
        };
        write_atomic(&self.root.join("manifest.json"), &serde_json::to_vec_pretty(&manifest)?)
    }

    /// Writes the request, raw response and call metadata of one exchange.
    pub fn record_exchange(&self, exchange: &Exchange) -> Result<(), GenerationError> {
        let base = self.root.join("exchanges").join(stem(exchange.topic_index, &exchange.topic));
        self.write_request(&base, exchange.topic_index, &exchange.topic, &exchange.messages)?;
        write_atomic(&base.with_extension("response.txt"), exchange.response.as_bytes())?;
        let meta = json!({
            "status": "ok",
            "latency_ms": exchange.latency_ms,
            "attempts": exchange.attempts,
            "usage": exchange.usage,
            "shrink_steps": exchange.shrink_steps,
        });
        write_atomic(&base.with_extension("meta.json"), &serde_json::to_vec_pretty(&meta)?)
    }

    /// Writes the request of a failed call together with the error.
    pub fn record_failure(
        &self,
        topic_index: usize,
        topic: &str,
        messages: &[ChatMessage],
        error: &str,
    ) -> Result<(), GenerationError> {
        let base = self.root.join("exchanges").join(stem(topic_index, topic));
        self.write_request(&base, topic_index, topic, messages)?;
        let meta = json!({ "status": "failed", "error": error });
        write_atomic(&base.with_extension("meta.json"), &serde_json::to_vec_pretty(&meta)?)
    }

    fn write_request(
        &self,
        base: &Path,
        topic_index: usize,
        topic: &str,
        messages: &[ChatMessage],
    ) -> Result<(), GenerationError> {
        let record = RequestRecord { topic_index, topic, messages };
        write_atomic(&base.with_extension("request.json"), &serde_json::to_vec_pretty(&record)?)
    }
}
