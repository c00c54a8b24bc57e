use serde::{Deserialize, Serialize};

use super::text::TokenEstimator;
use super::GenerationError;
use crate::lexicon::DEFAULT_TOPICS;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StyleSpec {
    /// Average sentence length of the reference dialogue, in words.
    pub asl_reference: Option<f64>,
    pub one_sentence_per_turn: bool,
}

impl Default for StyleSpec {
    fn default() -> Self {
        Self { asl_reference: None, one_sentence_per_turn: true }
    }
}

/// Knobs of the generation pipeline. All budgets are in estimated model
/// tokens (see [`TokenEstimator`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub domain: String,
    pub topics: Vec<String>,
    pub target_turns: usize,
    pub target_words: usize,
    pub chunk_budget: usize,
    pub context_tail_words: usize,
    pub fewshot_input_budget: usize,
    pub fewshot_output_budget: usize,
    pub fewshot_gap: usize,
    /// Model context window.
    pub context_budget: usize,
    /// Fraction of `context_budget` kept free as a safety margin.
    pub safety_margin: f64,
    pub token_ratio: f64,
    pub summary_max_tokens: usize,
    pub segment_separator: String,
    /// Drop leading greeting lines from every segment after the first.
    pub suppress_repeated_greetings: bool,
    pub style: StyleSpec,
    pub sampling: SamplingParams,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            domain: "nefrologie".into(),
            topics: DEFAULT_TOPICS.iter().map(|t| t.to_string()).collect(),
            target_turns: 140,
            target_words: 1000,
            chunk_budget: 1000,
            context_tail_words: 150,
            fewshot_input_budget: 400,
            fewshot_output_budget: 1200,
            fewshot_gap: 100,
            context_budget: 8000,
            safety_margin: 0.1,
            token_ratio: 1.4,
            summary_max_tokens: 600,
            segment_separator: "\n".into(),
            suppress_repeated_greetings: false,
            style: StyleSpec::default(),
            sampling: SamplingParams { temperature: Some(0.7), max_tokens: Some(2048), seed: None },
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<(), GenerationError> {
        let invalid = |msg: &str| Err(GenerationError::InvalidConfig(msg.to_string()));
        if self.topics.is_empty() || self.topics.iter().any(|t| t.trim().is_empty()) {
            return invalid("topics must be a non-empty list of non-empty names");
        }
        let budgets = [
            ("target_turns", self.target_turns),
            ("target_words", self.target_words),
            ("chunk_budget", self.chunk_budget),
            ("context_tail_words", self.context_tail_words),
            ("fewshot_input_budget", self.fewshot_input_budget),
            ("fewshot_output_budget", self.fewshot_output_budget),
            ("context_budget", self.context_budget),
            ("summary_max_tokens", self.summary_max_tokens),
        ];
        if let Some((name, _)) = budgets.iter().find(|(_, v)| *v == 0) {
            return Err(GenerationError::InvalidConfig(format!("{name} must be positive")));
        }
        if !(self.token_ratio.is_finite() && self.token_ratio > 0.0) {
            return invalid("token_ratio must be positive");
        }
        if !(0.0..1.0).contains(&self.safety_margin) {
            return invalid("safety_margin must be in [0, 1)");
        }
        Ok(())
    }

    pub fn estimator(&self) -> TokenEstimator {
        TokenEstimator::new(self.token_ratio)
    }

    /// Token limit for one assembled prompt after the safety margin.
    pub fn prompt_limit(&self) -> usize {
        (self.context_budget as f64 * (1.0 - self.safety_margin)).floor() as usize
    }
}
