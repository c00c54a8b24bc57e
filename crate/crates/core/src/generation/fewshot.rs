use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::client::{ChatMessage, LlmClient};
use super::config::GenerationConfig;
use super::prompt::PromptTemplates;
use super::text::{word_spans, TokenEstimator};
use super::GenerationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewStatus {
    #[default]
    Unreviewed,
    Approved,
    Rejected,
}

/// A model-written bullet summary awaiting manual review.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub text: String,
    #[serde(default)]
    pub review: ReviewStatus,
}

impl Summary {
    pub fn new(text: impl Into<String>) -> Self {
        Self { text: text.into(), review: ReviewStatus::Unreviewed }
    }
}

/// Asks the model for a bullet summary of `text`.
pub fn summarize(
    text: &str,
    client: &dyn LlmClient,
    cfg: &GenerationConfig,
    templates: &PromptTemplates,
) -> Result<Summary, GenerationError> {
    if text.trim().is_empty() {
        return Err(GenerationError::EmptyText);
    }
    let messages = vec![
        ChatMessage::system(templates.summarize_system.trim()),
        ChatMessage::user(templates.render_summarize(text)?),
    ];
    let completion = client
        .complete(&messages, &cfg.sampling)
        .map_err(|source| GenerationError::Client { topic_index: None, source })?;
    let summary = completion.text.trim().to_string();
    let tokens = cfg.estimator().estimate(&summary);
    if tokens > cfg.summary_max_tokens {
        return Err(GenerationError::BudgetExceeded { tokens, cap: cfg.summary_max_tokens });
    }
    Ok(Summary::new(summary))
}

/// Token ranges of a few-shot pair inside one source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotSpans {
    pub input: Range<usize>,
    pub output: Range<usize>,
}

impl FewShotSpans {
    pub fn gap(&self) -> usize {
        self.output.start - self.input.end
    }
}

/// Lays out `[0, input)` followed, after `gap` tokens, by `output` tokens.
pub fn fewshot_spans(
    total_tokens: usize,
    input_budget: usize,
    gap: usize,
    output_budget: usize,
) -> Result<FewShotSpans, GenerationError> {
    let required = input_budget + gap + output_budget;
    if total_tokens < required {
        return Err(GenerationError::SourceTooShort { required, available: total_tokens });
    }
    let output_start = input_budget + gap;
    Ok(FewShotSpans { input: 0..input_budget, output: output_start..output_start + output_budget })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotPair {
    pub input_summary: Summary,
    pub output_excerpt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spans: Option<FewShotSpans>,
}

/// Cuts the input and output spans out of `file_text` (verbatim, on word
/// boundaries) without calling the model.
pub fn fewshot_excerpts<'a>(
    file_text: &'a str,
    cfg: &GenerationConfig,
) -> Result<(&'a str, &'a str, FewShotSpans), GenerationError> {
    let est: TokenEstimator = cfg.estimator();
    let words = word_spans(file_text);
    let spans = fewshot_spans(
        est.tokens_for_words(words.len()),
        cfg.fewshot_input_budget,
        cfg.fewshot_gap,
        cfg.fewshot_output_budget,
    )?;
    let input_words = est.words_within(spans.input.end).min(words.len());
    let output_first = est.words_from(spans.output.start);
    let output_end = est.words_within(spans.output.end).min(words.len());
    if input_words == 0 || output_first >= output_end {
        return Err(GenerationError::SourceTooShort {
            required: spans.output.end,
            available: est.tokens_for_words(words.len()),
        });
    }
    let input = &file_text[words[0].0..words[input_words - 1].1];
    let output = &file_text[words[output_first].0..words[output_end - 1].1];
    Ok((input, output, spans))
}

/// Builds one few-shot pair: the summarized opening span as input and a
/// later raw span as output.
pub fn build_fewshot_pair(
    file_text: &str,
    cfg: &GenerationConfig,
    client: &dyn LlmClient,
    templates: &PromptTemplates,
) -> Result<FewShotPair, GenerationError> {
    let (input, output, spans) = fewshot_excerpts(file_text, cfg)?;
    let input_summary = summarize(input, client, cfg, templates)?;
    Ok(FewShotPair { input_summary, output_excerpt: output.to_string(), spans: Some(spans) })
}
