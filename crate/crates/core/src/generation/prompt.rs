//! Prompt templates and prompt assembly.
//!
//! Templates are plain UTF-8 files with `{name}` placeholders. The built-in
//! set ships in `data/prompts/`; any file present in a user directory
//! overrides its built-in counterpart.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::client::ChatMessage;
use super::config::{GenerationConfig, StyleSpec};
use super::fewshot::FewShotPair;
use super::text::head_words;
use super::GenerationError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplates {
    pub system: String,
    pub user: String,
    pub summary_block: String,
    pub style_one_sentence: String,
    pub style_asl: String,
    pub context_block: String,
    pub fewshot_user: String,
    pub summarize_system: String,
    pub summarize: String,
}

pub const TEMPLATE_FILES: &[(&str, &str)] = &[
    ("system.txt", include_str!("../../data/prompts/system.txt")),
    ("user.txt", include_str!("../../data/prompts/user.txt")),
    ("summary_block.txt", include_str!("../../data/prompts/summary_block.txt")),
    ("style_one_sentence.txt", include_str!("../../data/prompts/style_one_sentence.txt")),
    ("style_asl.txt", include_str!("../../data/prompts/style_asl.txt")),
    ("context_block.txt", include_str!("../../data/prompts/context_block.txt")),
    ("fewshot_user.txt", include_str!("../../data/prompts/fewshot_user.txt")),
    ("summarize_system.txt", include_str!("../../data/prompts/summarize_system.txt")),
    ("summarize.txt", include_str!("../../data/prompts/summarize.txt")),
];

impl PromptTemplates {
    fn from_lookup(mut get: impl FnMut(&str) -> Result<String, GenerationError>) -> Result<Self, GenerationError> {
        Ok(Self {
            system: get("system.txt")?,
            user: get("user.txt")?,
            summary_block: get("summary_block.txt")?,
            style_one_sentence: get("style_one_sentence.txt")?,
            style_asl: get("style_asl.txt")?,
            context_block: get("context_block.txt")?,
            fewshot_user: get("fewshot_user.txt")?,
            summarize_system: get("summarize_system.txt")?,
            summarize: get("summarize.txt")?,
        })
    }

    fn builtin_file(name: &str) -> String {
        TEMPLATE_FILES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, c)| c.to_string())
            .expect("template table is complete")
    }

    pub fn builtin() -> Self {
        Self::from_lookup(|name| Ok(Self::builtin_file(name))).expect("builtin templates")
    }

    /// Loads templates from `dir`, falling back to the built-in text for
    /// files that are absent.
    pub fn load_dir(dir: &Path) -> Result<Self, GenerationError> {
        if !dir.is_dir() {
            return Err(GenerationError::InvalidConfig(format!(
                "prompt template directory {} does not exist",
                dir.display()
            )));
        }
        Self::from_lookup(|name| {
            let path = dir.join(name);
            if path.is_file() {
                std::fs::read_to_string(&path).map_err(|e| GenerationError::io(&path, e))
            } else {
                Ok(Self::builtin_file(name))
            }
        })
    }

    pub fn write_builtin(dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in TEMPLATE_FILES {
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }

    pub fn render_summarize(&self, text: &str) -> Result<String, GenerationError> {
        render(&self.summarize, &[("text", text)])
    }
}

/// Substitutes `{name}` placeholders. A placeholder without a value is an
/// error; braces not forming `{identifier}` are copied through.
pub fn render(template: &str, vars: &[(&str, &str)]) -> Result<String, GenerationError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let ident_len = after
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(after.len());
        if ident_len > 0 && after[ident_len..].starts_with('}') {
            let name = &after[..ident_len];
            let value = vars
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| GenerationError::Template(format!("no value for placeholder {{{name}}}")))?;
            out.push_str(value);
            rest = &after[ident_len + 1..];
        } else {
            out.push('{');
            rest = after;
        }
    }
    out.push_str(rest);
    Ok(out)
}

/// Formats an integer with comma thousands separators ("1,000").
pub fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Everything sent to the model for one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_message: String,
    pub user_message: String,
    pub fewshot_pairs: Vec<(String, String)>,
    pub context_tail: String,
    pub style_spec: StyleSpec,
}

impl PromptBundle {
    /// System message, few-shot exchanges as user/assistant turns, then the
    /// generation request.
    pub fn messages(&self) -> Vec<ChatMessage> {
        let mut messages = vec![ChatMessage::system(&self.system_message)];
        for (input, output) in &self.fewshot_pairs {
            messages.push(ChatMessage::user(input));
            messages.push(ChatMessage::assistant(output));
        }
        messages.push(ChatMessage::user(&self.user_message));
        messages
    }

    pub fn estimated_tokens(&self, cfg: &GenerationConfig) -> usize {
        let est = cfg.estimator();
        self.messages().iter().map(|m| est.estimate(&m.content)).sum()
    }
}

/// Reductions applied to fit a prompt in the context window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShrinkStep {
    DroppedFewShot { index: usize },
    TruncatedSummary { kept_words: usize },
}

pub struct PromptRequest<'a> {
    pub topic: &'a str,
    pub summary: &'a str,
    pub fewshot: &'a [FewShotPair],
    pub context_tail: &'a str,
}

fn build_bundle(
    cfg: &GenerationConfig,
    templates: &PromptTemplates,
    req: &PromptRequest<'_>,
    fewshot: &[FewShotPair],
    summary: &str,
) -> Result<PromptBundle, GenerationError> {
    let turns = cfg.target_turns.to_string();
    let words = group_thousands(cfg.target_words);
    let mut sections = vec![render(
        &templates.user,
        &[
            ("domain", &cfg.domain),
            ("topics", req.topic),
            ("topic", req.topic),
            ("target_turns", &turns),
            ("target_words", &words),
        ],
    )?];
    if !summary.trim().is_empty() {
        sections.push(render(&templates.summary_block, &[("summary", summary)])?);
    }
    let mut style = Vec::new();
    if cfg.style.one_sentence_per_turn {
        style.push(render(&templates.style_one_sentence, &[])?);
    }
    if let Some(asl) = cfg.style.asl_reference {
        style.push(render(&templates.style_asl, &[("asl_reference", &format!("{asl:.0}"))])?);
    }
    if !style.is_empty() {
        sections.push(style.iter().map(|s| s.trim()).collect::<Vec<_>>().join(" "));
    }
    if !req.context_tail.is_empty() {
        sections.push(render(&templates.context_block, &[("context_tail", req.context_tail)])?);
    }
    let fewshot_pairs = fewshot
        .iter()
        .map(|p| {
            Ok((
                render(&templates.fewshot_user, &[("summary", &p.input_summary.text)])?.trim().to_string(),
                p.output_excerpt.clone(),
            ))
        })
        .collect::<Result<Vec<_>, GenerationError>>()?;
    Ok(PromptBundle {
        system_message: templates.system.trim().to_string(),
        user_message: sections.iter().map(|s| s.trim_end()).collect::<Vec<_>>().join("\n\n"),
        fewshot_pairs,
        context_tail: req.context_tail.to_string(),
        style_spec: cfg.style.clone(),
    })
}

/// Assembles the prompt for one topic segment. When the estimate exceeds
/// the context limit, few-shot pairs are dropped (last first), then the
/// summary is truncated; if it still does not fit the call fails with
/// [`GenerationError::ContextOverflow`].
pub fn assemble_prompt(
    cfg: &GenerationConfig,
    templates: &PromptTemplates,
    req: &PromptRequest<'_>,
) -> Result<(PromptBundle, Vec<ShrinkStep>), GenerationError> {
    let limit = cfg.prompt_limit();
    let est = cfg.estimator();
    let mut fewshot: Vec<FewShotPair> = req.fewshot.to_vec();
    let mut summary = req.summary.to_string();
    let mut steps = Vec::new();
    loop {
        let bundle = build_bundle(cfg, templates, req, &fewshot, &summary)?;
        let estimated = bundle.estimated_tokens(cfg);
        if estimated <= limit {
            return Ok((bundle, steps));
        }
        if fewshot.pop().is_some() {
            steps.push(ShrinkStep::DroppedFewShot { index: fewshot.len() });
            continue;
        }
        let summary_words = summary.split_whitespace().count();
        if summary_words == 0 {
            return Err(GenerationError::ContextOverflow { estimated, limit });
        }
        let excess_words = est.words_from(estimated - limit).max(1);
        let kept = summary_words.saturating_sub(excess_words);
        summary = head_words(&summary, kept).to_string();
        steps.push(ShrinkStep::TruncatedSummary { kept_words: kept });
    }
}
