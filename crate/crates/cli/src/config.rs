//! `meddialog.toml`: optional file config. Flags beat file beats defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

use meddialog::eval::Pooling;
use meddialog::generation::{EndpointConfig, GenerationConfig};
use meddialog::lexical::RoleNormalization;
use meddialog::stats::Level;

pub const DEFAULT_CONFIG_FILE: &str = "meddialog.toml";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub jobs: Option<usize>,
    pub paths: PathsSection,
    pub generation: GenerationConfig,
    pub endpoint: EndpointConfig,
    pub evaluate: EvaluateSection,
    pub ratings: RatingsSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub lexicons: Option<PathBuf>,
    pub prompts: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub window: Option<usize>,
    pub role_normalization: Option<RoleNormalization>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatingsSection {
    pub alpha_level: Option<Level>,
    pub pooling: Option<Pooling>,
}

const SECRET_KEYS: &[&str] = &["api_key", "token", "auth_token", "password", "secret"];

impl FileConfig {
    pub fn parse(text: &str, origin: &Path) -> anyhow::Result<Self> {
        let raw: toml::Table = toml::from_str(text).with_context(|| format!("invalid TOML in {}", origin.display()))?;
        if let Some(endpoint) = raw.get("endpoint").and_then(|e| e.as_table()) {
            if let Some(key) = SECRET_KEYS.iter().find(|k| endpoint.contains_key(**k)) {
                bail!(
                    "{}: endpoint.{key} is not allowed; put the key in the environment variable named by endpoint.api_key_env",
                    origin.display()
                );
            }
        }
        let cfg: FileConfig = toml::from_str(text).with_context(|| format!("invalid config in {}", origin.display()))?;
        Ok(cfg)
    }

    /// Reads `explicit` if given (must exist), else `./meddialog.toml` if
    /// present, else defaults.
    pub fn discover(explicit: Option<&Path>) -> anyhow::Result<Self> {
        let path = match explicit {
            Some(p) => {
                if !p.is_file() {
                    bail!("config file {} does not exist", p.display());
                }
                p.to_path_buf()
            }
            None => {
                let p = PathBuf::from(DEFAULT_CONFIG_FILE);
                if !p.is_file() {
                    return Ok(Self::default());
                }
                p
            }
        };
        let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text, &path)
    }
}

/// Template written by `export-defaults`.
pub fn default_config_toml() -> String {
    let gen = GenerationConfig::default();
    let ep = EndpointConfig::default();
    format!(
        r#"# meddialog configuration. Command-line flags override these values.
# jobs = 4

[paths]
# lexicons = "lexicons"
# prompts = "prompts"
# output = "out"

[generation]
domain = "{domain}"
topics = [{topics}]
target_turns = {turns}
target_words = {words}
chunk_budget = {chunk}
context_tail_words = {tail}
fewshot_input_budget = {fin}
fewshot_output_budget = {fout}
fewshot_gap = {gap}
context_budget = {ctx}
safety_margin = {margin}
token_ratio = {ratio}
summary_max_tokens = {smax}
segment_separator = "\n"
suppress_repeated_greetings = false

[generation.sampling]
temperature = 0.7
max_tokens = 2048
# seed = 42

[endpoint]
url = "{url}"
model = "{model}"
# The API key is read from this environment variable only.
api_key_env = "{env}"
timeout_secs = {timeout}
max_retries = {retries}
backoff_ms = {backoff}

[evaluate]
window = 50
role_normalization = "per-token"

[ratings]
alpha_level = "ordinal"
pooling = "mean"
"#,
        domain = gen.domain,
        topics = gen.topics.iter().map(|t| format!("\"{t}\"")).collect::<Vec<_>>().join(", "),
        turns = gen.target_turns,
        words = gen.target_words,
        chunk = gen.chunk_budget,
        tail = gen.context_tail_words,
        fin = gen.fewshot_input_budget,
        fout = gen.fewshot_output_budget,
        gap = gen.fewshot_gap,
        ctx = gen.context_budget,
        margin = gen.safety_margin,
        ratio = gen.token_ratio,
        smax = gen.summary_max_tokens,
        url = ep.url,
        model = ep.model,
        env = ep.api_key_env,
        timeout = ep.timeout_secs,
        retries = ep.max_retries,
        backoff = ep.backoff_ms,
    )
}
