//! Toolkit for generating synthetic doctor–patient dialogues through an LLM
//! chat endpoint and for evaluating dialogue corpora with structural,
//! lexical and agreement statistics.
//!
//! Module map:
//! - [`dialogue`]: transcript parsing into turns, sentences and tokens
//! - [`structural`]: alternation rate, greeting/closing detection, ASL, SPT
//! - [`lexicon`] and [`lexical`]: keyword lexicons, TTR/MSTTR/MATTR, role
//!   consistency and topic coverage
//! - [`stats`]: mean/SD, Krippendorff's alpha, Spearman's rho
//! - [`generation`]: chunking, few-shot pairs, prompt assembly, LLM client
//!   and resumable generation jobs
//! - [`eval`]: corpus reports, ratings ingestion and quant–qual analysis

pub mod dialogue;
pub mod eval;
pub mod generation;
pub mod lexical;
pub mod lexicon;
pub mod stats;
pub mod structural;

pub use dialogue::{parse_transcript, Dialogue, DialogueSource, LabelMap, Sentence, Speaker, Turn};
pub use lexicon::{Lexicon, LexiconScope, LexiconSet};
