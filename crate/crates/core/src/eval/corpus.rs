use std::path::{Path, PathBuf};

use super::EvalError;
use crate::dialogue::{Dialogue, DialogueDocument, ParseWarning, SentenceSplitter, TranscriptParser};

/// One dialogue loaded from a corpus directory.
#[derive(Debug, Clone)]
pub struct CorpusFile {
    pub path: PathBuf,
    pub dialogue: Dialogue,
    pub warnings: Vec<ParseWarning>,
}

/// Loads every `*.txt` transcript and `*.json` dialogue document in `dir`
/// (non-recursive), sorted by file name. Transcript ids are file stems.
pub fn load_corpus_dir(dir: &Path, parser: &TranscriptParser) -> Result<Vec<CorpusFile>, EvalError> {
    let io = |path: &Path, source| EvalError::Io { path: path.to_path_buf(), source };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|e| io(dir, e)))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("txt" | "json")));
    paths.sort();

    let mut files = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(&path).map_err(|e| io(&path, e))?;
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let (dialogue, warnings) = if path.extension().is_some_and(|e| e == "json") {
            let doc: DialogueDocument =
                serde_json::from_str(&text).map_err(|source| EvalError::Json { path: path.clone(), source })?;
            let d = doc
                .into_dialogue(&SentenceSplitter::default())
                .map_err(|source| EvalError::Parse { path: path.clone(), source })?;
            (d, Vec::new())
        } else {
            parser
                .parse_with_warnings(&id, &text)
                .map_err(|source| EvalError::Parse { path: path.clone(), source })?
        };
        files.push(CorpusFile { path, dialogue, warnings });
    }
    if files.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialogue::LabelMap;

    #[test]
    fn loads_txt_and_json_sorted() {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(tmp.path().join("b.txt"), "Arts: Hallo.\nPatiënt: Dag.").unwrap();
        let parsed = crate::dialogue::parse_transcript("Arts: Ja.", &LabelMap::default()).unwrap().with_id("a");
        std::fs::write(tmp.path().join("a.json"), serde_json::to_string(&parsed).unwrap()).unwrap();
        std::fs::write(tmp.path().join("notes.md"), "ignored").unwrap();
        let files = load_corpus_dir(tmp.path(), &TranscriptParser::new(LabelMap::default())).unwrap();
        let ids: Vec<&str> = files.iter().map(|f| f.dialogue.id()).collect();
        assert_eq!(ids, vec!["a", "b"]);
        assert_eq!(files[0].dialogue, parsed);
    }

    #[test]
    fn empty_dir_and_bad_file() {
        let tmp = tempfile::tempdir().unwrap();
        let parser = TranscriptParser::new(LabelMap::default());
        assert!(matches!(load_corpus_dir(tmp.path(), &parser), Err(EvalError::EmptyCorpus)));
        std::fs::write(tmp.path().join("x.txt"), "  \n").unwrap();
        assert!(matches!(load_corpus_dir(tmp.path(), &parser), Err(EvalError::Parse { .. })));
    }
}
