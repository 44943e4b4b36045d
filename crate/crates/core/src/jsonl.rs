//! Line-oriented JSON records exchanged between recognizer, corrector and
//! scorer.

use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::codec::{to_display_symbols, SymbolMode};
use crate::label::{parse_utterance_with, ParseMode, Parsed, UtteranceError, DELIMITER};
use crate::metrics::Corpus;

/// One recognizer output line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub id: String,
    pub transcript: String,
    pub labels: String,
}

/// A hypothesis line after correction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectedRecord {
    pub id: String,
    pub transcript: String,
    pub labels: String,
    pub status: Vec<String>,
    pub corrected: String,
}

/// Any line a scorer may read: plain hypotheses, corrected output, or
/// references. `corrected` wins over `labels` when present.
#[derive(Debug, Clone, Deserialize)]
pub struct ScoringRecord {
    pub id: String,
    #[serde(default)]
    pub labels: Option<String>,
    #[serde(default)]
    pub corrected: Option<String>,
    #[serde(default)]
    pub error: Option<String>,
}

impl ScoringRecord {
    pub fn label_text(&self) -> Option<&str> {
        self.corrected.as_deref().or(self.labels.as_deref())
    }
}

/// A problem tied to an input line (1-based) and, when known, an id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub source: String,
    pub line: usize,
    pub id: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.source, self.line)?;
        if let Some(id) = &self.id {
            write!(f, " [{id}]")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Decodes symbols and parses a label stream; graphemes are expected when
/// the stream contains a `|` delimiter.
pub fn parse_label_stream(
    text: &str,
    symbols: SymbolMode,
    mode: ParseMode,
) -> Result<Parsed<crate::label::UtteranceAnnotation, UtteranceError>, String> {
    let display = to_display_symbols(text, symbols).map_err(|e| e.to_string())?;
    let with_graphemes = display.contains(DELIMITER);
    parse_utterance_with(&display, with_graphemes, mode).map_err(|e| e.to_string())
}

/// Reads a JSONL corpus, collecting per-line diagnostics instead of failing.
///
/// Lines that fail to parse, carry an `error` field, or repeat an id are left
/// out of the corpus and reported; their ids are returned in `rejected`.
pub fn load_corpus<R: BufRead>(
    source_name: &str,
    reader: R,
    symbols: SymbolMode,
    mode: ParseMode,
) -> std::io::Result<LoadedCorpus> {
    let mut loaded = LoadedCorpus::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let diag = |id: Option<&str>, message: String| Diagnostic {
            source: source_name.to_string(),
            line: i + 1,
            id: id.map(str::to_string),
            message,
        };
        let record: ScoringRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                loaded.diagnostics.push(diag(None, format!("invalid JSON record: {e}")));
                continue;
            }
        };
        let id = record.id.as_str();
        if loaded.corpus.contains_key(id) || loaded.rejected.contains(&record.id) {
            loaded.diagnostics.push(diag(Some(id), "duplicate id".into()));
            continue;
        }
        let outcome = match (&record.error, record.label_text()) {
            (Some(err), _) => Err(format!("record carries error: {err}")),
            (None, None) => Err("record has no labels".into()),
            (None, Some(text)) => parse_label_stream(text, symbols, mode),
        };
        match outcome {
            Ok(parsed) => {
                loaded.corpus.insert(record.id, parsed.value);
            }
            Err(message) => {
                loaded.diagnostics.push(diag(Some(id), message));
                loaded.rejected.push(record.id);
            }
        }
    }
    Ok(loaded)
}

#[derive(Debug, Default)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub rejected: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
}
