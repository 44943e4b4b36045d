use std::fmt;

use super::mora::Mora;
use super::phrase::{parse_phrase_with, AccentPhrase};
use super::pitch::{accent_to_pitch, PitchSequence};
use super::{LabelError, ParseMode, Parsed, BOUNDARY, DELIMITER, PAUSE};

/// An accent phrase with the graphemes it was read from, when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedPhrase {
    pub graphemes: Option<String>,
    pub phrase: AccentPhrase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Phrase(AnnotatedPhrase),
    Pause,
}

/// An ordered run of accent phrases and pauses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UtteranceAnnotation {
    items: Vec<Item>,
}

/// Errors from [`parse_utterance`]. `phrase` is the 1-based phrase number.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UtteranceError {
    #[error("phrase {phrase}: unterminated phrase (missing `#`)")]
    Unterminated { phrase: usize },
    #[error("phrase {phrase}: pause `_` inside a phrase")]
    PauseInPhrase { phrase: usize },
    #[error("phrase {phrase}: expected one `|` between graphemes and labels, found {found}")]
    DelimiterCount { phrase: usize, found: usize },
    #[error("phrase {phrase}: empty graphemes")]
    EmptyGraphemes { phrase: usize },
    #[error("phrase {phrase}: {source}")]
    Phrase {
        phrase: usize,
        #[source]
        source: LabelError,
    },
}

impl UtteranceError {
    pub fn phrase(&self) -> usize {
        match *self {
            UtteranceError::Unterminated { phrase }
            | UtteranceError::PauseInPhrase { phrase }
            | UtteranceError::DelimiterCount { phrase, .. }
            | UtteranceError::EmptyGraphemes { phrase }
            | UtteranceError::Phrase { phrase, .. } => phrase,
        }
    }
}

impl UtteranceAnnotation {
    pub fn new(items: Vec<Item>) -> Self {
        Self { items }
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Item> {
        self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn phrases(&self) -> impl Iterator<Item = &AnnotatedPhrase> + '_ {
        self.items.iter().filter_map(|item| match item {
            Item::Phrase(p) => Some(p),
            Item::Pause => None,
        })
    }

    pub fn phrase_count(&self) -> usize {
        self.phrases().count()
    }

    /// True when every phrase carries graphemes (vacuously true when empty).
    pub fn has_graphemes(&self) -> bool {
        self.phrases().all(|p| p.graphemes.is_some())
    }

    /// All moras of the utterance in order, pauses dropped.
    pub fn moras(&self) -> Vec<Mora> {
        self.phrases()
            .flat_map(|p| p.phrase.moras().iter().cloned())
            .collect()
    }

    /// Utterance-level Katakana pronunciation.
    pub fn phonemes(&self) -> String {
        self.phrases().map(|p| p.phrase.pronunciation()).collect()
    }

    /// Utterance-level mora pitch, phrase patterns concatenated.
    pub fn pitch(&self) -> PitchSequence {
        let mut out = PitchSequence::default();
        for p in self.phrases() {
            out.extend(&accent_to_pitch(&p.phrase));
        }
        out
    }

    /// Concatenated graphemes, or `None` when some phrase has none.
    pub fn graphemes(&self) -> Option<String> {
        self.phrases()
            .map(|p| p.graphemes.as_deref())
            .collect::<Option<String>>()
    }

    /// `(start, end)` mora offsets of each phrase in [`Self::moras`].
    pub fn phrase_spans(&self) -> Vec<(usize, usize)> {
        let mut start = 0;
        self.phrases()
            .map(|p| {
                let end = start + p.phrase.mora_count();
                let span = (start, end);
                start = end;
                span
            })
            .collect()
    }
}

impl fmt::Display for UtteranceAnnotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match item {
                Item::Pause => write!(f, "{PAUSE}")?,
                Item::Phrase(p) => {
                    if let Some(g) = &p.graphemes {
                        write!(f, "{g}{DELIMITER}")?;
                    }
                    write!(f, "{}{BOUNDARY}", p.phrase)?;
                }
            }
        }
        Ok(())
    }
}

/// Parses an utterance label stream in strict mode.
///
/// ```
/// use accent_forge::label::parse_utterance;
///
/// let u = parse_utterance("漁業と|ギョ]ギョート#_商業で|ショ]ーギョーデ#", true).unwrap();
/// assert_eq!(u.phrase_count(), 2);
/// assert_eq!(u.graphemes().as_deref(), Some("漁業と商業で"));
/// assert_eq!(u.phonemes(), "ギョギョートショーギョーデ");
/// assert_eq!(u.to_string(), "漁業と|ギョ]ギョート#_商業で|ショ]ーギョーデ#");
/// ```
pub fn parse_utterance(text: &str, with_graphemes: bool) -> Result<UtteranceAnnotation, UtteranceError> {
    parse_utterance_with(text, with_graphemes, ParseMode::Strict).map(|parsed| parsed.value)
}

/// Parses an utterance; in lenient mode recoverable problems become violations.
///
/// Lenient mode accepts a final phrase missing its `#`, drops `_` found
/// inside a phrase, and forwards phrase-level leniency.
pub fn parse_utterance_with(
    text: &str,
    with_graphemes: bool,
    mode: ParseMode,
) -> Result<Parsed<UtteranceAnnotation, UtteranceError>, UtteranceError> {
    let strict = mode == ParseMode::Strict;
    let mut items = Vec::new();
    let mut violations = Vec::new();
    let mut rest = text;
    let mut phrase = 0;

    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix(PAUSE) {
            items.push(Item::Pause);
            rest = after;
            continue;
        }
        phrase += 1;
        let chunk = match rest.find(BOUNDARY) {
            Some(end) => {
                let chunk = &rest[..end];
                rest = &rest[end + BOUNDARY.len_utf8()..];
                chunk
            }
            None => {
                let err = UtteranceError::Unterminated { phrase };
                if strict {
                    return Err(err);
                }
                violations.push(err);
                std::mem::take(&mut rest)
            }
        };

        let owned;
        let chunk = if chunk.contains(PAUSE) {
            let err = UtteranceError::PauseInPhrase { phrase };
            if strict {
                return Err(err);
            }
            violations.push(err);
            owned = chunk.replace(PAUSE, "");
            owned.as_str()
        } else {
            chunk
        };

        let found = chunk.matches(DELIMITER).count();
        let (graphemes, label) = if with_graphemes {
            if found != 1 {
                return Err(UtteranceError::DelimiterCount { phrase, found });
            }
            let (g, l) = chunk.split_once(DELIMITER).unwrap();
            if g.is_empty() {
                return Err(UtteranceError::EmptyGraphemes { phrase });
            }
            (Some(g.to_string()), l)
        } else {
            if found != 0 {
                return Err(UtteranceError::DelimiterCount { phrase, found });
            }
            (None, chunk)
        };

        let parsed = parse_phrase_with(label, mode)
            .map_err(|source| UtteranceError::Phrase { phrase, source })?;
        violations.extend(
            parsed
                .violations
                .into_iter()
                .map(|source| UtteranceError::Phrase { phrase, source }),
        );
        items.push(Item::Phrase(AnnotatedPhrase {
            graphemes,
            phrase: parsed.value,
        }));
    }

    Ok(Parsed {
        value: UtteranceAnnotation { items },
        violations,
    })
}
