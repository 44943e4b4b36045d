//! Label notation: moras, accent phrases, pitch patterns and utterances.
//!
//! Pronunciations are Katakana. Inside a phrase `[` marks the pitch rise
//! after the first mora and `]` the fall after the accent nucleus. Phrases
//! end with `#`; `_` is a pause between phrases; `|` separates a phrase's
//! graphemes from its labels.

mod mora;
mod phrase;
mod pitch;
mod utterance;

pub use mora::{
    hiragana_to_katakana, is_base_kana, is_combining, is_kana, join_moras, segment_moras, Mora,
    COMBINING_KANA,
};
pub use phrase::{
    parse_phrase, parse_phrase_with, serialize_phrase, AccentClass, AccentPhrase, AccentType,
};
pub use pitch::{accent_to_pitch, pitch_to_accent, Pitch, PitchSequence};
pub use utterance::{
    parse_utterance, parse_utterance_with, AnnotatedPhrase, Item, UtteranceAnnotation,
    UtteranceError,
};

pub const RISE: char = '[';
pub const FALL: char = ']';
pub const BOUNDARY: char = '#';
pub const PAUSE: char = '_';
pub const DELIMITER: char = '|';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    /// Record structural violations and parse as much as possible.
    Lenient,
}

/// A parsed value plus the violations tolerated in lenient mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T, E = LabelError> {
    pub value: T,
    pub violations: Vec<E>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabelError {
    #[error("{ch:?} at byte {offset} is not allowed in a label")]
    InvalidCharacter { ch: char, offset: usize },
    #[error("combining kana {ch:?} at byte {offset} has no base kana")]
    DanglingCombining { ch: char, offset: usize },
    #[error("{base:?} cannot take combining kana {combining:?} (byte {offset})")]
    CombiningAfterSpecial {
        base: String,
        combining: char,
        offset: usize,
    },
    #[error("{text:?} is {moras} moras, expected one")]
    NotSingleMora { text: String, moras: usize },
    #[error("empty pronunciation")]
    EmptyPronunciation,
    #[error("duplicate {0:?} marker")]
    DuplicateMarker(char),
    #[error("pitch fall `]` precedes pitch rise `[`")]
    FallBeforeRise,
    #[error("pitch fall `]` before the first mora")]
    FallAtStart,
    #[error("pitch rise `[` must follow the first mora, found after mora {after}")]
    MisplacedRise { after: usize },
    #[error("pitch rise `[` with no following mora")]
    RiseAtEnd,
    #[error("head-high phrase must not carry `[`")]
    RiseOnHeadHigh,
    #[error("phrase of {moras} moras needs `[` after the first mora")]
    MissingRise { moras: usize },
    #[error("accent type {accent} out of range for {moras} moras")]
    AccentOutOfRange { accent: usize, moras: usize },
    #[error("pitch sequence of length {pitch} for {moras} moras")]
    PitchLengthMismatch { moras: usize, pitch: usize },
    #[error("pitch pattern {0} matches no Tokyo accent type")]
    IllegalPitchPattern(String),
}
