//! Substitution between display symbols and the interchange code points used
//! in recognizer output streams.

use std::fmt;
use std::str::FromStr;

/// `(display, interchange)` pairs: rise, fall, boundary, pause, delimiter.
pub const SYMBOL_PAIRS: [(char, char); 5] = [
    ('[', '\u{2191}'),
    (']', '\u{2193}'),
    ('#', '\u{2460}'),
    ('_', '\u{2462}'),
    ('|', '\u{2223}'),
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("display symbol {display:?} mixed with interchange symbol {interchange:?}")]
    Ambiguous { display: char, interchange: char },
    #[error("unknown symbol mode {0:?} (expected display, interchange or auto)")]
    UnknownMode(String),
}

/// Which symbol set a label stream is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymbolMode {
    Display,
    Interchange,
    #[default]
    Auto,
}

impl FromStr for SymbolMode {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "display" => Ok(SymbolMode::Display),
            "interchange" => Ok(SymbolMode::Interchange),
            "auto" => Ok(SymbolMode::Auto),
            other => Err(CodecError::UnknownMode(other.to_string())),
        }
    }
}

impl fmt::Display for SymbolMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolMode::Display => "display",
            SymbolMode::Interchange => "interchange",
            SymbolMode::Auto => "auto",
        })
    }
}

fn to_interchange(c: char) -> Option<char> {
    SYMBOL_PAIRS.iter().find(|(d, _)| *d == c).map(|&(_, i)| i)
}

fn to_display(c: char) -> Option<char> {
    SYMBOL_PAIRS.iter().find(|(_, i)| *i == c).map(|&(d, _)| d)
}

/// Replaces display symbols by their interchange code points.
///
/// ```
/// use accent_forge::codec::{decode_symbols, encode_symbols};
///
/// assert_eq!(encode_symbols("イ[エ]オ#"), "イ\u{2191}エ\u{2193}オ\u{2460}");
/// let label = "ア[タラシ]ー#_";
/// assert_eq!(decode_symbols(&encode_symbols(label)).unwrap(), label);
/// ```
pub fn encode_symbols(text: &str) -> String {
    text.chars().map(|c| to_interchange(c).unwrap_or(c)).collect()
}

/// Replaces interchange code points by display symbols.
///
/// Text already in display form passes through unchanged; text mixing both
/// sets is rejected.
pub fn decode_symbols(text: &str) -> Result<String, CodecError> {
    let display = text.chars().find(|&c| to_interchange(c).is_some());
    let interchange = text.chars().find(|&c| to_display(c).is_some());
    if let (Some(display), Some(interchange)) = (display, interchange) {
        return Err(CodecError::Ambiguous {
            display,
            interchange,
        });
    }
    Ok(text.chars().map(|c| to_display(c).unwrap_or(c)).collect())
}

/// Guesses the symbol set from the first symbol character in `text`.
///
/// Returns `None` when the text contains no symbol of either set.
pub fn detect_symbols(text: &str) -> Option<SymbolMode> {
    text.chars().find_map(|c| {
        if to_interchange(c).is_some() {
            Some(SymbolMode::Display)
        } else if to_display(c).is_some() {
            Some(SymbolMode::Interchange)
        } else {
            None
        }
    })
}

/// Converts a label stream in `mode` to display symbols.
pub fn to_display_symbols(text: &str, mode: SymbolMode) -> Result<String, CodecError> {
    match mode {
        SymbolMode::Display => Ok(text.to_string()),
        SymbolMode::Interchange | SymbolMode::Auto => decode_symbols(text),
    }
}

/// Converts display-symbol text back into `mode`.
///
/// `Auto` resolves to whichever set `original` was written in.
pub fn from_display_symbols(text: &str, mode: SymbolMode, original: &str) -> String {
    let resolved = match mode {
        SymbolMode::Auto => detect_symbols(original).unwrap_or(SymbolMode::Display),
        m => m,
    };
    match resolved {
        SymbolMode::Interchange => encode_symbols(text),
        _ => text.to_string(),
    }
}
