use std::fmt;
use std::str::FromStr;

use super::mora::{join_moras, Mora, MoraBuilder};
use super::{LabelError, ParseMode, Parsed, FALL, RISE};

/// Position of the accent nucleus, counted in moras from 1; 0 means flat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AccentType(pub usize);

/// Coarse accent classes of the Tokyo system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccentClass {
    /// Flat (heiban), type 0.
    Flat,
    /// Head-high (atamadaka), type 1.
    HeadHigh,
    /// Middle-high (nakadaka), type 2..n-1.
    MiddleHigh,
    /// Tail-high (odaka), type n for n >= 2.
    TailHigh,
}

impl AccentType {
    pub const FLAT: AccentType = AccentType(0);
    pub const HEAD_HIGH: AccentType = AccentType(1);

    pub fn value(self) -> usize {
        self.0
    }

    /// Classifies the accent for a phrase of `moras` moras.
    ///
    /// For a one-mora phrase, type 1 is reported as head-high.
    pub fn class(self, moras: usize) -> AccentClass {
        match self.0 {
            0 => AccentClass::Flat,
            1 => AccentClass::HeadHigh,
            k if k == moras => AccentClass::TailHigh,
            _ => AccentClass::MiddleHigh,
        }
    }
}

impl fmt::Display for AccentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A pronunciation (one or more moras) with its accent type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AccentPhrase {
    moras: Vec<Mora>,
    accent: AccentType,
}

impl AccentPhrase {
    pub fn new(moras: Vec<Mora>, accent: AccentType) -> Result<Self, LabelError> {
        if moras.is_empty() {
            return Err(LabelError::EmptyPronunciation);
        }
        if accent.0 > moras.len() {
            return Err(LabelError::AccentOutOfRange {
                accent: accent.0,
                moras: moras.len(),
            });
        }
        Ok(Self { moras, accent })
    }

    /// Convenience constructor from a Katakana pronunciation string.
    pub fn from_pronunciation(pronunciation: &str, accent: usize) -> Result<Self, LabelError> {
        Self::new(super::segment_moras(pronunciation)?, AccentType(accent))
    }

    pub fn moras(&self) -> &[Mora] {
        &self.moras
    }

    pub fn mora_count(&self) -> usize {
        self.moras.len()
    }

    pub fn accent(&self) -> AccentType {
        self.accent
    }

    pub fn class(&self) -> AccentClass {
        self.accent.class(self.moras.len())
    }

    /// The Katakana pronunciation without prosodic markers.
    pub fn pronunciation(&self) -> String {
        join_moras(&self.moras)
    }

    pub fn into_parts(self) -> (Vec<Mora>, AccentType) {
        (self.moras, self.accent)
    }
}

impl fmt::Display for AccentPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_phrase(self))
    }
}

impl FromStr for AccentPhrase {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_phrase(s)
    }
}

/// Parses a single phrase label such as `セ[ーコーシテ]モ` in strict mode.
///
/// ```
/// use accent_forge::label::parse_phrase;
///
/// let p = parse_phrase("セ[ーコーシテ]モ").unwrap();
/// assert_eq!(p.pronunciation(), "セーコーシテモ");
/// assert_eq!(p.accent().value(), 6);
/// assert_eq!(p.mora_count(), 7);
/// ```
pub fn parse_phrase(label: &str) -> Result<AccentPhrase, LabelError> {
    parse_phrase_with(label, ParseMode::Strict).map(|parsed| parsed.value)
}

/// Parses a phrase label, optionally tolerating structural marker violations.
///
/// In lenient mode, marker problems and stray characters are collected in
/// [`Parsed::violations`] and the phrase is rebuilt from the first `]`
/// (accent type) alone. An empty pronunciation is an error in both modes.
pub fn parse_phrase_with(label: &str, mode: ParseMode) -> Result<Parsed<AccentPhrase>, LabelError> {
    let mut violations = Vec::new();
    let mut report = |err: LabelError| -> Result<(), LabelError> {
        match mode {
            ParseMode::Strict => Err(err),
            ParseMode::Lenient => {
                violations.push(err);
                Ok(())
            }
        }
    };

    let mut builder = MoraBuilder::for_text(label);
    let mut rise: Option<usize> = None;
    let mut fall: Option<usize> = None;
    for (offset, c) in label.char_indices() {
        match c {
            RISE => {
                builder.barrier();
                if rise.is_some() {
                    report(LabelError::DuplicateMarker(RISE))?;
                } else {
                    rise = Some(builder.len());
                    if fall.is_some() {
                        report(LabelError::FallBeforeRise)?;
                    }
                }
            }
            FALL => {
                builder.barrier();
                if fall.is_some() {
                    report(LabelError::DuplicateMarker(FALL))?;
                } else if builder.len() == 0 {
                    report(LabelError::FallAtStart)?;
                } else {
                    fall = Some(builder.len());
                }
            }
            _ => {
                if let Err(err) = builder.push(c, offset) {
                    report(err)?;
                }
            }
        }
    }

    let moras = builder.finish();
    let n = moras.len();
    if n == 0 {
        return Err(LabelError::EmptyPronunciation);
    }

    match rise {
        Some(1) if n == 1 => report(LabelError::RiseAtEnd)?,
        Some(1) | None => {}
        Some(pos) => report(LabelError::MisplacedRise { after: pos })?,
    }
    match (rise, fall) {
        (Some(_), Some(1)) => report(LabelError::RiseOnHeadHigh)?,
        (None, Some(k)) if k >= 2 => report(LabelError::MissingRise { moras: n })?,
        (None, None) if n >= 2 => report(LabelError::MissingRise { moras: n })?,
        _ => {}
    }

    let accent = AccentType(fall.unwrap_or(0));
    Ok(Parsed {
        value: AccentPhrase::new(moras, accent)?,
        violations,
    })
}

/// Renders a phrase in canonical label form.
///
/// ```
/// use accent_forge::label::{serialize_phrase, AccentPhrase};
///
/// let p = AccentPhrase::from_pronunciation("イエオ", 2).unwrap();
/// assert_eq!(serialize_phrase(&p), "イ[エ]オ");
/// let flat = AccentPhrase::from_pronunciation("ア", 0).unwrap();
/// assert_eq!(serialize_phrase(&flat), "ア");
/// ```
pub fn serialize_phrase(phrase: &AccentPhrase) -> String {
    let n = phrase.moras.len();
    let accent = phrase.accent.0;
    let mut out = String::with_capacity(phrase.moras.iter().map(|m| m.as_str().len()).sum::<usize>() + 6);
    for (i, mora) in phrase.moras.iter().enumerate() {
        out.push_str(mora.as_str());
        let after = i + 1;
        if after == 1 && n >= 2 && accent != 1 {
            out.push(RISE);
        }
        if after == accent {
            out.push(FALL);
        }
    }
    out
}
