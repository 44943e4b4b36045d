use std::fmt;
use std::str::FromStr;

use super::mora::Mora;
use super::phrase::{AccentPhrase, AccentType};
use super::LabelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pitch {
    High,
    Low,
}

impl Pitch {
    pub fn as_char(self) -> char {
        match self {
            Pitch::High => 'H',
            Pitch::Low => 'L',
        }
    }
}

impl fmt::Display for Pitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Mora-level high/low pitch levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PitchSequence(Vec<Pitch>);

impl PitchSequence {
    pub fn new(levels: Vec<Pitch>) -> Self {
        Self(levels)
    }

    pub fn levels(&self) -> &[Pitch] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&mut self, other: &PitchSequence) {
        self.0.extend_from_slice(&other.0);
    }
}

impl fmt::Display for PitchSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| p.fmt(f))
    }
}

impl FromStr for PitchSequence {
    type Err = LabelError;

    /// Parses strings like `LHHL`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.char_indices()
            .map(|(offset, c)| match c {
                'H' => Ok(Pitch::High),
                'L' => Ok(Pitch::Low),
                ch => Err(LabelError::InvalidCharacter { ch, offset }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(PitchSequence)
    }
}

/// Expands an accent type into its Tokyo-dialect pitch pattern.
///
/// Flat: `L H…H`; head-high: `H L…L`; type k: `L H^(k-1) L^(n-k)`.
/// A single mora is `L` when flat and `H` when accented.
pub fn accent_to_pitch(phrase: &AccentPhrase) -> PitchSequence {
    let n = phrase.mora_count();
    let k = phrase.accent().value();
    let mut levels = vec![Pitch::Low; n];
    let high = match k {
        0 => 1..n,
        1 => 0..1,
        _ => 1..k,
    };
    levels[high].fill(Pitch::High);
    PitchSequence(levels)
}

/// Recovers the accent type from a mora-level pitch pattern.
///
/// Within a single phrase the flat pattern and the tail-high pattern are
/// both `L H…H`; that pattern is read as flat (type 0).
pub fn pitch_to_accent(moras: Vec<Mora>, pitch: &PitchSequence) -> Result<AccentPhrase, LabelError> {
    if moras.len() != pitch.len() {
        return Err(LabelError::PitchLengthMismatch {
            moras: moras.len(),
            pitch: pitch.len(),
        });
    }
    let accent = accent_of_pattern(pitch.levels())?;
    AccentPhrase::new(moras, AccentType(accent))
}

fn accent_of_pattern(levels: &[Pitch]) -> Result<usize, LabelError> {
    use Pitch::{High, Low};
    let illegal = || LabelError::IllegalPitchPattern(PitchSequence(levels.to_vec()).to_string());
    match levels {
        [] => Err(LabelError::EmptyPronunciation),
        [Low] => Ok(0),
        [High] => Ok(1),
        [High, rest @ ..] => {
            if rest.iter().all(|&p| p == Low) {
                Ok(1)
            } else {
                Err(illegal())
            }
        }
        [Low, rest @ ..] => {
            let highs = rest.iter().take_while(|&&p| p == High).count();
            if highs == 0 || rest[highs..].contains(&High) {
                Err(illegal())
            } else if highs == rest.len() {
                Ok(0)
            } else {
                Ok(highs + 1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::segment_moras;

    fn pitch_of(pron: &str, accent: usize) -> String {
        accent_to_pitch(&AccentPhrase::from_pronunciation(pron, accent).unwrap()).to_string()
    }

    fn accent_of(pron: &str, pattern: &str) -> Result<usize, LabelError> {
        pitch_to_accent(segment_moras(pron).unwrap(), &pattern.parse().unwrap())
            .map(|p| p.accent().value())
    }

    #[test]
    fn tokyo_patterns() {
        assert_eq!(pitch_of("セーコーシテモ", 6), "LHHHHHL");
        assert_eq!(pitch_of("ギョギョート", 1), "HLLL");
        assert_eq!(pitch_of("アタラシー", 0), "LHHHH");
        assert_eq!(pitch_of("イエオ", 2), "LHL");
        assert_eq!(pitch_of("ア", 0), "L");
        assert_eq!(pitch_of("ア", 1), "H");
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(accent_of("イエオ", "LHL"), Ok(2));
        assert_eq!(accent_of("ア", "L"), Ok(0));
        assert_eq!(accent_of("ア", "H"), Ok(1));
        assert_eq!(accent_of("イエオ", "HLL"), Ok(1));
        assert_eq!(accent_of("イエオ", "LHH"), Ok(0));
    }

    #[test]
    fn tail_high_reads_as_flat() {
        assert_eq!(pitch_of("イエオ", 3), pitch_of("イエオ", 0));
        assert_eq!(accent_of("イエオ", "LHH"), Ok(0));
    }

    #[test]
    fn illegal_patterns() {
        for pattern in ["HHL", "LLH", "LHLH", "LL", "HH", "HLH"] {
            let pron = "アイウエ".chars().take(pattern.len()).collect::<String>();
            assert!(
                matches!(accent_of(&pron, pattern), Err(LabelError::IllegalPitchPattern(_))),
                "{pattern}"
            );
        }
    }

    #[test]
    fn length_mismatch() {
        assert_eq!(
            accent_of("アイ", "LHL"),
            Err(LabelError::PitchLengthMismatch { moras: 2, pitch: 3 })
        );
    }

    #[test]
    fn parse_pitch_string() {
        assert!("LHX".parse::<PitchSequence>().is_err());
        assert_eq!("".parse::<PitchSequence>().unwrap().len(), 0);
    }
}
