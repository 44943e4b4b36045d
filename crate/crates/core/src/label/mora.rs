use std::fmt;

use super::LabelError;

/// Small kana that attach to the preceding base kana to form one mora.
pub const COMBINING_KANA: [char; 9] = ['ァ', 'ィ', 'ゥ', 'ェ', 'ォ', 'ャ', 'ュ', 'ョ', 'ヮ'];

/// Long-vowel mark.
pub const CHOONPU: char = 'ー';
/// Geminate marker.
pub const SOKUON: char = 'ッ';
/// Moraic nasal.
pub const HATSUON: char = 'ン';

/// Bit `i` is set when U+30A1 + i is in [`COMBINING_KANA`].
const COMBINING_MASK: u128 = {
    let mut mask = 0;
    let mut i = 0;
    while i < COMBINING_KANA.len() {
        mask |= 1 << (COMBINING_KANA[i] as u32 - 0x30A1);
        i += 1;
    }
    mask
};

pub fn is_combining(c: char) -> bool {
    let offset = (c as u32).wrapping_sub(0x30A1);
    offset < 128 && COMBINING_MASK >> offset & 1 == 1
}

/// Katakana letters usable as the first (or only) code point of a mora.
pub fn is_base_kana(c: char) -> bool {
    c == CHOONPU || (('\u{30A1}'..='\u{30FA}').contains(&c) && !is_combining(c))
}

/// Whether `c` may appear anywhere in a pronunciation string.
pub fn is_pronunciation_char(c: char) -> bool {
    is_base_kana(c) || is_combining(c)
}

/// One mora: a base kana optionally followed by a single combining small kana.
///
/// Stored inline as UTF-8. Unused bytes are zero, so the derived ordering
/// agrees with ordering by text.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mora {
    bytes: [u8; 6],
    len: u8,
}

impl Mora {
    /// Builds a mora from its text, checking it is exactly one mora.
    pub fn new(text: &str) -> Result<Self, LabelError> {
        let mut moras = segment_moras(text)?;
        match moras.len() {
            1 => Ok(moras.pop().unwrap()),
            0 => Err(LabelError::EmptyPronunciation),
            n => Err(LabelError::NotSingleMora {
                text: text.to_string(),
                moras: n,
            }),
        }
    }

    fn single(c: char) -> Self {
        let mut bytes = [0; 6];
        let len = c.encode_utf8(&mut bytes).len() as u8;
        Mora { bytes, len }
    }

    fn attach(&mut self, c: char) {
        let start = self.len as usize;
        self.len += c.encode_utf8(&mut self.bytes[start..]).len() as u8;
    }

    pub fn as_str(&self) -> &str {
        // SAFETY: `bytes[..len]` is only ever written by `char::encode_utf8`.
        unsafe { std::str::from_utf8_unchecked(&self.bytes[..self.len as usize]) }
    }

    /// The standalone moras ー, ッ and ン.
    pub fn is_special(&self) -> bool {
        self.len == 3 && matches!(self.as_str().chars().next(), Some(CHOONPU | SOKUON | HATSUON))
    }
}

impl fmt::Debug for Mora {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mora({:?})", self.as_str())
    }
}

impl fmt::Display for Mora {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl AsRef<str> for Mora {
    fn as_ref(&self) -> &str {
        self.as_str()
    }
}

/// Incremental mora builder shared by plain segmentation and label parsing.
///
/// A combining kana may only extend the most recent mora when nothing
/// (a marker, another combining kana, or a standalone ー/ッ/ン) broke the run.
#[derive(Debug, Default)]
pub(crate) struct MoraBuilder {
    moras: Vec<Mora>,
    attachable: bool,
}

impl MoraBuilder {
    /// Sized for `text`; every kana is three UTF-8 bytes.
    pub(crate) fn for_text(text: &str) -> Self {
        MoraBuilder {
            moras: Vec::with_capacity(text.len() / 3),
            attachable: false,
        }
    }

    pub(crate) fn push(&mut self, c: char, offset: usize) -> Result<(), LabelError> {
        if is_combining(c) {
            if !self.attachable {
                return Err(match self.moras.last() {
                    Some(prev) if prev.is_special() => LabelError::CombiningAfterSpecial {
                        base: prev.to_string(),
                        combining: c,
                        offset,
                    },
                    _ => LabelError::DanglingCombining { ch: c, offset },
                });
            }
            // attachable implies a last mora exists
            self.moras.last_mut().unwrap().attach(c);
            self.attachable = false;
        } else if is_base_kana(c) {
            self.moras.push(Mora::single(c));
            self.attachable = !matches!(c, CHOONPU | SOKUON | HATSUON);
        } else {
            return Err(LabelError::InvalidCharacter { ch: c, offset });
        }
        Ok(())
    }

    /// Breaks the current run so a following combining kana cannot attach.
    pub(crate) fn barrier(&mut self) {
        self.attachable = false;
    }

    pub(crate) fn len(&self) -> usize {
        self.moras.len()
    }

    pub(crate) fn finish(self) -> Vec<Mora> {
        self.moras
    }
}

/// Splits a Katakana pronunciation string into moras.
///
/// ```
/// use accent_forge::label::segment_moras;
///
/// let moras = segment_moras("ギョギョート").unwrap();
/// let texts: Vec<_> = moras.iter().map(|m| m.as_str()).collect();
/// assert_eq!(texts, ["ギョ", "ギョ", "ー", "ト"]);
/// ```
pub fn segment_moras(text: &str) -> Result<Vec<Mora>, LabelError> {
    let mut builder = MoraBuilder::for_text(text);
    for (offset, c) in text.char_indices() {
        builder.push(c, offset)?;
    }
    Ok(builder.finish())
}

/// Concatenates mora texts back into a pronunciation string.
pub fn join_moras(moras: &[Mora]) -> String {
    moras.iter().map(Mora::as_str).collect()
}

/// Maps Hiragana to Katakana code point by code point, leaving everything else.
pub fn hiragana_to_katakana(text: &str) -> String {
    text.chars()
        .map(|c| match c {
            '\u{3041}'..='\u{3096}' => char::from_u32(c as u32 + 0x60).unwrap_or(c),
            _ => c,
        })
        .collect()
}

/// True when every character is Hiragana, Katakana or the long-vowel mark.
pub fn is_kana(text: &str) -> bool {
    !text.is_empty()
        && text
            .chars()
            .all(|c| ('\u{3041}'..='\u{3096}').contains(&c) || is_pronunciation_char(c))
}
