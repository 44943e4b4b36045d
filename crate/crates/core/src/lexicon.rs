//! Pronunciation dictionary, minimal-span word segmentation and the lattice
//! of candidate phrase pronunciations.

use std::collections::HashMap;
use std::io::BufRead;

use crate::label::{hiragana_to_katakana, is_kana, join_moras, segment_moras, LabelError, Mora};

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: expected 2 or 3 tab-separated columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("line {line}: empty surface")]
    EmptySurface { line: usize },
    #[error("line {line}: empty pronunciation")]
    EmptyPronunciation { line: usize },
    #[error("line {line}: bad pronunciation {pronunciation:?}: {source}")]
    Pronunciation {
        line: usize,
        pronunciation: String,
        #[source]
        source: LabelError,
    },
    #[error("reading lexicon: {0}")]
    Io(#[from] std::io::Error),
}

/// All pronunciations listed for one surface, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    surface: String,
    pronunciations: Vec<Vec<Mora>>,
}

impl LexiconEntry {
    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn pronunciations(&self) -> &[Vec<Mora>] {
        &self.pronunciations
    }
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, LexiconEntry>,
    max_surface_chars: usize,
}

impl Lexicon {
    /// Builds a lexicon from `(surface, pronunciation)` pairs.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut lexicon = Lexicon::default();
        for (i, (surface, pron)) in pairs.into_iter().enumerate() {
            lexicon.insert(i + 1, surface, pron)?;
        }
        Ok(lexicon)
    }

    fn insert(&mut self, line: usize, surface: &str, pron: &str) -> Result<(), LexiconError> {
        if surface.is_empty() {
            return Err(LexiconError::EmptySurface { line });
        }
        if pron.is_empty() {
            return Err(LexiconError::EmptyPronunciation { line });
        }
        let moras = segment_moras(pron).map_err(|source| LexiconError::Pronunciation {
            line,
            pronunciation: pron.to_string(),
            source,
        })?;
        let entry = self
            .entries
            .entry(surface.to_string())
            .or_insert_with(|| LexiconEntry {
                surface: surface.to_string(),
                pronunciations: Vec::new(),
            });
        if !entry.pronunciations.contains(&moras) {
            entry.pronunciations.push(moras);
        }
        self.max_surface_chars = self.max_surface_chars.max(surface.chars().count());
        Ok(())
    }

    pub fn get(&self, surface: &str) -> Option<&LexiconEntry> {
        self.entries.get(surface)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_surface_chars(&self) -> usize {
        self.max_surface_chars
    }
}

/// Reads a lexicon TSV: `surface<TAB>pronunciation[<TAB>accent_type]`.
///
/// Lines starting with `#` and blank lines are skipped. The accent column is
/// accepted but not interpreted.
pub fn load_lexicon<R: BufRead>(source: R) -> Result<Lexicon, LexiconError> {
    let mut lexicon = Lexicon::default();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&cols.len()) {
            return Err(LexiconError::Columns {
                line: line_no,
                found: cols.len(),
            });
        }
        lexicon.insert(line_no, cols[0], cols[1])?;
    }
    Ok(lexicon)
}

/// One piece of a segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span<'a> {
    pub surface: &'a str,
    /// `None` for a single character absent from the lexicon.
    pub entry: Option<&'a LexiconEntry>,
}

impl Span<'_> {
    pub fn is_known(&self) -> bool {
        self.entry.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation<'a> {
    pub spans: Vec<Span<'a>>,
}

impl Segmentation<'_> {
    pub fn surfaces(&self) -> Vec<&str> {
        self.spans.iter().map(|s| s.surface).collect()
    }
}

/// Tiles `graphemes` with lexicon surfaces and single unknown characters,
/// using as few spans as possible.
///
/// Among minimal tilings the one whose first span is longest wins, then the
/// longest second span, and so on. A single character that is itself a
/// lexicon surface is never an unknown span.
///
/// ```
/// use accent_forge::lexicon::{segment, Lexicon};
///
/// let lex = Lexicon::from_pairs([("漁業", "ギョギョー"), ("と", "ト")]).unwrap();
/// assert_eq!(segment("漁業と", &lex).surfaces(), ["漁業", "と"]);
/// ```
pub fn segment<'a>(graphemes: &'a str, lexicon: &'a Lexicon) -> Segmentation<'a> {
    let bounds: Vec<usize> = graphemes
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(graphemes.len()))
        .collect();
    let n = bounds.len() - 1;

    // best[i] = (span count, span length in chars, entry) for the suffix at i
    let mut best: Vec<Option<(usize, usize, Option<&LexiconEntry>)>> = vec![None; n + 1];
    best[n] = Some((0, 0, None));
    for i in (0..n).rev() {
        let longest = lexicon.max_surface_chars().min(n - i).max(1);
        for len in (1..=longest).rev() {
            let surface = &graphemes[bounds[i]..bounds[i + len]];
            let entry = lexicon.get(surface);
            if entry.is_none() && len > 1 {
                continue;
            }
            let count = best[i + len].map(|b| b.0).unwrap_or(usize::MAX) + 1;
            // iterate longest first so strict `<` keeps the longer span on ties
            if best[i].is_none_or(|b| count < b.0) {
                best[i] = Some((count, len, entry));
            }
        }
    }

    let mut spans = Vec::new();
    let mut i = 0;
    while i < n {
        let (_, len, entry) = best[i].expect("every position has a tiling");
        spans.push(Span {
            surface: &graphemes[bounds[i]..bounds[i + len]],
            entry,
        });
        i += len;
    }
    Segmentation { spans }
}

/// One group of alternative pronunciations covering consecutive spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcGroup {
    pub surface: String,
    pub candidates: Vec<Vec<Mora>>,
}

/// Candidate phrase pronunciations as a chain of arc groups.
///
/// Every choice of one candidate per group, concatenated, is one path.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PronLattice {
    groups: Vec<ArcGroup>,
    /// Surface of the first span with no usable pronunciation, if any.
    blocked_by: Option<String>,
}

impl PronLattice {
    pub fn from_groups(groups: Vec<ArcGroup>) -> Self {
        Self {
            groups,
            blocked_by: None,
        }
    }

    pub fn groups(&self) -> &[ArcGroup] {
        &self.groups
    }

    pub fn is_uncorrectable(&self) -> bool {
        self.blocked_by.is_some()
    }

    pub fn blocked_by(&self) -> Option<&str> {
        self.blocked_by.as_deref()
    }

    /// Number of source-to-sink paths, saturating at `u128::MAX`.
    pub fn path_count(&self) -> u128 {
        if self.is_uncorrectable() {
            return 0;
        }
        self.groups
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.candidates.len() as u128))
    }

    /// Enumerates paths as per-group candidate indices in lexicographic order.
    ///
    /// Returns `None` when there are more than `limit` paths.
    pub fn path_indices(&self, limit: usize) -> Option<Vec<Vec<usize>>> {
        if self.path_count() > limit as u128 {
            return None;
        }
        let mut paths = vec![Vec::new()];
        for group in &self.groups {
            paths = paths
                .into_iter()
                .flat_map(|prefix| {
                    (0..group.candidates.len()).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        if self.is_uncorrectable() {
            paths.clear();
        }
        Some(paths)
    }

    /// Concatenated moras of the path picking `choice[g]` in group `g`.
    pub fn path_moras(&self, choice: &[usize]) -> Vec<Mora> {
        self.groups
            .iter()
            .zip(choice)
            .flat_map(|(g, &c)| g.candidates[c].iter().cloned())
            .collect()
    }

    /// All path pronunciations in lexicographic arc order, up to `limit`.
    pub fn paths(&self, limit: usize) -> Option<Vec<String>> {
        self.path_indices(limit).map(|paths| {
            paths
                .iter()
                .map(|choice| join_moras(&self.path_moras(choice)))
                .collect()
        })
    }
}

/// Turns a segmentation into a pronunciation lattice.
///
/// Known spans contribute their dictionary pronunciations in order. Runs of
/// adjacent unknown kana characters read as themselves (Hiragana folded to
/// Katakana). Any other unknown span makes the lattice uncorrectable.
pub fn build_lattice(seg: &Segmentation<'_>) -> PronLattice {
    let mut groups = Vec::new();
    let mut pending_kana = String::new();
    let mut blocked_by = None;

    let flush = |pending: &mut String,
                 groups: &mut Vec<ArcGroup>,
                 blocked: &mut Option<String>| {
        if pending.is_empty() {
            return;
        }
        match segment_moras(&hiragana_to_katakana(pending)) {
            Ok(moras) => groups.push(ArcGroup {
                surface: pending.clone(),
                candidates: vec![moras],
            }),
            Err(_) => {
                blocked.get_or_insert_with(|| pending.clone());
            }
        }
        pending.clear();
    };

    for span in &seg.spans {
        match span.entry {
            Some(entry) => {
                flush(&mut pending_kana, &mut groups, &mut blocked_by);
                groups.push(ArcGroup {
                    surface: span.surface.to_string(),
                    candidates: entry.pronunciations().to_vec(),
                });
            }
            None if is_kana(span.surface) => pending_kana.push_str(span.surface),
            None => {
                flush(&mut pending_kana, &mut groups, &mut blocked_by);
                blocked_by.get_or_insert_with(|| span.surface.to_string());
            }
        }
    }
    flush(&mut pending_kana, &mut groups, &mut blocked_by);

    PronLattice { groups, blocked_by }
}
