//! Dictionary-guided correction of predicted phrase pronunciations.
//!
//! For each phrase the graphemes are segmented against the lexicon, the
//! candidate pronunciations are searched for the one closest (in mora edit
//! distance) to the predicted pronunciation, and the predicted accent type is
//! carried over to the corrected mora count.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distance::levenshtein;
use crate::label::{AccentPhrase, AccentType, AnnotatedPhrase, Item, Mora, UtteranceAnnotation};
use crate::lexicon::{build_lattice, segment, Lexicon, PronLattice};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("lattice has no usable pronunciation for {0:?}")]
    Uncorrectable(String),
    #[error("accent type {accent} out of range for {moras} moras")]
    AccentOutOfRange { accent: usize, moras: usize },
    #[error("mora count must be at least 1")]
    ZeroMoras,
    #[error("phrase {phrase} has no graphemes")]
    MissingGraphemes { phrase: usize },
    #[error("lattice has {paths} paths, above the enumeration cap {cap}")]
    TooManyPaths { paths: u128, cap: usize },
}

/// What to do when the restored accent falls outside the corrected phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClampPolicy {
    #[default]
    ClampAndFlag,
}

/// What to do when the graphemes yield no candidate pronunciation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UncorrectablePolicy {
    #[default]
    PassThroughAndFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectionConfig {
    /// Upper bound on paths for [`exhaustive_best_path`].
    pub max_enumerated_paths: usize,
    pub clamp_policy: ClampPolicy,
    pub uncorrectable_policy: UncorrectablePolicy,
}

impl Default for CorrectionConfig {
    fn default() -> Self {
        Self {
            max_enumerated_paths: 4096,
            clamp_policy: ClampPolicy::default(),
            uncorrectable_policy: UncorrectablePolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionStatus {
    Unchanged,
    Corrected,
    Uncorrectable,
    AccentClamped,
}

impl CorrectionStatus {
    pub const ALL: [CorrectionStatus; 4] = [
        CorrectionStatus::Unchanged,
        CorrectionStatus::Corrected,
        CorrectionStatus::Uncorrectable,
        CorrectionStatus::AccentClamped,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorrectionStatus::Unchanged => "unchanged",
            CorrectionStatus::Corrected => "corrected",
            CorrectionStatus::Uncorrectable => "uncorrectable",
            CorrectionStatus::AccentClamped => "accent_clamped",
        }
    }
}

impl fmt::Display for CorrectionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseHypothesis {
    pub graphemes: String,
    pub predicted: AccentPhrase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionResult {
    pub phrase: AccentPhrase,
    pub status: CorrectionStatus,
    /// Mora edit distance between prediction and chosen candidate.
    /// Zero when the lattice was uncorrectable.
    pub edit_cost: usize,
}

/// Levenshtein distance over moras.
///
/// ```
/// use accent_forge::decoder::mora_edit_distance;
/// use accent_forge::label::segment_moras;
///
/// let a = segment_moras("ギョーギョート").unwrap();
/// let b = segment_moras("ギョギョート").unwrap();
/// assert_eq!(mora_edit_distance(&a, &b), 1);
/// ```
pub fn mora_edit_distance(a: &[Mora], b: &[Mora]) -> usize {
    levenshtein(a, b)
}

/// Extends an alignment row by the moras of one arc.
///
/// `row[i]` is the cost of aligning what has been consumed so far with
/// `target[..i]`; the result is the same after also consuming `arc`.
fn extend_row<'m>(row: &[usize], arc: impl Iterator<Item = &'m Mora>, target: &[&Mora]) -> Vec<usize> {
    let mut prev = row.to_vec();
    let mut next = vec![0; row.len()];
    for mora in arc {
        next[0] = prev[0] + 1;
        for i in 1..prev.len() {
            let sub = prev[i - 1] + usize::from(mora != target[i - 1]);
            next[i] = sub.min(prev[i] + 1).min(next[i - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut next);
    }
    prev
}

fn elementwise_min(acc: Option<Vec<usize>>, row: Vec<usize>) -> Option<Vec<usize>> {
    Some(match acc {
        None => row,
        Some(acc) => acc.into_iter().zip(row).map(|(a, b)| a.min(b)).collect(),
    })
}

/// Finds the lattice path closest to `predicted`.
///
/// Runs a backward pass giving, for every group boundary and predicted
/// suffix, the cheapest completion; then walks forward choosing at each group
/// the first candidate (dictionary order) that can still reach the optimum.
/// Ties therefore resolve to the lexicographically smallest path.
///
/// Returns the chosen candidate index per group, the path moras and the cost.
pub fn best_path(
    lattice: &PronLattice,
    predicted: &[Mora],
) -> Result<(Vec<usize>, Vec<Mora>, usize), DecodeError> {
    if let Some(surface) = lattice.blocked_by() {
        return Err(DecodeError::Uncorrectable(surface.to_string()));
    }
    let groups = lattice.groups();
    if let Some(empty) = groups.iter().find(|g| g.candidates.is_empty()) {
        return Err(DecodeError::Uncorrectable(empty.surface.clone()));
    }
    let p = predicted.len();
    let forward_target: Vec<&Mora> = predicted.iter().collect();
    let reverse_target: Vec<&Mora> = predicted.iter().rev().collect();

    // suffix[g][s]: cheapest alignment of groups g.. with the last s predicted moras
    let mut suffix = vec![(0..=p).collect::<Vec<_>>()];
    for group in groups.iter().rev() {
        let after = suffix.last().unwrap();
        let row = group
            .candidates
            .iter()
            .map(|c| extend_row(after, c.iter().rev(), &reverse_target))
            .fold(None, elementwise_min)
            .expect("groups are non-empty");
        suffix.push(row);
    }
    suffix.reverse();

    let optimum = suffix[0][p];
    let mut prefix: Vec<usize> = (0..=p).collect();
    let mut choice = Vec::with_capacity(groups.len());
    for (g, group) in groups.iter().enumerate() {
        let rest = &suffix[g + 1];
        let (index, row) = group
            .candidates
            .iter()
            .enumerate()
            .map(|(c, cand)| (c, extend_row(&prefix, cand.iter(), &forward_target)))
            .find(|(_, row)| (0..=p).map(|i| row[i] + rest[p - i]).min() == Some(optimum))
            .expect("some candidate reaches the optimum");
        choice.push(index);
        prefix = row;
    }
    debug_assert_eq!(prefix[p], optimum);

    let moras = lattice.path_moras(&choice);
    Ok((choice, moras, optimum))
}

/// Reference search that scores every path; for lattices up to the cap.
pub fn exhaustive_best_path(
    lattice: &PronLattice,
    predicted: &[Mora],
    cfg: &CorrectionConfig,
) -> Result<(Vec<usize>, Vec<Mora>, usize), DecodeError> {
    if let Some(surface) = lattice.blocked_by() {
        return Err(DecodeError::Uncorrectable(surface.to_string()));
    }
    let paths = lattice
        .path_indices(cfg.max_enumerated_paths)
        .ok_or(DecodeError::TooManyPaths {
            paths: lattice.path_count(),
            cap: cfg.max_enumerated_paths,
        })?;
    let mut best: Option<(Vec<usize>, Vec<Mora>, usize)> = None;
    for choice in paths {
        let moras = lattice.path_moras(&choice);
        let cost = mora_edit_distance(&moras, predicted);
        if best.as_ref().is_none_or(|b| cost < b.2) {
            best = Some((choice, moras, cost));
        }
    }
    Ok(best.unwrap_or_default())
}

/// Carries an accent type over to a corrected mora count.
///
/// Flat, head-high and tail-high types, and any type when the mora count is
/// unchanged, are kept. Middle-high types shift by the mora count change,
/// which keeps the nucleus at the same distance from the phrase end. A result
/// outside `0..=m_mod` is clamped and flagged.
///
/// ```
/// use accent_forge::decoder::restore_accent;
/// use accent_forge::label::AccentType;
///
/// assert_eq!(restore_accent(AccentType(3), 5, 6).unwrap(), (AccentType(4), false));
/// assert_eq!(restore_accent(AccentType(4), 4, 3).unwrap(), (AccentType(3), true));
/// ```
pub fn restore_accent(
    a_orig: AccentType,
    m_orig: usize,
    m_mod: usize,
) -> Result<(AccentType, bool), DecodeError> {
    if m_orig == 0 || m_mod == 0 {
        return Err(DecodeError::ZeroMoras);
    }
    let a = a_orig.value();
    if a > m_orig {
        return Err(DecodeError::AccentOutOfRange {
            accent: a,
            moras: m_orig,
        });
    }
    let literal = if m_mod == m_orig || a == 0 || a == 1 || a == m_orig {
        a as i64
    } else {
        a as i64 + m_mod as i64 - m_orig as i64
    };
    let clamped = literal.clamp(0, m_mod as i64);
    Ok((AccentType(clamped as usize), clamped != literal))
}

/// Corrects one phrase against the lexicon.
///
/// ```
/// use accent_forge::decoder::{correct_phrase, CorrectionConfig, CorrectionStatus, PhraseHypothesis};
/// use accent_forge::label::parse_phrase;
/// use accent_forge::lexicon::Lexicon;
///
/// let lex = Lexicon::from_pairs([("漁業", "ギョギョー"), ("と", "ト")]).unwrap();
/// let hyp = PhraseHypothesis {
///     graphemes: "漁業と".into(),
///     predicted: parse_phrase("ギョ]ーギョート").unwrap(),
/// };
/// let out = correct_phrase(&hyp, &lex, &CorrectionConfig::default()).unwrap();
/// assert_eq!(out.phrase.to_string(), "ギョ]ギョート");
/// assert_eq!(out.status, CorrectionStatus::Corrected);
/// assert_eq!(out.edit_cost, 1);
/// ```
pub fn correct_phrase(
    hyp: &PhraseHypothesis,
    lexicon: &Lexicon,
    cfg: &CorrectionConfig,
) -> Result<CorrectionResult, DecodeError> {
    if hyp.graphemes.is_empty() {
        return Err(DecodeError::MissingGraphemes { phrase: 1 });
    }
    let lattice: PronLattice = build_lattice(&segment(&hyp.graphemes, lexicon));
    let predicted = hyp.predicted.moras();
    let (_, moras, cost) = match best_path(&lattice, predicted) {
        Ok(found) => found,
        Err(DecodeError::Uncorrectable(_)) => {
            let UncorrectablePolicy::PassThroughAndFlag = cfg.uncorrectable_policy;
            return Ok(CorrectionResult {
                phrase: hyp.predicted.clone(),
                status: CorrectionStatus::Uncorrectable,
                edit_cost: 0,
            })
        }
        Err(e) => return Err(e),
    };
    if cost == 0 {
        return Ok(CorrectionResult {
            phrase: hyp.predicted.clone(),
            status: CorrectionStatus::Unchanged,
            edit_cost: 0,
        });
    }
    let (accent, clamped) = restore_accent(hyp.predicted.accent(), predicted.len(), moras.len())?;
    let ClampPolicy::ClampAndFlag = cfg.clamp_policy;
    let phrase = AccentPhrase::new(moras, accent).map_err(|_| DecodeError::AccentOutOfRange {
        accent: accent.value(),
        moras: predicted.len(),
    })?;
    Ok(CorrectionResult {
        phrase,
        status: if clamped {
            CorrectionStatus::AccentClamped
        } else {
            CorrectionStatus::Corrected
        },
        edit_cost: cost,
    })
}

/// Corrects every phrase of an annotated utterance independently.
///
/// Pauses, graphemes and phrase order are kept; one status per phrase.
pub fn correct_utterance(
    annotation: &UtteranceAnnotation,
    lexicon: &Lexicon,
    cfg: &CorrectionConfig,
) -> Result<(UtteranceAnnotation, Vec<CorrectionResult>), DecodeError> {
    let mut items = Vec::with_capacity(annotation.items().len());
    let mut results = Vec::new();
    let mut phrase_no = 0;
    for item in annotation.items() {
        match item {
            Item::Pause => items.push(Item::Pause),
            Item::Phrase(p) => {
                phrase_no += 1;
                let graphemes = p
                    .graphemes
                    .clone()
                    .ok_or(DecodeError::MissingGraphemes { phrase: phrase_no })?;
                let hyp = PhraseHypothesis {
                    graphemes,
                    predicted: p.phrase.clone(),
                };
                let result = correct_phrase(&hyp, lexicon, cfg).map_err(|e| match e {
                    DecodeError::MissingGraphemes { .. } => {
                        DecodeError::MissingGraphemes { phrase: phrase_no }
                    }
                    other => other,
                })?;
                items.push(Item::Phrase(AnnotatedPhrase {
                    graphemes: Some(hyp.graphemes),
                    phrase: result.phrase.clone(),
                }));
                results.push(result);
            }
        }
    }
    Ok((UtteranceAnnotation::new(items), results))
}
