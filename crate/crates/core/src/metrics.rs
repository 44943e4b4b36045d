//! Corpus scoring: character error rates, accent-phrase boundary accuracy and
//! mora-level pitch F1.
//!
//! All corpus figures are micro-averaged: counts are pooled over utterances
//! before the ratio is taken. High pitch (`H`) is the positive class for F1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::distance::levenshtein;
use crate::label::{Pitch, PitchSequence, UtteranceAnnotation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("reference is empty")]
    EmptyReference,
    #[error("pitch sequences differ in length: reference {reference}, hypothesis {hypothesis}")]
    LengthMismatch { reference: usize, hypothesis: usize },
    #[error("system {system:?} covers a different id set than the reference ({detail})")]
    IdMismatch { system: String, detail: String },
    #[error("unknown filter mode {0:?} (expected intersection or per-system)")]
    UnknownFilterMode(String),
}

/// Pooled edit counts for an error rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ErrorCounts {
    pub edits: usize,
    pub reference_len: usize,
}

impl ErrorCounts {
    pub fn between<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> Self {
        Self {
            edits: levenshtein(reference, hypothesis),
            reference_len: reference.len(),
        }
    }

    pub fn rate(&self) -> Result<f64, MetricsError> {
        if self.reference_len == 0 {
            return Err(MetricsError::EmptyReference);
        }
        Ok(self.edits as f64 / self.reference_len as f64)
    }
}

impl Add for ErrorCounts {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            edits: self.edits + rhs.edits,
            reference_len: self.reference_len + rhs.reference_len,
        }
    }
}

impl AddAssign for ErrorCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Edit distance divided by reference length.
///
/// ```
/// use accent_forge::metrics::cer;
///
/// let r: Vec<char> = "セーコーシテモシナクテモ".chars().collect();
/// let h: Vec<char> = "セーコーシテモシナクタモ".chars().collect();
/// assert_eq!(cer(&r, &h).unwrap(), 1.0 / 12.0);
/// ```
pub fn cer<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> Result<f64, MetricsError> {
    ErrorCounts::between(reference, hypothesis).rate()
}

/// Character error rate between two strings, counted in code points.
pub fn char_cer(reference: &str, hypothesis: &str) -> Result<f64, MetricsError> {
    let r: Vec<char> = reference.chars().collect();
    let h: Vec<char> = hypothesis.chars().collect();
    cer(&r, &h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BoundaryCounts {
    pub correct: usize,
    pub total: usize,
}

impl BoundaryCounts {
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }
}

impl Add for BoundaryCounts {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            correct: self.correct + rhs.correct,
            total: self.total + rhs.total,
        }
    }
}

/// Counts reference phrases whose mora span also appears in the hypothesis.
///
/// Spans are `(start, end)` offsets into each side's own concatenated moras.
pub fn boundary_accuracy(reference: &UtteranceAnnotation, hypothesis: &UtteranceAnnotation) -> BoundaryCounts {
    let hyp: BTreeSet<(usize, usize)> = hypothesis.phrase_spans().into_iter().collect();
    let spans = reference.phrase_spans();
    BoundaryCounts {
        correct: spans.iter().filter(|s| hyp.contains(s)).count(),
        total: spans.len(),
    }
}

/// Pitch confusion counts with `H` as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct PitchCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
}

impl PitchCounts {
    pub fn between(reference: &PitchSequence, hypothesis: &PitchSequence) -> Result<Self, MetricsError> {
        if reference.len() != hypothesis.len() {
            return Err(MetricsError::LengthMismatch {
                reference: reference.len(),
                hypothesis: hypothesis.len(),
            });
        }
        let mut counts = Self::default();
        for (r, h) in reference.levels().iter().zip(hypothesis.levels()) {
            match (r, h) {
                (Pitch::High, Pitch::High) => counts.true_pos += 1,
                (Pitch::Low, Pitch::High) => counts.false_pos += 1,
                (Pitch::High, Pitch::Low) => counts.false_neg += 1,
                (Pitch::Low, Pitch::Low) => counts.true_neg += 1,
            }
        }
        Ok(counts)
    }

    pub fn moras(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// F1 for the `H` class; 1 when neither side has any `H`.
    pub fn f1(&self) -> f64 {
        if self.true_pos == 0 {
            return if self.false_pos + self.false_neg == 0 { 1.0 } else { 0.0 };
        }
        let tp = self.true_pos as f64;
        let precision = tp / (tp + self.false_pos as f64);
        let recall = tp / (tp + self.false_neg as f64);
        2.0 * precision * recall / (precision + recall)
    }
}

impl Add for PitchCounts {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            true_pos: self.true_pos + rhs.true_pos,
            false_pos: self.false_pos + rhs.false_pos,
            false_neg: self.false_neg + rhs.false_neg,
            true_neg: self.true_neg + rhs.true_neg,
        }
    }
}

/// Micro-averaged pitch F1 over utterance pairs with matching mora counts.
///
/// ```
/// use accent_forge::label::PitchSequence;
/// use accent_forge::metrics::pitch_f1;
///
/// let r: PitchSequence = "LHHLL".parse().unwrap();
/// let h: PitchSequence = "LHHHL".parse().unwrap();
/// assert!((pitch_f1([(&r, &h)]).unwrap() - 0.8).abs() < 1e-12);
/// ```
pub fn pitch_f1<'a, I>(pairs: I) -> Result<f64, MetricsError>
where
    I: IntoIterator<Item = (&'a PitchSequence, &'a PitchSequence)>,
{
    let mut total = PitchCounts::default();
    for (r, h) in pairs {
        total = total + PitchCounts::between(r, h)?;
    }
    Ok(total.f1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// Keep ids where every system's phonemes match the reference.
    #[default]
    Intersection,
    /// Keep, per system, the ids that system got right.
    PerSystem,
}

impl FromStr for FilterMode {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "intersection" => Ok(FilterMode::Intersection),
            "per-system" => Ok(FilterMode::PerSystem),
            other => Err(MetricsError::UnknownFilterMode(other.to_string())),
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterMode::Intersection => "intersection",
            FilterMode::PerSystem => "per-system",
        })
    }
}

/// Utterances keyed by id.
pub type Corpus = BTreeMap<String, UtteranceAnnotation>;

/// A reference and hypothesis annotation of one utterance.
#[derive(Debug, Clone, Copy)]
pub struct EvalPair<'a> {
    pub id: &'a str,
    pub reference: &'a UtteranceAnnotation,
    pub hypothesis: &'a UtteranceAnnotation,
}

impl EvalPair<'_> {
    pub fn phonemes_match(&self) -> bool {
        self.reference.phonemes() == self.hypothesis.phonemes()
    }
}

/// Pairs each reference utterance with the system's, by id.
pub fn pair_corpus<'a>(reference: &'a Corpus, system: &'a Corpus) -> Vec<EvalPair<'a>> {
    reference
        .iter()
        .filter_map(|(id, r)| {
            system.get(id).map(|h| EvalPair {
                id,
                reference: r,
                hypothesis: h,
            })
        })
        .collect()
}

fn check_ids(reference: &Corpus, name: &str, system: &Corpus) -> Result<(), MetricsError> {
    let missing = reference.keys().find(|id| !system.contains_key(*id));
    let extra = system.keys().find(|id| !reference.contains_key(*id));
    match (missing, extra) {
        (None, None) => Ok(()),
        (Some(id), _) => Err(MetricsError::IdMismatch {
            system: name.to_string(),
            detail: format!("missing {id:?}"),
        }),
        (None, Some(id)) => Err(MetricsError::IdMismatch {
            system: name.to_string(),
            detail: format!("unexpected {id:?}"),
        }),
    }
}

/// Ids whose hypothesis phonemes equal the reference, one set per system.
///
/// In intersection mode every returned set is the same.
pub fn filter_phoneme_correct(
    reference: &Corpus,
    systems: &[(String, Corpus)],
    mode: FilterMode,
) -> Result<Vec<BTreeSet<String>>, MetricsError> {
    let mut sets = Vec::with_capacity(systems.len());
    for (name, system) in systems {
        check_ids(reference, name, system)?;
        let correct: BTreeSet<String> = pair_corpus(reference, system)
            .into_iter()
            .filter(EvalPair::phonemes_match)
            .map(|p| p.id.to_string())
            .collect();
        sets.push(correct);
    }
    if mode == FilterMode::Intersection {
        if let Some(first) = sets.first().cloned() {
            let shared = sets
                .iter()
                .skip(1)
                .fold(first, |acc, s| acc.intersection(s).cloned().collect());
            sets.iter_mut().for_each(|s| *s = shared.clone());
        }
    }
    Ok(sets)
}

fn ratio_4dp<S: Serializer>(value: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_f64((v * 1e4).round() / 1e4),
        None => s.serialize_str("N/A"),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ScoreCounts {
    pub utterances_paired: usize,
    pub utterances_filtered_out: usize,
    pub reference_phrases: usize,
    pub reference_moras: usize,
    pub graphemes: ErrorCounts,
    pub phonemes: ErrorCounts,
    pub boundaries: BoundaryCounts,
    pub pitch: PitchCounts,
}

/// Scores for one system. `None` ratios are not applicable (no data).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub system: String,
    #[serde(serialize_with = "ratio_4dp")]
    pub cer_graphemes: Option<f64>,
    #[serde(serialize_with = "ratio_4dp")]
    pub cer_phonemes: Option<f64>,
    #[serde(serialize_with = "ratio_4dp")]
    pub boundary_accuracy: Option<f64>,
    #[serde(serialize_with = "ratio_4dp")]
    pub pitch_f1: Option<f64>,
    pub counts: ScoreCounts,
}

/// Scores of all systems plus the conventions used to compute them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub filter_mode: FilterMode,
    pub averaging: &'static str,
    pub positive_class: &'static str,
    pub cer_unit: &'static str,
    pub systems: Vec<ScoreReport>,
}

/// Scores every system against the reference.
///
/// CERs cover all utterances; boundary accuracy and pitch F1 cover only the
/// utterances kept by the phoneme-correct filter.
pub fn score_corpus(
    reference: &Corpus,
    systems: &[(String, Corpus)],
    mode: FilterMode,
) -> Result<Report, MetricsError> {
    let kept = filter_phoneme_correct(reference, systems, mode)?;
    let mut reports = Vec::with_capacity(systems.len());
    for ((name, system), kept) in systems.iter().zip(&kept) {
        let mut counts = ScoreCounts::default();
        let mut graphemes_available = true;
        for pair in pair_corpus(reference, system) {
            counts.utterances_paired += 1;
            match (pair.reference.graphemes(), pair.hypothesis.graphemes()) {
                (Some(r), Some(h)) => {
                    let r: Vec<char> = r.chars().collect();
                    let h: Vec<char> = h.chars().collect();
                    counts.graphemes += ErrorCounts::between(&r, &h);
                }
                _ => graphemes_available = false,
            }
            let r: Vec<char> = pair.reference.phonemes().chars().collect();
            let h: Vec<char> = pair.hypothesis.phonemes().chars().collect();
            counts.phonemes += ErrorCounts::between(&r, &h);

            if !kept.contains(pair.id) {
                counts.utterances_filtered_out += 1;
                continue;
            }
            counts.reference_phrases += pair.reference.phrase_count();
            counts.reference_moras += pair.reference.moras().len();
            counts.boundaries = counts.boundaries + boundary_accuracy(pair.reference, pair.hypothesis);
            counts.pitch = counts.pitch + PitchCounts::between(&pair.reference.pitch(), &pair.hypothesis.pitch())?;
        }
        let prosody_applicable = counts.utterances_paired > counts.utterances_filtered_out;
        reports.push(ScoreReport {
            system: name.clone(),
            cer_graphemes: graphemes_available
                .then(|| counts.graphemes.rate().ok())
                .flatten(),
            cer_phonemes: counts.phonemes.rate().ok(),
            boundary_accuracy: counts.boundaries.accuracy().filter(|_| prosody_applicable),
            pitch_f1: prosody_applicable.then(|| counts.pitch.f1()),
            counts,
        });
    }
    Ok(Report {
        filter_mode: mode,
        averaging: "micro",
        positive_class: "H",
        cer_unit: "character",
        systems: reports,
    })
}

fn fmt_ratio(value: Option<f64>) -> String {
    value.map_or_else(|| "N/A".to_string(), |v| format!("{v:.4}"))
}

impl Report {
    /// Plain-text table, one row per system.
    pub fn to_table(&self) -> String {
        let width = self
            .systems
            .iter()
            .map(|s| s.system.chars().count())
            .chain(std::iter::once(6))
            .max()
            .unwrap_or(6);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# filter: {}; averaging: {}; F1 positive class: {}",
            self.filter_mode, self.averaging, self.positive_class
        );
        let _ = writeln!(
            out,
            "{:<width$}  {:>10}  {:>10}  {:>8}  {:>8}  {:>7}  {:>8}",
            "system", "CER-G ↓", "CER-P ↓", "Acc. ↑", "F1 ↑", "paired", "filtered"
        );
        for s in &self.systems {
            let _ = writeln!(
                out,
                "{:<width$}  {:>10}  {:>10}  {:>8}  {:>8}  {:>7}  {:>8}",
                s.system,
                fmt_ratio(s.cer_graphemes),
                fmt_ratio(s.cer_phonemes),
                fmt_ratio(s.boundary_accuracy),
                fmt_ratio(s.pitch_f1),
                s.counts.utterances_paired,
                s.counts.utterances_filtered_out,
            );
        }
        out
    }
}
