//! Test-only oracles and fixtures, written independently of the library's
//! algorithms.

#![allow(dead_code)]

use std::collections::HashMap;

use accent_forge::label::{segment_moras, serialize_phrase, AccentPhrase, AccentType, Mora};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Levenshtein distance from its recursive definition, memoized on suffixes.
pub fn oracle_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    fn go<T: PartialEq>(a: &[T], b: &[T], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&d) = memo.get(&(i, j)) {
            return d;
        }
        let d = if a[i] == b[j] {
            go(a, b, i + 1, j + 1, memo)
        } else {
            1 + go(a, b, i + 1, j, memo)
                .min(go(a, b, i, j + 1, memo))
                .min(go(a, b, i + 1, j + 1, memo))
        };
        memo.insert((i, j), d);
        d
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

/// Every tiling of `chars` into lexicon surfaces or single unknown characters
/// (a single character that is a surface counts as known only).
pub fn all_tilings(chars: &[char], surfaces: &[String]) -> Vec<Vec<String>> {
    if chars.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for len in 1..=chars.len() {
        let head: String = chars[..len].iter().collect();
        if len == 1 || surfaces.contains(&head) {
            for mut rest in all_tilings(&chars[len..], surfaces) {
                rest.insert(0, head.clone());
                out.push(rest);
            }
        }
    }
    out
}

/// Cartesian product of candidate indices, in lexicographic order.
pub fn all_choices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        let mut next = Vec::new();
        for prefix in &out {
            for c in 0..n {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub const MORA_ALPHABET: [&str; 12] = ["ア", "カ", "キョ", "シ", "ー", "ッ", "ン", "テ", "ナ", "ギョ", "ヴァ", "ト"];

pub fn moras(s: &str) -> Vec<Mora> {
    segment_moras(s).unwrap()
}

/// Lexicon for the synthetic corpus: surface and candidate readings.
pub const WORDS: &[(&str, &[&str])] = &[
    ("漁業", &["ギョギョー"]),
    ("商業", &["ショーギョー"]),
    ("家", &["イエ", "ウチ"]),
    ("新しい", &["アタラシー"]),
    ("成功", &["セーコー"]),
    ("学校", &["ガッコー"]),
    ("先生", &["センセー"]),
    ("東京", &["トーキョー"]),
    ("大阪", &["オーサカ"]),
    ("今日", &["キョー", "コンニチ"]),
    ("明日", &["アシタ", "アス"]),
    ("天気", &["テンキ"]),
    ("電車", &["デンシャ"]),
    ("駅", &["エキ"]),
    ("山", &["ヤマ", "サン"]),
    ("川", &["カワ"]),
    ("花", &["ハナ"]),
    ("机", &["ツクエ"]),
    ("友達", &["トモダチ"]),
    ("料理", &["リョーリ"]),
];

pub const PARTICLES: &[(&str, &[&str])] = &[
    ("と", &["ト"]),
    ("で", &["デ"]),
    ("を", &["オ"]),
    ("が", &["ガ"]),
    ("は", &["ワ", "ハ"]),
    ("に", &["ニ"]),
    ("も", &["モ"]),
    ("の", &["ノ"]),
];

pub fn lexicon_tsv() -> String {
    let mut out = String::from("# surface\tpronunciation\n");
    for (surface, prons) in WORDS.iter().chain(PARTICLES) {
        for p in *prons {
            out.push_str(&format!("{surface}\t{p}\n"));
        }
    }
    out
}

const KANA_ROWS: &[&str] = &[
    "アイウエオ", "カキクケコ", "ガギグゲゴ", "サシスセソ", "ザジズゼゾ", "タチツテト", "ダヂヅデド",
    "ナニヌネノ", "ハヒフヘホ", "バビブベボ", "パピプペポ", "マミムメモ", "ラリルレロ",
];

/// Replaces the vowel of a plain CV mora, if it has one.
fn substitute_vowel(m: &Mora, rng: &mut ChaCha8Rng) -> Option<Mora> {
    let c = m.as_str().chars().next()?;
    if m.as_str().chars().count() != 1 {
        return None;
    }
    let row: Vec<char> = KANA_ROWS.iter().find(|r| r.contains(c))?.chars().collect();
    let others: Vec<char> = row.into_iter().filter(|&x| x != c).collect();
    Some(Mora::new(&others.choose(rng)?.to_string()).unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    VowelSubstitution,
    MoraInsertion,
    MoraDeletion,
}

/// Applies one error of the given class; returns `None` if not applicable.
pub fn inject(pron: &[Mora], class: ErrorClass, rng: &mut ChaCha8Rng) -> Option<Vec<Mora>> {
    let mut out = pron.to_vec();
    match class {
        ErrorClass::VowelSubstitution => {
            let mut positions: Vec<usize> = (0..out.len()).collect();
            positions.shuffle(rng);
            let (pos, m) = positions
                .into_iter()
                .find_map(|i| substitute_vowel(&out[i], rng).map(|m| (i, m)))?;
            out[pos] = m;
        }
        ErrorClass::MoraInsertion => {
            let pos = rng.gen_range(1..=out.len());
            out.insert(pos, Mora::new("ー").unwrap());
        }
        ErrorClass::MoraDeletion => {
            if out.len() < 2 {
                return None;
            }
            let pos = rng.gen_range(0..out.len());
            out.remove(pos);
        }
    }
    Some(out)
}

pub struct SyntheticCorpus {
    pub lexicon_tsv: String,
    pub reference_jsonl: String,
    pub hypothesis_jsonl: String,
    pub injected: usize,
}

fn phrase_label(graphemes: &str, pron: Vec<Mora>, accent: usize) -> String {
    let n = pron.len();
    let p = AccentPhrase::new(pron, AccentType(accent.min(n))).unwrap();
    format!("{graphemes}|{}#", serialize_phrase(&p))
}

/// A seeded corpus of `utterances` lines with injected recognizer errors.
pub fn synthetic_corpus(seed: u64, utterances: usize) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reference = String::new();
    let mut hypothesis = String::new();
    let mut injected = 0;
    for u in 0..utterances {
        let phrases = rng.gen_range(1..=4);
        let (mut transcript, mut ref_labels, mut hyp_labels) = (String::new(), String::new(), String::new());
        for k in 0..phrases {
            if k > 0 && rng.gen_bool(0.2) {
                ref_labels.push('_');
                hyp_labels.push('_');
            }
            let (word, word_prons) = WORDS.choose(&mut rng).unwrap();
            let mut graphemes = word.to_string();
            let mut pron = word_prons.choose(&mut rng).unwrap().to_string();
            if rng.gen_bool(0.7) {
                let (particle, particle_prons) = PARTICLES.choose(&mut rng).unwrap();
                graphemes.push_str(particle);
                pron.push_str(particle_prons.choose(&mut rng).unwrap());
            }
            let pron = moras(&pron);
            let accent = rng.gen_range(0..=pron.len());
            transcript.push_str(&graphemes);
            ref_labels.push_str(&phrase_label(&graphemes, pron.clone(), accent));

            let class = *[
                ErrorClass::VowelSubstitution,
                ErrorClass::MoraInsertion,
                ErrorClass::MoraDeletion,
            ]
            .choose(&mut rng)
            .unwrap();
            let hyp_pron = if rng.gen_bool(0.5) {
                inject(&pron, class, &mut rng)
            } else {
                None
            };
            if hyp_pron.is_some() {
                injected += 1;
            }
            hyp_labels.push_str(&phrase_label(&graphemes, hyp_pron.unwrap_or(pron), accent));
        }
        let id = format!("syn{u:03}");
        let line = |labels: &str| {
            serde_json::json!({"id": id, "transcript": transcript, "labels": labels}).to_string() + "\n"
        };
        reference.push_str(&line(&ref_labels));
        hypothesis.push_str(&line(&hyp_labels));
    }
    SyntheticCorpus {
        lexicon_tsv: lexicon_tsv(),
        reference_jsonl: reference,
        hypothesis_jsonl: hypothesis,
        injected,
    }
}
