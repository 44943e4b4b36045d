//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use accent_forge::decoder::{best_path, correct_utterance, restore_accent, CorrectionConfig};
use accent_forge::label::{
    accent_to_pitch, parse_phrase, parse_utterance, pitch_to_accent, serialize_phrase, AccentPhrase,
    AccentType, Mora,
};
use accent_forge::lexicon::{ArcGroup, Lexicon, PronLattice};
use accent_forge::metrics::{cer, PitchCounts};
use common::{all_choices, oracle_levenshtein, synthetic_corpus, MORA_ALPHABET};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

/// Exhaustive notation round trip over phrases of 1..=6 moras.
fn notation_round_trip() -> Outcome {
    const LIMIT: Duration = Duration::from_secs(10);
    let alphabet: Vec<Mora> = MORA_ALPHABET.iter().map(|m| Mora::new(m).unwrap()).collect();
    let start = Instant::now();
    let (mut cases, mut exact_inverse, mut collisions) = (0u64, 0u64, 0u64);
    for n in 1..=6u32 {
        let total = alphabet.len().pow(n);
        for mut code in 0..total {
            let mut moras = Vec::with_capacity(n as usize);
            for _ in 0..n {
                moras.push(alphabet[code % alphabet.len()]);
                code /= alphabet.len();
            }
            for accent in 0..=n as usize {
                let phrase = AccentPhrase::new(moras.clone(), AccentType(accent)).unwrap();
                let text = serialize_phrase(&phrase);
                let parsed = parse_phrase(&text).map_err(|e| format!("{text}: {e}"))?;
                check(parsed == phrase, || format!("round trip changed {text}"))?;

                let pitch = accent_to_pitch(&phrase);
                check(pitch.len() == n as usize, || format!("{text}: pitch length"))?;
                let back = pitch_to_accent(parsed.into_parts().0, &pitch).map_err(|e| format!("{text}: {e}"))?;
                check(accent_to_pitch(&back) == pitch, || format!("{text}: pitch not restored"))?;
                if back == phrase {
                    exact_inverse += 1;
                } else {
                    // flat and tail-high share L H..H within a phrase
                    check(n >= 2 && accent == n as usize && back.accent() == AccentType(0), || {
                        format!("{text}: unexpected accent {} from {pitch}", back.accent())
                    })?;
                    collisions += 1;
                }
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < LIMIT, || format!("took {elapsed:?}, limit {LIMIT:?}"))?;
    Ok(format!(
        "{cases} phrases, parse∘serialize identity 100%, pitch round trip 100%, \
         accent recovered exactly for {exact_inverse} (the {collisions} tail-high phrases read back as flat), {:.2?}",
        elapsed
    ))
}

fn correction_fixtures() -> Outcome {
    let cfg = CorrectionConfig::default();
    let lexicon = Lexicon::from_pairs([("漁業", "ギョギョー"), ("と", "ト")]).unwrap();
    let u = parse_utterance("漁業と|ギョ]ーギョート#", true).map_err(|e| e.to_string())?;
    let (out, results) = correct_utterance(&u, &lexicon, &cfg).map_err(|e| e.to_string())?;
    let got = serialize_phrase(&results[0].phrase);
    check(got == "ギョ]ギョート", || format!("漁業と corrected to {got}"))?;
    check(out.to_string() == "漁業と|ギョ]ギョート#", || format!("漁業と stream {out}"))?;

    let lexicon = Lexicon::from_pairs([("家", "イエ"), ("を", "オ")]).unwrap();
    let u = parse_utterance("家を|エ]オ#", true).map_err(|e| e.to_string())?;
    let (_, results) = correct_utterance(&u, &lexicon, &cfg).map_err(|e| e.to_string())?;
    let p = &results[0].phrase;
    check(p.pronunciation() == "イエオ" && p.accent() == AccentType(1), || {
        format!("家を gave {} accent {}", p.pronunciation(), p.accent())
    })?;
    let got = serialize_phrase(p);
    check(got == "イ]エオ", || format!("家を corrected to {got}"))?;
    Ok("ギョ]ーギョート → ギョ]ギョート; エ]オ → イ]エオ (reference イ[エ]オ)".into())
}

fn restoration_rule() -> Outcome {
    let mut cases = 0;
    let mut clamps = 0;
    for m_orig in 1..=8usize {
        for m_mod in 1..=8usize {
            for a in 0..=m_orig {
                let keep = m_mod == m_orig || a == 0 || a == 1 || a == m_orig;
                let literal = if keep { a as i64 } else { a as i64 + m_mod as i64 - m_orig as i64 };
                let outside = literal < 0 || literal > m_mod as i64;
                let (got, clamped) = restore_accent(AccentType(a), m_orig, m_mod).map_err(|e| e.to_string())?;
                let ctx = || format!("(a={a}, m_orig={m_orig}, m_mod={m_mod})");
                check(clamped == outside, || format!("{}: clamp flag {clamped}", ctx()))?;
                if !outside {
                    check(got.value() as i64 == literal, || format!("{}: got {got}", ctx()))?;
                    if !keep {
                        check(m_mod - got.value() == m_orig - a, || format!("{}: end distance", ctx()))?;
                    }
                } else {
                    check(got.value() as i64 == literal.clamp(0, m_mod as i64), || format!("{}: clamp value", ctx()))?;
                    clamps += 1;
                }
                let moras = vec![Mora::new("ア").unwrap(); m_mod];
                let phrase = AccentPhrase::new(moras, got).map_err(|e| format!("{}: {e}", ctx()))?;
                check(parse_phrase(&serialize_phrase(&phrase)) == Ok(phrase), || format!("{}: invalid phrase", ctx()))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} triples, {clamps} clamped, all match the literal rule"))
}

fn lattice_dp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a77_1ce5);
    let alphabet: Vec<Mora> = MORA_ALPHABET[..6].iter().map(|m| Mora::new(m).unwrap()).collect();
    let word = |rng: &mut ChaCha8Rng, max: usize| -> Vec<Mora> {
        let len = rng.gen_range(0..=max);
        (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
    };
    let mut ties = 0;
    for case in 0..1000 {
        let spans = rng.gen_range(1..=4);
        let groups: Vec<Vec<Vec<Mora>>> = (0..spans)
            .map(|_| {
                let n = rng.gen_range(1..=3);
                (0..n).map(|_| word(&mut rng, 3)).collect()
            })
            .collect();
        let predicted = word(&mut rng, 8);
        let lattice = PronLattice::from_groups(
            groups
                .iter()
                .enumerate()
                .map(|(i, c)| ArcGroup { surface: i.to_string(), candidates: c.clone() })
                .collect(),
        );
        let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        let scored: Vec<(Vec<usize>, usize)> = all_choices(&sizes)
            .into_iter()
            .map(|choice| {
                let path: Vec<Mora> = choice.iter().zip(&groups).flat_map(|(&c, g)| g[c].clone()).collect();
                let cost = oracle_levenshtein(&path, &predicted);
                (choice, cost)
            })
            .collect();
        let min = scored.iter().map(|s| s.1).min().unwrap();
        if scored.iter().filter(|s| s.1 == min).count() > 1 {
            ties += 1;
        }
        let expected = scored.into_iter().find(|s| s.1 == min).unwrap();
        let (choice, _, cost) = best_path(&lattice, &predicted).map_err(|e| e.to_string())?;
        check((choice.clone(), cost) == expected, || {
            format!("case {case}: dp {choice:?}/{cost} vs enumeration {:?}/{}", expected.0, expected.1)
        })?;
    }
    Ok(format!("1000/1000 lattices agree ({ties} with tied optima)"))
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xce7);
    let alphabet: Vec<char> = "アイウエオカキクケコー".chars().collect();
    for case in 0..1000 {
        let mut s = |min: usize| -> Vec<char> {
            let len = rng.gen_range(min..=12);
            (0..len).map(|_| *alphabet.choose(&mut rng).unwrap()).collect()
        };
        let (r, h) = (s(1), s(0));
        let got = cer(&r, &h).map_err(|e| e.to_string())?;
        let want = oracle_levenshtein(&r, &h) as f64 / r.len() as f64;
        check(got == want, || format!("case {case}: {got} vs {want}"))?;
    }

    let r: Vec<char> = "セーコーシテモシナクテモ".chars().collect();
    let h: Vec<char> = "セーコーシテモシナクタモ".chars().collect();
    let row1 = cer(&r, &h).map_err(|e| e.to_string())?;
    check(row1 == 1.0 / 12.0, || format!("single-substitution CER {row1}"))?;

    let p = |s: &str| s.parse::<accent_forge::label::PitchSequence>().unwrap();
    let f1 = PitchCounts::between(&p("LHHLL"), &p("LHHHL")).map_err(|e| e.to_string())?.f1();
    check(format!("{f1:.4}") == "0.8000" && (f1 - 0.8).abs() < 1e-12, || format!("F1 {f1}"))?;

    let pairs = [(p("LHHHH"), p("LHHHH")), (p("HL"), p("LL"))];
    let micro = accent_forge::metrics::pitch_f1(pairs.iter().map(|(a, b)| (a, b))).map_err(|e| e.to_string())?;
    let macro_avg: f64 =
        pairs.iter().map(|(a, b)| PitchCounts::between(a, b).unwrap().f1()).sum::<f64>() / pairs.len() as f64;
    check((micro - 8.0 / 9.0).abs() < 1e-12 && (macro_avg - 0.5).abs() < 1e-12, || {
        format!("micro {micro}, macro {macro_avg}")
    })?;
    Ok(format!("1000/1000 CER pairs exact; one substitution in 12 moras = 1/12; F1 = {f1:.4}; micro {micro:.4} ≠ macro {macro_avg:.4}"))
}

fn run_bin(args: &[&str], stdin: Option<&[u8]>) -> Result<(i32, Vec<u8>, Vec<u8>), String> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_accent-forge"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .env_remove("ACCENT_FORGE_LEXICON")
        .spawn()
        .map_err(|e| e.to_string())?;
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default()).map_err(|e| e.to_string())?;
    drop(pipe);
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout, out.stderr))
}

fn end_to_end_determinism() -> Outcome {
    let corpus = synthetic_corpus(20_241_016, 50);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    std::fs::write(path("lexicon.tsv"), &corpus.lexicon_tsv).map_err(|e| e.to_string())?;
    std::fs::write(path("reference.jsonl"), &corpus.reference_jsonl).map_err(|e| e.to_string())?;
    std::fs::write(path("uncorrected.jsonl"), &corpus.hypothesis_jsonl).map_err(|e| e.to_string())?;

    let mut outputs = Vec::new();
    for (run, jobs) in ["1", "8", "1", "8"].into_iter().enumerate() {
        let (code, corrected, err) =
            run_bin(&["correct", &path("uncorrected.jsonl"), "--lexicon", &path("lexicon.tsv"), "--jobs", jobs], None)?;
        check(code == 0, || format!("correct exited {code}: {}", String::from_utf8_lossy(&err)))?;
        let report = path(&format!("report{run}.json"));
        let (code, table, err) = run_bin(
            &["score", &path("reference.jsonl"), &path("uncorrected.jsonl"), "-", "--report", &report],
            Some(&corrected),
        )?;
        check(code == 0, || format!("score exited {code}: {}", String::from_utf8_lossy(&err)))?;
        let json = std::fs::read(&report).map_err(|e| e.to_string())?;
        outputs.push((corrected, table, json));
    }
    for (i, o) in outputs.iter().enumerate().skip(1) {
        check(o == &outputs[0], || format!("run {i} differs from run 0"))?;
    }

    let report: serde_json::Value = serde_json::from_slice(&outputs[0].2).map_err(|e| e.to_string())?;
    let cer_of = |i: usize| report["systems"][i]["cer_phonemes"].as_f64().unwrap_or(f64::NAN);
    let (before, after) = (cer_of(0), cer_of(1));
    check(after < before, || format!("corrected CER {after} not below uncorrected {before}"))?;
    Ok(format!(
        "{} injected errors; 4 runs (jobs 1/8) byte-identical; phoneme CER {before:.4} → {after:.4}",
        corpus.injected
    ))
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("notation round-trip (exhaustive n ≤ 6, < 10 s)", notation_round_trip),
        ("correction fixtures", correction_fixtures),
        ("accent restoration rule (exhaustive m ≤ 8)", restoration_rule),
        ("lattice DP vs enumeration (1000 lattices)", lattice_dp_oracle),
        ("metric oracles", metric_oracles),
        ("end-to-end determinism (correct | score, jobs 1 vs 8)", end_to_end_determinism),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
