//! Command-line front end: `validate`, `convert`, `correct` and `score`.
//!
//! Every command reads files (or `-` for stdin), writes results to the given
//! output stream and diagnostics to the error stream, and returns the process
//! exit code: 0 on success, 1 when any line failed, 2 on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::codec::{decode_symbols, encode_symbols, from_display_symbols, SymbolMode};
use crate::decoder::{correct_utterance, CorrectionConfig, CorrectionStatus};
use crate::jsonl::{load_corpus, parse_label_stream, CorrectedRecord, Diagnostic, HypothesisRecord};
use crate::label::{accent_to_pitch, Item, ParseMode, UtteranceAnnotation};
use crate::lexicon::{load_lexicon, Lexicon};
use crate::metrics::{score_corpus, Corpus, FilterMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const LEXICON_ENV: &str = "ACCENT_FORGE_LEXICON";

#[derive(Debug, Parser)]
#[command(name = "accent-forge", version, about = "Japanese TTS label toolkit")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Symbol set of label streams.
    #[arg(long, global = true, value_enum, default_value_t = SymbolArg::Auto)]
    pub symbols: SymbolArg,
    /// Reject structural label violations (`--strict=false` records them instead).
    #[arg(
        long,
        global = true,
        default_value_t = true,
        num_args = 0..=1,
        default_missing_value = "true",
        action = clap::ArgAction::Set
    )]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SymbolArg {
    Display,
    Interchange,
    Auto,
}

impl From<SymbolArg> for SymbolMode {
    fn from(arg: SymbolArg) -> Self {
        match arg {
            SymbolArg::Display => SymbolMode::Display,
            SymbolArg::Interchange => SymbolMode::Interchange,
            SymbolArg::Auto => SymbolMode::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Intersection,
    PerSystem,
}

impl From<FilterArg> for FilterMode {
    fn from(arg: FilterArg) -> Self {
        match arg {
            FilterArg::Intersection => FilterMode::Intersection,
            FilterArg::PerSystem => FilterMode::PerSystem,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertTarget {
    Pitch,
    Accent,
    Phonemes,
    Encode,
    Decode,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every line of a label file (plain label streams or JSONL).
    Validate { input: PathBuf },
    /// Convert label lines to pitch, accent types, phonemes or another symbol set.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        target: ConvertTarget,
    },
    /// Correct hypothesis JSONL against a pronunciation lexicon.
    Correct {
        input: PathBuf,
        #[arg(long, env = LEXICON_ENV)]
        lexicon: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
    /// Score hypothesis JSONL files against a reference JSONL file.
    Score {
        reference: PathBuf,
        #[arg(required = true)]
        hypotheses: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = FilterArg::Intersection)]
        filter: FilterArg,
        /// Also write the machine-readable report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Parses arguments and runs the command. Stdin is read for `-` paths.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&config, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn execute(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let symbols = SymbolMode::from(config.common.symbols);
    let mode = if config.common.strict {
        ParseMode::Strict
    } else {
        ParseMode::Lenient
    };
    match &config.command {
        Command::Validate { input } => cmd_validate(open(input)?, symbols, mode, out),
        Command::Convert { input, target } => {
            cmd_convert(open(input)?, *target, symbols, mode, out, err)
        }
        Command::Correct {
            input,
            lexicon,
            jobs,
        } => {
            let lexicon = match File::open(lexicon)
                .map_err(|e| e.to_string())
                .and_then(|f| load_lexicon(BufReader::new(f)).map_err(|e| e.to_string()))
            {
                Ok(l) => l,
                Err(e) => {
                    writeln!(err, "error: lexicon {}: {e}", lexicon.display())?;
                    return Ok(EXIT_USAGE);
                }
            };
            let opts = CorrectOptions {
                symbols,
                mode,
                jobs: usize::from(*jobs),
                config: CorrectionConfig::default(),
            };
            cmd_correct(open(input)?, &lexicon, &opts, out, err)
        }
        Command::Score {
            reference,
            hypotheses,
            filter,
            report,
        } => {
            let reference = (display_name(reference), open(reference)?);
            let mut systems = Vec::new();
            for path in hypotheses {
                systems.push((display_name(path), open(path)?));
            }
            let opts = ScoreOptions {
                symbols,
                mode,
                filter: (*filter).into(),
            };
            let mut json = Vec::new();
            let code = cmd_score(reference, systems, &opts, out, &mut json, err)?;
            if let Some(path) = report {
                std::fs::write(path, &json)?;
            }
            Ok(code)
        }
    }
}

fn open(path: &Path) -> io::Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        return Ok(Box::new(io::Cursor::new(buf)));
    }
    File::open(path)
        .map(|f| Box::new(BufReader::new(f)) as Box<dyn BufRead>)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn display_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// The label text of a line: the `labels` field of a JSON record, or the
/// line itself.
fn line_labels(line: &str) -> Result<(Option<String>, String), String> {
    if line.trim_start().starts_with('{') {
        let rec: serde_json::Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON record: {e}"))?;
        let id = rec.get("id").and_then(|v| v.as_str()).map(str::to_string);
        let labels = rec
            .get("labels")
            .and_then(|v| v.as_str())
            .ok_or_else(|| "record has no labels".to_string())?;
        Ok((id, labels.to_string()))
    } else {
        Ok((None, line.to_string()))
    }
}

fn line_prefix(line: usize, id: Option<&str>) -> String {
    match id {
        Some(id) => format!("line {line} [{id}]"),
        None => format!("line {line}"),
    }
}

/// Writes one verdict per non-blank line and a closing summary.
pub fn cmd_validate(
    input: impl BufRead,
    symbols: SymbolMode,
    mode: ParseMode,
    out: &mut dyn Write,
) -> io::Result<i32> {
    let (mut total, mut valid) = (0, 0);
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        total += 1;
        let (id, labels) = match line_labels(&line) {
            Ok(x) => x,
            Err(e) => {
                writeln!(out, "{}: error: {e}", line_prefix(i + 1, None))?;
                continue;
            }
        };
        let prefix = line_prefix(i + 1, id.as_deref());
        match parse_label_stream(&labels, symbols, mode) {
            Ok(parsed) => {
                valid += 1;
                let phrases = parsed.value.phrase_count();
                if parsed.violations.is_empty() {
                    writeln!(out, "{prefix}: ok ({phrases} phrases)")?;
                } else {
                    writeln!(
                        out,
                        "{prefix}: ok ({phrases} phrases, {} warnings)",
                        parsed.violations.len()
                    )?;
                    for v in &parsed.violations {
                        writeln!(out, "{prefix}: warning: {v}")?;
                    }
                }
            }
            Err(e) => writeln!(out, "{prefix}: error: {e}")?,
        }
    }
    writeln!(out, "{valid}/{total} lines valid")?;
    Ok(if valid == total { EXIT_OK } else { EXIT_FAILURE })
}

fn join_items(u: &UtteranceAnnotation, render: impl Fn(&crate::label::AnnotatedPhrase) -> String) -> String {
    let mut tokens = Vec::new();
    let mut after_phrase = false;
    for item in u.items() {
        match item {
            Item::Pause => {
                tokens.push("_".to_string());
                after_phrase = false;
            }
            Item::Phrase(p) => {
                if after_phrase {
                    tokens.push("#".to_string());
                }
                tokens.push(render(p));
                after_phrase = true;
            }
        }
    }
    tokens.join(" ")
}

/// Converts one label stream per line; failed lines become empty lines.
pub fn convert_line(line: &str, target: ConvertTarget, symbols: SymbolMode, mode: ParseMode) -> Result<String, String> {
    let (_, labels) = line_labels(line)?;
    let parsed = parse_label_stream(&labels, symbols, mode)?;
    let u = parsed.value;
    Ok(match target {
        ConvertTarget::Pitch => join_items(&u, |p| {
            p.phrase
                .moras()
                .iter()
                .zip(accent_to_pitch(&p.phrase).levels())
                .map(|(m, l)| format!("{m}:{l}"))
                .collect::<Vec<_>>()
                .join(" ")
        }),
        ConvertTarget::Accent => join_items(&u, |p| match &p.graphemes {
            Some(g) => format!("{g}|{}:{}", p.phrase.pronunciation(), p.phrase.accent()),
            None => format!("{}:{}", p.phrase.pronunciation(), p.phrase.accent()),
        }),
        ConvertTarget::Phonemes => u.phonemes(),
        ConvertTarget::Encode => encode_symbols(&u.to_string()),
        ConvertTarget::Decode => decode_symbols(&labels).map_err(|e| e.to_string())?,
    })
}

pub fn cmd_convert(
    input: impl BufRead,
    target: ConvertTarget,
    symbols: SymbolMode,
    mode: ParseMode,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let mut failures = 0;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        match convert_line(&line, target, symbols, mode) {
            Ok(converted) => writeln!(out, "{converted}")?,
            Err(e) => {
                failures += 1;
                writeln!(err, "line {}: error: {e}", i + 1)?;
                writeln!(out)?;
            }
        }
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Debug, Clone)]
pub struct CorrectOptions {
    pub symbols: SymbolMode,
    pub mode: ParseMode,
    pub jobs: usize,
    pub config: CorrectionConfig,
}

impl Default for CorrectOptions {
    fn default() -> Self {
        Self {
            symbols: SymbolMode::Auto,
            mode: ParseMode::Strict,
            jobs: 1,
            config: CorrectionConfig::default(),
        }
    }
}

/// Corrects one hypothesis record.
pub fn correct_record(
    record: &HypothesisRecord,
    lexicon: &Lexicon,
    opts: &CorrectOptions,
) -> Result<CorrectedRecord, String> {
    let parsed = parse_label_stream(&record.labels, opts.symbols, opts.mode)?;
    let (corrected, results) =
        correct_utterance(&parsed.value, lexicon, &opts.config).map_err(|e| e.to_string())?;
    Ok(CorrectedRecord {
        id: record.id.clone(),
        transcript: record.transcript.clone(),
        labels: record.labels.clone(),
        status: results.iter().map(|r| r.status.to_string()).collect(),
        corrected: from_display_symbols(&corrected.to_string(), opts.symbols, &record.labels),
    })
}

/// Writes corrected JSONL in input order, then a status summary to `err`.
pub fn cmd_correct(
    input: impl BufRead,
    lexicon: &Lexicon,
    opts: &CorrectOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let lines: Vec<(usize, String)> = input
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .filter(|r| r.as_ref().map_or(true, |(_, l)| !l.trim().is_empty()))
        .collect::<io::Result<_>>()?;

    let work = |(line, text): &(usize, String)| -> Result<CorrectedRecord, Diagnostic> {
        let diag = |id: Option<&str>, message: String| Diagnostic {
            source: "input".into(),
            line: *line,
            id: id.map(str::to_string),
            message,
        };
        let record: HypothesisRecord =
            serde_json::from_str(text).map_err(|e| diag(None, format!("invalid JSON record: {e}")))?;
        correct_record(&record, lexicon, opts).map_err(|m| diag(Some(&record.id), m))
    };

    let results: Vec<Result<CorrectedRecord, Diagnostic>> = if opts.jobs <= 1 {
        lines.iter().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(io::Error::other)?;
        pool.install(|| lines.par_iter().map(work).collect())
    };

    let mut counts: BTreeMap<&str, usize> = CorrectionStatus::ALL.iter().map(|s| (s.as_str(), 0)).collect();
    let (mut written, mut skipped) = (0, 0);
    for result in &results {
        match result {
            Ok(record) => {
                for s in &record.status {
                    *counts.entry(s.as_str()).or_default() += 1;
                }
                serde_json::to_writer(&mut *out, record)?;
                writeln!(out)?;
                written += 1;
            }
            Err(d) => {
                skipped += 1;
                writeln!(err, "skipped {d}")?;
            }
        }
    }
    let phrases: usize = counts.values().sum();
    let breakdown = CorrectionStatus::ALL
        .iter()
        .map(|s| format!("{} {}", s.as_str(), counts[s.as_str()]))
        .collect::<Vec<_>>()
        .join(", ");
    writeln!(
        err,
        "utterances {written}, skipped {skipped}, phrases {phrases}: {breakdown}"
    )?;
    Ok(if skipped == 0 { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ScoreOptions {
    pub symbols: SymbolMode,
    pub mode: ParseMode,
    pub filter: FilterMode,
}

/// Scores systems against a reference; the table goes to `out` and the JSON
/// report to `json`.
///
/// Ids rejected in any file are dropped from every corpus and reported.
pub fn cmd_score<R: BufRead>(
    reference: (String, R),
    systems: Vec<(String, R)>,
    opts: &ScoreOptions,
    out: &mut dyn Write,
    json: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let mut diagnostics = Vec::new();
    let mut rejected = Vec::new();
    let mut load = |name: &str, reader: R| -> io::Result<Corpus> {
        let loaded = load_corpus(name, reader, opts.symbols, opts.mode)?;
        diagnostics.extend(loaded.diagnostics);
        rejected.extend(loaded.rejected);
        Ok(loaded.corpus)
    };
    let mut reference_corpus = load(&reference.0, reference.1)?;
    let mut names = Vec::new();
    let mut corpora = Vec::new();
    for (name, reader) in systems {
        corpora.push(load(&name, reader)?);
        let mut unique = name.clone();
        let mut k = 2;
        while names.contains(&unique) {
            unique = format!("{name}-{k}");
            k += 1;
        }
        names.push(unique);
    }
    for id in &rejected {
        reference_corpus.remove(id);
        corpora.iter_mut().for_each(|c| {
            c.remove(id);
        });
    }
    for d in &diagnostics {
        writeln!(err, "warning: {d}")?;
    }

    let systems: Vec<(String, Corpus)> = names.into_iter().zip(corpora).collect();
    let report = match score_corpus(&reference_corpus, &systems, opts.filter) {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_FAILURE);
        }
    };
    out.write_all(report.to_table().as_bytes())?;
    serde_json::to_writer_pretty(&mut *json, &report)?;
    writeln!(json)?;
    if !diagnostics.is_empty() {
        writeln!(err, "{} lines skipped", diagnostics.len())?;
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}
