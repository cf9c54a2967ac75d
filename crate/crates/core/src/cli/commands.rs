use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::align::{adaptive_beta, parse_alignment_tsv, Aligner, AlignmentRecord};
use crate::cli::{exit_code, Cli, Command, Inputs, RunConfig, EXIT_FORMAT, EXIT_INFEASIBLE};
use crate::error::{Error, Result};
use crate::eval::{
    format_table, score_parts, severity_report, EvalOptions, MetricsReport, SeverityRow, Tally, WordIds,
};
use crate::experiment::Experiment;
use crate::graphs::{Ingest, LogProbMatrix, PhoneTranscript, PhoneVocab};
use crate::synth::{build_corpus, read_manifest, write_atomic, Corpus, ManifestEntry, RefAlignment, MANIFEST};

/// What a batch command got through.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub processed: usize,
    /// `(utterance id, exit code, message)` for every skipped utterance.
    pub failures: Vec<(String, u8, String)>,
}

impl Outcome {
    /// 0 when nothing failed, 2 if any input was malformed, otherwise 3.
    pub fn exit_code(&self) -> u8 {
        if self.failures.is_empty() {
            0
        } else if self.failures.iter().any(|f| f.1 == EXIT_FORMAT) {
            EXIT_FORMAT
        } else {
            EXIT_INFEASIBLE
        }
    }

    fn collect<T>(results: Vec<(String, Result<T>)>) -> (Vec<T>, Outcome) {
        let mut ok = Vec::new();
        let mut outcome = Outcome::default();
        for (id, r) in results {
            match r {
                Ok(v) => {
                    ok.push(v);
                    outcome.processed += 1;
                }
                Err(e) => {
                    warn!("{id}: skipped: {e}");
                    outcome.failures.push((id, exit_code(&e), e.to_string()));
                }
            }
        }
        if !outcome.failures.is_empty() {
            warn!("{} processed, {} skipped", outcome.processed, outcome.failures.len());
        }
        (ok, outcome)
    }
}

pub fn run_command(cli: &Cli) -> Result<Outcome> {
    let config = RunConfig::resolve(&cli.overrides)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Align { input, out } => cmd_align(&config, input, out),
        Command::Oer { input, out } => cmd_oer(&config, input, out.as_deref()),
        Command::Synth { refs, out } => cmd_synth(&config, refs, out),
        Command::Eval { pred, refs, manifest, baseline, severity, out } => {
            let manifest = manifest.clone().unwrap_or_else(|| refs.join(MANIFEST));
            cmd_eval(&config, pred, refs, &manifest, baseline.as_deref(), *severity, out.as_deref())
        }
        Command::Ablate { corpus, out } => cmd_ablate(&config, corpus, out.as_deref()),
    })
}

/// Reads a transcript file: one utterance per non-empty line, words
/// separated by `|`, optionally prefixed by `id<TAB>`. Lines starting with
/// `#` are skipped.
pub fn read_transcripts(path: &Path, vocab: &PhoneVocab) -> Result<Vec<(Option<String>, PhoneTranscript)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, body) = match line.split_once('\t') {
            Some((id, body)) => (Some(id.trim().to_string()), body),
            None => (None, line),
        };
        let y = PhoneTranscript::parse(body, vocab).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        out.push((id, y));
    }
    Ok(out)
}

fn utterance_id(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    name.split('.').next().unwrap_or(name).to_string()
}

enum Text {
    Parsed(PhoneTranscript),
    File(PathBuf),
    /// The phones of a reference alignment file.
    Reference(PathBuf),
    Missing,
}

struct Job {
    id: String,
    emissions: PathBuf,
    transcript: Text,
}

impl Job {
    fn load(&self, vocab: &PhoneVocab) -> Result<(LogProbMatrix, PhoneTranscript)> {
        let e = LogProbMatrix::read_emis(&self.emissions, Ingest::Validate)?;
        let y = match &self.transcript {
            Text::Parsed(y) => y.clone(),
            Text::File(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                PhoneTranscript::parse(text.trim(), vocab).map_err(|e| Error::parse(p, 1, e.to_string()))?
            }
            Text::Reference(p) => RefAlignment::read(p, vocab)?.transcript(vocab)?,
            Text::Missing => return Err(Error::Format(format!("no transcript for utterance {}", self.id))),
        };
        Ok((e, y))
    }
}

fn jobs(input: &Inputs, vocab: &PhoneVocab) -> Result<Vec<Job>> {
    if let Some(dir) = &input.corpus {
        return Ok(read_manifest(dir.join(MANIFEST))?
            .into_iter()
            .map(|m| Job {
                id: m.id,
                emissions: dir.join(m.emissions),
                transcript: if input.verbatim {
                    Text::Reference(dir.join(m.verbatim))
                } else {
                    Text::File(dir.join(m.approximate))
                },
            })
            .collect());
    }
    let Some(tpath) = &input.transcript else {
        return Err(Error::InvalidArgument("give --corpus, or --emissions with --transcript".into()));
    };
    if input.emissions.is_empty() {
        return Err(Error::InvalidArgument("no emission files given".into()));
    }
    let mut transcripts = read_transcripts(tpath, vocab)?;
    if input.emissions.len() == 1 && transcripts.len() == 1 {
        let e = &input.emissions[0];
        return Ok(vec![Job {
            id: utterance_id(e),
            emissions: e.clone(),
            transcript: Text::Parsed(transcripts.remove(0).1),
        }]);
    }
    let unnamed = transcripts.iter().all(|(id, _)| id.is_none());
    if unnamed && transcripts.len() == input.emissions.len() {
        return Ok(input
            .emissions
            .iter()
            .zip(transcripts)
            .map(|(e, (_, y))| Job { id: utterance_id(e), emissions: e.clone(), transcript: Text::Parsed(y) })
            .collect());
    }
    let mut by_id: HashMap<String, PhoneTranscript> =
        transcripts.into_iter().filter_map(|(id, y)| id.map(|id| (id, y))).collect();
    Ok(input
        .emissions
        .iter()
        .map(|e| {
            let id = utterance_id(e);
            let transcript = by_id.remove(&id).map_or(Text::Missing, Text::Parsed);
            Job { id, emissions: e.clone(), transcript }
        })
        .collect())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn json_lines<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it).map_err(|e| Error::Format(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

fn json_pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Format(e.to_string()))
}

pub(crate) fn cmd_align(config: &RunConfig, input: &Inputs, out: &Path) -> Result<Outcome> {
    let vocab = config.load_vocab()?;
    let jobs = jobs(input, &vocab)?;
    let aligner = Aligner::new(vocab, config.align_config())?;
    create_dir(out)?;
    let results: Vec<_> = jobs
        .par_iter()
        .map(|job| {
            let r = (|| {
                let (e, y) = job.load(aligner.vocab())?;
                let a = aligner.align(&e, &y)?;
                write_atomic(
                    &out.join(format!("{}.align.tsv", job.id)),
                    a.alignment.to_tsv(aligner.vocab()).as_bytes(),
                )?;
                Ok(AlignmentRecord {
                    id: job.id.clone(),
                    mode: config.mode,
                    beta: a.beta,
                    oer: a.oer.map(|o| o.oer),
                    cost: a.alignment.total_cost.cost(),
                    frames: a.alignment.num_frames(),
                    events: a.alignment.events.len(),
                })
            })();
            (job.id.clone(), r)
        })
        .collect();
    let (records, outcome) = Outcome::collect(results);
    write_atomic(&out.join("records.jsonl"), json_lines(&records)?.as_bytes())?;
    info!("aligned {} utterances into {}", outcome.processed, out.display());
    Ok(outcome)
}

#[derive(Serialize)]
struct OerLine {
    id: String,
    oer: f64,
    beta: f64,
    decoded: String,
}

pub(crate) fn cmd_oer(config: &RunConfig, input: &Inputs, out: Option<&Path>) -> Result<Outcome> {
    let vocab = config.load_vocab()?;
    let jobs = jobs(input, &vocab)?;
    let aligner = Aligner::new(vocab, config.align_config())?;
    let results: Vec<_> = jobs
        .par_iter()
        .map(|job| {
            let r = job.load(aligner.vocab()).and_then(|(e, y)| {
                let o = aligner.oer(&e, &y)?;
                let decoded =
                    o.decoded_phones.iter().filter_map(|&p| aligner.vocab().symbol(p)).collect::<Vec<_>>().join(" ");
                Ok(OerLine { id: job.id.clone(), oer: o.oer, beta: adaptive_beta(&o), decoded })
            });
            (job.id.clone(), r)
        })
        .collect();
    let (lines, outcome) = Outcome::collect(results);
    let text = json_lines(&lines)?;
    match out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(outcome)
}

pub(crate) fn cmd_synth(config: &RunConfig, refs: &Path, out: &Path) -> Result<Outcome> {
    let vocab = config.load_vocab()?;
    let mut paths: Vec<PathBuf> = fs::read_dir(refs)
        .map_err(|e| Error::io(refs, e))?
        .filter_map(|d| d.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Format(format!("no reference alignments (*.tsv) in {}", refs.display())));
    }
    let opts = config.corpus_options();
    let results: Vec<_> = paths
        .par_iter()
        .map(|p| {
            let r = RefAlignment::read(p, &vocab).and_then(|r| build_corpus(&[r], &vocab, &opts));
            (utterance_id(p), r)
        })
        .collect();
    let (parts, outcome) = Outcome::collect(results);
    let corpus = Corpus { utterances: parts.into_iter().flat_map(|c| c.utterances).collect() };
    corpus.write(out, &vocab)?;
    write_atomic(&out.join("config.toml"), config.to_toml().as_bytes())?;
    info!("wrote {} utterances to {}", corpus.len(), out.display());
    Ok(outcome)
}

fn score_dir(
    dir: &Path,
    refs: &Path,
    manifest: &[ManifestEntry],
    vocab: &PhoneVocab,
    opts: &EvalOptions,
) -> Vec<(String, Result<(usize, Tally)>)> {
    manifest
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let r = (|| {
                let reference = RefAlignment::read(refs.join(&m.verbatim), vocab)?;
                let path = dir.join(format!("{}.align.tsv", m.id));
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let a = parse_alignment_tsv(&text, vocab, opts.frame_shift_ms)
                    .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
                let labels = a.frame_labels(vocab);
                let t = score_parts(&a.segments, &a.words, &labels, &reference, vocab, opts, &mut WordIds::default())?;
                Ok((i, t))
            })();
            (m.id.clone(), r)
        })
        .collect()
}

#[derive(Serialize)]
struct EvalSummary {
    utterances: usize,
    report: MetricsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<MetricsReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    severity: Vec<SeverityRow>,
    failures: Vec<(String, String)>,
}

pub(crate) fn cmd_eval(
    config: &RunConfig,
    pred: &Path,
    refs: &Path,
    manifest_path: &Path,
    baseline: Option<&Path>,
    severity: bool,
    out: Option<&Path>,
) -> Result<Outcome> {
    if severity && baseline.is_none() {
        return Err(Error::InvalidArgument("--severity needs --baseline".into()));
    }
    let vocab = config.load_vocab()?;
    let opts = config.eval_options();
    let manifest = read_manifest(manifest_path)?;
    if severity {
        if let Some(m) = manifest.iter().find(|m| m.p.is_none()) {
            return Err(Error::Format(format!("manifest entry {} has no disfluency rate p", m.id)));
        }
    }
    let (scored, mut outcome) = Outcome::collect(score_dir(pred, refs, &manifest, &vocab, &opts));
    let report = MetricsReport::from_tally(&scored.iter().map(|s| s.1).sum())?;
    let mut rows = vec![("pred".to_string(), report.clone())];
    let mut summary =
        EvalSummary { utterances: scored.len(), report, baseline: None, severity: Vec::new(), failures: Vec::new() };
    if let Some(base) = baseline {
        let (base_scored, base_outcome) = Outcome::collect(score_dir(base, refs, &manifest, &vocab, &opts));
        outcome.failures.extend(base_outcome.failures);
        let base_report = MetricsReport::from_tally(&base_scored.iter().map(|s| s.1).sum())?;
        summary.report = summary.report.clone().with_reductions(&base_report);
        rows = vec![("pred".to_string(), summary.report.clone()), ("baseline".to_string(), base_report.clone())];
        summary.baseline = Some(base_report);
        if severity {
            let base_by_index: HashMap<usize, Tally> = base_scored.into_iter().collect();
            let entries: Vec<_> =
                scored.iter().filter_map(|(i, t)| base_by_index.get(i).map(|b| (manifest[*i].p, *t, *b))).collect();
            summary.severity = severity_report(&entries)?;
        }
    }
    summary.failures = outcome.failures.iter().map(|f| (f.0.clone(), f.2.clone())).collect();
    let mut text = format_table(&rows);
    if !summary.severity.is_empty() {
        text.push('\n');
        let sev: Vec<_> = summary
            .severity
            .iter()
            .map(|r| (format!("{} (p={}, n={})", r.label, r.p, r.utterances), r.report.clone()))
            .collect();
        text.push_str(&format_table(&sev));
    }
    print!("{text}");
    if let Some(dir) = out {
        create_dir(dir)?;
        write_atomic(&dir.join("metrics.json"), json_pretty(&summary)?.as_bytes())?;
        write_atomic(&dir.join("metrics.txt"), text.as_bytes())?;
    }
    Ok(outcome)
}

pub(crate) fn cmd_ablate(config: &RunConfig, corpus_dir: &Path, out: Option<&Path>) -> Result<Outcome> {
    let vocab = config.load_vocab()?;
    let corpus = Corpus::load(corpus_dir, &vocab)?;
    let aligner = Aligner::new(vocab, config.align_config())?;
    let ex = Experiment::new(&corpus, aligner, config.eval_options());
    let rows = ex.ablation(config.beta)?;
    let text = format_table(&rows);
    print!("{text}");
    if let Some(dir) = out {
        create_dir(dir)?;
        let json: Vec<_> = rows.iter().map(|(n, r)| serde_json::json!({ "arcs": n, "report": r })).collect();
        write_atomic(&dir.join("ablation.json"), json_pretty(&json)?.as_bytes())?;
        write_atomic(&dir.join("ablation.txt"), text.as_bytes())?;
    }
    Ok(Outcome { processed: corpus.len(), failures: Vec::new() })
}
