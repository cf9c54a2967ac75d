use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{Ingest, LogProbMatrix, PhoneTranscript, PhoneVocab};
use crate::synth::{corrupt_at_rate, draw_rate, synth_emissions, CorruptOptions, DisfluencySpec, RefAlignment};

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusOptions {
    pub seed: u64,
    /// Probability that an utterance is left fluent.
    pub clean_fraction: f64,
    pub peak: f64,
    pub corrupt: CorruptOptions,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions { seed: 0, clean_fraction: 0.0, peak: super::DEFAULT_PEAK, corrupt: CorruptOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Utterance {
    pub id: String,
    pub emissions: LogProbMatrix,
    /// What was actually "said", including planted disfluencies.
    pub verbatim: RefAlignment,
    /// The transcript given to the aligner.
    pub approximate: PhoneTranscript,
    /// Sampled disfluency rate. Fluent utterances draw one too, so every
    /// utterance falls in a severity bucket. `None` only when loaded from a
    /// manifest without it.
    pub p: Option<f64>,
    pub clean: bool,
    pub specs: Vec<DisfluencySpec>,
}

impl Utterance {
    pub fn is_clean(&self) -> bool {
        self.clean
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub emissions: PathBuf,
    pub verbatim: PathBuf,
    pub approximate: PathBuf,
    /// Missing in manifests from other tools.
    #[serde(default)]
    pub p: Option<f64>,
    pub clean: bool,
    pub frames: usize,
    pub specs: Vec<DisfluencySpec>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Corpus {
    pub utterances: Vec<Utterance>,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed for one utterance, independent of processing order.
pub fn utterance_seed(corpus_seed: u64, id: &str) -> u64 {
    fnv1a(id) ^ corpus_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Synthesises emissions for each reference and corrupts a random subset.
pub fn build_corpus(refs: &[RefAlignment], vocab: &PhoneVocab, opts: &CorpusOptions) -> Result<Corpus> {
    if !(0.0..=1.0).contains(&opts.clean_fraction) {
        return Err(Error::InvalidArgument(format!("clean_fraction must lie in [0, 1], got {}", opts.clean_fraction)));
    }
    let utterances = refs.par_iter().map(|r| build_utterance(r, vocab, opts)).collect::<Result<Vec<_>>>()?;
    Ok(Corpus { utterances })
}

fn build_utterance(r: &RefAlignment, vocab: &PhoneVocab, opts: &CorpusOptions) -> Result<Utterance> {
    let mut rng = ChaCha8Rng::seed_from_u64(utterance_seed(opts.seed, &r.id));
    let clean_emissions = synth_emissions(r, vocab, opts.peak, rng.random())?;
    let tenths = draw_rate(&opts.corrupt, &mut rng)?;
    let p = Some(tenths as f64 / 10.0);
    if rng.random::<f64>() < opts.clean_fraction {
        return Ok(Utterance {
            id: r.id.clone(),
            emissions: clean_emissions,
            verbatim: r.clone(),
            approximate: r.transcript(vocab)?,
            p,
            clean: true,
            specs: Vec::new(),
        });
    }
    let c = corrupt_at_rate(r, &clean_emissions, vocab, tenths, &opts.corrupt.types, &mut rng)?;
    Ok(Utterance {
        id: r.id.clone(),
        emissions: c.emissions,
        verbatim: c.verbatim,
        approximate: c.approximate,
        p,
        clean: false,
        specs: c.specs,
    })
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("{}.tmp", path.extension().and_then(|e| e.to_str()).unwrap_or_default()));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(contents).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub const MANIFEST: &str = "manifest.jsonl";

impl Corpus {
    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn manifest(&self) -> Vec<ManifestEntry> {
        self.utterances
            .iter()
            .map(|u| ManifestEntry {
                id: u.id.clone(),
                emissions: format!("{}.emis", u.id).into(),
                verbatim: format!("{}.verbatim.tsv", u.id).into(),
                approximate: format!("{}.approx.txt", u.id).into(),
                p: u.p,
                clean: u.clean,
                frames: u.emissions.frames(),
                specs: u.specs.clone(),
            })
            .collect()
    }

    /// Writes every utterance and then `manifest.jsonl` into `dir`. Paths in
    /// the manifest are relative to `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, vocab: &PhoneVocab) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let manifest = self.manifest();
        self.utterances.par_iter().zip(&manifest).try_for_each(|(u, m)| -> Result<()> {
            write_atomic(&dir.join(&m.emissions), &u.emissions.to_emis_bytes())?;
            write_atomic(&dir.join(&m.verbatim), u.verbatim.to_tsv(vocab).as_bytes())?;
            write_atomic(&dir.join(&m.approximate), format!("{}\n", u.approximate.to_text(vocab)).as_bytes())
        })?;
        let mut lines = String::new();
        for m in &manifest {
            lines.push_str(&serde_json::to_string(m).map_err(|e| Error::Format(e.to_string()))?);
            lines.push('\n');
        }
        write_atomic(&dir.join(MANIFEST), lines.as_bytes())
    }

    pub fn load(dir: impl AsRef<Path>, vocab: &PhoneVocab) -> Result<Self> {
        let dir = dir.as_ref();
        let utterances = read_manifest(dir.join(MANIFEST))?
            .into_iter()
            .map(|m| {
                let emissions = LogProbMatrix::read_emis(dir.join(&m.emissions), Ingest::Validate)?;
                let mut verbatim = RefAlignment::read(dir.join(&m.verbatim), vocab)?;
                verbatim.id = m.id.clone();
                let path = dir.join(&m.approximate);
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let approximate = PhoneTranscript::parse(text.trim(), vocab)?;
                Ok(Utterance { id: m.id, emissions, verbatim, approximate, p: m.p, clean: m.clean, specs: m.specs })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Corpus { utterances })
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(path, i + 1, e.to_string())))
        .collect()
}
