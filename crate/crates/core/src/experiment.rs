//! Corpus-level runs: one configuration over every utterance, comparison of
//! approximate against verbatim transcripts, arc ablations and the severity
//! breakdown.

use std::sync::OnceLock;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::align::{adaptive_beta, AlignConfig, Aligner, Alignment, BetaPolicy, Mode, OerResult};
use crate::error::{Error, Result};
use crate::eval::{
    planted_event_recall, score_alignment, severity_report, EvalOptions, MetricsReport, SeverityRow, Tally, WordIds,
};
use crate::graphs::{ArcClasses, PhoneTranscript};
use crate::synth::{Corpus, DisfluencyType, Utterance};

/// Which transcript the aligner is given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transcript {
    /// The intended text, with disfluencies untranscribed.
    Approximate,
    /// Everything that was said.
    Verbatim,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtteranceOutcome {
    pub id: String,
    pub p: Option<f64>,
    pub clean: bool,
    pub beta: Option<f64>,
    pub oer: Option<f64>,
    pub tally: Tally,
    #[serde(skip)]
    pub alignment: Option<Alignment>,
}

#[derive(Clone, Debug, Default)]
pub struct CorpusRun {
    /// In corpus order; failed utterances are absent.
    pub outcomes: Vec<UtteranceOutcome>,
    pub failures: Vec<(String, String)>,
}

impl CorpusRun {
    pub fn tally(&self) -> Tally {
        self.outcomes.iter().map(|o| o.tally).sum()
    }

    pub fn report(&self) -> Result<MetricsReport> {
        MetricsReport::from_tally(&self.tally())
    }

    pub fn mean_oer(&self, clean: bool) -> Option<f64> {
        let v: Vec<f64> = self.outcomes.iter().filter(|o| o.clean == clean).filter_map(|o| o.oer).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// A named aligner configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Method {
    pub name: String,
    pub config: AlignConfig,
}

impl Method {
    pub fn new(name: impl Into<String>, config: AlignConfig) -> Self {
        Method { name: name.into(), config }
    }
}

/// Holds a corpus, an aligner and the scoring options. Oracle error rates are
/// computed once per transcript kind and shared by every adaptive run.
pub struct Experiment<'a> {
    corpus: &'a Corpus,
    aligner: Aligner,
    eval: EvalOptions,
    verbatim: Vec<std::result::Result<PhoneTranscript, String>>,
    oers: [OnceLock<Vec<Option<OerResult>>>; 2],
}

impl<'a> Experiment<'a> {
    pub fn new(corpus: &'a Corpus, aligner: Aligner, eval: EvalOptions) -> Self {
        let verbatim = corpus
            .utterances
            .iter()
            .map(|u| u.verbatim.transcript(aligner.vocab()).map_err(|e| e.to_string()))
            .collect();
        Experiment { corpus, aligner, eval, verbatim, oers: [OnceLock::new(), OnceLock::new()] }
    }

    pub fn corpus(&self) -> &Corpus {
        self.corpus
    }

    pub fn eval_options(&self) -> &EvalOptions {
        &self.eval
    }

    fn transcript(&self, i: usize, kind: Transcript) -> Result<&PhoneTranscript> {
        match kind {
            Transcript::Approximate => Ok(&self.corpus.utterances[i].approximate),
            Transcript::Verbatim => self.verbatim[i].as_ref().map_err(|e| Error::InvalidReference(e.clone())),
        }
    }

    /// Oracle error rates of every utterance against the given transcripts;
    /// `None` where the computation failed.
    pub fn oers(&self, kind: Transcript) -> &[Option<OerResult>] {
        self.oers[kind as usize].get_or_init(|| {
            (0..self.corpus.len())
                .into_par_iter()
                .map(|i| {
                    let u = &self.corpus.utterances[i];
                    let r = self.transcript(i, kind).and_then(|y| self.aligner.oer(&u.emissions, y));
                    r.map_err(|e| warn!("{}: oracle error rate failed: {e}", u.id)).ok()
                })
                .collect()
        })
    }

    /// Aligns every utterance with `config` and scores it against the verbatim
    /// reference. Failures are logged and skipped.
    pub fn run(&self, config: &AlignConfig, kind: Transcript) -> CorpusRun {
        let aligner = self.aligner.with_config(*config);
        let adaptive = config.mode == Mode::WeaklySupervised && config.beta == BetaPolicy::Adaptive;
        let oers = adaptive.then(|| self.oers(kind));
        let results: Vec<_> = (0..self.corpus.len())
            .into_par_iter()
            .map(|i| {
                let u = &self.corpus.utterances[i];
                self.run_one(&aligner, u, i, kind, oers.map(|o| &o[i])).map_err(|e| (u.id.clone(), e.to_string()))
            })
            .collect();
        let mut run = CorpusRun::default();
        for r in results {
            match r {
                Ok(o) => run.outcomes.push(o),
                Err((id, msg)) => {
                    warn!("{id}: skipped: {msg}");
                    run.failures.push((id, msg));
                }
            }
        }
        run
    }

    fn run_one(
        &self,
        aligner: &Aligner,
        u: &Utterance,
        i: usize,
        kind: Transcript,
        oer: Option<&Option<OerResult>>,
    ) -> Result<UtteranceOutcome> {
        let y = self.transcript(i, kind)?;
        let config = aligner.config();
        let (alignment, beta, oer) = match (config.mode, config.beta, oer) {
            (Mode::Linear, _, _) => (aligner.align_linear(&u.emissions, y)?, None, None),
            (Mode::WeaklySupervised, BetaPolicy::Fixed(b), _) => {
                (aligner.align_with_beta(&u.emissions, y, b)?, Some(b), None)
            }
            (Mode::WeaklySupervised, BetaPolicy::Adaptive, cached) => {
                let o = match cached {
                    Some(Some(o)) => o.clone(),
                    _ => aligner.oer(&u.emissions, y)?,
                };
                let b = adaptive_beta(&o);
                (aligner.align_with_beta(&u.emissions, y, b)?, Some(b), Some(o.oer))
            }
        };
        let tally = score_alignment(&alignment, &u.verbatim, aligner.vocab(), &self.eval, &mut WordIds::default())?;
        Ok(UtteranceOutcome { id: u.id.clone(), p: u.p, clean: u.clean, beta, oer, tally, alignment: Some(alignment) })
    }

    /// For each method, the approximate-transcript report with reductions
    /// against the same method on verbatim transcripts.
    pub fn compare(&self, methods: &[Method]) -> Result<Vec<(String, MetricsReport)>> {
        methods
            .iter()
            .map(|m| {
                let verbatim = self.run(&m.config, Transcript::Verbatim).report()?;
                let approx = self.run(&m.config, Transcript::Approximate).report()?;
                Ok((m.name.clone(), approx.with_reductions(&verbatim)))
            })
            .collect()
    }

    /// The seven arc-class rows, each with reductions against the full set.
    pub fn ablation(&self, beta: BetaPolicy) -> Result<Vec<(String, MetricsReport)>> {
        let mut rows = Vec::new();
        for (name, arcs) in ablation_rows() {
            let config = AlignConfig { arcs, beta, mode: Mode::WeaklySupervised, ..*self.aligner.config() };
            rows.push((name.to_string(), self.run(&config, Transcript::Approximate).report()?));
        }
        let full = rows[0].1.clone();
        Ok(rows.into_iter().map(|(n, r)| (n, r.with_reductions(&full))).collect())
    }

    /// Per-rate reductions for one configuration.
    pub fn severity(&self, config: &AlignConfig) -> Result<Vec<SeverityRow>> {
        let approx = self.run(config, Transcript::Approximate);
        let verbatim = self.run(config, Transcript::Verbatim);
        severity_from_runs(&approx, &verbatim)
    }
}

/// Pairs two runs of the same corpus by utterance id and buckets by rate.
pub fn severity_from_runs(approximate: &CorpusRun, verbatim: &CorpusRun) -> Result<Vec<SeverityRow>> {
    let by_id: std::collections::HashMap<&str, &UtteranceOutcome> =
        verbatim.outcomes.iter().map(|o| (o.id.as_str(), o)).collect();
    let entries: Vec<_> =
        approximate.outcomes.iter().filter_map(|a| by_id.get(a.id.as_str()).map(|v| (a.p, a.tally, v.tally))).collect();
    severity_report(&entries)
}

/// Planted events of `kinds` found by a run, `(found, planted)`.
pub fn event_recall(corpus: &Corpus, run: &CorpusRun, kinds: &[DisfluencyType]) -> (usize, usize) {
    let by_id: std::collections::HashMap<&str, &Utterance> =
        corpus.utterances.iter().map(|u| (u.id.as_str(), u)).collect();
    let mut total = (0, 0);
    for o in &run.outcomes {
        if let (Some(u), Some(a)) = (by_id.get(o.id.as_str()), &o.alignment) {
            let (f, p) = planted_event_recall(&u.specs, &a.events, kinds);
            total.0 += f;
            total.1 += p;
        }
    }
    // Utterances that failed still count as planted.
    let failed: usize = run
        .failures
        .iter()
        .filter_map(|(id, _)| by_id.get(id.as_str()))
        .map(|u| u.specs.iter().filter(|s| kinds.contains(&s.kind)).count())
        .sum();
    (total.0, total.1 + failed)
}

/// Row names and arc classes: full, then single and paired removals.
pub fn ablation_rows() -> [(&'static str, ArcClasses); 7] {
    let arcs = |word_repeat, deletion, part_word| ArcClasses { word_repeat, deletion, part_word };
    [
        ("full", arcs(true, true, true)),
        ("-PW", arcs(true, true, false)),
        ("-D", arcs(true, false, true)),
        ("-W", arcs(false, true, true)),
        ("-W-D", arcs(false, false, true)),
        ("-W-PW", arcs(false, true, false)),
        ("-PW-D", arcs(true, false, false)),
    ]
}
