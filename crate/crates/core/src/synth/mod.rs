//! Planted-truth corpora: reference alignments, emissions synthesised from
//! them, and disfluencies spliced in at the frame level.

mod corpus;
mod corrupt;
mod emissions;
mod reference;

pub use corpus::{
    build_corpus, read_manifest, utterance_seed, write_atomic, Corpus, CorpusOptions, ManifestEntry, Utterance,
    MANIFEST,
};
pub use corrupt::{
    apply_disfluencies, corrupt, corrupt_at_rate, corrupt_with_rng, disfluency_count, draw_rate, plan_disfluencies,
    CorruptOptions, Corruption, Disfluency, DisfluencySpec, DisfluencyType,
};
pub use emissions::{synth_emissions, DEFAULT_FRAME_SHIFT_MS, DEFAULT_PEAK};
pub use reference::{random_reference, RefAlignment, RefPhone};
