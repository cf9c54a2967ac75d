//! Graph sizes for one transcript: CTC topology, the plain transcript chain
//! and the acceptor with disfluency arcs, with each arc class on its own.

use disfluent_align::graphs::{
    build_ctc_topology, build_linear_fsa, build_modified_fsa, ArcClasses, ModifiedFsaOptions, PhoneTranscript,
    PhoneVocab,
};
use disfluent_align::wfst::{compose, trim};

fn main() -> disfluent_align::Result<()> {
    let vocab = PhoneVocab::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cmu42.txt"))?;
    let y = PhoneTranscript::parse("P L IY Z | K AO L | S T EH L AH", &vocab)?;
    println!("{} words, {} phones, at least {} frames", y.num_words(), y.num_phones(), y.min_frames());

    let topo = build_ctc_topology(&vocab)?;
    println!("topology      {:>4} states {:>5} arcs", topo.num_states(), topo.num_arcs());
    let linear = build_linear_fsa(&y, &vocab)?;
    println!("linear        {:>4} states {:>5} arcs", linear.num_states(), linear.num_arcs());

    let classes = [
        ("all", ArcClasses::default()),
        ("repeat only", ArcClasses { word_repeat: true, deletion: false, part_word: false }),
        ("delete only", ArcClasses { word_repeat: false, deletion: true, part_word: false }),
        ("prefix only", ArcClasses { word_repeat: false, deletion: false, part_word: true }),
    ];
    for (name, arcs) in classes {
        let opts = ModifiedFsaOptions { arcs, ..ModifiedFsaOptions::with_beta(2.0) };
        let m = build_modified_fsa(&y, &vocab, &opts)?;
        let ty = trim(&compose(&topo, &m)?);
        println!(
            "{name:<13} {:>4} states {:>5} arcs, with topology {} arcs",
            m.num_states(),
            m.num_arcs(),
            ty.num_arcs()
        );
    }

    let tiny = PhoneTranscript::parse("AA B | K", &vocab)?;
    println!("\nacceptor for `AA B | K` at beta 1:");
    print!("{}", build_modified_fsa(&tiny, &vocab, &ModifiedFsaOptions::with_beta(1.0))?.to_att());
    Ok(())
}
