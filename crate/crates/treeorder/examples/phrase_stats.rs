//! Extract alignment-consistent phrase pairs and compare extraction
//! variants the way decoder phrase tables are diffed.
//!
//!     cargo run --example phrase_stats

use std::collections::BTreeSet;

use treeorder::{
    compare_reports, extract_phrase_pairs, phrase_report, ExtractionMode,
    SentenceAlignment,
};

fn main() {
    // "the old house" / "das alte haus gestern", with the last target
    // word unaligned. Unaligned edge words are where the two modes part.
    let sent = SentenceAlignment::new(
        vec!["the".into(), "old".into(), "house".into()],
        vec!["das".into(), "alte".into(), "haus".into(), "gestern".into()],
        BTreeSet::from([(0, 0), (1, 1), (2, 2)]),
    )
    .unwrap();

    for mode in [ExtractionMode::Strict, ExtractionMode::Extended] {
        println!("{mode:?}:");
        for pair in extract_phrase_pairs(&sent, 3, mode) {
            println!(
                "  {:?} -> {:?}   \"{}\" / \"{}\"",
                pair.source,
                pair.target,
                pair.source_text(&sent),
                pair.target_text(&sent)
            );
        }
    }

    // The same corpus counted under both modes, then diffed. IOBL is the
    // increase over the baseline count at each phrase length.
    let corpus = vec![
        sent,
        SentenceAlignment::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec!["w".into(), "x".into(), "y".into(), "z".into()],
            BTreeSet::from([(0, 1), (1, 0), (2, 3), (3, 2)]),
        )
        .unwrap(),
    ];
    let strict = phrase_report(&corpus, 1, 3, ExtractionMode::Strict);
    let extended = phrase_report(&corpus, 1, 3, ExtractionMode::Extended);

    println!("\nlen  strict(total/distinct)  extended(total/distinct)");
    for len in 1..=3 {
        println!(
            "{len:>3}  {:>8}/{:<8}  {:>12}/{:<8}",
            strict.total(len),
            strict.distinct(len),
            extended.total(len),
            extended.distinct(len)
        );
    }

    println!("gain of extended over strict, per length:");
    for row in compare_reports(&strict.counts(), &extended.counts()).unwrap() {
        let pct = row.total_pct.map_or("-".into(), |p| format!("{p:.1}%"));
        println!("  len {}: +{} pairs ({pct})", row.len, row.total_iobl);
    }
}
