//! Corpus-level translation quality metrics: BLEU, NIST, and the
//! multi-reference word and position-independent error rates.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

/// Lowercases and splits on whitespace. All metrics here are case
/// insensitive; callers that want exact case should pre-tokenize.
pub fn tokenize(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_lowercase).collect()
}

/// One hypothesis with its reference translations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub hypothesis: Vec<String>,
    pub references: Vec<Vec<String>>,
}

/// A scored corpus: parallel hypothesis and reference segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalCorpus {
    segments: Vec<Segment>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("no segments to score")]
    EmptyCorpus,
    #[error("segment {0}: no references")]
    MissingReferences(usize),
    #[error("chosen references have zero total length")]
    ZeroReferenceLength,
}

impl EvalCorpus {
    pub fn new(segments: Vec<Segment>) -> Result<Self, MetricError> {
        if segments.is_empty() {
            return Err(MetricError::EmptyCorpus);
        }
        for (i, seg) in segments.iter().enumerate() {
            if seg.references.is_empty() {
                return Err(MetricError::MissingReferences(i));
            }
        }
        Ok(EvalCorpus { segments })
    }

    /// Builds a corpus from text lines, one segment per hypothesis line.
    /// Each reference stream must be line-parallel with the hypotheses.
    pub fn from_lines(hyp: &[String], refs: &[Vec<String>]) -> Result<Self, MetricError> {
        let segments = hyp
            .iter()
            .enumerate()
            .map(|(i, h)| Segment {
                hypothesis: tokenize(h),
                references: refs.iter().map(|r| tokenize(&r[i])).collect(),
            })
            .collect();
        EvalCorpus::new(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }
}

/// Edit distance between token sequences: insertions, deletions, and
/// substitutions all cost one.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = diag + usize::from(x != y);
            diag = row[j + 1];
            row[j + 1] = sub.min(diag + 1).min(row[j] + 1);
        }
    }
    row[b.len()]
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n && n > 0 {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// BLEU on the geometric mean of orders 1 through `max_n`, with the
/// usual brevity penalty against the length-closest reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuReport {
    pub score: f64,
    /// Modified n-gram precision per order, index 0 holding order 1.
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
}

/// Scores the corpus with BLEU. With `smooth`, orders two and up get
/// add-one smoothing so a single missing n-gram order does not zero the
/// whole score.
pub fn bleu(corpus: &EvalCorpus, max_n: usize, smooth: bool) -> Result<BleuReport, MetricError> {
    assert!(max_n > 0, "max_n must be at least 1");
    let mut matched = vec![0u64; max_n];
    let mut total = vec![0u64; max_n];
    let mut hyp_length = 0usize;
    let mut ref_length = 0usize;

    for seg in corpus.segments() {
        let c = seg.hypothesis.len();
        hyp_length += c;
        // Closest reference length; ties go to the shorter reference.
        ref_length += seg
            .references
            .iter()
            .map(Vec::len)
            .min_by_key(|&len| (len.abs_diff(c), len))
            .expect("validated non-empty");

        for n in 1..=max_n {
            let hyp_counts = ngram_counts(&seg.hypothesis, n);
            if hyp_counts.is_empty() {
                continue;
            }
            let mut best = HashMap::new();
            for r in &seg.references {
                for (gram, count) in ngram_counts(r, n) {
                    let e = best.entry(gram).or_insert(0);
                    *e = (*e).max(count);
                }
            }
            for (gram, count) in &hyp_counts {
                matched[n - 1] += (*count).min(best.get(gram).copied().unwrap_or(0));
            }
            total[n - 1] += (seg.hypothesis.len() - n + 1) as u64;
        }
    }

    let precisions: Vec<f64> = (0..max_n)
        .map(|i| {
            if smooth && i > 0 {
                (matched[i] + 1) as f64 / (total[i] + 1) as f64
            } else if total[i] == 0 {
                0.0
            } else {
                matched[i] as f64 / total[i] as f64
            }
        })
        .collect();

    let brevity_penalty = if hyp_length == 0 {
        0.0
    } else if hyp_length > ref_length {
        1.0
    } else {
        (1.0 - ref_length as f64 / hyp_length as f64).exp()
    };

    let score = if hyp_length == 0 || precisions.contains(&0.0) {
        0.0
    } else {
        let mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / max_n as f64;
        brevity_penalty * mean.exp()
    };

    Ok(BleuReport { score, precisions, brevity_penalty, hyp_length, ref_length })
}

/// NIST score over orders 1 through `max_n` (customarily 5): matched
/// n-grams are weighted by their information relative to the reference
/// corpus, so rare n-grams count for more than common ones.
pub fn nist(corpus: &EvalCorpus, max_n: usize) -> Result<f64, MetricError> {
    assert!(max_n > 0, "max_n must be at least 1");

    // Information weights come from the pooled reference corpus.
    let mut ref_counts: Vec<HashMap<Vec<String>, u64>> = vec![HashMap::new(); max_n + 1];
    let mut ref_words = 0u64;
    for seg in corpus.segments() {
        for r in &seg.references {
            ref_words += r.len() as u64;
            for (n, counts) in ref_counts.iter_mut().enumerate().skip(1) {
                for w in r.windows(n) {
                    *counts.entry(w.to_vec()).or_insert(0) += 1;
                }
            }
        }
    }
    let info = |gram: &[String]| -> f64 {
        let count = ref_counts[gram.len()].get(gram).copied().unwrap_or(0);
        if count == 0 {
            return 0.0;
        }
        let context = if gram.len() == 1 {
            ref_words
        } else {
            ref_counts[gram.len() - 1].get(&gram[..gram.len() - 1]).copied().unwrap_or(0)
        };
        ((context as f64) / (count as f64)).log2()
    };

    let mut weighted = vec![0.0f64; max_n + 1];
    let mut hyp_grams = vec![0u64; max_n + 1];
    let mut hyp_length = 0u64;
    let mut mean_ref_length = 0.0f64;
    for seg in corpus.segments() {
        hyp_length += seg.hypothesis.len() as u64;
        mean_ref_length += seg.references.iter().map(Vec::len).sum::<usize>() as f64
            / seg.references.len() as f64;
        for n in 1..=max_n {
            let hyp_counts = ngram_counts(&seg.hypothesis, n);
            if hyp_counts.is_empty() {
                continue;
            }
            hyp_grams[n] += (seg.hypothesis.len() - n + 1) as u64;
            let mut best: HashMap<&[String], u64> = HashMap::new();
            for r in &seg.references {
                for (gram, count) in ngram_counts(r, n) {
                    let e = best.entry(gram).or_insert(0);
                    *e = (*e).max(count);
                }
            }
            for (gram, count) in &hyp_counts {
                let m = (*count).min(best.get(gram).copied().unwrap_or(0));
                if m > 0 {
                    weighted[n] += m as f64 * info(gram);
                }
            }
        }
    }

    let score: f64 = (1..=max_n)
        .map(|n| if hyp_grams[n] == 0 { 0.0 } else { weighted[n] / hyp_grams[n] as f64 })
        .sum();

    if hyp_length == 0 {
        return Ok(0.0);
    }
    // Brevity factor is 1 at full length and 0.5 at two thirds.
    let beta = 0.5f64.ln() / (2.0f64 / 3.0).ln().powi(2);
    let ratio = (hyp_length as f64 / mean_ref_length).min(1.0);
    let brevity = (beta * ratio.ln().powi(2)).exp();
    Ok(score * brevity)
}

fn rate_over_refs<F>(corpus: &EvalCorpus, distance: F) -> Result<f64, MetricError>
where
    F: Fn(&[String], &[String]) -> usize,
{
    let mut numerator = 0usize;
    let mut denominator = 0usize;
    for seg in corpus.segments() {
        // min_by_key keeps the earliest reference on ties.
        let (d, r) = seg
            .references
            .iter()
            .map(|r| (distance(&seg.hypothesis, r), r))
            .min_by_key(|&(d, _)| d)
            .expect("validated non-empty");
        numerator += d;
        denominator += r.len();
    }
    if denominator == 0 {
        return Err(MetricError::ZeroReferenceLength);
    }
    Ok(100.0 * numerator as f64 / denominator as f64)
}

/// Multi-reference word error rate: for each segment the edit distance
/// to the closest reference, as a percentage of the lengths of those
/// closest references.
pub fn mwer(corpus: &EvalCorpus) -> Result<f64, MetricError> {
    rate_over_refs(corpus, levenshtein)
}

/// The positionless counterpart of [`levenshtein`]: how far apart the
/// two token bags are once order is ignored. Never exceeds the edit
/// distance.
pub fn bag_distance<T: Eq + std::hash::Hash>(a: &[T], b: &[T]) -> usize {
    let mut counts: HashMap<&T, i64> = HashMap::new();
    for w in a {
        *counts.entry(w).or_insert(0) += 1;
    }
    let mut overlap = 0usize;
    for w in b {
        let e = counts.entry(w).or_insert(0);
        if *e > 0 {
            *e -= 1;
            overlap += 1;
        }
    }
    a.len().max(b.len()) - overlap
}

/// Position-independent error rate: like [`mwer`] but word order is
/// ignored, leaving only the bag-of-words mismatch.
pub fn mper(corpus: &EvalCorpus) -> Result<f64, MetricError> {
    rate_over_refs(corpus, bag_distance)
}

/// All four scores in one shot, plus the BLEU diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub bleu: f64,
    pub nist: f64,
    pub mwer: f64,
    pub mper: f64,
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
}

pub fn evaluate(
    corpus: &EvalCorpus,
    bleu_max_n: usize,
    nist_max_n: usize,
    smooth: bool,
) -> Result<EvalReport, MetricError> {
    let b = bleu(corpus, bleu_max_n, smooth)?;
    Ok(EvalReport {
        bleu: b.score,
        nist: nist(corpus, nist_max_n)?,
        mwer: mwer(corpus)?,
        mper: mper(corpus)?,
        precisions: b.precisions,
        brevity_penalty: b.brevity_penalty,
        hyp_length: b.hyp_length,
        ref_length: b.ref_length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(pairs: &[(&str, &[&str])]) -> EvalCorpus {
        EvalCorpus::new(
            pairs
                .iter()
                .map(|(h, rs)| Segment {
                    hypothesis: tokenize(h),
                    references: rs.iter().map(|r| tokenize(r)).collect(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn levenshtein_basics() {
        let a = tokenize("the cat sat");
        assert_eq!(levenshtein(&a, &a), 0);
        assert_eq!(levenshtein(&a, &[]), 3);
        assert_eq!(levenshtein::<String>(&[], &a), 3);
        assert_eq!(levenshtein(&tokenize("a b c"), &tokenize("a x c")), 1);
        assert_eq!(levenshtein(&tokenize("a b"), &tokenize("b a")), 2);
        let chars = |s: &str| s.chars().collect::<Vec<_>>();
        assert_eq!(levenshtein(&chars("kitten"), &chars("sitting")), 3);
    }

    #[test]
    fn bleu_perfect_match_is_one() {
        let c = corpus(&[
            ("the cat sat on the mat", &["the cat sat on the mat"]),
            ("it rained all day today", &["it rained all day today"]),
        ]);
        let r = bleu(&c, 4, false).unwrap();
        assert!((r.score - 1.0).abs() < 1e-12);
        assert_eq!(r.brevity_penalty, 1.0);
    }

    #[test]
    fn bleu_zeroes_when_no_ngrams_reach_top_order() {
        // Three tokens cannot form a 4-gram, so unsmoothed order 4 has
        // an empty denominator and the whole score collapses.
        let c = corpus(&[("the cat sat", &["the cat sat"])]);
        assert_eq!(bleu(&c, 4, false).unwrap().score, 0.0);
        assert!((bleu(&c, 3, false).unwrap().score - 1.0).abs() < 1e-12);
        assert!((bleu(&c, 4, true).unwrap().precisions[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bleu_brevity_penalty_hand_value() {
        // Four matching tokens against an eight token reference: both
        // precisions are 1, so the score is the brevity penalty alone,
        // exp(1 - 8/4).
        let c = corpus(&[("a b c d", &["a b c d e f g h"])]);
        let r = bleu(&c, 2, false).unwrap();
        assert!((r.score - (-1.0f64).exp()).abs() < 1e-12);
        assert!((r.score - 0.36788).abs() < 1e-5);
        assert_eq!(r.precisions, vec![1.0, 1.0]);
        assert_eq!((r.hyp_length, r.ref_length), (4, 8));
    }

    #[test]
    fn bleu_zero_order_zeroes_unsmoothed_score() {
        let c = corpus(&[("a x", &["a b"])]);
        let plain = bleu(&c, 2, false).unwrap();
        assert_eq!(plain.score, 0.0);
        assert_eq!(plain.precisions[1], 0.0);
        let smoothed = bleu(&c, 2, true).unwrap();
        assert!(smoothed.score > 0.0);
        assert_eq!(smoothed.precisions[1], 0.5);
    }

    #[test]
    fn bleu_clips_repeated_ngrams() {
        let c = corpus(&[("the the the", &["the cat"])]);
        let r = bleu(&c, 1, false).unwrap();
        assert!((r.precisions[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bleu_closest_length_tie_prefers_shorter() {
        // References of length 2 and 4 tie around a length 3 hypothesis.
        let c = corpus(&[("a b c", &["a b c d", "a b"])]);
        let r = bleu(&c, 1, false).unwrap();
        assert_eq!(r.ref_length, 2);
        assert_eq!(r.brevity_penalty, 1.0);
    }

    #[test]
    fn bleu_empty_hypotheses_score_zero() {
        let c = corpus(&[("", &["a b"])]);
        let r = bleu(&c, 4, false).unwrap();
        assert_eq!(r.score, 0.0);
        let r = bleu(&c, 4, true).unwrap();
        assert_eq!(r.score, 0.0);
    }

    #[test]
    fn nist_self_hypothesis_hand_value() {
        let c = corpus(&[("a b a", &["a b a"])]);
        let got = nist(&c, 5).unwrap();
        assert!((got - 1.4182958340544896).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn nist_is_invariant_under_corpus_doubling() {
        let one = corpus(&[("the cat sat on the mat", &["the cat sat on a mat"])]);
        let two = corpus(&[
            ("the cat sat on the mat", &["the cat sat on a mat"]),
            ("the cat sat on the mat", &["the cat sat on a mat"]),
        ]);
        let a = nist(&one, 5).unwrap();
        let b = nist(&two, 5).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        assert!(a > 0.0);
    }

    #[test]
    fn nist_empty_hypotheses_score_zero() {
        let c = corpus(&[("", &["a b"]), ("", &["c"])]);
        assert_eq!(nist(&c, 5).unwrap(), 0.0);
    }

    #[test]
    fn mwer_picks_earlier_reference_on_ties() {
        // Both references are one edit away; the denominator must come
        // from the first, three words long.
        let c = corpus(&[("a b c", &["a x c", "a b c d"])]);
        let got = mwer(&c).unwrap();
        assert!((got - 100.0 / 3.0).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn mwer_zero_on_exact_match() {
        let c = corpus(&[("a b c", &["x y", "a b c"])]);
        assert_eq!(mwer(&c).unwrap(), 0.0);
    }

    #[test]
    fn mper_ignores_order() {
        let c = corpus(&[("b a", &["a b"])]);
        assert_eq!(mper(&c).unwrap(), 0.0);
        assert_eq!(mwer(&c).unwrap(), 100.0);
    }

    #[test]
    fn mper_counts_bag_mismatch() {
        // One surplus `a` against one missing `b`.
        let c = corpus(&[("a a b", &["a b b"])]);
        let got = mper(&c).unwrap();
        assert!((got - 100.0 / 3.0).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn empty_or_referenceless_corpora_are_rejected() {
        assert_eq!(EvalCorpus::new(vec![]).unwrap_err(), MetricError::EmptyCorpus);
        let bad = EvalCorpus::new(vec![Segment {
            hypothesis: tokenize("a"),
            references: vec![],
        }]);
        assert_eq!(bad.unwrap_err(), MetricError::MissingReferences(0));
    }

    #[test]
    fn zero_length_references_are_an_error() {
        let c = EvalCorpus::new(vec![Segment {
            hypothesis: tokenize("a"),
            references: vec![vec![]],
        }])
        .unwrap();
        assert_eq!(mwer(&c).unwrap_err(), MetricError::ZeroReferenceLength);
        assert_eq!(mper(&c).unwrap_err(), MetricError::ZeroReferenceLength);
    }

    #[test]
    fn evaluate_bundles_all_scores() {
        let c = corpus(&[("the cat sat on the mat", &["the cat sat on the mat"])]);
        let r = evaluate(&c, 4, 5, false).unwrap();
        assert!((r.bleu - 1.0).abs() < 1e-12);
        assert_eq!(r.mwer, 0.0);
        assert_eq!(r.mper, 0.0);
        assert!(r.nist > 0.0);
    }
}
