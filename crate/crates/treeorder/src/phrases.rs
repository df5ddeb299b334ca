//! Alignment-consistent phrase pair extraction and the count tables
//! used to compare two preprocessing variants of the same corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhraseError {
    #[error("malformed alignment pair `{0}`")]
    MalformedPair(String),
    #[error("negative alignment index in `{0}`")]
    NegativeIndex(String),
    #[error("link {s}-{t} is out of bounds for a {slen}x{tlen} sentence pair")]
    LinkOutOfBounds { s: usize, t: usize, slen: usize, tlen: usize },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<PhraseError>,
    },
    #[error("input files disagree on line count ({0} vs {1} lines)")]
    LineCountMismatch(usize, usize),
    #[error("count tables cover different length ranges ({0}..={1} vs {2}..={3})")]
    BucketMismatch(usize, usize, usize, usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses one `i-j` alignment line, whitespace separated, zero based,
/// source index first. Duplicates collapse.
pub fn parse_alignment_line(text: &str) -> Result<BTreeSet<(usize, usize)>, PhraseError> {
    let mut links = BTreeSet::new();
    for pair in text.split_whitespace() {
        let malformed = || PhraseError::MalformedPair(pair.to_string());
        let (s, t) = pair.split_once('-').ok_or_else(malformed)?;
        if s.starts_with('-') || t.starts_with('-') || pair.starts_with('-') {
            return Err(PhraseError::NegativeIndex(pair.to_string()));
        }
        let s: usize = s.parse().map_err(|_| malformed())?;
        let t: usize = t.parse().map_err(|_| malformed())?;
        links.insert((s, t));
    }
    Ok(links)
}

/// A source sentence, its translation, and the word links between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceAlignment {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub links: BTreeSet<(usize, usize)>,
}

impl SentenceAlignment {
    pub fn new(
        source: Vec<String>,
        target: Vec<String>,
        links: BTreeSet<(usize, usize)>,
    ) -> Result<Self, PhraseError> {
        for &(s, t) in &links {
            if s >= source.len() || t >= target.len() {
                return Err(PhraseError::LinkOutOfBounds {
                    s,
                    t,
                    slen: source.len(),
                    tlen: target.len(),
                });
            }
        }
        Ok(SentenceAlignment { source, target, links })
    }

    /// Convenience constructor from raw text lines.
    pub fn from_lines(source: &str, target: &str, alignment: &str) -> Result<Self, PhraseError> {
        SentenceAlignment::new(
            source.split_whitespace().map(str::to_string).collect(),
            target.split_whitespace().map(str::to_string).collect(),
            parse_alignment_line(alignment)?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExtractionMode {
    /// Minimal target span only.
    Strict,
    /// Also emit every widening of the target span over adjacent
    /// unaligned target words. This is the usual convention in phrase
    /// table construction and the default here.
    #[default]
    Extended,
}

/// One extracted pair as inclusive index spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhrasePair {
    pub source: (usize, usize),
    pub target: (usize, usize),
}

impl PhrasePair {
    pub fn source_len(&self) -> usize {
        self.source.1 - self.source.0 + 1
    }

    pub fn source_text(&self, sa: &SentenceAlignment) -> String {
        sa.source[self.source.0..=self.source.1].join(" ")
    }

    pub fn target_text(&self, sa: &SentenceAlignment) -> String {
        sa.target[self.target.0..=self.target.1].join(" ")
    }
}

/// Extracts every alignment-consistent phrase pair whose source span is
/// at most `max_len` words. A pair is consistent when no link crosses
/// either span boundary and at least one link lies inside.
pub fn extract_phrase_pairs(
    sa: &SentenceAlignment,
    max_len: usize,
    mode: ExtractionMode,
) -> BTreeSet<PhrasePair> {
    let mut out = BTreeSet::new();
    let slen = sa.source.len();
    let tlen = sa.target.len();
    if slen == 0 || tlen == 0 || max_len == 0 {
        return out;
    }
    let mut aligned_t = vec![false; tlen];
    for &(_, t) in &sa.links {
        aligned_t[t] = true;
    }
    for i1 in 0..slen {
        for i2 in i1..slen.min(i1 + max_len) {
            let inside: Vec<(usize, usize)> = sa
                .links
                .iter()
                .copied()
                .filter(|&(s, _)| i1 <= s && s <= i2)
                .collect();
            let Some(j1) = inside.iter().map(|&(_, t)| t).min() else { continue };
            let j2 = inside.iter().map(|&(_, t)| t).max().unwrap();
            let consistent = sa
                .links
                .iter()
                .all(|&(s, t)| !(j1 <= t && t <= j2) || (i1 <= s && s <= i2));
            if !consistent {
                continue;
            }
            match mode {
                ExtractionMode::Strict => {
                    out.insert(PhrasePair { source: (i1, i2), target: (j1, j2) });
                }
                ExtractionMode::Extended => {
                    let mut lo = j1;
                    while lo > 0 && !aligned_t[lo - 1] {
                        lo -= 1;
                    }
                    let mut hi = j2;
                    while hi + 1 < tlen && !aligned_t[hi + 1] {
                        hi += 1;
                    }
                    for a in lo..=j1 {
                        for b in j2..=hi {
                            out.insert(PhrasePair { source: (i1, i2), target: (a, b) });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Per-length phrase pair tallies for one corpus: total extracted
/// occurrences and the set of distinct source phrases, keyed by their
/// lowercased text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseReport {
    pub min_len: usize,
    pub max_len: usize,
    totals: BTreeMap<usize, u64>,
    distinct: BTreeMap<usize, BTreeSet<String>>,
}

impl PhraseReport {
    pub fn new(min_len: usize, max_len: usize) -> Self {
        assert!(min_len >= 1 && min_len <= max_len, "bad length range");
        PhraseReport { min_len, max_len, totals: BTreeMap::new(), distinct: BTreeMap::new() }
    }

    pub fn add_sentence(&mut self, sa: &SentenceAlignment, pairs: &BTreeSet<PhrasePair>) {
        for pair in pairs {
            let len = pair.source_len();
            if len < self.min_len || len > self.max_len {
                continue;
            }
            *self.totals.entry(len).or_insert(0) += 1;
            self.distinct
                .entry(len)
                .or_default()
                .insert(pair.source_text(sa).to_lowercase());
        }
    }

    pub fn merge(&mut self, other: &PhraseReport) {
        assert_eq!((self.min_len, self.max_len), (other.min_len, other.max_len));
        for (&len, &n) in &other.totals {
            *self.totals.entry(len).or_insert(0) += n;
        }
        for (&len, set) in &other.distinct {
            self.distinct.entry(len).or_default().extend(set.iter().cloned());
        }
    }

    pub fn total(&self, len: usize) -> u64 {
        self.totals.get(&len).copied().unwrap_or(0)
    }

    pub fn distinct(&self, len: usize) -> u64 {
        self.distinct.get(&len).map_or(0, |s| s.len() as u64)
    }

    /// Drops the phrase strings, keeping only the counts.
    pub fn counts(&self) -> PhraseCounts {
        PhraseCounts {
            min_len: self.min_len,
            max_len: self.max_len,
            totals: (self.min_len..=self.max_len).map(|l| (l, self.total(l))).collect(),
            distinct: (self.min_len..=self.max_len).map(|l| (l, self.distinct(l))).collect(),
        }
    }
}

/// The count table itself, detached from the phrase strings so two runs
/// can be compared or serialized cheaply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseCounts {
    pub min_len: usize,
    pub max_len: usize,
    pub totals: BTreeMap<usize, u64>,
    pub distinct: BTreeMap<usize, u64>,
}

/// Tallies a whole corpus in one call.
pub fn phrase_report(
    corpus: &[SentenceAlignment],
    min_len: usize,
    max_len: usize,
    mode: ExtractionMode,
) -> PhraseReport {
    let mut report = PhraseReport::new(min_len, max_len);
    for sa in corpus {
        let pairs = extract_phrase_pairs(sa, max_len, mode);
        report.add_sentence(sa, &pairs);
    }
    report
}

/// One row of a baseline-versus-variant comparison. `iobl` is the raw
/// increase over baseline; the percentage is `None` when the baseline
/// bucket is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    pub len: usize,
    pub baseline_total: u64,
    pub variant_total: u64,
    pub total_iobl: i64,
    pub total_pct: Option<f64>,
    pub baseline_distinct: u64,
    pub variant_distinct: u64,
    pub distinct_iobl: i64,
    pub distinct_pct: Option<f64>,
}

fn delta(baseline: u64, variant: u64) -> (i64, Option<f64>) {
    let iobl = variant as i64 - baseline as i64;
    let pct = (baseline > 0).then(|| 100.0 * iobl as f64 / baseline as f64);
    (iobl, pct)
}

/// Lines up two count tables bucket by bucket.
pub fn compare_reports(
    baseline: &PhraseCounts,
    variant: &PhraseCounts,
) -> Result<Vec<DeltaRow>, PhraseError> {
    if (baseline.min_len, baseline.max_len) != (variant.min_len, variant.max_len) {
        return Err(PhraseError::BucketMismatch(
            baseline.min_len,
            baseline.max_len,
            variant.min_len,
            variant.max_len,
        ));
    }
    let get = |m: &BTreeMap<usize, u64>, l: usize| m.get(&l).copied().unwrap_or(0);
    Ok((baseline.min_len..=baseline.max_len)
        .map(|len| {
            let (bt, vt) = (get(&baseline.totals, len), get(&variant.totals, len));
            let (bd, vd) = (get(&baseline.distinct, len), get(&variant.distinct, len));
            let (total_iobl, total_pct) = delta(bt, vt);
            let (distinct_iobl, distinct_pct) = delta(bd, vd);
            DeltaRow {
                len,
                baseline_total: bt,
                variant_total: vt,
                total_iobl,
                total_pct,
                baseline_distinct: bd,
                variant_distinct: vd,
                distinct_iobl,
                distinct_pct,
            }
        })
        .collect())
}

/// Reads the three line-parallel corpus files: source sentences, target
/// sentences, and `i-j` alignments.
pub fn read_alignment_corpus<R1: BufRead, R2: BufRead, R3: BufRead>(
    source: R1,
    target: R2,
    alignment: R3,
) -> Result<Vec<SentenceAlignment>, PhraseError> {
    let src: Vec<String> = source.lines().collect::<Result<_, _>>()?;
    let tgt: Vec<String> = target.lines().collect::<Result<_, _>>()?;
    let aln: Vec<String> = alignment.lines().collect::<Result<_, _>>()?;
    if src.len() != tgt.len() {
        return Err(PhraseError::LineCountMismatch(src.len(), tgt.len()));
    }
    if src.len() != aln.len() {
        return Err(PhraseError::LineCountMismatch(src.len(), aln.len()));
    }
    src.iter()
        .zip(&tgt)
        .zip(&aln)
        .enumerate()
        .map(|(i, ((s, t), a))| {
            SentenceAlignment::from_lines(s, t, a)
                .map_err(|e| PhraseError::AtLine { line: i + 1, source: Box::new(e) })
        })
        .collect()
}
