//! Cognition scoring: n-gram fidelity between the answer a language model
//! gives on a reference image and the one it gives on the distorted image.
//!
//! Precision is BLEU-4, recall is ROUGE-L F1, semantics is CIDEr on a 0..10
//! scale. A task score weights them 1 : 1 : 0.1 and divides by the largest
//! attainable weighted sum (3), so an identical answer scores exactly 1. The
//! image score sums the five task scores.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TextError {
    #[error("reference sentence is empty")]
    EmptyReference,
    #[error("IDF corpus is empty")]
    EmptyCorpus,
    #[error("{field} = {value} is outside [0, {max}]")]
    OutOfRange { field: &'static str, value: f64, max: f64 },
    #[error("expected {expected} task scores, got {got}")]
    TaskCount { expected: usize, got: usize },
    #[error("unknown task verb {0:?}")]
    UnknownVerb(String),
    #[error("task difficulties must be a permutation of 1..=5")]
    Difficulty,
}

/// Lowercases (optionally) and splits on anything that is not alphanumeric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tokenizer {
    pub lowercase: bool,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self { lowercase: true }
    }
}

impl Tokenizer {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(|t| if self.lowercase { t.to_lowercase() } else { String::from(t) })
            .collect()
    }
}

type Counts<'a> = BTreeMap<&'a [String], usize>;

fn ngram_counts(tokens: &[String], n: usize) -> Counts<'_> {
    let mut m = BTreeMap::new();
    if n == 0 || tokens.len() < n {
        return m;
    }
    for g in tokens.windows(n) {
        *m.entry(g).or_insert(0) += 1;
    }
    m
}

pub const BLEU_MAX_ORDER: usize = 4;
/// Numerator used for an n-gram order with no matches.
pub const BLEU_EPSILON: f64 = 0.1;

/// Sentence BLEU-4 with brevity penalty and add-epsilon smoothing.
///
/// Orders longer than the candidate are dropped and the remaining orders are
/// weighted uniformly, so a short exact match still scores 1. No shared
/// unigram at all scores 0.
pub fn bleu(candidate: &[String], reference: &[String]) -> Result<f64, TextError> {
    if reference.is_empty() {
        return Err(TextError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let orders = BLEU_MAX_ORDER.min(candidate.len());
    let mut log_sum = 0.0;
    for n in 1..=orders {
        let cand = ngram_counts(candidate, n);
        let refc = ngram_counts(reference, n);
        let matches: usize = cand.iter().map(|(g, &c)| c.min(*refc.get(g).unwrap_or(&0))).sum();
        if n == 1 && matches == 0 {
            return Ok(0.0);
        }
        let total = (candidate.len() + 1 - n) as f64;
        let p = if matches == 0 { BLEU_EPSILON / total } else { matches as f64 / total };
        log_sum += libm::log(p) / orders as f64;
    }
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let bp = if c > r { 1.0 } else { libm::exp(1.0 - r / c) };
    Ok(bp * libm::exp(log_sum))
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F1 from the longest common subsequence.
pub fn rouge(candidate: &[String], reference: &[String]) -> Result<f64, TextError> {
    if reference.is_empty() {
        return Err(TextError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let lcs = lcs_len(candidate, reference) as f64;
    if lcs == 0.0 {
        return Ok(0.0);
    }
    let p = lcs / candidate.len() as f64;
    let r = lcs / reference.len() as f64;
    Ok(2.0 * p * r / (p + r))
}

pub const CIDER_MAX_ORDER: usize = 4;
pub const CIDER_SCALE: f64 = 10.0;

/// Document frequencies of every n-gram (n = 1..4) over a corpus of
/// reference sentences. Built once per run, then read-only.
#[derive(Debug, Clone)]
pub struct CiderIndex {
    doc_freq: BTreeMap<Vec<String>, usize>,
    log_docs: f64,
}

impl CiderIndex {
    pub fn new<S: AsRef<[String]>>(corpus: &[S]) -> Result<Self, TextError> {
        if corpus.is_empty() {
            return Err(TextError::EmptyCorpus);
        }
        let mut doc_freq = BTreeMap::new();
        for doc in corpus {
            let doc = doc.as_ref();
            for n in 1..=CIDER_MAX_ORDER {
                for g in ngram_counts(doc, n).into_keys() {
                    *doc_freq.entry(g.to_vec()).or_insert(0) += 1;
                }
            }
        }
        Ok(Self { doc_freq, log_docs: libm::log(corpus.len() as f64) })
    }

    fn idf(&self, gram: &[String]) -> f64 {
        let df = self.doc_freq.get(gram).copied().unwrap_or(0).max(1);
        self.log_docs - libm::log(df as f64)
    }

    fn tfidf<'a>(&self, counts: &Counts<'a>) -> BTreeMap<&'a [String], f64> {
        counts.iter().map(|(&g, &c)| (g, c as f64 * self.idf(g))).collect()
    }

    /// CIDEr in `[0, 10]`.
    pub fn score(&self, candidate: &[String], reference: &[String]) -> Result<f64, TextError> {
        if reference.is_empty() {
            return Err(TextError::EmptyReference);
        }
        if candidate.is_empty() {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for n in 1..=CIDER_MAX_ORDER {
            let (cc, rc) = (ngram_counts(candidate, n), ngram_counts(reference, n));
            total += self.order_similarity(&cc, &rc);
        }
        Ok((CIDER_SCALE * total / CIDER_MAX_ORDER as f64).clamp(0.0, CIDER_SCALE))
    }

    fn order_similarity(&self, cand: &Counts<'_>, refc: &Counts<'_>) -> f64 {
        if cand == refc {
            // identical n-gram multisets, including both empty or all-zero IDF
            return 1.0;
        }
        let (cv, rv) = (self.tfidf(cand), self.tfidf(refc));
        let norm = |v: &BTreeMap<&[String], f64>| libm::sqrt(v.values().map(|x| x * x).sum::<f64>());
        let (nc, nr) = (norm(&cv), norm(&rv));
        if nc == 0.0 || nr == 0.0 {
            return 0.0;
        }
        let dot: f64 = cv.iter().filter_map(|(g, x)| rv.get(g).map(|y| x * y)).sum();
        dot / (nc * nr)
    }
}

/// CIDEr with a one-off index over `idf_corpus`.
pub fn cider<S: AsRef<[String]>>(
    candidate: &[String],
    reference: &[String],
    idf_corpus: &[S],
) -> Result<f64, TextError> {
    CiderIndex::new(idf_corpus)?.score(candidate, reference)
}

/// The three Cognition dimensions of one task.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CognitionDims {
    /// BLEU, `[0, 1]`.
    pub precision: f64,
    /// ROUGE-L, `[0, 1]`.
    pub recall: f64,
    /// CIDEr, `[0, 10]`.
    pub semantic: f64,
}

impl CognitionDims {
    pub fn new(precision: f64, recall: f64, semantic: f64) -> Result<Self, TextError> {
        let d = Self { precision, recall, semantic };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), TextError> {
        for (field, value, max) in
            [("precision", self.precision, 1.0), ("recall", self.recall, 1.0), ("semantic", self.semantic, CIDER_SCALE)]
        {
            if !(0.0..=max).contains(&value) {
                return Err(TextError::OutOfRange { field, value, max });
            }
        }
        Ok(())
    }
}

pub const COGNITION_WEIGHTS: [f64; 3] = [1.0, 1.0, 0.1];

/// Weighted 1 : 1 : 0.1 sum divided by its maximum (3).
pub fn cognition_task_score(dims: &CognitionDims) -> Result<f64, TextError> {
    dims.validate()?;
    let [wp, wr, ws] = COGNITION_WEIGHTS;
    let max = wp + wr + ws * CIDER_SCALE;
    Ok((wp * dims.precision + wr * dims.recall + ws * dims.semantic) / max)
}

pub const TASKS_PER_IMAGE: usize = 5;

/// Sum of the five per-task scores, `[0, 5]`.
pub fn cognition_image_score(task_scores: &[f64]) -> Result<f64, TextError> {
    if task_scores.len() != TASKS_PER_IMAGE {
        return Err(TextError::TaskCount { expected: TASKS_PER_IMAGE, got: task_scores.len() });
    }
    for &s in task_scores {
        if !(0.0..=1.0).contains(&s) {
            return Err(TextError::OutOfRange { field: "task_score", value: s, max: 1.0 });
        }
    }
    Ok(task_scores.iter().sum())
}

/// Scores one reference/distorted answer pair.
pub fn score_answer(
    reference: &str,
    distorted: &str,
    index: &CiderIndex,
    tokenizer: &Tokenizer,
) -> Result<CognitionDims, TextError> {
    let r = tokenizer.tokenize(reference);
    let d = tokenizer.tokenize(distorted);
    CognitionDims::new(bleu(&d, &r)?, rouge(&d, &r)?, index.score(&d, &r)?)
}

/// The ten manipulation verbs tasks are restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TaskVerb {
    Cover,
    Insert,
    Move,
    Pick,
    Place,
    Pour,
    Press,
    Pull,
    Push,
    Twist,
}

impl TaskVerb {
    pub const ALL: [TaskVerb; 10] = [
        TaskVerb::Cover,
        TaskVerb::Insert,
        TaskVerb::Move,
        TaskVerb::Pick,
        TaskVerb::Place,
        TaskVerb::Pour,
        TaskVerb::Press,
        TaskVerb::Pull,
        TaskVerb::Push,
        TaskVerb::Twist,
    ];
}

impl fmt::Display for TaskVerb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for TaskVerb {
    type Err = TextError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskVerb::ALL
            .into_iter()
            .find(|v| alloc::format!("{v}").eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| TextError::UnknownVerb(s.into()))
    }
}

/// A manipulation task posed for an image.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskSpec {
    pub verb: TaskVerb,
    pub instruction: String,
    pub difficulty: u8,
}

impl TaskSpec {
    /// Parses the verb from the first word of the instruction.
    pub fn from_instruction(instruction: &str, difficulty: u8) -> Result<Self, TextError> {
        let first = instruction.split_whitespace().next().unwrap_or("");
        Ok(Self { verb: first.parse()?, instruction: instruction.into(), difficulty })
    }
}

/// Five tasks per image with difficulties forming a permutation of 1..=5.
pub fn validate_task_set(tasks: &[TaskSpec]) -> Result<(), TextError> {
    if tasks.len() != TASKS_PER_IMAGE {
        return Err(TextError::TaskCount { expected: TASKS_PER_IMAGE, got: tasks.len() });
    }
    let mut seen = [false; TASKS_PER_IMAGE];
    for t in tasks {
        let d = t.difficulty as usize;
        if !(1..=TASKS_PER_IMAGE).contains(&d) || seen[d - 1] {
            return Err(TextError::Difficulty);
        }
        seen[d - 1] = true;
    }
    Ok(())
}
