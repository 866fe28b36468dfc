//! Dataset construction and the repeated train/val evaluation protocol.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::distort::{DistortionKind, Level};
use crate::rng;
use crate::stats::{correlation_report, jnd_partition, CorrelationReport, JndLabel, StatsError, MIN_SAMPLES};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("no records to split")]
    Empty,
    #[error("split ratio {0} is outside [0, 1]")]
    Ratio(f64),
    #[error("{metric} metric values for {samples} samples")]
    Misaligned { metric: usize, samples: usize },
    #[error("at least one repetition is required")]
    NoRepetitions,
    #[error("unknown {kind} tag {value:?}")]
    UnknownTag { kind: &'static str, value: String },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// The level drawn for one reference and distortion type. Keyed by the
/// reference name so the draw does not depend on input order.
pub fn sample_level(seed: u64, reference: &str, kind: DistortionKind) -> Level {
    let stream = rng::mix(rng::stable_hash(reference.as_bytes()), kind.id() as u64);
    let v: u8 = rng::keyed(seed, stream).random_range(1..=5);
    Level::new(v).expect("drawn from 1..=5")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Sim2Real {
    #[default]
    Real,
    Simulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Perspective {
    First,
    #[default]
    Third,
}

/// One of five content categories (main object or background), 1..=5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u8", into = "u8"))]
pub struct ContentClass(u8);

impl ContentClass {
    pub fn new(v: u8) -> Option<Self> {
        (1..=5).contains(&v).then_some(Self(v))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl Default for ContentClass {
    fn default() -> Self {
        Self(1)
    }
}

impl TryFrom<u8> for ContentClass {
    type Error = ProtocolError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Self::new(v).ok_or(ProtocolError::UnknownTag { kind: "content class", value: v.to_string() })
    }
}

impl From<ContentClass> for u8 {
    fn from(c: ContentClass) -> u8 {
        c.0
    }
}

impl FromStr for Sim2Real {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" => Ok(Sim2Real::Real),
            "simulation" | "sim" => Ok(Sim2Real::Simulation),
            _ => Err(ProtocolError::UnknownTag { kind: "sim2real", value: s.into() }),
        }
    }
}

impl FromStr for Perspective {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "first" => Ok(Perspective::First),
            "third" => Ok(Perspective::Third),
            _ => Err(ProtocolError::UnknownTag { kind: "perspective", value: s.into() }),
        }
    }
}

impl fmt::Display for Sim2Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sim2Real::Real => "real",
            Sim2Real::Simulation => "simulation",
        })
    }
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Perspective::First => "first",
            Perspective::Third => "third",
        })
    }
}

/// Content tags attached to a reference image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContentTags {
    pub sim2real: Sim2Real,
    pub perspective: Perspective,
    pub main_object: ContentClass,
    pub background: ContentClass,
}

/// Whether the split keeps every pair of a reference on the same side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SplitUnit {
    #[default]
    Reference,
    Pair,
}

/// Row indices on each side, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
}

const SPLIT_STREAM: u64 = 0x5eed_5b17;

/// Seeded train/val split of rows identified by their reference names.
///
/// `round(ratio · units)` units go to train, the rest to val.
pub fn split_train_val<S: AsRef<str>>(
    references: &[S],
    ratio: f64,
    seed: u64,
    unit: SplitUnit,
    repetition: u64,
) -> Result<Split, ProtocolError> {
    if references.is_empty() {
        return Err(ProtocolError::Empty);
    }
    if !(0.0..=1.0).contains(&ratio) {
        return Err(ProtocolError::Ratio(ratio));
    }
    let mut rng = rng::keyed(seed, rng::mix(SPLIT_STREAM, repetition));
    let in_train: Vec<bool> = match unit {
        SplitUnit::Reference => {
            let mut refs: Vec<&str> =
                references.iter().map(|r| r.as_ref()).collect::<BTreeSet<_>>().into_iter().collect();
            refs.shuffle(&mut rng);
            let n_train = libm::round(ratio * refs.len() as f64) as usize;
            let train: BTreeSet<&str> = refs[..n_train].iter().copied().collect();
            references.iter().map(|r| train.contains(r.as_ref())).collect()
        }
        SplitUnit::Pair => {
            let mut idx: Vec<usize> = (0..references.len()).collect();
            idx.shuffle(&mut rng);
            let n_train = libm::round(ratio * idx.len() as f64) as usize;
            let mut flags = alloc::vec![false; references.len()];
            idx[..n_train].iter().for_each(|&i| flags[i] = true);
            flags
        }
    };
    let (train, val) = (0..references.len()).partition(|&i| in_train[i]);
    Ok(Split { train, val })
}

/// Which score family the labels come from; names the three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ScoreFamily {
    Cognition,
    #[default]
    Decision,
}

impl ScoreFamily {
    pub fn dimension_names(self) -> [&'static str; 3] {
        match self {
            ScoreFamily::Cognition => ["Precision", "Recall", "Semantic"],
            ScoreFamily::Decision => ["Position", "Rotation", "State"],
        }
    }
}

impl FromStr for ScoreFamily {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cognition" => Ok(ScoreFamily::Cognition),
            "decision" => Ok(ScoreFamily::Decision),
            _ => Err(ProtocolError::UnknownTag { kind: "score family", value: s.into() }),
        }
    }
}

/// Subjective labels and metadata of one distorted image.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalSample {
    pub image_id: String,
    pub reference: String,
    /// Per-dimension labels in family order.
    pub dims: [f64; 3],
    pub total: f64,
    pub tags: ContentTags,
    pub level: Level,
}

/// A subset of the validation set on which correlations are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slice {
    Dimension(usize),
    Perspective(Perspective),
    Jnd(JndLabel),
    Sim2Real(Sim2Real),
    Level(u8),
}

impl Slice {
    /// Every slice in report order.
    pub fn all() -> Vec<Slice> {
        let mut v: Vec<Slice> = (0..3).map(Slice::Dimension).collect();
        v.extend([Perspective::First, Perspective::Third].map(Slice::Perspective));
        v.extend(JndLabel::ALL.map(Slice::Jnd));
        v.extend([Sim2Real::Real, Sim2Real::Simulation].map(Slice::Sim2Real));
        v.extend((1..=5).map(Slice::Level));
        v
    }

    pub fn name(self, family: ScoreFamily) -> String {
        match self {
            Slice::Dimension(d) => family.dimension_names()[d].into(),
            Slice::Perspective(Perspective::First) => "First Perspective".into(),
            Slice::Perspective(Perspective::Third) => "Third Perspective".into(),
            Slice::Jnd(j) => j.as_str().into(),
            Slice::Sim2Real(Sim2Real::Real) => "Real".into(),
            Slice::Sim2Real(Sim2Real::Simulation) => "Simulation".into(),
            Slice::Level(l) => format!("Dis-level-{l}"),
        }
    }

    fn contains(self, s: &EvalSample, jnd: JndLabel) -> bool {
        match self {
            Slice::Dimension(_) => true,
            Slice::Perspective(p) => s.tags.perspective == p,
            Slice::Jnd(j) => jnd == j,
            Slice::Sim2Real(v) => s.tags.sim2real == v,
            Slice::Level(l) => s.level.get() == l,
        }
    }

    fn label(self, s: &EvalSample) -> f64 {
        match self {
            Slice::Dimension(d) => s.dims[d],
            _ => s.total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolConfig {
    pub repetitions: usize,
    pub train_ratio: f64,
    pub seed: u64,
    pub unit: SplitUnit,
    pub logistic_fit: bool,
    pub family: ScoreFamily,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            repetitions: 10,
            train_ratio: 0.8,
            seed: 0,
            unit: SplitUnit::Reference,
            logistic_fit: false,
            family: ScoreFamily::Decision,
        }
    }
}

/// Mean and spread of one indicator over the repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and population standard deviation.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self { mean, std: libm::sqrt(var) }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SliceSummary {
    pub name: String,
    pub srcc: MeanStd,
    pub krcc: MeanStd,
    pub plcc: MeanStd,
    /// Repetitions that produced a value.
    pub runs: usize,
    pub mean_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunLog {
    pub repetition: usize,
    pub train: usize,
    pub val: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolOutcome {
    pub slices: Vec<SliceSummary>,
    pub runs: Vec<RunLog>,
    pub warnings: Vec<String>,
}

impl ProtocolOutcome {
    pub fn slice(&self, name: &str) -> Option<&SliceSummary> {
        self.slices.iter().find(|s| s.name == name)
    }
}

/// Resamples the split `repetitions` times and reports correlations of the
/// metric with the labels on every validation slice.
///
/// JND tertiles are assigned once, from the total score over all samples.
/// Slices with fewer than three validation samples, or with a constant
/// sequence, are skipped for that repetition and noted in `warnings`.
pub fn repeat_protocol(
    samples: &[EvalSample],
    metric: &[f64],
    config: &ProtocolConfig,
) -> Result<ProtocolOutcome, ProtocolError> {
    if samples.len() != metric.len() {
        return Err(ProtocolError::Misaligned { metric: metric.len(), samples: samples.len() });
    }
    if config.repetitions == 0 {
        return Err(ProtocolError::NoRepetitions);
    }
    let totals: Vec<f64> = samples.iter().map(|s| s.total).collect();
    let jnd = jnd_partition(&totals);
    let refs: Vec<&str> = samples.iter().map(|s| s.reference.as_str()).collect();
    let slices = Slice::all();
    let mut per_slice: Vec<Vec<CorrelationReport>> = slices.iter().map(|_| Vec::new()).collect();
    let mut out = ProtocolOutcome::default();
    for rep in 0..config.repetitions {
        let split = split_train_val(&refs, config.train_ratio, config.seed, config.unit, rep as u64)?;
        out.runs.push(RunLog { repetition: rep, train: split.train.len(), val: split.val.len() });
        for (slice, acc) in slices.iter().zip(per_slice.iter_mut()) {
            let members: Vec<usize> =
                split.val.iter().copied().filter(|&i| slice.contains(&samples[i], jnd[i])).collect();
            let name = slice.name(config.family);
            if members.len() < MIN_SAMPLES {
                out.warnings.push(format!("repetition {rep}: slice {name} has {} samples, skipped", members.len()));
                continue;
            }
            let m: Vec<f64> = members.iter().map(|&i| metric[i]).collect();
            let l: Vec<f64> = members.iter().map(|&i| slice.label(&samples[i])).collect();
            match correlation_report(&m, &l, config.logistic_fit) {
                Ok(r) => acc.push(r),
                Err(e) => out.warnings.push(format!("repetition {rep}: slice {name} skipped: {e}")),
            }
        }
    }
    for (slice, reports) in slices.iter().zip(per_slice) {
        if reports.is_empty() {
            continue;
        }
        let pick = |f: fn(&CorrelationReport) -> f64| MeanStd::of(&reports.iter().map(f).collect::<Vec<_>>());
        out.slices.push(SliceSummary {
            name: slice.name(config.family),
            srcc: pick(|r| r.srcc),
            krcc: pick(|r| r.krcc),
            plcc: pick(|r| r.plcc),
            runs: reports.len(),
            mean_n: reports.iter().map(|r| r.n as f64).sum::<f64>() / reports.len() as f64,
        });
    }
    Ok(out)
}
