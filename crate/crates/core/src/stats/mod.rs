//! Correlation indicators, JND tertiles and full-reference baselines.

mod correlation;
mod logistic;
mod quality;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use correlation::{
    average_ranks, correlation_report, krcc, pearson, plcc, srcc, subject_correlation_matrix, CorrelationReport,
    PlccMode, SubjectMatrix, MIN_SAMPLES,
};
pub use logistic::{fit_logistic, Logistic};
pub use quality::{psnr, ssim, ssim_planes, PSNR_CAP_DB, SSIM_SIGMA, SSIM_WINDOW};

use crate::image::ImageError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("sequences differ in length ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("a sequence is constant, correlation is undefined")]
    Constant,
    #[error("need at least 2 subjects, got {0}")]
    TooFewSubjects(usize),
    #[error("sample ids not shared by every subject: {}", .0.join(", "))]
    MisalignedIds(Vec<String>),
    #[error("image is {width}x{height}, SSIM needs at least {min} pixels per side")]
    ImageTooSmall { width: usize, height: usize, min: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum JndLabel {
    Mild,
    Medium,
    Severe,
}

impl JndLabel {
    pub const ALL: [JndLabel; 3] = [JndLabel::Mild, JndLabel::Medium, JndLabel::Severe];

    pub fn as_str(self) -> &'static str {
        match self {
            JndLabel::Mild => "Mild",
            JndLabel::Medium => "Medium",
            JndLabel::Severe => "Severe",
        }
    }
}

impl core::fmt::Display for JndLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tertile sizes for `n` samples; the remainder goes to the leading tertiles.
pub fn tertile_sizes(n: usize) -> [usize; 3] {
    let (base, rem) = (n / 3, n % 3);
    [0, 1, 2].map(|i| base + usize::from(i < rem))
}

/// Labels samples by descending score: top third Mild, middle Medium, bottom
/// Severe. Equal scores keep their input order.
pub fn jnd_partition(scores: &[f64]) -> Vec<JndLabel> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let [mild, medium, _] = tertile_sizes(scores.len());
    let mut labels = vec![JndLabel::Severe; scores.len()];
    for (rank, &i) in order.iter().enumerate() {
        labels[i] = if rank < mild {
            JndLabel::Mild
        } else if rank < mild + medium {
            JndLabel::Medium
        } else {
            JndLabel::Severe
        };
    }
    labels
}
