use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::logistic::fit_logistic;
use super::StatsError;

pub const MIN_SAMPLES: usize = 3;

fn check_pair(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < MIN_SAMPLES {
        return Err(StatsError::TooFewSamples(x.len()));
    }
    if !x.iter().chain(y).all(|v| v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

fn pearson_unchecked(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Constant);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y)?;
    pearson_unchecked(x, y)
}

/// 1-based ranks, ties sharing the average of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over average ranks.
pub fn srcc(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y)?;
    pearson_unchecked(&average_ranks(x), &average_ranks(y))
}

/// Number of tied pairs within runs of equal values in a sorted sequence.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Merge sort counting inversions.
fn sort_counting_swaps(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut v[..mid], buf) + sort_counting_swaps(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf.push(v[j]);
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Kendall tau-b in O(n log n).
pub fn krcc(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y)?;
    let n = x.len() as u64;
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ties_x = tied_pairs(&xs);
    let ties_xy = tied_pairs(&pairs);
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = Vec::with_capacity(ys.len());
    let swaps = sort_counting_swaps(&mut ys, &mut buf);
    let ties_y = tied_pairs(&ys);
    let total = n * (n - 1) / 2;
    let (tx, ty) = (total - ties_x, total - ties_y);
    if tx == 0 || ty == 0 {
        return Err(StatsError::Constant);
    }
    // concordant - discordant
    let net = total as f64 - ties_x as f64 - ties_y as f64 + ties_xy as f64 - 2.0 * swaps as f64;
    Ok((net / libm::sqrt(tx as f64 * ty as f64)).clamp(-1.0, 1.0))
}

/// How a PLCC value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PlccMode {
    Raw,
    Logistic,
    /// The logistic fit did not converge and the raw value was used.
    FallbackRaw,
}

/// Pearson correlation, optionally after mapping `x` through a 4-parameter
/// logistic fitted to `y`.
pub fn plcc(x: &[f64], y: &[f64], logistic_fit: bool) -> Result<(f64, PlccMode), StatsError> {
    check_pair(x, y)?;
    let raw = pearson_unchecked(x, y)?;
    if !logistic_fit {
        return Ok((raw, PlccMode::Raw));
    }
    match fit_logistic(x, y) {
        Some(f) => {
            let mapped: Vec<f64> = x.iter().map(|&v| f.eval(v)).collect();
            match pearson_unchecked(&mapped, y) {
                Ok(r) if r.is_finite() => Ok((r, PlccMode::Logistic)),
                _ => Ok((raw, PlccMode::FallbackRaw)),
            }
        }
        None => Ok((raw, PlccMode::FallbackRaw)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrelationReport {
    pub srcc: f64,
    pub krcc: f64,
    pub plcc: f64,
    pub n: usize,
    pub plcc_mode: PlccMode,
}

/// All three indicators of `metric` against `labels`.
pub fn correlation_report(metric: &[f64], labels: &[f64], logistic_fit: bool) -> Result<CorrelationReport, StatsError> {
    let (plcc, plcc_mode) = plcc(metric, labels, logistic_fit)?;
    Ok(CorrelationReport { srcc: srcc(metric, labels)?, krcc: krcc(metric, labels)?, plcc, n: metric.len(), plcc_mode })
}

/// Pairwise SRCC between subjects, with the mean of the off-diagonal entries.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubjectMatrix {
    pub values: Vec<Vec<f64>>,
    pub mean_off_diagonal: f64,
}

/// Each subject maps sample ids to scores; every subject must score the same ids.
pub fn subject_correlation_matrix(subjects: &[BTreeMap<String, f64>]) -> Result<SubjectMatrix, StatsError> {
    if subjects.len() < 2 {
        return Err(StatsError::TooFewSubjects(subjects.len()));
    }
    let mut missing: Vec<String> = Vec::new();
    for s in &subjects[1..] {
        for id in
            subjects[0].keys().filter(|k| !s.contains_key(*k)).chain(s.keys().filter(|k| !subjects[0].contains_key(*k)))
        {
            if !missing.contains(id) {
                missing.push(id.clone());
            }
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(StatsError::MisalignedIds(missing));
    }
    let vectors: Vec<Vec<f64>> = subjects.iter().map(|s| s.values().copied().collect()).collect();
    let k = subjects.len();
    let mut values = vec![vec![1.0; k]; k];
    let mut sum = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            let r = srcc(&vectors[i], &vectors[j])?;
            values[i][j] = r;
            values[j][i] = r;
            sum += 2.0 * r;
        }
    }
    Ok(SubjectMatrix { values, mean_off_diagonal: sum / (k * (k - 1)) as f64 })
}
