//! Joins labels, manifest and metric vectors and runs the repeated-split
//! protocol for every metric.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use rqa_core::protocol::{repeat_protocol, EvalSample, ProtocolConfig, ProtocolOutcome, ScoreFamily};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::{reference_name, PairRecord};
use crate::records::ScoreTable;

/// A metric's per-image values and the group it is reported under.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInput {
    pub name: String,
    pub group: String,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub name: String,
    pub group: String,
    pub outcome: ProtocolOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub label: String,
    pub family: ScoreFamily,
    pub samples: usize,
    /// Models whose labels were averaged.
    pub models: Vec<String>,
    pub config: ProtocolConfig,
    /// Labelled image ids absent from the manifest.
    pub orphans: Vec<String>,
    pub warnings: Vec<String>,
    pub metrics: Vec<MetricResult>,
}

impl Evaluation {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(Error::invalid)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Labelled samples in manifest order.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub samples: Vec<EvalSample>,
    pub models: Vec<String>,
    pub orphans: Vec<String>,
    pub unlabelled: usize,
}

/// Averages the labels of the selected models (all by default) per image and
/// attaches manifest metadata.
pub fn build_samples(manifest: &[PairRecord], labels: &ScoreTable, model: Option<&str>) -> Result<Samples> {
    let rows: Vec<_> = labels.rows.iter().filter(|r| model.is_none_or(|m| r.model_id == m)).collect();
    if let (Some(m), true) = (model, rows.is_empty()) {
        return Err(Error::invalid(format!("no labels for model {m}")));
    }
    let models: BTreeSet<&str> = rows.iter().map(|r| r.model_id.as_str()).collect();
    let mut acc: BTreeMap<&str, ([f64; 3], f64, usize)> = BTreeMap::new();
    for r in &rows {
        let e = acc.entry(&r.image_id).or_default();
        for k in 0..3 {
            e.0[k] += r.dims[k];
        }
        e.1 += r.image_score;
        e.2 += 1;
    }
    let known: BTreeSet<&str> = manifest.iter().map(|r| r.image_id.as_str()).collect();
    let orphans: Vec<String> = acc.keys().filter(|id| !known.contains(*id)).map(|s| s.to_string()).collect();
    let mut samples = Vec::new();
    let mut unlabelled = 0;
    for rec in manifest {
        let Some(&(dims, total, n)) = acc.get(rec.image_id.as_str()) else {
            unlabelled += 1;
            continue;
        };
        let n = n as f64;
        samples.push(EvalSample {
            image_id: rec.image_id.clone(),
            reference: reference_name(Path::new(&rec.reference))?,
            dims: dims.map(|d| d / n),
            total: total / n,
            tags: rec.tags,
            level: rec.level,
        });
    }
    if samples.is_empty() {
        return Err(Error::invalid("no labelled image appears in the manifest"));
    }
    Ok(Samples { samples, models: models.into_iter().map(str::to_owned).collect(), orphans, unlabelled })
}

/// Runs the protocol for every metric. Each metric must score every sample.
pub fn evaluate(
    label: &str,
    samples: &Samples,
    metrics: &[MetricInput],
    config: &ProtocolConfig,
) -> Result<Evaluation> {
    let mut warnings = Vec::new();
    if !samples.orphans.is_empty() {
        warnings.push(format!("{} labelled images are not in the manifest and were left out", samples.orphans.len()));
    }
    if samples.unlabelled > 0 {
        warnings.push(format!("{} manifest rows have no labels", samples.unlabelled));
    }
    let vectors = metrics
        .iter()
        .map(|m| {
            let missing: Vec<&str> =
                samples.samples.iter().map(|s| s.image_id.as_str()).filter(|id| !m.values.contains_key(*id)).collect();
            if !missing.is_empty() {
                let shown: Vec<&str> = missing.iter().take(5).copied().collect();
                return Err(Error::invalid(format!(
                    "metric {} has no value for {} samples: {}",
                    m.name,
                    missing.len(),
                    shown.join(", ")
                )));
            }
            Ok(samples.samples.iter().map(|s| m.values[&s.image_id]).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let results = metrics
        .par_iter()
        .zip(vectors)
        .map(|(m, v)| {
            let outcome = repeat_protocol(&samples.samples, &v, config)
                .map_err(|e| Error::invalid(format!("metric {}: {e}", m.name)))?;
            Ok(MetricResult { name: m.name.clone(), group: m.group.clone(), outcome })
        })
        .collect::<Result<Vec<_>>>()?;
    for r in &results {
        if !r.outcome.warnings.is_empty() {
            log::info!("metric {}: {} slice skips", r.name, r.outcome.warnings.len());
        }
    }
    Ok(Evaluation {
        label: label.to_owned(),
        family: config.family,
        samples: samples.samples.len(),
        models: samples.models.clone(),
        config: *config,
        orphans: samples.orphans.clone(),
        warnings,
        metrics: results,
    })
}
