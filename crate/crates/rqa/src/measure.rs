//! Low-level features and full-reference quality of image files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rqa_core::stats::{psnr, ssim};
use rqa_core::{low_level_features, LowLevelFeatures};

use crate::error::{Error, Result};
use crate::imageio::load_png;
use crate::manifest::{reference_name, PairRecord};
use crate::records::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub image_id: String,
    pub features: LowLevelFeatures,
    /// PSNR and SSIM against the reference, when known.
    pub quality: Option<(f64, f64)>,
}

pub fn measure_images(paths: &[PathBuf]) -> Result<Vec<FeatureRow>> {
    paths
        .par_iter()
        .map(|p| {
            Ok(FeatureRow { image_id: reference_name(p)?, features: low_level_features(&load_png(p)?), quality: None })
        })
        .collect()
}

/// Features of every distorted image plus PSNR/SSIM against its reference,
/// in manifest order. Each reference is decoded once.
pub fn measure_manifest(manifest: &[PairRecord]) -> Result<Vec<FeatureRow>> {
    let mut by_ref: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in manifest.iter().enumerate() {
        by_ref.entry(&r.reference).or_default().push(i);
    }
    let groups: Vec<(&str, Vec<usize>)> = by_ref.into_iter().collect();
    let measured = groups
        .par_iter()
        .map(|(reference, rows)| {
            let reference = load_png(Path::new(reference))?;
            rows.iter()
                .map(|&i| {
                    let rec = &manifest[i];
                    let dist = load_png(Path::new(&rec.dist))?;
                    let at = |e| Error::invalid(format!("{}: {e}", rec.image_id));
                    let quality = (psnr(&reference, &dist).map_err(at)?, ssim(&reference, &dist).map_err(at)?);
                    Ok((
                        i,
                        FeatureRow {
                            image_id: rec.image_id.clone(),
                            features: low_level_features(&dist),
                            quality: Some(quality),
                        },
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<_> = measured.into_iter().flatten().collect();
    rows.sort_by_key(|(i, _)| *i);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn write_features(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let with_quality = rows.iter().any(|r| r.quality.is_some());
    let mut w = csv::Writer::from_path(path).map_err(|e| crate::manifest::csv_error(path, e))?;
    let mut header = vec!["image_id", "luminance", "contrast", "chrominance", "blur", "spatial_information"];
    if with_quality {
        header.extend(["psnr", "ssim"]);
    }
    w.write_record(&header).map_err(|e| crate::manifest::csv_error(path, e))?;
    for r in rows {
        let f = &r.features;
        let mut rec = vec![r.image_id.clone()];
        rec.extend([f.luminance, f.contrast, f.chrominance, f.blur, f.spatial_information].map(fmt_f64));
        if let Some((p, s)) = r.quality {
            rec.extend([fmt_f64(p), fmt_f64(s)]);
        } else if with_quality {
            rec.extend([String::new(), String::new()]);
        }
        w.write_record(rec).map_err(|e| crate::manifest::csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
