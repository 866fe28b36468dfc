//! Reference/distorted pair manifests and their generation.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rqa_core::distort::DistortionRegistry;
use rqa_core::protocol::{sample_level, ContentClass, ContentTags};
use rqa_core::{apply_distortion, rng, Category, DistortionKind, Level};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::{load_png, save_png};

/// One distorted image and how it was made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub image_id: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub dist: String,
    /// Distortion id, 1..=30.
    pub id: u8,
    pub category: String,
    pub level: Level,
    pub params: Vec<f64>,
    /// Run seed; the corruption itself used [`row_seed`] of it.
    pub seed: u64,
    pub tags: ContentTags,
}

impl PairRecord {
    pub fn kind(&self) -> Result<DistortionKind> {
        DistortionKind::from_id(self.id).map_err(Error::invalid)
    }
}

/// Distorted image id: reference stem plus the two-digit distortion id.
pub fn image_id(reference_name: &str, kind: DistortionKind) -> String {
    format!("{reference_name}_d{:02}", kind.id())
}

/// Seed passed to the corruption of every row of one reference, so noise
/// realizations differ between references.
pub fn row_seed(seed: u64, reference_name: &str) -> u64 {
    rng::mix(seed, rng::stable_hash(reference_name.as_bytes()))
}

/// File stem used as the reference's name.
pub fn reference_name(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_owned)
        .ok_or_else(|| Error::invalid(format!("{}: no usable file name", path.display())))
}

pub fn write_manifest(path: &Path, rows: &[PairRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for row in rows {
        let line = serde_json::to_string(row).map_err(Error::invalid)?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads and validates a manifest: ids unique, every distortion id and level
/// known to `registry`, categories consistent with ids.
pub fn read_manifest(path: &Path) -> Result<Vec<PairRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let at = |m: String| Error::parse(path, format!("line {}: {m}", i + 1));
        let row: PairRecord = serde_json::from_str(&line).map_err(|e| at(e.to_string()))?;
        let kind = row.kind().map_err(|e| at(e.to_string()))?;
        let category: Category =
            row.category.parse().map_err(|e: rqa_core::distort::DistortError| at(e.to_string()))?;
        if category != kind.category() {
            return Err(at(format!("category {category} does not match distortion {kind}")));
        }
        if !seen.insert(row.image_id.clone()) {
            return Err(at(format!("duplicate image_id {}", row.image_id)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Tags per reference name from a CSV with columns
/// `reference,sim2real,perspective,main_object,background`.
pub fn read_tags(path: &Path) -> Result<BTreeMap<String, ContentTags>> {
    #[derive(Deserialize)]
    struct Row {
        reference: String,
        sim2real: String,
        perspective: String,
        main_object: u8,
        background: u8,
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut out = BTreeMap::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let at = |m: String| Error::parse(path, format!("row {}: {m}", i + 1));
        let row = row.map_err(|e| at(e.to_string()))?;
        let class = |v: u8| ContentClass::new(v).ok_or_else(|| at(format!("content class {v} is outside 1..=5")));
        let tags = ContentTags {
            sim2real: row.sim2real.parse().map_err(|e: rqa_core::protocol::ProtocolError| at(e.to_string()))?,
            perspective: row.perspective.parse().map_err(|e: rqa_core::protocol::ProtocolError| at(e.to_string()))?,
            main_object: class(row.main_object)?,
            background: class(row.background)?,
        };
        let name = Path::new(&row.reference).file_stem().and_then(|s| s.to_str()).unwrap_or(&row.reference).to_owned();
        if out.insert(name, tags).is_some() {
            return Err(at(format!("reference {} listed twice", row.reference)));
        }
    }
    Ok(out)
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}

/// A reference that could not be processed. Its 30 rows are missing from
/// the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub reference: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct Generation {
    pub rows: Vec<PairRecord>,
    pub errors: Vec<RowError>,
}

/// Writes one distorted PNG per (reference, distortion type) into `out_dir`,
/// each at a level drawn from `seed` and the reference name.
///
/// Rows come back in reference order, then distortion id.
pub fn generate_pairs(
    references: &[PathBuf],
    out_dir: &Path,
    seed: u64,
    registry: &DistortionRegistry,
    tags: &BTreeMap<String, ContentTags>,
) -> Result<Generation> {
    if references.is_empty() {
        return Err(Error::invalid("no reference images given"));
    }
    let mut names = BTreeSet::new();
    for r in references {
        let name = reference_name(r)?;
        if !names.insert(name.clone()) {
            return Err(Error::invalid(format!("two references share the name {name}")));
        }
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let per_ref: Vec<std::result::Result<Vec<PairRecord>, RowError>> = references
        .par_iter()
        .map(|path| {
            distort_reference(path, out_dir, seed, registry, tags)
                .map_err(|e| RowError { reference: path.display().to_string(), message: e.to_string() })
        })
        .collect();
    let mut out = Generation::default();
    for r in per_ref {
        match r {
            Ok(rows) => out.rows.extend(rows),
            Err(e) => {
                log::warn!("skipping {}: {}", e.reference, e.message);
                out.errors.push(e);
            }
        }
    }
    Ok(out)
}

fn distort_reference(
    path: &Path,
    out_dir: &Path,
    seed: u64,
    registry: &DistortionRegistry,
    tags: &BTreeMap<String, ContentTags>,
) -> Result<Vec<PairRecord>> {
    let name = reference_name(path)?;
    let img = load_png(path)?;
    let tags = *tags.get(&name).unwrap_or(&ContentTags::default());
    let corruption_seed = row_seed(seed, &name);
    registry
        .templates()
        .iter()
        .map(|template| {
            let level = sample_level(seed, &name, template.kind);
            let spec = template.at(level);
            let distorted = apply_distortion(&img, &spec, corruption_seed).map_err(Error::invalid)?;
            let image_id = image_id(&name, spec.kind);
            let dist = out_dir.join(format!("{image_id}.png"));
            save_png(&dist, &distorted)?;
            Ok(PairRecord {
                image_id,
                reference: path.display().to_string(),
                dist: dist.display().to_string(),
                id: spec.id(),
                category: spec.category().as_str().into(),
                level,
                params: spec.params,
                seed,
                tags,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_and_seeds() {
        let kind = DistortionKind::from_id(7).unwrap();
        assert_eq!(image_id("kitchen_3", kind), "kitchen_3_d07");
        assert_eq!(reference_name(Path::new("/x/y/kitchen_3.png")).unwrap(), "kitchen_3");
        assert_ne!(row_seed(1, "a"), row_seed(1, "b"));
        assert_eq!(row_seed(1, "a"), row_seed(1, "a"));
    }

    #[test]
    fn manifest_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let row = PairRecord {
            image_id: "r_d01".into(),
            reference: "r.png".into(),
            dist: "r_d01.png".into(),
            id: 1,
            category: DistortionKind::from_id(1).unwrap().category().as_str().into(),
            level: Level::new(2).unwrap(),
            params: vec![1.0],
            seed: 0,
            tags: ContentTags::default(),
        };
        write_manifest(&path, std::slice::from_ref(&row)).unwrap();
        assert_eq!(read_manifest(&path).unwrap(), std::slice::from_ref(&row));
        write_manifest(&path, &[row.clone(), row.clone()]).unwrap();
        assert!(matches!(read_manifest(&path), Err(Error::Parse { .. })));
        let mut wrong = row;
        wrong.category = "Noise".into();
        write_manifest(&path, &[wrong]).unwrap();
        assert!(read_manifest(&path).is_err());
    }

    #[test]
    fn tags_parse_and_reject() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(
            &path,
            "reference,sim2real,perspective,main_object,background\nimgs/a.png,simulation,first,2,5\n",
        )
        .unwrap();
        let t = read_tags(&path).unwrap();
        assert_eq!(t["a"].main_object.get(), 2);
        std::fs::write(&path, "reference,sim2real,perspective,main_object,background\na,real,third,6,1\n").unwrap();
        assert!(read_tags(&path).is_err());
        std::fs::write(&path, "reference,sim2real,perspective,main_object,background\na,virtual,third,1,1\n").unwrap();
        assert!(read_tags(&path).is_err());
    }
}
