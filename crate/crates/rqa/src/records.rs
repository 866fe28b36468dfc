//! Model-output ingestion and score tables.
//!
//! | file | format | columns / keys |
//! |------|--------|----------------|
//! | text outputs | JSONL | `image_id, model_id, task_index, text` |
//! | pose outputs | JSONL | `image_id, model_id, task_index, arm_id?, step?, fields[7+]` |
//! | pose outputs | CSV | `image_id, model_id, task_index, arm_id, step, <fields...>` |
//! | score table | CSV | `image_id, model_id, <3 dims>, task_score, image_score` |
//! | execution | CSV | `image_id, kind, ref_final_xyz, dist_final_xyz[, score]` |
//! | score vector | CSV | `sample_id, value` |
//!
//! Reference images use their reference name as `image_id`. Positions in
//! `*_final_xyz` are metres written as `"x y z"`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rqa_core::kinematics::{ExecutionKind, Vec3};
use rqa_core::protocol::ScoreFamily;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::csv_error;

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::parse(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextOutput {
    pub image_id: String,
    pub model_id: String,
    pub task_index: u32,
    pub text: String,
}

pub fn read_text_outputs(path: &Path) -> Result<Vec<TextOutput>> {
    read_jsonl(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseOutput {
    pub image_id: String,
    pub model_id: String,
    pub task_index: u32,
    #[serde(default)]
    pub arm_id: Option<String>,
    #[serde(default)]
    pub step: Option<u32>,
    pub fields: Vec<f64>,
}

/// Reads pose outputs as CSV when the extension is `.csv`, JSONL otherwise.
pub fn read_pose_outputs(path: &Path) -> Result<Vec<PoseOutput>> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        read_pose_csv(path)
    } else {
        read_jsonl(path)
    }
}

fn read_pose_csv(path: &Path) -> Result<Vec<PoseOutput>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader.headers().map_err(|e| csv_error(path, e))?.iter().map(str::to_owned).collect();
    const FIXED: [&str; 5] = ["image_id", "model_id", "task_index", "arm_id", "step"];
    if header.len() < FIXED.len() || header[..FIXED.len()] != FIXED {
        return Err(Error::parse(path, format!("header must start with {}", FIXED.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let at = |m: String| Error::parse(path, format!("row {}: {m}", i + 1));
        let rec = rec.map_err(|e| at(e.to_string()))?;
        let opt = |s: &str| (!s.trim().is_empty()).then(|| s.trim().to_owned());
        let fields = rec
            .iter()
            .skip(FIXED.len())
            .filter(|s| !s.trim().is_empty())
            .enumerate()
            .map(|(k, s)| s.trim().parse::<f64>().map_err(|_| at(format!("pose field {k} is not a number: {s:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        out.push(PoseOutput {
            image_id: rec[0].trim().to_owned(),
            model_id: rec[1].trim().to_owned(),
            task_index: rec[2].trim().parse().map_err(|_| at(format!("bad task_index {:?}", &rec[2])))?,
            arm_id: opt(&rec[3]),
            step: opt(&rec[4]).map(|s| s.parse().map_err(|_| at(format!("bad step {s:?}")))).transpose()?,
            fields,
        });
    }
    Ok(out)
}

/// Per-image scores of one model: task-averaged dimensions, mean task score
/// and the five-task image score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub image_id: String,
    pub model_id: String,
    pub dims: [f64; 3],
    pub task_score: f64,
    pub image_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub family: ScoreFamily,
    pub rows: Vec<ScoreRow>,
}

fn header_for(family: ScoreFamily) -> Vec<String> {
    let mut h = vec!["image_id".to_owned(), "model_id".to_owned()];
    h.extend(family.dimension_names().map(str::to_ascii_lowercase));
    h.extend(["task_score".to_owned(), "image_score".to_owned()]);
    h
}

/// Shortest round-trip formatting, so tables are byte-stable.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

impl ScoreTable {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(header_for(self.family)).map_err(|e| csv_error(path, e))?;
        for r in &self.rows {
            let mut rec = vec![r.image_id.clone(), r.model_id.clone()];
            rec.extend(r.dims.map(fmt_f64));
            rec.extend([fmt_f64(r.task_score), fmt_f64(r.image_score)]);
            w.write_record(rec).map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
        let header: Vec<String> = reader.headers().map_err(|e| csv_error(path, e))?.iter().map(str::to_owned).collect();
        let family = [ScoreFamily::Cognition, ScoreFamily::Decision]
            .into_iter()
            .find(|&f| header == header_for(f))
            .ok_or_else(|| Error::parse(path, format!("not a score table header: {}", header.join(","))))?;
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let at = |m: String| Error::parse(path, format!("row {}: {m}", i + 1));
            let rec = rec.map_err(|e| at(e.to_string()))?;
            let num = |k: usize| -> Result<f64> {
                let v: f64 = rec[k].trim().parse().map_err(|_| at(format!("column {} is not a number", header[k])))?;
                v.is_finite().then_some(v).ok_or_else(|| at(format!("column {} is not finite", header[k])))
            };
            let image_score = num(6)?;
            if !(0.0..=5.0).contains(&image_score) {
                return Err(at(format!("image_score {image_score} is outside [0, 5]")));
            }
            rows.push(ScoreRow {
                image_id: rec[0].to_owned(),
                model_id: rec[1].to_owned(),
                dims: [num(2)?, num(3)?, num(4)?],
                task_score: num(5)?,
                image_score,
            });
        }
        Ok(Self { family, rows })
    }
}

/// `sample_id,value` pairs; ids must be unique.
pub fn read_score_vector(path: &Path) -> Result<BTreeMap<String, f64>> {
    #[derive(Deserialize)]
    struct Row {
        sample_id: String,
        value: f64,
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut out = BTreeMap::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let at = |m: String| Error::parse(path, format!("row {}: {m}", i + 1));
        let row = row.map_err(|e| at(e.to_string()))?;
        if !row.value.is_finite() {
            return Err(at(format!("value for {} is not finite", row.sample_id)));
        }
        if out.insert(row.sample_id.clone(), row.value).is_some() {
            return Err(at(format!("duplicate sample_id {}", row.sample_id)));
        }
    }
    Ok(out)
}

pub fn write_score_vector(path: &Path, values: &[(String, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["sample_id", "value"]).map_err(|e| csv_error(path, e))?;
    for (id, v) in values {
        w.write_record([id.as_str(), &fmt_f64(*v)]).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Per-sample values from either a score vector or a score table. A table
/// contributes each image's `image_score` averaged over models.
pub fn read_values(path: &Path) -> Result<BTreeMap<String, f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let first = reader.headers().map_err(|e| csv_error(path, e))?.get(0).unwrap_or("").to_owned();
    if first == "sample_id" {
        return read_score_vector(path);
    }
    let table = ScoreTable::read(path)?;
    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in &table.rows {
        let e = acc.entry(r.image_id.clone()).or_default();
        e.0 += r.image_score;
        e.1 += 1;
    }
    Ok(acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionRecord {
    pub image_id: String,
    pub kind: ExecutionKind,
    pub final_ref: Option<Vec3>,
    pub final_dist: Option<Vec3>,
}

fn parse_xyz(s: &str) -> Option<std::result::Result<Vec3, String>> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let v: Vec<f64> = match s.split_whitespace().map(str::parse).collect() {
        Ok(v) => v,
        Err(_) => return Some(Err(format!("position {s:?} is not three numbers"))),
    };
    Some(v.try_into().map_err(|_| format!("position {s:?} is not three numbers")))
}

fn fmt_xyz(v: &Option<Vec3>) -> String {
    v.map(|p| p.map(fmt_f64).join(" ")).unwrap_or_default()
}

pub fn read_execution(path: &Path) -> Result<Vec<ExecutionRecord>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader.headers().map_err(|e| csv_error(path, e))?.iter().map(str::to_owned).collect();
    if header.len() < 4 || header[..4] != ["image_id", "kind", "ref_final_xyz", "dist_final_xyz"] {
        return Err(Error::parse(path, "header must start with image_id,kind,ref_final_xyz,dist_final_xyz"));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let at = |m: String| Error::parse(path, format!("row {}: {m}", i + 1));
        let rec = rec.map_err(|e| at(e.to_string()))?;
        if rec.len() < 4 {
            return Err(at("expected at least 4 columns".into()));
        }
        out.push(ExecutionRecord {
            image_id: rec[0].trim().to_owned(),
            kind: rec[1].parse().map_err(|e: rqa_core::kinematics::KinematicsError| at(e.to_string()))?,
            final_ref: parse_xyz(&rec[2]).transpose().map_err(at)?,
            final_dist: parse_xyz(&rec[3]).transpose().map_err(at)?,
        });
    }
    Ok(out)
}

pub fn write_execution(path: &Path, rows: &[(ExecutionRecord, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["image_id", "kind", "ref_final_xyz", "dist_final_xyz", "score"]).map_err(|e| csv_error(path, e))?;
    for (r, score) in rows {
        w.write_record([
            r.image_id.clone(),
            r.kind.to_string(),
            fmt_xyz(&r.final_ref),
            fmt_xyz(&r.final_dist),
            fmt_f64(*score),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let table = ScoreTable {
            family: ScoreFamily::Cognition,
            rows: vec![ScoreRow {
                image_id: "a_d01".into(),
                model_id: "m".into(),
                dims: [0.1, 0.2 + 0.1, 7.25],
                task_score: 0.7,
                image_score: 3.5,
            }],
        };
        table.write(&path).unwrap();
        assert!(std::fs::read_to_string(&path)
            .unwrap()
            .starts_with("image_id,model_id,precision,recall,semantic,task_score,image_score\n"));
        assert_eq!(ScoreTable::read(&path).unwrap(), table);
        assert_eq!(read_values(&path).unwrap()["a_d01"], 3.5);
    }

    #[test]
    fn score_tables_reject_out_of_range_totals() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        std::fs::write(&path, "image_id,model_id,position,rotation,state,task_score,image_score\nx,m,1,1,1,1,5.5\n")
            .unwrap();
        assert!(matches!(ScoreTable::read(&path), Err(Error::Parse { .. })));
    }

    #[test]
    fn score_vectors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        write_score_vector(&path, &[("b".into(), 2.0), ("a".into(), -1.5)]).unwrap();
        let v = read_values(&path).unwrap();
        assert_eq!(v.into_iter().collect::<Vec<_>>(), [("a".to_owned(), -1.5), ("b".to_owned(), 2.0)]);
        std::fs::write(&path, "sample_id,value\na,1\na,2\n").unwrap();
        assert!(read_score_vector(&path).is_err());
        std::fs::write(&path, "sample_id,value\na,NaN\n").unwrap();
        assert!(read_score_vector(&path).is_err());
    }

    #[test]
    fn pose_csv_and_jsonl_agree() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("p.csv");
        std::fs::write(
            &csv_path,
            "image_id,model_id,task_index,arm_id,step,x,y,z,r,p,w,g\nimg,m,2,,1,1,2,3,0.1,0.2,0.3,1\n",
        )
        .unwrap();
        let json_path = dir.path().join("p.jsonl");
        std::fs::write(&json_path, "{\"image_id\":\"img\",\"model_id\":\"m\",\"task_index\":2,\"step\":1,\"fields\":[1,2,3,0.1,0.2,0.3,1]}\n\n").unwrap();
        assert_eq!(read_pose_outputs(&csv_path).unwrap(), read_pose_outputs(&json_path).unwrap());
        std::fs::write(&json_path, "{\"image_id\":\"img\"}\n").unwrap();
        let err = read_pose_outputs(&json_path).unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn execution_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        std::fs::write(
            &path,
            "image_id,kind,ref_final_xyz,dist_final_xyz\na,success,,\nb,failure,0 0 0,0.1 0 0\nc,estop,,\n",
        )
        .unwrap();
        let rows = read_execution(&path).unwrap();
        assert_eq!(rows[1].final_dist, Some([0.1, 0.0, 0.0]));
        assert_eq!(rows[2].kind, ExecutionKind::EmergencyStop);
        std::fs::write(&path, "image_id,kind,ref_final_xyz,dist_final_xyz\nb,failure,0 0,0 0 0\n").unwrap();
        assert!(read_execution(&path).is_err());
    }
}
