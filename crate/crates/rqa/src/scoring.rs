//! Turns model outputs on reference/distorted pairs into per-image scores.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rqa_core::kinematics::{execution_score, ExecutionOutcome};
use rqa_core::pose::{
    decision_image_score, normalize_decision_batch, normalize_decision_fixed, normalize_decision_grouped, parse_pose,
    raw_decision_measures, select_dominant_arm, Arm, DecisionDims, Pose7, RawMeasures,
};
use rqa_core::protocol::ScoreFamily;
use rqa_core::text::{
    cognition_image_score, cognition_task_score, score_answer, CiderIndex, Tokenizer, TASKS_PER_IMAGE,
};

use crate::config::{DecisionConfig, GroupBy, Normalization};
use crate::error::{Error, Result};
use crate::manifest::{reference_name, PairRecord};
use crate::records::{ExecutionRecord, PoseOutput, ScoreRow, ScoreTable, TextOutput};

#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub table: ScoreTable,
    /// Orphan outputs and images without outputs.
    pub warnings: Vec<String>,
}

type Key<'a> = (&'a str, &'a str);

struct Pairs<'a> {
    rows: Vec<(&'a PairRecord, String)>,
    references: BTreeSet<String>,
}

fn pairs(manifest: &[PairRecord]) -> Result<Pairs<'_>> {
    let rows =
        manifest.iter().map(|r| Ok((r, reference_name(Path::new(&r.reference))?))).collect::<Result<Vec<_>>>()?;
    let references = rows.iter().map(|(_, n)| n.clone()).collect();
    Ok(Pairs { rows, references })
}

fn orphan_warnings<'a>(ids: impl Iterator<Item = &'a str>, p: &Pairs<'_>) -> Vec<String> {
    let known: BTreeSet<&str> = p.rows.iter().map(|(r, _)| r.image_id.as_str()).collect();
    let orphans: BTreeSet<&str> = ids.filter(|id| !known.contains(id) && !p.references.contains(*id)).collect();
    if orphans.is_empty() {
        return Vec::new();
    }
    let sample: Vec<&str> = orphans.iter().take(5).copied().collect();
    vec![format!("{} output image ids are not in the manifest: {}", orphans.len(), sample.join(", "))]
}

fn check_tasks<T>(tasks: &BTreeMap<u32, T>, image: &str, model: &str) -> Result<()> {
    if tasks.len() != TASKS_PER_IMAGE {
        return Err(Error::invalid(format!(
            "{image} / {model}: expected {TASKS_PER_IMAGE} tasks, got {}",
            tasks.len()
        )));
    }
    Ok(())
}

fn mean3(v: &[[f64; 3]]) -> [f64; 3] {
    let n = v.len() as f64;
    [0, 1, 2].map(|k| v.iter().map(|d| d[k]).sum::<f64>() / n)
}

/// Cognition scores for every manifest row and every model that answered on
/// both images. CIDEr document frequencies come from all reference answers.
pub fn score_cognition(manifest: &[PairRecord], outputs: &[TextOutput]) -> Result<Scored> {
    let p = pairs(manifest)?;
    let mut index: BTreeMap<Key<'_>, BTreeMap<u32, &str>> = BTreeMap::new();
    for o in outputs {
        let tasks = index.entry((&o.image_id, &o.model_id)).or_default();
        if tasks.insert(o.task_index, &o.text).is_some() {
            return Err(Error::invalid(format!(
                "{} / {}: task {} answered twice",
                o.image_id, o.model_id, o.task_index
            )));
        }
    }
    let tokenizer = Tokenizer::default();
    let corpus: Vec<Vec<String>> =
        outputs.iter().filter(|o| p.references.contains(&o.image_id)).map(|o| tokenizer.tokenize(&o.text)).collect();
    let cider = CiderIndex::new(&corpus).map_err(|e| Error::invalid(format!("no reference answers: {e}")))?;
    let models: BTreeSet<&str> = outputs.iter().map(|o| o.model_id.as_str()).collect();
    let mut warnings = orphan_warnings(outputs.iter().map(|o| o.image_id.as_str()), &p);
    let mut rows = Vec::new();
    for (rec, ref_name) in &p.rows {
        for &model in &models {
            let Some(ref_tasks) = index.get(&(ref_name.as_str(), model)) else { continue };
            let Some(dist_tasks) = index.get(&(rec.image_id.as_str(), model)) else {
                warnings.push(format!("{} / {model}: no answers, skipped", rec.image_id));
                continue;
            };
            check_tasks(ref_tasks, ref_name, model)?;
            check_tasks(dist_tasks, &rec.image_id, model)?;
            let mut dims = Vec::new();
            let mut task_scores = Vec::new();
            for (task, reference) in ref_tasks {
                let distorted = dist_tasks
                    .get(task)
                    .ok_or_else(|| Error::invalid(format!("{} / {model}: task {task} missing", rec.image_id)))?;
                let at = |e| Error::invalid(format!("{} / {model} task {task}: {e}", rec.image_id));
                let d = score_answer(reference, distorted, &cider, &tokenizer).map_err(at)?;
                task_scores.push(cognition_task_score(&d).map_err(at)?);
                dims.push([d.precision, d.recall, d.semantic]);
            }
            let image_score =
                cognition_image_score(&task_scores).map_err(|e| Error::invalid(format!("{}: {e}", rec.image_id)))?;
            rows.push(ScoreRow {
                image_id: rec.image_id.clone(),
                model_id: model.to_owned(),
                dims: mean3(&dims),
                task_score: image_score / TASKS_PER_IMAGE as f64,
                image_score,
            });
        }
    }
    Ok(Scored { table: ScoreTable { family: ScoreFamily::Cognition, rows }, warnings })
}

/// Arm id to its trajectory in step order.
type Arms = BTreeMap<String, Vec<Pose7>>;

/// Task index to arms.
type Tasks = BTreeMap<u32, Arms>;

fn index_poses(outputs: &[PoseOutput]) -> Result<BTreeMap<Key<'_>, Tasks>> {
    type Steps<'a> = BTreeMap<(Key<'a>, u32, &'a str), Vec<(u32, usize, Pose7)>>;
    let mut steps: Steps<'_> = BTreeMap::new();
    for (i, o) in outputs.iter().enumerate() {
        let pose = parse_pose(&o.fields)
            .map_err(|e| Error::invalid(format!("{} / {} task {}: {e}", o.image_id, o.model_id, o.task_index)))?;
        let arm = o.arm_id.as_deref().unwrap_or("");
        steps.entry(((&o.image_id, &o.model_id), o.task_index, arm)).or_default().push((o.step.unwrap_or(0), i, pose));
    }
    let mut out: BTreeMap<Key<'_>, BTreeMap<u32, Arms>> = BTreeMap::new();
    for ((key, task, arm), mut traj) in steps {
        traj.sort_by_key(|&(step, i, _)| (step, i));
        if traj.windows(2).any(|w| w[0].0 == w[1].0 && outputs[w[0].1].step.is_some()) {
            return Err(Error::invalid(format!("{} / {} task {task}: repeated step", key.0, key.1)));
        }
        let traj = traj.into_iter().map(|(_, _, p)| p).collect();
        out.entry(key).or_default().entry(task).or_default().insert(arm.to_owned(), traj);
    }
    Ok(out)
}

/// Final poses compared for one task: the single arm, or the reference's
/// dominant arm on both images.
fn final_poses(reference: &Arms, distorted: &Arms, at: &dyn Fn(String) -> Error) -> Result<(Pose7, Pose7)> {
    let last = |t: &Vec<Pose7>| *t.last().expect("trajectories are non-empty");
    match (reference.len(), distorted.len()) {
        (1, 1) => Ok((last(reference.values().next().unwrap()), last(distorted.values().next().unwrap()))),
        (2, 2) => {
            let ids: Vec<&String> = reference.keys().collect();
            let arm = select_dominant_arm(&reference[ids[0]], &reference[ids[1]]).map_err(|e| at(e.to_string()))?;
            let id = ids[if arm == Arm::A { 0 } else { 1 }];
            let d = distorted.get(id).ok_or_else(|| at(format!("arm {id} missing on the distorted image")))?;
            Ok((last(&reference[id]), last(d)))
        }
        (r, d) => Err(at(format!("arm counts differ or exceed two ({r} reference, {d} distorted)"))),
    }
}

/// Decision scores: raw measures of every task are normalized together as
/// configured, then summed per image.
pub fn score_decision(manifest: &[PairRecord], outputs: &[PoseOutput], config: &DecisionConfig) -> Result<Scored> {
    let p = pairs(manifest)?;
    let index = index_poses(outputs)?;
    let models: BTreeSet<&str> = outputs.iter().map(|o| o.model_id.as_str()).collect();
    let mut warnings = orphan_warnings(outputs.iter().map(|o| o.image_id.as_str()), &p);
    // (row, model) blocks of five consecutive raw measures
    let mut blocks: Vec<(usize, &str)> = Vec::new();
    let mut raw: Vec<RawMeasures> = Vec::new();
    for (row, (rec, ref_name)) in p.rows.iter().enumerate() {
        for &model in &models {
            let Some(ref_tasks) = index.get(&(ref_name.as_str(), model)) else { continue };
            let Some(dist_tasks) = index.get(&(rec.image_id.as_str(), model)) else {
                warnings.push(format!("{} / {model}: no poses, skipped", rec.image_id));
                continue;
            };
            check_tasks(ref_tasks, ref_name, model)?;
            check_tasks(dist_tasks, &rec.image_id, model)?;
            for (task, ref_arms) in ref_tasks {
                let at = |m: String| Error::invalid(format!("{} / {model} task {task}: {m}", rec.image_id));
                let dist_arms = dist_tasks.get(task).ok_or_else(|| at("task missing".into()))?;
                let (r, d) = final_poses(ref_arms, dist_arms, &at)?;
                raw.push(raw_decision_measures(&r, &d, config.rotation).map_err(|e| at(e.to_string()))?);
            }
            blocks.push((row, model));
        }
    }
    let dims: Vec<DecisionDims> = match config.normalization {
        Normalization::Batch => normalize_decision_batch(&raw),
        Normalization::Fixed => raw.iter().map(|m| normalize_decision_fixed(m, config.max_distance_mm)).collect(),
        Normalization::Grouped => {
            let keys: Vec<String> = blocks
                .iter()
                .flat_map(|&(row, _)| {
                    let (rec, ref_name) = &p.rows[row];
                    let key = match config.group_by {
                        GroupBy::Category => rec.category.clone(),
                        GroupBy::Distortion => format!("{:02}", rec.id),
                        GroupBy::Level => rec.level.get().to_string(),
                        GroupBy::Reference => ref_name.clone(),
                    };
                    std::iter::repeat_n(key, TASKS_PER_IMAGE)
                })
                .collect();
            normalize_decision_grouped(&raw, &keys).map_err(Error::invalid)?
        }
    };
    let rows = blocks
        .iter()
        .zip(dims.chunks(TASKS_PER_IMAGE))
        .map(|(&(row, model), tasks)| {
            let image_id = &p.rows[row].0.image_id;
            let image_score = decision_image_score(tasks).map_err(|e| Error::invalid(format!("{image_id}: {e}")))?;
            let per_task: Vec<[f64; 3]> = tasks.iter().map(|d| [d.position, d.rotation, d.state]).collect();
            Ok(ScoreRow {
                image_id: image_id.clone(),
                model_id: model.to_owned(),
                dims: mean3(&per_task),
                task_score: image_score / TASKS_PER_IMAGE as f64,
                image_score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scored { table: ScoreTable { family: ScoreFamily::Decision, rows }, warnings })
}

pub fn score_execution(records: Vec<ExecutionRecord>) -> Result<Vec<(ExecutionRecord, f64)>> {
    records
        .into_iter()
        .map(|r| {
            let outcome = ExecutionOutcome { kind: r.kind, final_ref: r.final_ref, final_dist: r.final_dist };
            let s = execution_score(&outcome).map_err(|e| Error::invalid(format!("{}: {e}", r.image_id)))?;
            Ok((r, s))
        })
        .collect()
}
