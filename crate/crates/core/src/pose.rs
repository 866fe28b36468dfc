//! Decision scoring of 7-DoF action outputs.
//!
//! A pose is three position components (mm), three rotation components (rad)
//! and a gripper state in `[0, 1]`. Each reference/distorted pair yields a raw
//! distance, a rotation cosine and a state gap; these are mapped to `[0, 1]`
//! so that 1 is most faithful, averaged per task and summed over five tasks.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::kinematics::rpy;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PoseError {
    #[error("expected at least 7 pose fields, got {0}")]
    TooFewFields(usize),
    #[error("pose field {index} is not a finite number")]
    BadField { index: usize },
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("expected {expected} task entries, got {got}")]
    TaskCount { expected: usize, got: usize },
    #[error("{field} = {value} is outside [0, 1]")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("{values} values but {groups} group keys")]
    GroupLength { values: usize, groups: usize },
}

pub const POSE_FIELDS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose7 {
    /// mm
    pub position: [f64; 3],
    /// rad
    pub rotation: [f64; 3],
    pub state: f64,
}

impl Pose7 {
    pub fn new(position: [f64; 3], rotation: [f64; 3], state: f64) -> Result<Self, PoseError> {
        let fields = [position[0], position[1], position[2], rotation[0], rotation[1], rotation[2], state];
        if let Some(index) = fields.iter().position(|v| !v.is_finite()) {
            return Err(PoseError::BadField { index });
        }
        if !(0.0..=1.0).contains(&state) {
            return Err(PoseError::OutOfRange { field: "state", value: state });
        }
        Ok(Self { position, rotation, state })
    }
}

/// Keeps the first seven fields, drops the rest and clamps the state into `[0, 1]`.
pub fn parse_pose(fields: &[f64]) -> Result<Pose7, PoseError> {
    if fields.len() < POSE_FIELDS {
        return Err(PoseError::TooFewFields(fields.len()));
    }
    if let Some(index) = fields[..POSE_FIELDS].iter().position(|v| !v.is_finite()) {
        return Err(PoseError::BadField { index });
    }
    Pose7::new([fields[0], fields[1], fields[2]], [fields[3], fields[4], fields[5]], fields[6].clamp(0.0, 1.0))
}

/// Like [`parse_pose`] for textual fields; a non-numeric field reports its index.
pub fn parse_pose_text<S: AsRef<str>>(fields: &[S]) -> Result<Pose7, PoseError> {
    if fields.len() < POSE_FIELDS {
        return Err(PoseError::TooFewFields(fields.len()));
    }
    let mut nums = [0.0; POSE_FIELDS];
    for (index, (slot, f)) in nums.iter_mut().zip(fields).enumerate() {
        *slot = f.as_ref().trim().parse().map_err(|_| PoseError::BadField { index })?;
    }
    parse_pose(&nums)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Arm {
    A,
    B,
}

/// Sum of segment lengths between consecutive positions, mm.
pub fn path_length(trajectory: &[Pose7]) -> f64 {
    trajectory.windows(2).map(|w| distance(&w[0].position, &w[1].position)).sum()
}

/// The arm with the longer positional path; ties go to arm A.
pub fn select_dominant_arm(arm_a: &[Pose7], arm_b: &[Pose7]) -> Result<Arm, PoseError> {
    if arm_a.is_empty() || arm_b.is_empty() {
        return Err(PoseError::EmptyTrajectory);
    }
    Ok(if path_length(arm_b) > path_length(arm_a) { Arm::B } else { Arm::A })
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    libm::sqrt((0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum())
}

fn norm(v: &[f64; 3]) -> f64 {
    distance(v, &[0.0; 3])
}

/// Rotation vectors shorter than this are treated as zero.
pub const ZERO_ROTATION: f64 = 1e-9;

/// What the rotation cosine compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RotationMode {
    /// The three rotation components as a vector.
    #[default]
    Vector,
    /// The gripper approach axis after applying the components as roll-pitch-yaw.
    ApproachAxis,
}

/// Cosine similarity with the zero-vector conventions: both zero gives 1,
/// exactly one zero gives 0.
pub fn rotation_cosine(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    match (na < ZERO_ROTATION, nb < ZERO_ROTATION) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        (false, false) => ((a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb)).clamp(-1.0, 1.0),
    }
}

fn approach_axis(r: &[f64; 3]) -> [f64; 3] {
    let m = rpy(r[0], r[1], r[2]);
    [m[0][2], m[1][2], m[2][2]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RawMeasures {
    /// mm
    pub position_distance: f64,
    /// `[-1, 1]`
    pub rotation_similarity: f64,
    /// `[0, 1]`
    pub state_difference: f64,
}

pub fn raw_decision_measures(
    reference: &Pose7,
    distorted: &Pose7,
    mode: RotationMode,
) -> Result<RawMeasures, PoseError> {
    for p in [reference, distorted] {
        Pose7::new(p.position, p.rotation, p.state)?;
    }
    let rotation_similarity = match mode {
        RotationMode::Vector => rotation_cosine(&reference.rotation, &distorted.rotation),
        RotationMode::ApproachAxis => {
            rotation_cosine(&approach_axis(&reference.rotation), &approach_axis(&distorted.rotation))
        }
    };
    Ok(RawMeasures {
        position_distance: distance(&reference.position, &distorted.position),
        rotation_similarity,
        state_difference: (reference.state - distorted.state).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecisionDims {
    pub position: f64,
    pub rotation: f64,
    pub state: f64,
}

impl DecisionDims {
    pub const PERFECT: Self = Self { position: 1.0, rotation: 1.0, state: 1.0 };

    pub fn new(position: f64, rotation: f64, state: f64) -> Result<Self, PoseError> {
        let d = Self { position, rotation, state };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), PoseError> {
        for (field, value) in [("position", self.position), ("rotation", self.rotation), ("state", self.state)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(PoseError::OutOfRange { field, value });
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        (self.position + self.rotation + self.state) / 3.0
    }
}

/// Reach diameter of the arm used as the fixed position bound, mm.
pub const DEFAULT_MAX_DISTANCE_MM: f64 = 1700.0;

/// `(hi - v) / (hi - lo)` or `(v - lo) / (hi - lo)`; a constant batch maps to 1.
fn min_max(values: &[f64], higher_is_better: bool) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    values
        .iter()
        .map(|&v| {
            if span <= 0.0 {
                1.0
            } else if higher_is_better {
                (v - lo) / span
            } else {
                (hi - v) / span
            }
        })
        .collect()
}

/// Min-max normalization of every dimension across the whole batch, oriented
/// so 1 is the most faithful pair.
pub fn normalize_decision_batch(batch: &[RawMeasures]) -> Vec<DecisionDims> {
    let pos = min_max(&batch.iter().map(|m| m.position_distance).collect::<Vec<_>>(), false);
    let rot = min_max(&batch.iter().map(|m| (m.rotation_similarity + 1.0) / 2.0).collect::<Vec<_>>(), true);
    let state = min_max(&batch.iter().map(|m| m.state_difference).collect::<Vec<_>>(), false);
    (0..batch.len()).map(|i| DecisionDims { position: pos[i], rotation: rot[i], state: state[i] }).collect()
}

/// Normalization of a single pair against fixed bounds.
pub fn normalize_decision_fixed(m: &RawMeasures, max_distance_mm: f64) -> DecisionDims {
    DecisionDims {
        position: (1.0 - m.position_distance / max_distance_mm).clamp(0.0, 1.0),
        rotation: ((m.rotation_similarity + 1.0) / 2.0).clamp(0.0, 1.0),
        state: (1.0 - m.state_difference).clamp(0.0, 1.0),
    }
}

/// Batch normalization applied separately within each group.
pub fn normalize_decision_grouped<K: Ord>(batch: &[RawMeasures], groups: &[K]) -> Result<Vec<DecisionDims>, PoseError> {
    if batch.len() != groups.len() {
        return Err(PoseError::GroupLength { values: batch.len(), groups: groups.len() });
    }
    let mut members: BTreeMap<&K, Vec<usize>> = BTreeMap::new();
    for (i, k) in groups.iter().enumerate() {
        members.entry(k).or_default().push(i);
    }
    let mut out = vec![DecisionDims::PERFECT; batch.len()];
    for idx in members.values() {
        let sub: Vec<_> = idx.iter().map(|&i| batch[i]).collect();
        for (&i, d) in idx.iter().zip(normalize_decision_batch(&sub)) {
            out[i] = d;
        }
    }
    Ok(out)
}

pub const TASKS_PER_IMAGE: usize = 5;

/// Sum over the five tasks of the mean of the three dimensions, `[0, 5]`.
pub fn decision_image_score(per_task: &[DecisionDims]) -> Result<f64, PoseError> {
    if per_task.len() != TASKS_PER_IMAGE {
        return Err(PoseError::TaskCount { expected: TASKS_PER_IMAGE, got: per_task.len() });
    }
    per_task.iter().try_for_each(DecisionDims::validate)?;
    Ok(per_task.iter().map(DecisionDims::mean).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pose(p: [f64; 3], r: [f64; 3], s: f64) -> Pose7 {
        Pose7::new(p, r, s).unwrap()
    }

    #[test]
    fn parsing_rules() {
        let p = parse_pose(&[10.0, 20.0, 30.0, 0.1, 0.2, 0.3, 0.5]).unwrap();
        assert_eq!(p, pose([10.0, 20.0, 30.0], [0.1, 0.2, 0.3], 0.5));
        let extra = parse_pose(&[1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 1.0, 99.0, 98.0]).unwrap();
        assert_eq!(extra.position, [1.0, 2.0, 3.0]);
        assert_eq!(parse_pose(&[0.0; 6]), Err(PoseError::TooFewFields(6)));
        assert_eq!(parse_pose(&[0.0, 0.0, 0.0, 0.0, f64::NAN, 0.0, 0.0]), Err(PoseError::BadField { index: 4 }));
        assert_eq!(parse_pose(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.7]).unwrap().state, 1.0);
        assert_eq!(parse_pose_text(&["1", "2", "x", "0", "0", "0", "0"]), Err(PoseError::BadField { index: 2 }));
    }

    #[test]
    fn arm_selection() {
        let still = [pose([0.0; 3], [0.0; 3], 0.0); 3];
        let moving = [pose([0.0; 3], [0.0; 3], 0.0), pose([100.0, 0.0, 0.0], [0.0; 3], 0.0)];
        assert_eq!(select_dominant_arm(&still, &moving), Ok(Arm::B));
        assert_eq!(select_dominant_arm(&still, &still), Ok(Arm::A));
        assert_eq!(select_dominant_arm(&[], &still), Err(PoseError::EmptyTrajectory));
    }

    #[test]
    fn raw_measure_examples() {
        let a = pose([0.0; 3], [0.1, 0.0, 0.0], 0.2);
        let m = raw_decision_measures(&a, &a, RotationMode::Vector).unwrap();
        assert_eq!((m.position_distance, m.rotation_similarity, m.state_difference), (0.0, 1.0, 0.0));
        let b = pose([3.0, 4.0, 0.0], [0.0, 0.1, 0.0], 0.2);
        let m = raw_decision_measures(&a, &b, RotationMode::Vector).unwrap();
        assert_eq!(m.position_distance, 5.0);
        assert_eq!(m.rotation_similarity, 0.0);
        assert_eq!(rotation_cosine(&[0.0; 3], &[0.0; 3]), 1.0);
        assert_eq!(rotation_cosine(&[0.0; 3], &[0.0, 0.0, 1.0]), 0.0);
    }

    #[test]
    fn approach_axis_ignores_roll_about_z() {
        let a = pose([0.0; 3], [0.0, 0.0, 0.3], 0.0);
        let b = pose([0.0; 3], [0.0, 0.0, -1.2], 0.0);
        let m = raw_decision_measures(&a, &b, RotationMode::ApproachAxis).unwrap();
        assert!((m.rotation_similarity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn batch_endpoints_and_degenerate_batch() {
        let raw = |d, r, s| RawMeasures { position_distance: d, rotation_similarity: r, state_difference: s };
        let out = normalize_decision_batch(&[raw(0.0, 1.0, 0.0), raw(40.0, -1.0, 1.0), raw(10.0, 0.0, 0.5)]);
        assert_eq!(out[0], DecisionDims::PERFECT);
        assert_eq!((out[1].position, out[1].rotation, out[1].state), (0.0, 0.0, 0.0));
        assert_eq!(out[2].position, 0.75);
        let flat = normalize_decision_batch(&[raw(3.0, 0.2, 0.1); 4]);
        assert!(flat.iter().all(|d| *d == DecisionDims::PERFECT));
        let fixed = normalize_decision_fixed(&raw(850.0, 0.0, 0.25), DEFAULT_MAX_DISTANCE_MM);
        assert_eq!((fixed.position, fixed.rotation, fixed.state), (0.5, 0.5, 0.75));
    }

    #[test]
    fn groups_normalize_independently() {
        let raw = |d| RawMeasures { position_distance: d, rotation_similarity: 1.0, state_difference: 0.0 };
        let out = normalize_decision_grouped(&[raw(0.0), raw(10.0), raw(100.0), raw(200.0)], &[1, 1, 2, 2]).unwrap();
        let pos: Vec<_> = out.iter().map(|d| d.position).collect();
        assert_eq!(pos, [1.0, 0.0, 1.0, 0.0]);
        assert!(normalize_decision_grouped(&[raw(0.0)], &[1, 2]).is_err());
    }

    #[test]
    fn image_score_bounds() {
        assert_eq!(decision_image_score(&[DecisionDims::PERFECT; 5]), Ok(5.0));
        let zero = DecisionDims::new(0.0, 0.0, 0.0).unwrap();
        assert_eq!(decision_image_score(&[zero; 5]), Ok(0.0));
        assert!(decision_image_score(&[zero; 4]).is_err());
    }
}
