//! Accumulates end-effector deltas from an initial joint configuration and
//! solves inverse kinematics at every step.

use std::path::Path;

use rqa_core::kinematics::{
    accumulate_trajectory, delta_from_pose_fields, forward_kinematics, inverse_kinematics, DHTable,
    HomogeneousTransform, JointVector, Singularity, Unreachable,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One delta: pose fields (position mm, roll-pitch-yaw rad, extras ignored)
/// or a row-major 4x4 rigid transform in metres.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Delta {
    Fields { fields: Vec<f64> },
    Matrix { matrix: [[f64; 4]; 4] },
}

impl Delta {
    fn transform(&self) -> std::result::Result<HomogeneousTransform, String> {
        match self {
            Delta::Fields { fields } => {
                if fields.len() < 6 || !fields[..6].iter().all(|v| v.is_finite()) {
                    return Err("fields need six finite numbers".into());
                }
                Ok(delta_from_pose_fields([fields[0], fields[1], fields[2]], [fields[3], fields[4], fields[5]]))
            }
            Delta::Matrix { matrix } => HomogeneousTransform::from_matrix(*matrix).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    /// Number of deltas applied, from 1.
    pub step: usize,
    pub matrix: [[f64; 4]; 4],
    pub ik_solutions: usize,
    pub singularity: Singularity,
    pub unreachable: Option<Unreachable>,
}

pub fn read_deltas(path: &Path) -> Result<Vec<HomogeneousTransform>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let at = |m: String| Error::parse(path, format!("line {}: {m}", i + 1));
            serde_json::from_str::<Delta>(l).map_err(|e| at(e.to_string()))?.transform().map_err(at)
        })
        .collect()
}

pub fn run_trajectory(
    initial: &JointVector,
    deltas: &[HomogeneousTransform],
    table: &DHTable,
) -> Result<Vec<TrajectoryPoint>> {
    let start = forward_kinematics(initial, table);
    accumulate_trajectory(&start, deltas)
        .into_iter()
        .enumerate()
        .map(|(step, pose)| {
            let set = inverse_kinematics(&pose, table).map_err(|e| Error::invalid(format!("step {step}: {e}")))?;
            Ok(TrajectoryPoint {
                step: step + 1,
                matrix: pose.to_matrix(),
                ik_solutions: set.len(),
                singularity: set.singularity,
                unreachable: set.unreachable,
            })
        })
        .collect()
}
