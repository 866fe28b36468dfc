//! UR5 forward and inverse kinematics, step-pose composition and the
//! Execution score.
//!
//! The link table is stored in the modified layout: row `i` carries the twist
//! and length of the preceding link (`alpha_prev`, `a_prev`) together with the
//! offset `d` of joint `i`. [`dh_transform`] is the four-factor single-link
//! matrix `Rz(θ) Tz(d) Tx(a) Rx(α)`; the chain pairs each joint's `θ, d` with
//! the following row's `α, a`, which is the same product as the modified
//! convention `Rx(α_prev) Tx(a_prev) Rz(θ) Tz(d)` taken row by row.

mod ik;
mod transform;

use core::f64::consts::{FRAC_PI_2, PI, TAU};

pub use ik::{inverse_kinematics, Branch, IkSolution, IkSolutionSet, Singularity, Unreachable};
pub use transform::{rot_x, rot_y, rot_z, rpy, HomogeneousTransform, Mat3, Vec3, RIGID_TOL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KinematicsError {
    #[error("non-finite value")]
    NonFinite,
    #[error("rotation block is not rigid (residual {0:.3e})")]
    NotRigid(f64),
    #[error("bottom row of a homogeneous matrix must be 0 0 0 1")]
    BottomRow,
    #[error("link parameter {0} m is outside the physical range")]
    LinkRange(f64),
    #[error("link table does not have the UR5 twist pattern")]
    UnsupportedTable,
    #[error("failure outcome needs both final positions")]
    MissingFinalPositions,
    #[error("unknown execution outcome {0:?}")]
    UnknownOutcome(alloc::string::String),
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let r = libm::remainder(angle, TAU);
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Six joint angles in radians, each wrapped to `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointVector([f64; 6]);

impl JointVector {
    pub fn new(theta: [f64; 6]) -> Result<Self, KinematicsError> {
        if !theta.iter().all(|t| t.is_finite()) {
            return Err(KinematicsError::NonFinite);
        }
        Ok(Self(theta.map(wrap_angle)))
    }

    pub fn zeros() -> Self {
        Self([0.0; 6])
    }

    pub fn angles(&self) -> [f64; 6] {
        self.0
    }

    /// Largest per-joint angular distance, measured around the circle.
    pub fn max_angle_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| wrap_angle(a - b).abs()).fold(0.0, f64::max)
    }
}

/// Largest `|a|` or `|d|` accepted for a link, in metres.
pub const MAX_LINK: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DHRow {
    /// Twist of the preceding link, rad.
    pub alpha_prev: f64,
    /// Length of the preceding link, m.
    pub a_prev: f64,
    /// Joint offset, m.
    pub d: f64,
    /// Constant added to the joint variable, rad.
    pub theta_home: f64,
}

impl DHRow {
    pub fn new(alpha_prev: f64, a_prev: f64, d: f64, theta_home: f64) -> Result<Self, KinematicsError> {
        let row = Self { alpha_prev, a_prev, d, theta_home };
        row.validate()?;
        Ok(row)
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        if ![self.alpha_prev, self.a_prev, self.d, self.theta_home].iter().all(|v| v.is_finite()) {
            return Err(KinematicsError::NonFinite);
        }
        for v in [self.a_prev, self.d] {
            if v.abs() >= MAX_LINK {
                return Err(KinematicsError::LinkRange(v));
            }
        }
        Ok(())
    }
}

/// Link lengths and offsets of the UR5, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Ur5Dimensions {
    pub d1: f64,
    pub a2: f64,
    pub a3: f64,
    pub d4: f64,
    pub d5: f64,
    pub d6: f64,
}

impl Default for Ur5Dimensions {
    fn default() -> Self {
        Self { d1: 0.089159, a2: 0.425, a3: 0.39225, d4: 0.10915, d5: 0.09465, d6: 0.0823 }
    }
}

impl Ur5Dimensions {
    /// The same arm with `a2` and `a3` negated, as printed in some tables.
    pub fn negated_links(self) -> Self {
        Self { a2: -self.a2, a3: -self.a3, ..self }
    }
}

const UR5_TWISTS: [f64; 6] = [0.0, FRAC_PI_2, 0.0, 0.0, FRAC_PI_2, -FRAC_PI_2];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DHTable {
    rows: [DHRow; 6],
}

impl Default for DHTable {
    fn default() -> Self {
        Self::ur5(Ur5Dimensions::default())
    }
}

impl DHTable {
    pub fn new(rows: [DHRow; 6]) -> Result<Self, KinematicsError> {
        for r in &rows {
            r.validate()?;
        }
        Ok(Self { rows })
    }

    pub fn ur5(dims: Ur5Dimensions) -> Self {
        let Ur5Dimensions { d1, a2, a3, d4, d5, d6 } = dims;
        let a = [0.0, 0.0, a2, a3, 0.0, 0.0];
        let d = [d1, 0.0, 0.0, d4, d5, d6];
        Self {
            rows: core::array::from_fn(|i| DHRow { alpha_prev: UR5_TWISTS[i], a_prev: a[i], d: d[i], theta_home: 0.0 }),
        }
    }

    pub fn rows(&self) -> &[DHRow; 6] {
        &self.rows
    }

    /// Recovers the UR5 dimensions if the twists and zero entries match.
    pub fn ur5_dimensions(&self) -> Result<Ur5Dimensions, KinematicsError> {
        let r = &self.rows;
        let twist_ok = r.iter().zip(UR5_TWISTS).all(|(row, t)| (row.alpha_prev - t).abs() < 1e-12);
        let zeros_ok = [r[0].a_prev, r[1].a_prev, r[4].a_prev, r[5].a_prev, r[1].d, r[2].d].iter().all(|&v| v == 0.0);
        if !twist_ok || !zeros_ok {
            return Err(KinematicsError::UnsupportedTable);
        }
        Ok(Ur5Dimensions { d1: r[0].d, a2: r[2].a_prev, a3: r[3].a_prev, d4: r[3].d, d5: r[4].d, d6: r[5].d })
    }

    pub fn d6(&self) -> f64 {
        self.rows[5].d
    }
}

/// Single-link matrix `Rz(θ) Tz(d) Tx(a_prev) Rx(alpha_prev)` of one row.
pub fn dh_transform(row: &DHRow, theta: f64) -> HomogeneousTransform {
    let (st, ct) = libm::sincos(theta);
    let (sa, ca) = libm::sincos(row.alpha_prev);
    HomogeneousTransform::from_parts(
        [[ct, -st * ca, st * sa], [st, ct * ca, -ct * sa], [0.0, sa, ca]],
        [row.a_prev * ct, row.a_prev * st, row.d],
    )
}

/// Base-to-frame transforms `T_0^1 .. T_0^6`.
pub fn link_frames(joints: &JointVector, table: &DHTable) -> [HomogeneousTransform; 6] {
    let rows = &table.rows;
    let first = &rows[0];
    let mut t = HomogeneousTransform::from_parts(rot_x(first.alpha_prev), [first.a_prev, 0.0, 0.0]);
    core::array::from_fn(|i| {
        let (alpha_prev, a_prev) = rows.get(i + 1).map_or((0.0, 0.0), |n| (n.alpha_prev, n.a_prev));
        let link = DHRow { alpha_prev, a_prev, d: rows[i].d, theta_home: 0.0 };
        // frame i's own axes, before the next link's twist and length
        let frame = t * dh_transform(&DHRow { alpha_prev: 0.0, a_prev: 0.0, ..link }, joints.0[i] + rows[i].theta_home);
        t = t * dh_transform(&link, joints.0[i] + rows[i].theta_home);
        frame
    })
}

/// End-effector pose `T_0^6`.
pub fn forward_kinematics(joints: &JointVector, table: &DHTable) -> HomogeneousTransform {
    link_frames(joints, table)[5]
}

/// Origin of frame 5: `p - d6 · a`.
pub fn wrist_center(target: &HomogeneousTransform, d6: f64) -> Vec3 {
    let p = target.translation();
    let a = target.approach();
    [p[0] - d6 * a[0], p[1] - d6 * a[1], p[2] - d6 * a[2]]
}

/// `initial · delta`.
pub fn compose_pose(initial: &HomogeneousTransform, delta: &HomogeneousTransform) -> HomogeneousTransform {
    initial * delta
}

/// Millimetres per metre, for pose deltas given in mm.
pub const MM_PER_M: f64 = 1000.0;

/// Rigid delta from a position in mm and a roll-pitch-yaw rotation in rad.
pub fn delta_from_pose_fields(position_mm: Vec3, rotation_rpy: Vec3) -> HomogeneousTransform {
    let [roll, pitch, yaw] = rotation_rpy;
    HomogeneousTransform::from_xyz_rpy(position_mm.map(|v| v / MM_PER_M), roll, pitch, yaw)
}

/// Running products `initial · δ1 · … · δk` for each step `k`.
pub fn accumulate_trajectory(
    initial: &HomogeneousTransform,
    deltas: &[HomogeneousTransform],
) -> alloc::vec::Vec<HomogeneousTransform> {
    let mut cur = *initial;
    deltas
        .iter()
        .map(|d| {
            cur = compose_pose(&cur, d);
            cur
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExecutionKind {
    Success,
    Failure,
    EmergencyStop,
}

impl ExecutionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExecutionKind::Success => "success",
            ExecutionKind::Failure => "failure",
            ExecutionKind::EmergencyStop => "emergency_stop",
        }
    }
}

impl core::str::FromStr for ExecutionKind {
    type Err = KinematicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "success" => Ok(ExecutionKind::Success),
            "failure" => Ok(ExecutionKind::Failure),
            "emergency_stop" | "estop" => Ok(ExecutionKind::EmergencyStop),
            _ => Err(KinematicsError::UnknownOutcome(s.into())),
        }
    }
}

impl core::fmt::Display for ExecutionKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of running a task on the arm. Positions are end-effector origins in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExecutionOutcome {
    pub kind: ExecutionKind,
    pub final_ref: Option<Vec3>,
    pub final_dist: Option<Vec3>,
}

impl ExecutionOutcome {
    pub fn success() -> Self {
        Self { kind: ExecutionKind::Success, final_ref: None, final_dist: None }
    }

    pub fn emergency_stop() -> Self {
        Self { kind: ExecutionKind::EmergencyStop, final_ref: None, final_dist: None }
    }

    pub fn failure(final_ref: Vec3, final_dist: Vec3) -> Self {
        Self { kind: ExecutionKind::Failure, final_ref: Some(final_ref), final_dist: Some(final_dist) }
    }
}

pub const EXECUTION_MAX: f64 = 100.0;
const CM_PER_M: f64 = 100.0;

/// 100 for success, 0 for an emergency stop, otherwise 100 minus the final
/// position gap in centimetres, floored at 0.
pub fn execution_score(outcome: &ExecutionOutcome) -> Result<f64, KinematicsError> {
    match outcome.kind {
        ExecutionKind::Success => Ok(EXECUTION_MAX),
        ExecutionKind::EmergencyStop => Ok(0.0),
        ExecutionKind::Failure => {
            let (Some(r), Some(d)) = (outcome.final_ref, outcome.final_dist) else {
                return Err(KinematicsError::MissingFinalPositions);
            };
            if !r.iter().chain(&d).all(|v| v.is_finite()) {
                return Err(KinematicsError::NonFinite);
            }
            let gap_cm = transform::norm(&transform::sub(&r, &d)) * CM_PER_M;
            Ok((EXECUTION_MAX - gap_cm).max(0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-15);
        assert_eq!(wrap_angle(0.25), 0.25);
    }

    #[test]
    fn single_link_cases() {
        let id = dh_transform(&DHRow::new(0.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(id, HomogeneousTransform::IDENTITY);
        let lift = dh_transform(&DHRow::new(0.0, 0.0, 0.089159, 0.0).unwrap(), 0.0);
        assert_eq!(lift.translation(), [0.0, 0.0, 0.089159]);
        assert!(DHRow::new(0.0, 2.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn wrist_center_substitution() {
        let t = HomogeneousTransform::from_translation([0.3, 0.2, 0.5]);
        let wc = wrist_center(&t, 0.0823);
        assert!((wc[2] - 0.4177).abs() < 1e-15 && wc[0] == 0.3 && wc[1] == 0.2);
        assert_eq!(wrist_center(&t, 0.0), [0.3, 0.2, 0.5]);
    }

    #[test]
    fn execution_rubric() {
        assert_eq!(execution_score(&ExecutionOutcome::success()), Ok(100.0));
        assert_eq!(execution_score(&ExecutionOutcome::emergency_stop()), Ok(0.0));
        let s = execution_score(&ExecutionOutcome::failure([0.0; 3], [0.1, 0.0, 0.0])).unwrap();
        assert!((s - 90.0).abs() < 1e-12);
        assert_eq!(execution_score(&ExecutionOutcome::failure([0.0; 3], [2.0, 0.0, 0.0])), Ok(0.0));
        let bare = ExecutionOutcome { kind: ExecutionKind::Failure, final_ref: None, final_dist: None };
        assert_eq!(execution_score(&bare), Err(KinematicsError::MissingFinalPositions));
        assert_eq!("E-Stop".parse::<ExecutionKind>().ok(), None);
        assert_eq!("emergency stop".parse::<ExecutionKind>(), Ok(ExecutionKind::EmergencyStop));
    }

    #[test]
    fn table_round_trips_dimensions() {
        let dims = Ur5Dimensions::default().negated_links();
        assert_eq!(DHTable::ur5(dims).ur5_dimensions(), Ok(dims));
        let mut rows = *DHTable::default().rows();
        rows[2].alpha_prev = 0.3;
        assert_eq!(DHTable::new(rows).unwrap().ur5_dimensions(), Err(KinematicsError::UnsupportedTable));
    }
}
