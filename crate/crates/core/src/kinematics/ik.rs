//! Closed-form UR5 inverse kinematics over the eight (σ1, σ3, σ5) branches.
//!
//! Steps, with frame 1 the shoulder frame `R1 = Rz(θ1) Rx(π/2)`, origin `(0, 0, d1)`:
//!
//! 1. Wrist centre `o5 = p - d6·a`. Its offset along `z1 = (s1, -c1, 0)` is
//!    `d4`, so `θ1 = atan2(y, x) + atan2(d4, σ1·sqrt(x² + y² - d4²))`.
//! 2. `z1·a = c5`, `z1·n = s5·c6`, `z1·s = -s5·s6`. `θ5 = atan2(σ5·|s5|, c5)`
//!    and `θ6 = atan2(-σ5·(z1·s), σ5·(z1·n))`.
//! 3. `R1ᵀ R6 (Rz(θ5) Rx(-π/2) Rz(θ6))ᵀ = Rz(θ2+θ3+θ4) Rx(π/2)` gives the
//!    planar sum `φ = θ2+θ3+θ4`.
//! 4. With `q = R1ᵀ(o5 - o1)`, removing the `d5` offset leaves the two-link
//!    point `P = (qx - d5·sin φ, qy + d5·cos φ)`. `c3` follows from squaring
//!    and adding, `θ2 = atan2(Py, Px) - atan2(a3·s3, a2 + a3·c3)` and
//!    `θ4 = φ - θ2 - θ3`.
//!
//! When `s5 = 0` the θ4/θ6 pair is coupled. θ4 is fixed at 0; link 3 and the
//! `d5` offset then form one rigid link of length `hypot(a3, d5)`, the planar
//! problem is solved for θ2, θ3 directly and θ6 is read off the remaining
//! rotation about `z6`.
//!
//! Every candidate is checked against forward kinematics before it is kept.

use alloc::vec::Vec;

use super::transform::{dot, mat_mul, mat_vec, rot_x, rot_z, sub, transpose, Mat3};
use super::{
    forward_kinematics, wrap_angle, wrist_center, DHTable, HomogeneousTransform, JointVector, KinematicsError,
};
use core::f64::consts::FRAC_PI_2;

pub const POSITION_TOL: f64 = 1e-6;
pub const ROTATION_TOL: f64 = 1e-6;
pub const SHOULDER_TOL: f64 = 1e-12;
pub const ELBOW_TOL: f64 = 1e-8;
pub const WRIST_TOL: f64 = 1e-8;
const DUPLICATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Singularity {
    None,
    Shoulder,
    Elbow,
    Wrist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Unreachable {
    Shoulder,
    Elbow,
}

impl core::fmt::Display for Unreachable {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Unreachable::Shoulder => "shoulder unreachable",
            Unreachable::Elbow => "elbow unreachable",
        })
    }
}

/// Branch signs for the shoulder, elbow and wrist choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Branch {
    pub shoulder: i8,
    pub elbow: i8,
    pub wrist: i8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IkSolution {
    pub joints: JointVector,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IkSolutionSet {
    pub solutions: Vec<IkSolution>,
    /// Strongest singularity met (wrist over elbow over shoulder).
    pub singularity: Singularity,
    /// Set when no solution exists.
    pub unreachable: Option<Unreachable>,
}

impl IkSolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Whether any solution lies within `tol` of `joints` on every axis.
    pub fn contains(&self, joints: &JointVector, tol: f64) -> bool {
        self.solutions.iter().any(|s| s.joints.max_angle_diff(joints) <= tol)
    }
}

struct Solver {
    table: DHTable,
    d1: f64,
    a2: f64,
    a3: f64,
    d4: f64,
    d5: f64,
    target: HomogeneousTransform,
    singularity: Singularity,
    elbow_missed: bool,
    out: Vec<IkSolution>,
}

impl Solver {
    fn flag(&mut self, s: Singularity) {
        self.singularity = self.singularity.max(s);
    }

    fn push(&mut self, raw: [f64; 6], branch: Branch) {
        let homes = self.table.rows().map(|r| r.theta_home);
        let Ok(joints) = JointVector::new(core::array::from_fn(|i| raw[i] - homes[i])) else {
            return;
        };
        let fk = forward_kinematics(&joints, &self.table);
        if fk.position_error(&self.target) >= POSITION_TOL || fk.rotation_error(&self.target) >= ROTATION_TOL {
            return;
        }
        if self.out.iter().any(|s| s.joints.max_angle_diff(&joints) < DUPLICATE_TOL) {
            return;
        }
        self.out.push(IkSolution { joints, branch });
    }

    /// Planar two-link solve `P = a2·e(θ2) + len·e(θ2 + θ3)` for one elbow sign.
    fn two_link(&mut self, px: f64, py: f64, len: f64, sigma3: f64) -> Option<(f64, f64)> {
        let c3 = (px * px + py * py - self.a2 * self.a2 - len * len) / (2.0 * self.a2 * len);
        if c3.abs() > 1.0 + ELBOW_TOL {
            self.elbow_missed = true;
            return None;
        }
        let c3 = c3.clamp(-1.0, 1.0);
        let s3_abs = libm::sqrt(1.0 - c3 * c3);
        if s3_abs < ELBOW_TOL {
            self.flag(Singularity::Elbow);
        }
        let s3 = sigma3 * s3_abs;
        let t3 = libm::atan2(s3, c3);
        let t2 = libm::atan2(py, px) - libm::atan2(len * s3, self.a2 + len * c3);
        Some((t2, t3))
    }

    fn solve(&mut self) {
        let wc = wrist_center(&self.target, self.table.d6());
        let r6 = *self.target.rotation();
        let (n, s, a) = (self.target.column(0), self.target.column(1), self.target.approach());
        let radicand = wc[0] * wc[0] + wc[1] * wc[1] - self.d4 * self.d4;
        if radicand.abs() < SHOULDER_TOL {
            self.flag(Singularity::Shoulder);
        }
        let root = libm::sqrt(radicand.max(0.0));
        for sigma1 in [1.0, -1.0] {
            let t1 = libm::atan2(wc[1], wc[0]) + libm::atan2(self.d4, sigma1 * root);
            let (s1, c1) = libm::sincos(t1);
            let z1 = [s1, -c1, 0.0];
            let r1 = mat_mul(&rot_z(t1), &rot_x(FRAC_PI_2));
            let q = mat_vec(&transpose(&r1), &sub(&wc, &[0.0, 0.0, self.d1]));
            let r16 = mat_mul(&transpose(&r1), &r6);
            let (zn, zs, c5) = (dot(&z1, &n), dot(&z1, &s), dot(&z1, &a));
            let s5_abs = libm::hypot(zn, zs);
            if s5_abs < WRIST_TOL {
                self.flag(Singularity::Wrist);
                self.solve_wrist_singular(t1, sigma1, &q, &r1, &r6, c5);
                continue;
            }
            for sigma5 in [1.0, -1.0] {
                let t5 = libm::atan2(sigma5 * s5_abs, c5);
                let t6 = libm::atan2(-sigma5 * zs, sigma5 * zn);
                let wrist = mat_mul(&mat_mul(&rot_z(t5), &rot_x(-FRAC_PI_2)), &rot_z(t6));
                let m = mat_mul(&r16, &transpose(&wrist));
                let phi = libm::atan2(m[1][0], m[0][0]);
                let (sp, cp) = libm::sincos(phi);
                let (px, py) = (q[0] - self.d5 * sp, q[1] + self.d5 * cp);
                for sigma3 in [1.0, -1.0] {
                    if let Some((t2, t3)) = self.two_link(px, py, self.a3, sigma3) {
                        let t4 = phi - t2 - t3;
                        let branch = Branch { shoulder: sigma1 as i8, elbow: sigma3 as i8, wrist: sigma5 as i8 };
                        self.push([t1, t2, t3, t4, t5, t6], branch);
                    }
                }
            }
        }
    }

    /// With `θ5 ∈ {0, π}` the rotation fixes only `φ = θ2 + θ3 + θ4` together
    /// with `θ6`. `φ` is chosen to put the frame-4 origin as close as possible
    /// to the middle of the elbow's reachable annulus; both roots are tried.
    fn solve_wrist_singular(&mut self, t1: f64, sigma1: f64, q: &[f64; 3], r1: &Mat3, r6: &Mat3, c5: f64) {
        let t5 = if c5 >= 0.0 { 0.0 } else { core::f64::consts::PI };
        let reach = libm::hypot(q[0], q[1]);
        let phis = if reach * self.d5.abs() < 1e-12 {
            [0.0, 0.0]
        } else {
            // |P4|^2 = reach^2 + d5^2 + 2 d5 reach cos(φ + γ)
            let want = self.a2.abs().max(self.a3.abs());
            let k = ((want * want - reach * reach - self.d5 * self.d5) / (2.0 * self.d5 * reach)).clamp(-1.0, 1.0);
            let gamma = libm::atan2(q[0], q[1]);
            let base = libm::acos(k);
            [base - gamma, -base - gamma]
        };
        let wrist_fixed = mat_mul(&rot_x(FRAC_PI_2), &mat_mul(&rot_z(t5), &rot_x(-FRAC_PI_2)));
        for phi in phis {
            let (sp, cp) = libm::sincos(phi);
            let (px, py) = (q[0] - self.d5 * sp, q[1] + self.d5 * cp);
            let rem = mat_mul(&transpose(&mat_mul(&mat_mul(r1, &rot_z(phi)), &wrist_fixed)), r6);
            let t6 = libm::atan2(rem[1][0], rem[0][0]);
            for sigma3 in [1.0, -1.0] {
                if let Some((t2, t3)) = self.two_link(px, py, self.a3, sigma3) {
                    let branch = Branch { shoulder: sigma1 as i8, elbow: sigma3 as i8, wrist: 1 };
                    self.push([t1, t2, t3, wrap_angle(phi - t2 - t3), t5, wrap_angle(t6)], branch);
                }
            }
        }
    }
}

/// All joint vectors that reach `target`, up to eight.
///
/// Unreachable targets give an empty set with a reason; only a non-rigid
/// target or a table without the UR5 structure is an error.
pub fn inverse_kinematics(target: &HomogeneousTransform, table: &DHTable) -> Result<IkSolutionSet, KinematicsError> {
    let target = HomogeneousTransform::new(*target.rotation(), target.translation())?;
    let dims = table.ur5_dimensions()?;
    let mut solver = Solver {
        table: *table,
        d1: dims.d1,
        a2: dims.a2,
        a3: dims.a3,
        d4: dims.d4,
        d5: dims.d5,
        target,
        singularity: Singularity::None,
        elbow_missed: false,
        out: Vec::new(),
    };
    let wc = wrist_center(&target, table.d6());
    let radicand = wc[0] * wc[0] + wc[1] * wc[1] - dims.d4 * dims.d4;
    if radicand < -SHOULDER_TOL {
        return Ok(IkSolutionSet {
            solutions: Vec::new(),
            singularity: Singularity::None,
            unreachable: Some(Unreachable::Shoulder),
        });
    }
    solver.solve();
    let unreachable = (solver.out.is_empty() && solver.elbow_missed).then_some(Unreachable::Elbow);
    Ok(IkSolutionSet { solutions: solver.out, singularity: solver.singularity, unreachable })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn home_pose_round_trip() {
        let table = DHTable::default();
        let q = JointVector::new([0.3, -1.2, 1.4, -0.5, 0.9, 2.1]).unwrap();
        let set = inverse_kinematics(&forward_kinematics(&q, &table), &table).unwrap();
        assert_eq!(set.len(), 8);
        assert_eq!(set.singularity, Singularity::None);
        assert!(set.contains(&q, 1e-6));
    }

    #[test]
    fn far_target_is_elbow_unreachable() {
        let t = HomogeneousTransform::from_translation([1.5, 0.3, 0.4]);
        let set = inverse_kinematics(&t, &DHTable::default()).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.unreachable, Some(Unreachable::Elbow));
        assert_eq!(alloc::format!("{}", Unreachable::Elbow), "elbow unreachable");
    }

    #[test]
    fn inside_shoulder_cylinder_is_unreachable() {
        let t = HomogeneousTransform::from_translation([0.01, 0.0, 0.0823 + 0.3]);
        let set = inverse_kinematics(&t, &DHTable::default()).unwrap();
        assert_eq!(set.unreachable, Some(Unreachable::Shoulder));
    }

    #[test]
    fn wrist_singular_targets_are_solved() {
        let table = DHTable::default();
        // the second pose has no solution with θ4 = 0
        for q in [
            [0.4, -0.9, 1.1, 0.7, 0.0, -0.3],
            [1.625898417197372, -0.1313793599732591, 0.11700405832668714, 3.003115461881709, 0.0, -2.220628387179617],
        ] {
            let target = forward_kinematics(&JointVector::new(q).unwrap(), &table);
            let set = inverse_kinematics(&target, &table).unwrap();
            assert_eq!(set.singularity, Singularity::Wrist);
            assert!(!set.is_empty());
            for s in &set.solutions {
                let fk = forward_kinematics(&s.joints, &table);
                assert!(fk.position_error(&target) < POSITION_TOL && fk.rotation_error(&target) < ROTATION_TOL);
            }
        }
    }
}
