use core::ops::Mul;

use super::KinematicsError;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Orthonormality and determinant tolerance for a rigid rotation block.
pub const RIGID_TOL: f64 = 1e-9;

pub(crate) fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

pub(crate) fn transpose(a: &Mat3) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[j][i] = v;
        }
    }
    m
}

pub(crate) fn mat_vec(a: &Mat3, v: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
}

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(v: &Vec3) -> f64 {
    libm::sqrt(dot(v, v))
}

pub(crate) fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn rot_x(angle: f64) -> Mat3 {
    let (s, c) = libm::sincos(angle);
    [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
}

pub fn rot_y(angle: f64) -> Mat3 {
    let (s, c) = libm::sincos(angle);
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn rot_z(angle: f64) -> Mat3 {
    let (s, c) = libm::sincos(angle);
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Roll-pitch-yaw about fixed axes: `Rz(yaw) * Ry(pitch) * Rx(roll)`.
pub fn rpy(roll: f64, pitch: f64, yaw: f64) -> Mat3 {
    mat_mul(&rot_z(yaw), &mat_mul(&rot_y(pitch), &rot_x(roll)))
}

/// Rigid 4x4 transform stored as a rotation block (columns n, s, a) and a
/// translation in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HomogeneousTransform {
    rotation: Mat3,
    translation: Vec3,
}

impl Default for HomogeneousTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl HomogeneousTransform {
    pub const IDENTITY: Self =
        Self { rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], translation: [0.0; 3] };

    /// Checks `RᵀR = I` and `det R = +1` within [`RIGID_TOL`].
    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self, KinematicsError> {
        let t = Self { rotation, translation };
        if !rotation.iter().flatten().chain(&translation).all(|v| v.is_finite()) {
            return Err(KinematicsError::NonFinite);
        }
        let residual = t.orthonormality_residual();
        if residual > RIGID_TOL || (det(&rotation) - 1.0).abs() > RIGID_TOL {
            return Err(KinematicsError::NotRigid(residual));
        }
        Ok(t)
    }

    /// Builds from a row-major 4x4 matrix; the bottom row must be `0 0 0 1`.
    pub fn from_matrix(m: [[f64; 4]; 4]) -> Result<Self, KinematicsError> {
        if m[3] != [0.0, 0.0, 0.0, 1.0] {
            return Err(KinematicsError::BottomRow);
        }
        let rotation = [0, 1, 2].map(|i| [m[i][0], m[i][1], m[i][2]]);
        Self::new(rotation, [m[0][3], m[1][3], m[2][3]])
    }

    /// Assembles without validation. Used for products of rigid factors.
    pub(crate) const fn from_parts(rotation: Mat3, translation: Vec3) -> Self {
        Self { rotation, translation }
    }

    pub fn from_rotation(rotation: Mat3) -> Self {
        Self::from_parts(rotation, [0.0; 3])
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Self::from_parts(Self::IDENTITY.rotation, translation)
    }

    /// Translation plus roll-pitch-yaw orientation.
    pub fn from_xyz_rpy(xyz: Vec3, roll: f64, pitch: f64, yaw: f64) -> Self {
        Self::from_parts(rpy(roll, pitch, yaw), xyz)
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    pub fn column(&self, j: usize) -> Vec3 {
        [0, 1, 2].map(|i| self.rotation[i][j])
    }

    /// Approach vector, the z-axis of the frame.
    pub fn approach(&self) -> Vec3 {
        self.column(2)
    }

    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let r = &self.rotation;
        let p = &self.translation;
        [
            [r[0][0], r[0][1], r[0][2], p[0]],
            [r[1][0], r[1][1], r[1][2], p[1]],
            [r[2][0], r[2][1], r[2][2], p[2]],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }

    pub fn inverse(&self) -> Self {
        let rt = transpose(&self.rotation);
        let p = mat_vec(&rt, &self.translation);
        Self::from_parts(rt, [-p[0], -p[1], -p[2]])
    }

    pub fn transform_point(&self, v: &Vec3) -> Vec3 {
        let r = mat_vec(&self.rotation, v);
        [r[0] + self.translation[0], r[1] + self.translation[1], r[2] + self.translation[2]]
    }

    /// Frobenius norm of `RᵀR - I`.
    pub fn orthonormality_residual(&self) -> f64 {
        let g = mat_mul(&transpose(&self.rotation), &self.rotation);
        let mut s = 0.0;
        for (i, row) in g.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let e = v - if i == j { 1.0 } else { 0.0 };
                s += e * e;
            }
        }
        libm::sqrt(s)
    }

    /// Euclidean distance between translations.
    pub fn position_error(&self, other: &Self) -> f64 {
        norm(&sub(&self.translation, &other.translation))
    }

    /// Frobenius norm of the difference of rotation blocks.
    pub fn rotation_error(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let e = self.rotation[i][j] - other.rotation[i][j];
                s += e * e;
            }
        }
        libm::sqrt(s)
    }

    /// Largest absolute entry difference of the 4x4 matrices.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let (a, b) = (self.to_matrix(), other.to_matrix());
        a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

impl Mul for HomogeneousTransform {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self::from_parts(mat_mul(&self.rotation, &rhs.rotation), self.transform_point(&rhs.translation))
    }
}

impl Mul for &HomogeneousTransform {
    type Output = HomogeneousTransform;

    fn mul(self, rhs: &HomogeneousTransform) -> HomogeneousTransform {
        *self * *rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_rigid_blocks() {
        let shear = [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(matches!(HomogeneousTransform::new(shear, [0.0; 3]), Err(KinematicsError::NotRigid(_))));
        let mirror = [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(HomogeneousTransform::new(mirror, [0.0; 3]).is_err());
        assert!(HomogeneousTransform::new(rpy(0.1, 0.2, 0.3), [1.0, 2.0, 3.0]).is_ok());
        let mut m = HomogeneousTransform::IDENTITY.to_matrix();
        m[3][0] = 1.0;
        assert_eq!(HomogeneousTransform::from_matrix(m), Err(KinematicsError::BottomRow));
    }

    #[test]
    fn inverse_cancels() {
        let t = HomogeneousTransform::from_xyz_rpy([0.3, -0.2, 0.5], 0.4, -1.1, 2.0);
        assert!((t * t.inverse()).max_abs_diff(&HomogeneousTransform::IDENTITY) < 1e-15);
    }
}
