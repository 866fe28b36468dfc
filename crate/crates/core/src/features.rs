//! Low-level attribute features of a single image.

use crate::image::{ImageBuffer, Plane};

/// Luminance, contrast, chrominance, blur and spatial information.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LowLevelFeatures {
    /// Mean BT.601 luma, `[0, 255]`.
    pub luminance: f64,
    /// RMS contrast: standard deviation of luma.
    pub contrast: f64,
    /// Mean chroma magnitude `sqrt(Cb^2 + Cr^2)`.
    pub chrominance: f64,
    /// Variance of the Laplacian of luma scaled to `[0, 1]`; higher is sharper.
    pub blur: f64,
    /// Standard deviation of the Sobel gradient magnitude of luma.
    pub spatial_information: f64,
}

const LAPLACIAN: [(i64, i64, f64); 5] = [(0, 0, -4.0), (-1, 0, 1.0), (1, 0, 1.0), (0, -1, 1.0), (0, 1, 1.0)];

pub fn low_level_features(image: &ImageBuffer) -> LowLevelFeatures {
    let y = image.luma();
    let [_, cb, cr] = image.to_ycbcr_planes();
    let chrominance =
        cb.data.iter().zip(&cr.data).map(|(b, r)| libm::sqrt(b * b + r * r)).sum::<f64>() / cb.data.len() as f64;
    let blur = y.map(|v| v / 255.0).convolve_taps(&LAPLACIAN);
    LowLevelFeatures {
        luminance: y.mean(),
        contrast: y.std_dev(),
        chrominance,
        blur: variance(&blur),
        spatial_information: sobel_magnitude(&y).std_dev(),
    }
}

fn variance(p: &Plane) -> f64 {
    let s = p.std_dev();
    s * s
}

fn sobel_magnitude(p: &Plane) -> Plane {
    let gx = p.convolve_taps(&[(-1, -1, -1.0), (1, -1, 1.0), (-1, 0, -2.0), (1, 0, 2.0), (-1, 1, -1.0), (1, 1, 1.0)]);
    let gy = p.convolve_taps(&[(-1, -1, -1.0), (0, -1, -2.0), (1, -1, -1.0), (-1, 1, 1.0), (0, 1, 2.0), (1, 1, 1.0)]);
    let data = gx.data.iter().zip(&gy.data).map(|(a, b)| libm::sqrt(a * a + b * b)).collect();
    Plane::from_vec(p.width, p.height, data)
}
