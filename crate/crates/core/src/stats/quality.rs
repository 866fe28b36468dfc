//! Full-reference baselines.

use alloc::vec::Vec;

use super::StatsError;
use crate::image::{gaussian_kernel, ImageBuffer, Plane};

/// Value reported for identical images.
pub const PSNR_CAP_DB: f64 = 100.0;

/// Peak signal-to-noise ratio over all RGB samples, capped at [`PSNR_CAP_DB`].
pub fn psnr(reference: &ImageBuffer, distorted: &ImageBuffer) -> Result<f64, StatsError> {
    reference.same_dimensions(distorted)?;
    let (a, b) = (reference.as_raw(), distorted.as_raw());
    let sq: u64 = a.iter().zip(b).map(|(&p, &q)| (p as i64 - q as i64).pow(2) as u64).sum();
    if sq == 0 {
        return Ok(PSNR_CAP_DB);
    }
    let mse = sq as f64 / a.len() as f64;
    Ok((10.0 * libm::log10(255.0 * 255.0 / mse)).min(PSNR_CAP_DB))
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Mean structural similarity on luma with an 11x11 Gaussian window
/// (σ = 1.5), averaged over windows that lie fully inside the image.
pub fn ssim(reference: &ImageBuffer, distorted: &ImageBuffer) -> Result<f64, StatsError> {
    reference.same_dimensions(distorted)?;
    let (w, h) = (reference.width() as usize, reference.height() as usize);
    if w.min(h) < SSIM_WINDOW {
        return Err(StatsError::ImageTooSmall { width: w, height: h, min: SSIM_WINDOW });
    }
    ssim_planes(&reference.luma(), &distorted.luma(), 255.0)
}

/// SSIM between two equally sized planes with the given dynamic range.
pub fn ssim_planes(x: &Plane, y: &Plane, data_range: f64) -> Result<f64, StatsError> {
    let (w, h) = (x.width as usize, x.height as usize);
    if w.min(h) < SSIM_WINDOW {
        return Err(StatsError::ImageTooSmall { width: w, height: h, min: SSIM_WINDOW });
    }
    let r = SSIM_WINDOW / 2;
    let k = gaussian_kernel(SSIM_SIGMA, r);
    let prod = |a: &Plane, b: &Plane| {
        Plane::from_vec(a.width, a.height, a.data.iter().zip(&b.data).map(|(p, q)| p * q).collect())
    };
    let [mx, my, xx, yy, xy] =
        [x.clone(), y.clone(), prod(x, x), prod(y, y), prod(x, y)].map(|p| p.convolve_separable(&k));
    let c1 = K1 * data_range * K1 * data_range;
    let c2 = K2 * data_range * K2 * data_range;
    let mut vals = Vec::with_capacity((w - 2 * r) * (h - 2 * r));
    for py in r..h - r {
        for px in r..w - r {
            let i = py * w + px;
            let (ux, uy) = (mx.data[i], my.data[i]);
            let vx = xx.data[i] - ux * ux;
            let vy = yy.data[i] - uy * uy;
            let cov = xy.data[i] - ux * uy;
            vals.push(((2.0 * ux * uy + c1) * (2.0 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2)));
        }
    }
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}
