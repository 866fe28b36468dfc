//! 8-bit RGB rasters and floating point planes.

use alloc::vec;
use alloc::vec::Vec;

/// Errors raised when constructing an [`ImageBuffer`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
    #[error("expected {expected} samples for a {width}x{height} RGB image, got {actual}")]
    LengthMismatch { width: u32, height: u32, expected: usize, actual: usize },
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
}

/// An 8-bit sRGB raster, three interleaved channels, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub const CHANNELS: usize = 3;

    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let expected = width as usize * height as usize * Self::CHANNELS;
        if data.len() != expected {
            return Err(ImageError::LengthMismatch { width, height, expected, actual: data.len() });
        }
        Ok(Self { width, height, data })
    }

    /// A uniformly colored image.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self, ImageError> {
        let n = width as usize * height as usize;
        let mut data = Vec::with_capacity(n * 3);
        for _ in 0..n {
            data.extend_from_slice(&rgb);
        }
        Self::new(width, height, data)
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Result<Self, ImageError> {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn same_dimensions(&self, other: &Self) -> Result<(), ImageError> {
        if self.width != other.width || self.height != other.height {
            return Err(ImageError::DimensionMismatch(self.width, self.height, other.width, other.height));
        }
        Ok(())
    }

    /// Splits into three planes of R, G, B in `[0, 255]`.
    pub fn to_rgb_planes(&self) -> [Plane; 3] {
        let n = self.pixel_count();
        let mut planes = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for (i, px) in self.data.chunks_exact(3).enumerate() {
            for c in 0..3 {
                planes[c][i] = px[c] as f64;
            }
        }
        let [r, g, b] = planes;
        [
            Plane::from_vec(self.width, self.height, r),
            Plane::from_vec(self.width, self.height, g),
            Plane::from_vec(self.width, self.height, b),
        ]
    }

    /// Reassembles an image from R, G, B planes, rounding and clamping.
    pub fn from_rgb_planes(planes: &[Plane; 3]) -> Self {
        let (w, h) = (planes[0].width, planes[0].height);
        let n = w as usize * h as usize;
        let mut data = Vec::with_capacity(n * 3);
        for i in 0..n {
            for plane in planes {
                data.push(to_u8(plane.data[i]));
            }
        }
        Self { width: w, height: h, data }
    }

    /// Full-range BT.601 YCbCr with Cb/Cr centered at 0.
    pub fn to_ycbcr_planes(&self) -> [Plane; 3] {
        let n = self.pixel_count();
        let (mut y, mut cb, mut cr) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for (i, px) in self.data.chunks_exact(3).enumerate() {
            let [yy, b, r] = rgb_to_ycbcr(px[0] as f64, px[1] as f64, px[2] as f64);
            y[i] = yy;
            cb[i] = b;
            cr[i] = r;
        }
        [
            Plane::from_vec(self.width, self.height, y),
            Plane::from_vec(self.width, self.height, cb),
            Plane::from_vec(self.width, self.height, cr),
        ]
    }

    pub fn from_ycbcr_planes(planes: &[Plane; 3]) -> Self {
        let (w, h) = (planes[0].width, planes[0].height);
        let n = w as usize * h as usize;
        let mut data = Vec::with_capacity(n * 3);
        for i in 0..n {
            let rgb = ycbcr_to_rgb(planes[0].data[i], planes[1].data[i], planes[2].data[i]);
            data.extend(rgb.iter().map(|&v| to_u8(v)));
        }
        Self { width: w, height: h, data }
    }

    /// BT.601 luma plane in `[0, 255]`.
    pub fn luma(&self) -> Plane {
        let data = self.data.chunks_exact(3).map(|px| luma(px[0] as f64, px[1] as f64, px[2] as f64)).collect();
        Plane::from_vec(self.width, self.height, data)
    }
}

pub const LUMA_R: f64 = 0.299;
pub const LUMA_G: f64 = 0.587;
pub const LUMA_B: f64 = 0.114;

#[inline]
pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    LUMA_R * r + LUMA_G * g + LUMA_B * b
}

#[inline]
pub fn rgb_to_ycbcr(r: f64, g: f64, b: f64) -> [f64; 3] {
    let y = luma(r, g, b);
    let cb = (b - y) / (2.0 * (1.0 - LUMA_B));
    let cr = (r - y) / (2.0 * (1.0 - LUMA_R));
    [y, cb, cr]
}

#[inline]
pub fn ycbcr_to_rgb(y: f64, cb: f64, cr: f64) -> [f64; 3] {
    let r = y + 2.0 * (1.0 - LUMA_R) * cr;
    let b = y + 2.0 * (1.0 - LUMA_B) * cb;
    let g = (y - LUMA_R * r - LUMA_B * b) / LUMA_G;
    [r, g, b]
}

#[inline]
pub fn to_u8(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    libm::round(v).clamp(0.0, 255.0) as u8
}

/// A single-channel floating point raster with clamp-to-edge sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(width: u32, height: u32, fill: f64) -> Self {
        Self { width, height, data: vec![fill; width as usize * height as usize] }
    }

    pub fn from_vec(width: u32, height: u32, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width as usize * height as usize);
        Self { width, height, data }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width as usize + x]
    }

    /// Sample with coordinates clamped into the raster.
    #[inline]
    pub fn clamped(&self, x: i64, y: i64) -> f64 {
        let xi = x.clamp(0, self.width as i64 - 1) as usize;
        let yi = y.clamp(0, self.height as i64 - 1) as usize;
        self.at(xi, yi)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane::from_vec(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Population standard deviation.
    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let var = self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64;
        libm::sqrt(var)
    }

    /// Separable convolution with a symmetric odd-length kernel, clamped borders.
    pub fn convolve_separable(&self, kernel: &[f64]) -> Plane {
        let r = (kernel.len() / 2) as i64;
        let (w, h) = (self.width as usize, self.height as usize);
        let mut tmp = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for (k, kv) in kernel.iter().enumerate() {
                    acc += kv * self.clamped(x as i64 + k as i64 - r, y as i64);
                }
                tmp[y * w + x] = acc;
            }
        }
        let tmp = Plane::from_vec(self.width, self.height, tmp);
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for (k, kv) in kernel.iter().enumerate() {
                    acc += kv * tmp.clamped(x as i64, y as i64 + k as i64 - r);
                }
                out[y * w + x] = acc;
            }
        }
        Plane::from_vec(self.width, self.height, out)
    }

    /// 2-D convolution with sparse taps `(dx, dy, weight)`, clamped borders.
    pub fn convolve_taps(&self, taps: &[(i64, i64, f64)]) -> Plane {
        let (w, h) = (self.width as usize, self.height as usize);
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                out[y * w + x] = taps.iter().map(|&(dx, dy, wt)| wt * self.clamped(x as i64 + dx, y as i64 + dy)).sum();
            }
        }
        Plane::from_vec(self.width, self.height, out)
    }
}

/// Normalized 1-D Gaussian kernel truncated at `radius`.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let mut k: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            libm::exp(-(d * d) / (2.0 * sigma * sigma))
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lengths() {
        assert!(matches!(ImageBuffer::new(2, 2, vec![0; 11]), Err(ImageError::LengthMismatch { expected: 12, .. })));
        assert!(ImageBuffer::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn ycbcr_round_trip_is_lossless_on_u8() {
        let img = ImageBuffer::from_fn(16, 16, |x, y| [(x * 16) as u8, (y * 16) as u8, ((x + y) * 8) as u8]).unwrap();
        let back = ImageBuffer::from_ycbcr_planes(&img.to_ycbcr_planes());
        assert_eq!(img, back);
    }

    #[test]
    fn gray_has_zero_chroma() {
        let [y, cb, cr] = rgb_to_ycbcr(77.0, 77.0, 77.0);
        assert!((y - 77.0).abs() < 1e-12);
        assert!(cb.abs() < 1e-12 && cr.abs() < 1e-12);
    }

    #[test]
    fn separable_blur_keeps_constant_planes() {
        let p = Plane::new(1, 1, 42.0);
        let out = p.convolve_separable(&gaussian_kernel(2.0, 6));
        assert!((out.data[0] - 42.0).abs() < 1e-9);
    }
}
