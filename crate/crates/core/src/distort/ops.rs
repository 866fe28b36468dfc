use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::codec;
use super::DistortionKind;
use crate::image::{gaussian_kernel, to_u8, ImageBuffer, Plane};

pub(super) fn apply(img: &ImageBuffer, kind: DistortionKind, p: &[f64], rng: &mut ChaCha8Rng) -> ImageBuffer {
    use DistortionKind::*;
    match kind {
        GaussianBlur => map_rgb(img, |pl| gaussian_blur(pl, p[0])),
        LensBlur => map_rgb(img, |pl| disk_blur(pl, p[0] as usize)),
        MotionBlur => {
            let taps = motion_taps(p[0], rng.random::<f64>() * core::f64::consts::PI);
            map_rgb(img, |pl| pl.convolve_taps(&taps))
        }
        ColorDiffusion => map_chroma(img, |pl| gaussian_blur(pl, p[0])),
        ColorShift => {
            let angle = rng.random::<f64>() * 2.0 * core::f64::consts::PI;
            let (dcb, dcr) = (p[0] * libm::cos(angle), p[0] * libm::sin(angle));
            let [y, cb, cr] = img.to_ycbcr_planes();
            ImageBuffer::from_ycbcr_planes(&[y, cb.map(|v| v + dcb), cr.map(|v| v + dcr)])
        }
        ColorQuantization => {
            let q = p[0];
            map_rgb(img, |pl| pl.map(|v| quantize(v, q)))
        }
        Desaturation | Oversaturation => map_chroma(img, |pl| pl.map(|v| v * p[0])),
        Jpeg2000 => codec::wavelet_compress(img, p[0]),
        Jpeg => codec::jpeg_compress(img, p[0]),
        WhiteNoise => {
            let s = p[0];
            map_samples(img, |v| v + s * gauss(rng))
        }
        ChromaNoise => {
            let s = p[0];
            let [y, mut cb, mut cr] = img.to_ycbcr_planes();
            for (b, r) in cb.data.iter_mut().zip(cr.data.iter_mut()) {
                *b += s * gauss(rng);
                *r += s * gauss(rng);
            }
            ImageBuffer::from_ycbcr_planes(&[y, cb, cr])
        }
        ImpulseNoise => {
            let density = p[0];
            let mut out = img.clone();
            for y in 0..img.height() {
                for x in 0..img.width() {
                    if rng.random::<f64>() < density {
                        let v = if rng.random::<bool>() { 255 } else { 0 };
                        out.set_pixel(x, y, [v; 3]);
                    }
                }
            }
            out
        }
        UniformNoise => {
            let a = p[0];
            map_samples(img, |v| v + rng.random_range(-a..=a))
        }
        MultiplicativeNoise => {
            let s = p[0];
            map_samples(img, |v| v * (1.0 + s * gauss(rng)))
        }
        GaussianDenoise => {
            let noisy = noisy_planes(img, p[0], rng);
            ImageBuffer::from_rgb_planes(&noisy.map(|pl| gaussian_blur(&pl, p[1])))
        }
        MedianDenoise => {
            let noisy = noisy_planes(img, p[0], rng);
            ImageBuffer::from_rgb_planes(&noisy.map(|pl| median_filter(&pl, p[1] as usize)))
        }
        MeanBrighten => map_samples(img, |v| v + p[0]),
        MeanDarken => map_samples(img, |v| v - p[0]),
        MaximumBrighten | MaximumDarken => map_samples(img, |v| v * p[0]),
        Jitter => jitter(img, p[0] as i64, rng),
        NonEccentricityPatch => patch_swap(img, p[0], rng),
        Pixelate => pixelate(img, p[0] as usize),
        BlockInterpolation => map_rgb(img, |pl| block_interpolate(pl, p[0] as usize)),
        LostMacroBlock => drop_blocks(img, p[0], rng, |_| [128, 128, 128]),
        ColorBlock => drop_blocks(img, p[0], rng, |r| [r.random(), r.random(), r.random()]),
        GrayscaleQuantization => {
            let [y, cb, cr] = img.to_ycbcr_planes();
            ImageBuffer::from_ycbcr_planes(&[y.map(|v| quantize(v, p[0])), cb, cr])
        }
        SharpnessChange => map_rgb(img, |pl| {
            let blurred = gaussian_blur(pl, 1.0);
            let data = pl.data.iter().zip(&blurred.data).map(|(&v, &b)| v + p[0] * (v - b)).collect();
            Plane::from_vec(pl.width, pl.height, data)
        }),
        ContrastChange => {
            let m = img.luma().mean();
            map_samples(img, |v| m + p[0] * (v - m))
        }
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample::<f64, _>(StandardNormal)
}

fn map_rgb(img: &ImageBuffer, f: impl Fn(&Plane) -> Plane) -> ImageBuffer {
    let planes = img.to_rgb_planes();
    ImageBuffer::from_rgb_planes(&[f(&planes[0]), f(&planes[1]), f(&planes[2])])
}

fn map_chroma(img: &ImageBuffer, f: impl Fn(&Plane) -> Plane) -> ImageBuffer {
    let [y, cb, cr] = img.to_ycbcr_planes();
    let (cb, cr) = (f(&cb), f(&cr));
    ImageBuffer::from_ycbcr_planes(&[y, cb, cr])
}

/// Applies `f` to every sample in raster order (R, G, B interleaved).
fn map_samples(img: &ImageBuffer, mut f: impl FnMut(f64) -> f64) -> ImageBuffer {
    let data = img.as_raw().iter().map(|&v| to_u8(f(v as f64))).collect();
    ImageBuffer::new(img.width(), img.height(), data).expect("same shape")
}

fn noisy_planes(img: &ImageBuffer, sigma: f64, rng: &mut ChaCha8Rng) -> [Plane; 3] {
    let mut planes = img.to_rgb_planes();
    for i in 0..img.pixel_count() {
        for pl in planes.iter_mut() {
            pl.data[i] = (pl.data[i] + sigma * gauss(rng)).clamp(0.0, 255.0);
        }
    }
    planes
}

/// Uniform quantization to `levels` values spanning `[0, 255]`. Counts of the
/// form `2^k + 1` give nested grids, so fewer levels never lowers the error.
fn quantize(v: f64, levels: f64) -> f64 {
    let steps = levels - 1.0;
    libm::round(v.clamp(0.0, 255.0) / 255.0 * steps) * 255.0 / steps
}

pub(crate) fn gaussian_blur(pl: &Plane, sigma: f64) -> Plane {
    let radius = libm::ceil(3.0 * sigma).max(1.0) as usize;
    pl.convolve_separable(&gaussian_kernel(sigma, radius))
}

/// Uniform disk (defocus) kernel via per-row prefix sums.
fn disk_blur(pl: &Plane, radius: usize) -> Plane {
    let (w, h) = (pl.width as usize, pl.height as usize);
    let r = radius as i64;
    let spans: Vec<i64> = (-r..=r).map(|dy| libm::floor(libm::sqrt((r * r - dy * dy) as f64)) as i64).collect();
    let area: i64 = spans.iter().map(|s| 2 * s + 1).sum();
    // prefix[y][i] = sum of clamped row y over x in [-r, i - r - 1]
    let ext = w + 2 * radius;
    let mut prefix = vec![0.0; h * (ext + 1)];
    for y in 0..h {
        let row = &mut prefix[y * (ext + 1)..(y + 1) * (ext + 1)];
        for i in 0..ext {
            row[i + 1] = row[i] + pl.clamped(i as i64 - r, y as i64);
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &s) in spans.iter().enumerate() {
                let yy = (y as i64 + k as i64 - r).clamp(0, h as i64 - 1) as usize;
                let row = &prefix[yy * (ext + 1)..];
                let lo = (x as i64 + r - s) as usize;
                let hi = (x as i64 + r + s + 1) as usize;
                acc += row[hi] - row[lo];
            }
            out[y * w + x] = acc / area as f64;
        }
    }
    Plane::from_vec(pl.width, pl.height, out)
}

/// Samples per pixel of line length when rasterizing the motion path.
const MOTION_OVERSAMPLE: usize = 8;

/// Anti-aliased line segment of `length` pixels centred on the origin, each
/// sample splatted bilinearly onto its four neighbours.
fn motion_taps(length: f64, angle: f64) -> Vec<(i64, i64, f64)> {
    let length = length.max(1.0);
    let n = libm::ceil(length * MOTION_OVERSAMPLE as f64) as usize;
    let (c, s) = (libm::cos(angle), libm::sin(angle));
    let mut taps: Vec<(i64, i64, f64)> = Vec::new();
    let mut add = |dx: i64, dy: i64, w: f64| {
        if w <= 0.0 {
            return;
        }
        match taps.iter_mut().find(|(x, y, _)| *x == dx && *y == dy) {
            Some(tap) => tap.2 += w,
            None => taps.push((dx, dy, w)),
        }
    };
    for i in 0..n {
        let t = ((i as f64 + 0.5) / n as f64 - 0.5) * (length - 1.0);
        let (px, py) = (t * c, t * s);
        let (x0, y0) = (libm::floor(px), libm::floor(py));
        let (fx, fy) = (px - x0, py - y0);
        let (x0, y0) = (x0 as i64, y0 as i64);
        add(x0, y0, (1.0 - fx) * (1.0 - fy));
        add(x0 + 1, y0, fx * (1.0 - fy));
        add(x0, y0 + 1, (1.0 - fx) * fy);
        add(x0 + 1, y0 + 1, fx * fy);
    }
    let total: f64 = taps.iter().map(|t| t.2).sum();
    taps.iter_mut().for_each(|t| t.2 /= total);
    taps
}

fn median_filter(pl: &Plane, radius: usize) -> Plane {
    let r = radius as i64;
    let mut window = Vec::with_capacity((2 * radius + 1) * (2 * radius + 1));
    let mut out = Vec::with_capacity(pl.data.len());
    for y in 0..pl.height as i64 {
        for x in 0..pl.width as i64 {
            window.clear();
            for dy in -r..=r {
                for dx in -r..=r {
                    window.push(pl.clamped(x + dx, y + dy));
                }
            }
            let mid = window.len() / 2;
            window.select_nth_unstable_by(mid, f64::total_cmp);
            out.push(window[mid]);
        }
    }
    Plane::from_vec(pl.width, pl.height, out)
}

fn jitter(img: &ImageBuffer, max: i64, rng: &mut ChaCha8Rng) -> ImageBuffer {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut out = img.clone();
    for y in 0..h {
        for x in 0..w {
            let sx = (x + rng.random_range(-max..=max)).clamp(0, w - 1);
            let sy = (y + rng.random_range(-max..=max)).clamp(0, h - 1);
            out.set_pixel(x as u32, y as u32, img.pixel(sx as u32, sy as u32));
        }
    }
    out
}

fn block_size(img: &ImageBuffer) -> u32 {
    (img.width().min(img.height()) / 16).max(2).min(img.width().min(img.height()))
}

/// Copies small patches from nearby offsets over the image.
fn patch_swap(img: &ImageBuffer, coverage: f64, rng: &mut ChaCha8Rng) -> ImageBuffer {
    let ps = block_size(img) as i64;
    let (w, h) = (img.width() as i64, img.height() as i64);
    let count = libm::ceil(coverage * (w * h) as f64 / (ps * ps) as f64) as usize;
    let mut out = img.clone();
    for _ in 0..count {
        let dx0 = rng.random_range(0..=(w - ps).max(0));
        let dy0 = rng.random_range(0..=(h - ps).max(0));
        let ox = rng.random_range(-ps..=ps);
        let oy = rng.random_range(-ps..=ps);
        for y in dy0..(dy0 + ps).min(h) {
            for x in dx0..(dx0 + ps).min(w) {
                let sx = (x + ox).clamp(0, w - 1);
                let sy = (y + oy).clamp(0, h - 1);
                out.set_pixel(x as u32, y as u32, img.pixel(sx as u32, sy as u32));
            }
        }
    }
    out
}

fn pixelate(img: &ImageBuffer, block: usize) -> ImageBuffer {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let b = block.max(1);
    let mut out = img.clone();
    for by in (0..h).step_by(b) {
        for bx in (0..w).step_by(b) {
            let (ye, xe) = ((by + b).min(h), (bx + b).min(w));
            let mut acc = [0.0f64; 3];
            for y in by..ye {
                for x in bx..xe {
                    let px = img.pixel(x as u32, y as u32);
                    for c in 0..3 {
                        acc[c] += px[c] as f64;
                    }
                }
            }
            let n = ((ye - by) * (xe - bx)) as f64;
            let avg = acc.map(|v| to_u8(v / n));
            for y in by..ye {
                for x in bx..xe {
                    out.set_pixel(x as u32, y as u32, avg);
                }
            }
        }
    }
    out
}

/// Block-average downsampling followed by bilinear upsampling.
fn block_interpolate(pl: &Plane, factor: usize) -> Plane {
    let (w, h) = (pl.width as usize, pl.height as usize);
    let f = factor.max(1);
    let (sw, sh) = (w.div_ceil(f), h.div_ceil(f));
    let mut small = vec![0.0; sw * sh];
    for sy in 0..sh {
        for sx in 0..sw {
            let (ye, xe) = (((sy + 1) * f).min(h), ((sx + 1) * f).min(w));
            let mut acc = 0.0;
            for y in sy * f..ye {
                for x in sx * f..xe {
                    acc += pl.at(x, y);
                }
            }
            small[sy * sw + sx] = acc / ((ye - sy * f) * (xe - sx * f)) as f64;
        }
    }
    let small = Plane::from_vec(sw as u32, sh as u32, small);
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let fy = (y as f64 + 0.5) / f as f64 - 0.5;
        let y0 = libm::floor(fy);
        let ty = fy - y0;
        for x in 0..w {
            let fx = (x as f64 + 0.5) / f as f64 - 0.5;
            let x0 = libm::floor(fx);
            let tx = fx - x0;
            let (xi, yi) = (x0 as i64, y0 as i64);
            let top = small.clamped(xi, yi) * (1.0 - tx) + small.clamped(xi + 1, yi) * tx;
            let bot = small.clamped(xi, yi + 1) * (1.0 - tx) + small.clamped(xi + 1, yi + 1) * tx;
            out[y * w + x] = top * (1.0 - ty) + bot * ty;
        }
    }
    Plane::from_vec(pl.width, pl.height, out)
}

/// Replaces a random fraction of grid blocks with a fill color.
fn drop_blocks(
    img: &ImageBuffer,
    fraction: f64,
    rng: &mut ChaCha8Rng,
    mut fill: impl FnMut(&mut ChaCha8Rng) -> [u8; 3],
) -> ImageBuffer {
    let bs = block_size(img) as usize;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (gw, gh) = (w.div_ceil(bs), h.div_ceil(bs));
    let mut cells: Vec<usize> = (0..gw * gh).collect();
    let count = (libm::ceil(fraction * cells.len() as f64) as usize).min(cells.len());
    for i in 0..count {
        let j = rng.random_range(i..cells.len());
        cells.swap(i, j);
    }
    let mut out = img.clone();
    for &cell in &cells[..count] {
        let color = fill(rng);
        let (cx, cy) = (cell % gw * bs, cell / gw * bs);
        for y in cy..(cy + bs).min(h) {
            for x in cx..(cx + bs).min(w) {
                out.set_pixel(x as u32, y as u32, color);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(w: u32, h: u32, f: impl Fn(u32, u32) -> f64) -> Plane {
        let mut data = Vec::new();
        for y in 0..h {
            for x in 0..w {
                data.push(f(x, y));
            }
        }
        Plane::from_vec(w, h, data)
    }

    #[test]
    fn disk_blur_matches_direct_sum() {
        let pl = plane(9, 7, |x, y| ((x * 7 + y * 13) % 17) as f64);
        let r = 3i64;
        let fast = disk_blur(&pl, 3);
        for y in 0..7i64 {
            for x in 0..9i64 {
                let (mut acc, mut n) = (0.0, 0);
                for dy in -r..=r {
                    for dx in -r..=r {
                        if dx * dx + dy * dy <= r * r {
                            acc += pl.clamped(x + dx, y + dy);
                            n += 1;
                        }
                    }
                }
                let got = fast.at(x as usize, y as usize);
                assert!((got - acc / n as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn motion_taps_sum_to_one() {
        for angle in [0.0, 0.3, 1.2, 2.9] {
            let taps = motion_taps(15.0, angle);
            let s: f64 = taps.iter().map(|t| t.2).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn block_interpolation_keeps_constants() {
        let pl = Plane::new(13, 5, 99.0);
        let out = block_interpolate(&pl, 4);
        assert!(out.data.iter().all(|v| (v - 99.0).abs() < 1e-9));
    }

    #[test]
    fn quantize_hits_endpoints() {
        assert_eq!(quantize(0.0, 3.0), 0.0);
        assert_eq!(quantize(255.0, 3.0), 255.0);
        assert_eq!(quantize(120.0, 3.0), 127.5);
    }
}
