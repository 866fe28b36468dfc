//! Lossy stages of block-DCT and wavelet codecs, run in memory.
//!
//! Entropy coding is lossless and has no effect on pixels, so only the
//! transforms, quantizers and chroma subsampling are reproduced.

use alloc::vec;
use alloc::vec::Vec;

use crate::image::{ImageBuffer, Plane};

const LUMA_QT: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, 12, 12, 14, 19, 26, 58, 60, 55, 14, 13, 16, 24, 40, 57, 69, 56, 14, 17, 22, 29, 51,
    87, 80, 62, 18, 22, 37, 56, 68, 109, 103, 77, 24, 35, 55, 64, 81, 104, 113, 92, 49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
];

const CHROMA_QT: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99,
];

/// IJG quality scaling of a base table.
fn scaled_table(base: &[u16; 64], quality: f64) -> [f64; 64] {
    let q = quality.clamp(1.0, 100.0);
    let scale = if q < 50.0 { 5000.0 / q } else { 200.0 - 2.0 * q };
    base.map(|b| libm::floor((b as f64 * scale + 50.0) / 100.0).clamp(1.0, 255.0))
}

fn dct_basis() -> [[f64; 8]; 8] {
    let mut m = [[0.0; 8]; 8];
    for (k, row) in m.iter_mut().enumerate() {
        let a = if k == 0 { libm::sqrt(1.0 / 8.0) } else { libm::sqrt(2.0 / 8.0) };
        for (n, v) in row.iter_mut().enumerate() {
            *v = a * libm::cos(core::f64::consts::PI * (2 * n + 1) as f64 * k as f64 / 16.0);
        }
    }
    m
}

#[allow(clippy::needless_range_loop)]
fn quantize_blocks(pl: &mut Plane, table: &[f64; 64], basis: &[[f64; 8]; 8]) {
    let (w, h) = (pl.width as usize, pl.height as usize);
    let mut block = [[0.0; 8]; 8];
    let mut tmp = [[0.0; 8]; 8];
    for by in (0..h).step_by(8) {
        for bx in (0..w).step_by(8) {
            for (y, row) in block.iter_mut().enumerate() {
                for (x, v) in row.iter_mut().enumerate() {
                    *v = pl.clamped((bx + x) as i64, (by + y) as i64) - 128.0;
                }
            }
            // forward: C * B * C^T
            for k in 0..8 {
                for x in 0..8 {
                    tmp[k][x] = (0..8).map(|n| basis[k][n] * block[n][x]).sum();
                }
            }
            for k in 0..8 {
                for l in 0..8 {
                    let c: f64 = (0..8).map(|n| tmp[k][n] * basis[l][n]).sum();
                    let q = table[k * 8 + l];
                    block[k][l] = libm::round(c / q) * q;
                }
            }
            // inverse: C^T * Q * C
            for n in 0..8 {
                for l in 0..8 {
                    tmp[n][l] = (0..8).map(|k| basis[k][n] * block[k][l]).sum();
                }
            }
            for y in 0..8 {
                for x in 0..8 {
                    if by + y < h && bx + x < w {
                        let v: f64 = (0..8).map(|l| tmp[y][l] * basis[l][x]).sum();
                        pl.data[(by + y) * w + bx + x] = v + 128.0;
                    }
                }
            }
        }
    }
}

/// 2x2 box average of a plane.
fn downsample(pl: &Plane) -> Plane {
    let (w, h) = (pl.width as usize, pl.height as usize);
    let (sw, sh) = (w.div_ceil(2), h.div_ceil(2));
    let mut small = Plane::new(sw as u32, sh as u32, 0.0);
    for sy in 0..sh {
        for sx in 0..sw {
            let cells = [(2 * sx, 2 * sy), (2 * sx + 1, 2 * sy), (2 * sx, 2 * sy + 1), (2 * sx + 1, 2 * sy + 1)];
            let inside: Vec<_> = cells.iter().filter(|(x, y)| *x < w && *y < h).collect();
            small.data[sy * sw + sx] = inside.iter().map(|(x, y)| pl.at(*x, *y)).sum::<f64>() / inside.len() as f64;
        }
    }
    small
}

/// Bilinear upsampling by 2 from sample centres, as in libjpeg's fancy upsampling.
fn upsample(small: &Plane, w: usize, h: usize) -> Plane {
    let mut out = Plane::new(w as u32, h as u32, 0.0);
    for y in 0..h {
        let fy = (y as f64 - 0.5) / 2.0;
        let y0 = libm::floor(fy);
        let ty = fy - y0;
        for x in 0..w {
            let fx = (x as f64 - 0.5) / 2.0;
            let x0 = libm::floor(fx);
            let tx = fx - x0;
            let (x0, y0) = (x0 as i64, y0 as i64);
            let top = small.clamped(x0, y0) * (1.0 - tx) + small.clamped(x0 + 1, y0) * tx;
            let bottom = small.clamped(x0, y0 + 1) * (1.0 - tx) + small.clamped(x0 + 1, y0 + 1) * tx;
            out.data[y * w + x] = top * (1.0 - ty) + bottom * ty;
        }
    }
    out
}

/// Baseline JPEG with 4:2:0 chroma: the chroma planes are quantized at half
/// resolution.
pub(super) fn jpeg_compress(img: &ImageBuffer, quality: f64) -> ImageBuffer {
    let basis = dct_basis();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let [mut y, cb, cr] = img.to_ycbcr_planes();
    let lt = scaled_table(&LUMA_QT, quality);
    let ct = scaled_table(&CHROMA_QT, quality);
    quantize_blocks(&mut y, &lt, &basis);
    let [cb, cr] = [cb, cr].map(|c| {
        let mut s = downsample(&c).map(|v| v + 128.0);
        quantize_blocks(&mut s, &ct, &basis);
        upsample(&s.map(|v| v - 128.0), w, h)
    });
    ImageBuffer::from_ycbcr_planes(&[y, cb, cr])
}

/// One level of LeGall 5/3 lifting on a strided line, whole-sample symmetric extension.
fn lift_forward(x: &mut [f64], scratch: &mut Vec<f64>) {
    let n = x.len();
    if n < 2 {
        return;
    }
    let (ne, no) = (n.div_ceil(2), n / 2);
    let at = |x: &[f64], i: usize| if i < n { x[i] } else { x[2 * (n - 1) - i] };
    let d: Vec<f64> = (0..no).map(|i| x[2 * i + 1] - 0.5 * (x[2 * i] + at(x, 2 * i + 2))).collect();
    let dl = |i: isize| d[i.clamp(0, no as isize - 1) as usize];
    scratch.clear();
    for i in 0..ne {
        scratch.push(x[2 * i] + 0.25 * (dl(i as isize - 1) + dl(i as isize)));
    }
    scratch.extend_from_slice(&d);
    x.copy_from_slice(scratch);
}

fn lift_inverse(x: &mut [f64], scratch: &mut Vec<f64>) {
    let n = x.len();
    if n < 2 {
        return;
    }
    let (ne, no) = (n.div_ceil(2), n / 2);
    let (s, d) = x.split_at(ne);
    let dl = |i: isize| d[i.clamp(0, no as isize - 1) as usize];
    scratch.clear();
    scratch.resize(n, 0.0);
    for i in 0..ne {
        scratch[2 * i] = s[i] - 0.25 * (dl(i as isize - 1) + dl(i as isize));
    }
    for i in 0..no {
        let right = if 2 * i + 2 < n { scratch[2 * i + 2] } else { scratch[2 * i] };
        scratch[2 * i + 1] = d[i] + 0.5 * (scratch[2 * i] + right);
    }
    x.copy_from_slice(scratch);
}

fn transform_2d(pl: &mut Plane, w: usize, h: usize, inverse: bool) {
    let stride = pl.width as usize;
    let mut line = Vec::new();
    let mut scratch = Vec::new();
    let mut pass = |pl: &mut Plane, rows: bool| {
        let (outer, inner) = if rows { (h, w) } else { (w, h) };
        for o in 0..outer {
            line.clear();
            line.extend((0..inner).map(|i| if rows { pl.data[o * stride + i] } else { pl.data[i * stride + o] }));
            if inverse {
                lift_inverse(&mut line, &mut scratch);
            } else {
                lift_forward(&mut line, &mut scratch);
            }
            for (i, &v) in line.iter().enumerate() {
                if rows {
                    pl.data[o * stride + i] = v;
                } else {
                    pl.data[i * stride + o] = v;
                }
            }
        }
    };
    if inverse {
        pass(pl, false);
        pass(pl, true);
    } else {
        pass(pl, true);
        pass(pl, false);
    }
}

const WAVELET_LEVELS: usize = 4;

fn wavelet_quantize(pl: &mut Plane, step: f64) {
    let (w, h) = (pl.width as usize, pl.height as usize);
    let mut sizes = vec![(w, h)];
    for _ in 0..WAVELET_LEVELS {
        let &(cw, ch) = sizes.last().unwrap();
        if cw < 2 && ch < 2 {
            break;
        }
        transform_2d(pl, cw, ch, false);
        sizes.push((cw.div_ceil(2), ch.div_ceil(2)));
    }
    let (lw, lh) = *sizes.last().unwrap();
    for y in 0..h {
        for x in 0..w {
            // the coarsest approximation band is kept at a finer step
            let s = if x < lw && y < lh { step / 4.0 } else { step };
            let v = &mut pl.data[y * w + x];
            let q = libm::trunc(*v / s);
            *v = if q == 0.0 { 0.0 } else { (q + libm::copysign(0.5, q)) * s };
        }
    }
    for &(cw, ch) in sizes[..sizes.len() - 1].iter().rev() {
        transform_2d(pl, cw, ch, true);
    }
}

pub(super) fn wavelet_compress(img: &ImageBuffer, step: f64) -> ImageBuffer {
    let [mut y, mut cb, mut cr] = img.to_ycbcr_planes();
    wavelet_quantize(&mut y, step);
    wavelet_quantize(&mut cb, 2.0 * step);
    wavelet_quantize(&mut cr, 2.0 * step);
    ImageBuffer::from_ycbcr_planes(&[y, cb, cr])
}
