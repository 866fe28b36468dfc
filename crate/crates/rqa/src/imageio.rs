//! PNG decoding and encoding to and from [`ImageBuffer`].

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ExtendedColorType, ImageEncoder};
use rqa_core::ImageBuffer;

use crate::error::{Error, Result};

/// Decodes any PNG to 8-bit RGB; alpha is dropped and 16-bit samples are scaled.
pub fn load_png(path: &Path) -> Result<ImageBuffer> {
    let reader = image::ImageReader::open(path).map_err(|e| Error::io(path, e))?;
    let decoded = reader.decode().map_err(|source| Error::Image { path: path.into(), source })?;
    let rgb = decoded.into_rgb8();
    let (w, h) = rgb.dimensions();
    ImageBuffer::new(w, h, rgb.into_raw()).map_err(|e| Error::parse(path, e))
}

/// Writes an 8-bit RGB PNG with fast compression.
pub fn save_png(path: &Path, img: &ImageBuffer) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    PngEncoder::new_with_quality(BufWriter::new(file), CompressionType::Fast, FilterType::Sub)
        .write_image(img.as_raw(), img.width(), img.height(), ExtendedColorType::Rgb8)
        .map_err(|source| Error::Image { path: path.into(), source })
}
