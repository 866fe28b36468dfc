//! Core algorithms for assessing how image corruptions affect embodied agents.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every numeric piece of
//! the pipeline:
//!
//! - [`distort`]: a fixed registry of 30 corruption types at 5 levels, applied
//!   deterministically to 8-bit RGB rasters.
//! - [`features`]: low-level attributes (luminance, contrast, chrominance,
//!   blur, spatial information).
//! - [`text`]: BLEU / ROUGE-L / CIDEr and the Cognition score.
//! - [`pose`]: 7-DoF pose parsing and the Decision score.
//! - [`kinematics`]: UR5 forward/inverse kinematics and the Execution score.
//! - [`stats`]: SRCC / KRCC / PLCC, subject matrices, JND tertiles, PSNR, SSIM.
//! - [`protocol`]: seeded level assignment, train/val splits and the
//!   repeated-split evaluation protocol.
//!
//! File formats, image codecs and the command line live in the `rqa` crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod distort;
pub mod features;
pub mod image;
pub mod kinematics;
pub mod pose;
pub mod protocol;
pub mod rng;
pub mod stats;
pub mod text;

pub use distort::{apply_distortion, distortion_registry, Category, DistortionKind, DistortionSpec, Level};
pub use features::{low_level_features, LowLevelFeatures};
pub use image::ImageBuffer;
