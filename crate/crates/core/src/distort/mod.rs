//! The corruption registry and its seeded application to images.
//!
//! Thirty corruption types are grouped into seven categories. Each type has a
//! fixed five-level parameter table whose primary (first) parameter moves
//! strictly in the direction of increasing severity.
//!
//! | ids | category |
//! |-----|----------|
//! | 01-03 | Blur |
//! | 04-08 | Chrominance |
//! | 09, 10, 28 | Compression |
//! | 11-15 | Noise |
//! | 16, 17, 29, 30 | Others |
//! | 18-21 | Luminance |
//! | 22-27 | Spatial |
//!
//! Anchored slots: 02 lens blur, 15 multiplicative noise, 16 Gaussian denoise,
//! 25 block interpolation. The two denoisers (16, 17) sit in Others because
//! they smooth as much as they add noise; geometric warps are not used, and
//! Others holds only tone/detail edits.

mod codec;
mod ops;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::image::ImageBuffer;
use crate::rng;

/// One of the seven corruption families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Category {
    Blur,
    Luminance,
    Chrominance,
    Noise,
    Compression,
    Spatial,
    Others,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Blur,
        Category::Luminance,
        Category::Chrominance,
        Category::Noise,
        Category::Compression,
        Category::Spatial,
        Category::Others,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Blur => "blur",
            Category::Luminance => "luminance",
            Category::Chrominance => "chrominance",
            Category::Noise => "noise",
            Category::Compression => "compression",
            Category::Spatial => "spatial",
            Category::Others => "others",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Category {
    type Err = DistortError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| DistortError::UnknownCategory(s.into()))
    }
}

/// Severity level, 1 (mildest) to 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u8", into = "u8"))]
pub struct Level(u8);

impl Level {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 5;

    pub fn new(level: u8) -> Result<Self, DistortError> {
        if (Self::MIN..=Self::MAX).contains(&level) {
            Ok(Self(level))
        } else {
            Err(DistortError::InvalidLevel(level))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Level> {
        (Self::MIN..=Self::MAX).map(Level)
    }

    fn index(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl TryFrom<u8> for Level {
    type Error = DistortError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Level::new(v)
    }
}

impl From<Level> for u8 {
    fn from(l: Level) -> u8 {
        l.0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistortError {
    #[error("unknown distortion id {0} (valid ids are 1..=30)")]
    UnknownId(u8),
    #[error("unknown distortion category {0:?}")]
    UnknownCategory(String),
    #[error("distortion level must be in 1..=5, got {0}")]
    InvalidLevel(u8),
    #[error("{kind} expects {expected} parameter(s) per level, got {got}")]
    ParamCount { kind: DistortionKind, expected: usize, got: usize },
    #[error("{kind} parameter {value} is outside its valid range")]
    ParamRange { kind: DistortionKind, value: f64 },
    #[error("{kind} level table is not strictly ordered by severity")]
    NotMonotone { kind: DistortionKind },
}

macro_rules! kinds {
    ($( $id:literal $variant:ident $name:literal $cat:ident $inc:literal [$($lv:expr),+ $(,)?] ; )+) => {
        /// The thirty corruption types, numbered as in the registry.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[repr(u8)]
        pub enum DistortionKind {
            $( $variant = $id, )+
        }

        impl DistortionKind {
            pub const ALL: [DistortionKind; 30] = [ $( DistortionKind::$variant, )+ ];

            pub fn from_id(id: u8) -> Result<Self, DistortError> {
                match id {
                    $( $id => Ok(DistortionKind::$variant), )+
                    other => Err(DistortError::UnknownId(other)),
                }
            }

            pub fn name(self) -> &'static str {
                match self { $( DistortionKind::$variant => $name, )+ }
            }

            pub fn category(self) -> Category {
                match self { $( DistortionKind::$variant => Category::$cat, )+ }
            }

            /// Whether severity grows with the primary parameter.
            fn strength_increases(self) -> bool {
                match self { $( DistortionKind::$variant => $inc, )+ }
            }

            fn default_levels(self) -> &'static [&'static [f64]; 5] {
                match self { $( DistortionKind::$variant => &[$($lv),+], )+ }
            }
        }
    };
}

kinds! {
    1  GaussianBlur          "Gaussian blur"           Blur        true  [&[0.5], &[1.0], &[2.0], &[3.5], &[5.0]];
    2  LensBlur              "lens blur"               Blur        true  [&[1.0], &[2.0], &[3.0], &[5.0], &[7.0]];
    3  MotionBlur            "motion blur"             Blur        true  [&[3.0], &[6.0], &[10.0], &[15.0], &[21.0]];
    4  ColorDiffusion        "color diffusion"         Chrominance true  [&[1.0], &[2.0], &[4.0], &[7.0], &[10.0]];
    5  ColorShift            "color shift"             Chrominance true  [&[6.0], &[12.0], &[20.0], &[30.0], &[42.0]];
    6  ColorQuantization     "color quantization"      Chrominance false [&[33.0], &[17.0], &[9.0], &[5.0], &[3.0]];
    7  Desaturation          "color desaturation"      Chrominance false [&[0.8], &[0.6], &[0.4], &[0.2], &[0.0]];
    8  Oversaturation        "color oversaturation"    Chrominance true  [&[1.3], &[1.6], &[2.0], &[2.5], &[3.2]];
    9  Jpeg2000              "JPEG2000 compression"    Compression true  [&[4.0], &[10.0], &[24.0], &[48.0], &[96.0]];
    10 Jpeg                  "JPEG compression"        Compression false [&[60.0], &[35.0], &[20.0], &[10.0], &[4.0]];
    11 WhiteNoise            "white noise"             Noise       true  [&[4.0], &[8.0], &[14.0], &[22.0], &[32.0]];
    12 ChromaNoise           "white noise in color component" Noise true [&[6.0], &[12.0], &[20.0], &[30.0], &[42.0]];
    13 ImpulseNoise          "impulse noise"           Noise       true  [&[0.01], &[0.03], &[0.06], &[0.10], &[0.16]];
    14 UniformNoise          "uniform noise"           Noise       true  [&[6.0], &[12.0], &[20.0], &[32.0], &[48.0]];
    15 MultiplicativeNoise   "multiplicative noise"    Noise       true  [&[0.05], &[0.10], &[0.18], &[0.28], &[0.40]];
    16 GaussianDenoise       "Gaussian denoise"        Others      true  [&[12.0, 0.8], &[18.0, 1.0], &[26.0, 1.3], &[36.0, 1.6], &[48.0, 2.0]];
    17 MedianDenoise         "median denoise"          Others      true  [&[10.0, 1.0], &[16.0, 1.0], &[24.0, 1.0], &[34.0, 2.0], &[46.0, 2.0]];
    18 MeanBrighten          "mean brighten"           Luminance   true  [&[10.0], &[20.0], &[32.0], &[46.0], &[62.0]];
    19 MeanDarken            "mean darken"             Luminance   true  [&[10.0], &[20.0], &[32.0], &[46.0], &[62.0]];
    20 MaximumBrighten       "maximum brighten"        Luminance   true  [&[1.15], &[1.35], &[1.6], &[1.9], &[2.3]];
    21 MaximumDarken         "maximum darken"          Luminance   false [&[0.85], &[0.7], &[0.55], &[0.4], &[0.25]];
    22 Jitter                "jitter"                  Spatial     true  [&[1.0], &[2.0], &[3.0], &[5.0], &[7.0]];
    23 NonEccentricityPatch  "non-eccentricity patch"  Spatial     true  [&[0.02], &[0.05], &[0.10], &[0.16], &[0.24]];
    24 Pixelate              "pixelate"                Spatial     true  [&[2.0], &[3.0], &[5.0], &[7.0], &[10.0]];
    25 BlockInterpolation    "block interpolation"     Spatial     true  [&[2.0], &[3.0], &[4.0], &[6.0], &[8.0]];
    26 LostMacroBlock        "lost macro block"        Spatial     true  [&[0.01], &[0.03], &[0.06], &[0.10], &[0.15]];
    27 ColorBlock            "color block"             Spatial     true  [&[0.01], &[0.03], &[0.06], &[0.10], &[0.15]];
    28 GrayscaleQuantization "grayscale quantization"  Compression false [&[33.0], &[17.0], &[9.0], &[5.0], &[3.0]];
    29 SharpnessChange       "sharpness change"        Others      true  [&[0.6], &[1.2], &[2.0], &[3.0], &[4.5]];
    30 ContrastChange        "contrast change"         Others      false [&[0.8], &[0.62], &[0.46], &[0.32], &[0.2]];
}

impl DistortionKind {
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn param_count(self) -> usize {
        self.default_levels()[0].len()
    }

    /// Figure-style label, e.g. `Dis02`.
    pub fn label(self) -> String {
        alloc::format!("Dis{:02}", self.id())
    }

    /// Checks a parameter vector against the type's valid domain.
    fn check_params(self, params: &[f64]) -> Result<(), DistortError> {
        use DistortionKind::*;
        if params.len() != self.param_count() {
            return Err(DistortError::ParamCount { kind: self, expected: self.param_count(), got: params.len() });
        }
        for &v in params {
            if !v.is_finite() {
                return Err(DistortError::ParamRange { kind: self, value: v });
            }
        }
        let p = params[0];
        let ok = match self {
            ColorQuantization | GrayscaleQuantization => p >= 2.0,
            Jpeg => (1.0..=100.0).contains(&p),
            Desaturation | ContrastChange => (0.0..=1.0).contains(&p),
            MaximumDarken => (0.0..1.0).contains(&p),
            ImpulseNoise | NonEccentricityPatch | LostMacroBlock | ColorBlock => (0.0..=1.0).contains(&p),
            GaussianDenoise | MedianDenoise => p >= 0.0 && params[1] > 0.0,
            _ => p > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(DistortError::ParamRange { kind: self, value: p })
        }
    }
}

impl fmt::Display for DistortionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dis{:02} ({})", self.id(), self.name())
    }
}

/// A corruption type with its five-level parameter table (level unset).
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionTemplate {
    pub kind: DistortionKind,
    levels: [Vec<f64>; 5],
}

impl DistortionTemplate {
    pub fn params(&self, level: Level) -> &[f64] {
        &self.levels[level.index()]
    }

    pub fn at(&self, level: Level) -> DistortionSpec {
        DistortionSpec { kind: self.kind, level, params: self.levels[level.index()].clone() }
    }
}

/// The immutable set of 30 templates, optionally with overridden tables.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionRegistry {
    templates: Vec<DistortionTemplate>,
}

impl Default for DistortionRegistry {
    fn default() -> Self {
        let templates = DistortionKind::ALL
            .iter()
            .map(|&kind| DistortionTemplate { kind, levels: kind.default_levels().map(|p| p.to_vec()) })
            .collect();
        Self { templates }
    }
}

impl DistortionRegistry {
    pub fn templates(&self) -> &[DistortionTemplate] {
        &self.templates
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn template(&self, kind: DistortionKind) -> &DistortionTemplate {
        &self.templates[kind.id() as usize - 1]
    }

    /// Resolves `(id, level)` to a concrete spec.
    pub fn spec(&self, id: u8, level: u8) -> Result<DistortionSpec, DistortError> {
        let kind = DistortionKind::from_id(id)?;
        Ok(self.template(kind).at(Level::new(level)?))
    }

    /// Replaces the five-level table of one type.
    ///
    /// The primary parameter must stay strictly ordered in the same severity
    /// direction as the built-in table.
    pub fn override_levels(&mut self, kind: DistortionKind, levels: [Vec<f64>; 5]) -> Result<(), DistortError> {
        for l in &levels {
            kind.check_params(l)?;
        }
        let rising = kind.strength_increases();
        let monotone = levels.windows(2).all(|w| if rising { w[1][0] > w[0][0] } else { w[1][0] < w[0][0] });
        if !monotone {
            return Err(DistortError::NotMonotone { kind });
        }
        self.templates[kind.id() as usize - 1].levels = levels;
        Ok(())
    }
}

/// The built-in registry of all 30 corruption types.
pub fn distortion_registry() -> DistortionRegistry {
    DistortionRegistry::default()
}

/// A corruption type at one severity level with its resolved parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    pub kind: DistortionKind,
    pub level: Level,
    pub params: Vec<f64>,
}

impl DistortionSpec {
    /// Spec with the built-in parameters for `level`.
    pub fn new(kind: DistortionKind, level: Level) -> Self {
        Self { kind, level, params: kind.default_levels()[level.index()].to_vec() }
    }

    pub fn id(&self) -> u8 {
        self.kind.id()
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn category(&self) -> Category {
        self.kind.category()
    }
}

/// Applies one corruption. The result depends only on `(image, spec, seed)`.
pub fn apply_distortion(image: &ImageBuffer, spec: &DistortionSpec, seed: u64) -> Result<ImageBuffer, DistortError> {
    spec.kind.check_params(&spec.params)?;
    let mut rng = rng::keyed(seed, spec.id() as u64);
    Ok(ops::apply(image, spec.kind, &spec.params, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_thirty_entries_over_seven_categories() {
        let reg = distortion_registry();
        assert_eq!(reg.len(), 30);
        for cat in Category::ALL {
            assert!(reg.templates().iter().any(|t| t.kind.category() == cat), "{cat} empty");
        }
        for (i, t) in reg.templates().iter().enumerate() {
            assert_eq!(t.kind.id() as usize, i + 1);
        }
    }

    #[test]
    fn anchored_slots() {
        let k = |id| DistortionKind::from_id(id).unwrap();
        assert_eq!(k(2).name(), "lens blur");
        assert_eq!(k(2).category(), Category::Blur);
        assert_eq!(k(15).name(), "multiplicative noise");
        assert_eq!(k(16).name(), "Gaussian denoise");
        assert_eq!(k(25).name(), "block interpolation");
        for name in [
            "mean brighten",
            "mean darken",
            "maximum brighten",
            "maximum darken",
            "color quantization",
            "grayscale quantization",
            "sharpness change",
            "contrast change",
            "lost macro block",
            "JPEG compression",
        ] {
            assert!(DistortionKind::ALL.iter().any(|k| k.name() == name), "{name}");
        }
    }

    #[test]
    fn default_tables_are_strictly_ordered() {
        let mut reg = distortion_registry();
        for kind in DistortionKind::ALL {
            let levels = kind.default_levels().map(|p| p.to_vec());
            reg.override_levels(kind, levels).unwrap();
        }
    }

    #[test]
    fn override_rejects_reordered_table() {
        let mut reg = distortion_registry();
        let bad = [alloc::vec![5.0], alloc::vec![3.5], alloc::vec![2.0], alloc::vec![1.0], alloc::vec![0.5]];
        assert_eq!(
            reg.override_levels(DistortionKind::GaussianBlur, bad),
            Err(DistortError::NotMonotone { kind: DistortionKind::GaussianBlur })
        );
    }

    #[test]
    fn unknown_ids_and_levels() {
        let reg = distortion_registry();
        assert_eq!(reg.spec(31, 1), Err(DistortError::UnknownId(31)));
        assert_eq!(reg.spec(0, 1), Err(DistortError::UnknownId(0)));
        assert_eq!(reg.spec(3, 6), Err(DistortError::InvalidLevel(6)));
    }

    #[test]
    fn category_parses_case_insensitively() {
        assert_eq!("Noise".parse::<Category>().unwrap(), Category::Noise);
        assert!("warp".parse::<Category>().is_err());
    }
}
