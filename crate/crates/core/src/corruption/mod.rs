//! The ten corruption operators and their five-level severity table.
//!
//! Every operator is a pure function of its inputs. Seeded operators draw
//! from a ChaCha8 stream keyed by [`derive_seed`], so a corrupted dataset is
//! fully determined by `(global_seed, image ids, clean pixels)`.

mod blur;
mod color;
mod jpeg;
mod mask;
mod noise;
mod pixelate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use blur::{convolve, motion_angle, motion_blur, LineKernel};
pub use color::{brightness, channel_means, color_quant, contrast, darkness, hsv_to_rgb, rgb_to_hsv};
pub use jpeg::{encode_jpeg, jpeg_compress};
pub use mask::{keypoint_mask, MaskTarget, MaskTargetSet};
pub use noise::{gaussian_noise, impulse_noise, impulse_positions};
pub use pixelate::{downscale_area, pixelate, scaled_dim, upscale_nearest};

use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    MotionBlur,
    GaussianNoise,
    ImpulseNoise,
    Pixelate,
    JpegCompression,
    ColorQuant,
    Brightness,
    Darkness,
    Contrast,
    Mask,
}

impl CorruptionKind {
    /// Benchmark column order.
    pub const ALL: [CorruptionKind; 10] = [
        CorruptionKind::MotionBlur,
        CorruptionKind::GaussianNoise,
        CorruptionKind::ImpulseNoise,
        CorruptionKind::Pixelate,
        CorruptionKind::JpegCompression,
        CorruptionKind::ColorQuant,
        CorruptionKind::Brightness,
        CorruptionKind::Darkness,
        CorruptionKind::Contrast,
        CorruptionKind::Mask,
    ];

    /// Canonical snake_case name, used in seeds, directory names and reports.
    pub fn name(self) -> &'static str {
        match self {
            CorruptionKind::MotionBlur => "motion_blur",
            CorruptionKind::GaussianNoise => "gaussian_noise",
            CorruptionKind::ImpulseNoise => "impulse_noise",
            CorruptionKind::Pixelate => "pixelate",
            CorruptionKind::JpegCompression => "jpeg_compression",
            CorruptionKind::ColorQuant => "color_quant",
            CorruptionKind::Brightness => "brightness",
            CorruptionKind::Darkness => "darkness",
            CorruptionKind::Contrast => "contrast",
            CorruptionKind::Mask => "mask",
        }
    }

    pub fn group(self) -> CorruptionGroup {
        use CorruptionKind::*;
        match self {
            MotionBlur | GaussianNoise | ImpulseNoise => CorruptionGroup::BlurNoise,
            Pixelate | JpegCompression | ColorQuant => CorruptionGroup::CompressionColor,
            Brightness | Darkness | Contrast => CorruptionGroup::Lighting,
            Mask => CorruptionGroup::Mask,
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&k| k == self).unwrap()
    }
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorruptionKind {
    type Err = Error;

    /// Case-insensitive; `-`, `_` and spaces are ignored, and `jpeg` is accepted.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        let found = Self::ALL
            .into_iter()
            .find(|k| k.name().replace('_', "") == key)
            .or_else(|| (key == "jpeg").then_some(CorruptionKind::JpegCompression));
        found.ok_or_else(|| {
            let valid: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
            Error::Usage(format!(
                "unknown corruption kind {s:?}; valid kinds: {}",
                valid.join(", ")
            ))
        })
    }
}

/// Column blocks of the robustness table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionGroup {
    BlurNoise,
    CompressionColor,
    Lighting,
    Mask,
}

impl CorruptionGroup {
    pub const ALL: [CorruptionGroup; 4] = [
        CorruptionGroup::BlurNoise,
        CorruptionGroup::CompressionColor,
        CorruptionGroup::Lighting,
        CorruptionGroup::Mask,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CorruptionGroup::BlurNoise => "Blur & Noise",
            CorruptionGroup::CompressionColor => "Compression & Color",
            CorruptionGroup::Lighting => "Lightning",
            CorruptionGroup::Mask => "Mask",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            CorruptionGroup::BlurNoise => "blur_noise",
            CorruptionGroup::CompressionColor => "compression_color",
            CorruptionGroup::Lighting => "lighting",
            CorruptionGroup::Mask => "mask",
        }
    }

    pub fn members(self) -> impl Iterator<Item = CorruptionKind> {
        CorruptionKind::ALL.into_iter().filter(move |k| k.group() == self)
    }
}

/// Severity level, 1 (mildest) through 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Severity(u8);

impl Severity {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 5;

    pub fn new(level: u8) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&level) {
            Ok(Severity(level))
        } else {
            Err(Error::Domain(format!(
                "severity out of range: {level} (valid range {}..={})",
                Self::MIN,
                Self::MAX
            )))
        }
    }

    pub fn all() -> impl Iterator<Item = Severity> {
        (Self::MIN..=Self::MAX).map(Severity)
    }

    pub fn level(self) -> u8 {
        self.0
    }

    fn idx(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl TryFrom<u8> for Severity {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        Severity::new(v)
    }
}

impl From<Severity> for u8 {
    fn from(s: Severity) -> u8 {
        s.0
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which benchmark the mask sizes are drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DatasetProfile {
    #[default]
    #[serde(rename = "coco")]
    Coco,
    #[serde(rename = "ochuman")]
    OcHuman,
    #[serde(rename = "ap10k")]
    Ap10k,
}

impl DatasetProfile {
    pub fn name(self) -> &'static str {
        match self {
            DatasetProfile::Coco => "coco",
            DatasetProfile::OcHuman => "ochuman",
            DatasetProfile::Ap10k => "ap10k",
        }
    }
}

impl FromStr for DatasetProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "coco" | "cococ" => Ok(DatasetProfile::Coco),
            "ochuman" | "ochumanc" => Ok(DatasetProfile::OcHuman),
            "ap10k" | "ap10kc" => Ok(DatasetProfile::Ap10k),
            _ => Err(Error::Config(format!(
                "unknown dataset profile {s:?}; expected coco, ochuman or ap10k"
            ))),
        }
    }
}

/// Resolved operator parameters for one (kind, severity) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorruptionParams {
    MotionBlur { radius: u32, sigma: f64 },
    GaussianNoise { sigma: f64 },
    ImpulseNoise { proportion: f64 },
    Pixelate { ratio: f64 },
    JpegCompression { quality: u8 },
    ColorQuant { bits: u8 },
    Brightness { delta_v: f64 },
    Darkness { gamma: f64 },
    Contrast { factor: f64 },
    Mask { size: u32 },
}

impl CorruptionParams {
    pub fn kind(&self) -> CorruptionKind {
        match self {
            CorruptionParams::MotionBlur { .. } => CorruptionKind::MotionBlur,
            CorruptionParams::GaussianNoise { .. } => CorruptionKind::GaussianNoise,
            CorruptionParams::ImpulseNoise { .. } => CorruptionKind::ImpulseNoise,
            CorruptionParams::Pixelate { .. } => CorruptionKind::Pixelate,
            CorruptionParams::JpegCompression { .. } => CorruptionKind::JpegCompression,
            CorruptionParams::ColorQuant { .. } => CorruptionKind::ColorQuant,
            CorruptionParams::Brightness { .. } => CorruptionKind::Brightness,
            CorruptionParams::Darkness { .. } => CorruptionKind::Darkness,
            CorruptionParams::Contrast { .. } => CorruptionKind::Contrast,
            CorruptionParams::Mask { .. } => CorruptionKind::Mask,
        }
    }
}

const MOTION_BLUR: [(u32, f64); 5] = [(10, 3.0), (15, 5.0), (15, 8.0), (15, 12.0), (20, 15.0)];
const GAUSSIAN_SIGMA: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 6.0];
const IMPULSE_PERCENT: [f64; 5] = [3.0, 6.0, 9.0, 17.0, 27.0];
const PIXELATE_PERCENT: [f64; 5] = [60.0, 50.0, 40.0, 30.0, 25.0];
const JPEG_QUALITY: [u8; 5] = [25, 18, 15, 10, 7];
const QUANT_BITS: [u8; 5] = [5, 4, 3, 2, 1];
const BRIGHTNESS_DV: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
const DARKNESS_GAMMA: [f64; 5] = [0.6, 0.5, 0.4, 0.3, 0.2];
const CONTRAST_FACTOR: [f64; 5] = [0.4, 0.3, 0.2, 0.1, 0.05];
/// Mask side lengths per severity for (COCO, OCHuman, AP10K).
const MASK_SIZE: [[u32; 3]; 5] = [[5, 20, 20], [10, 25, 25], [15, 30, 30], [20, 35, 35], [25, 40, 40]];

/// Benchmark parameters for `(kind, severity)`; mask sizes depend on `profile`.
pub fn lookup_params(kind: CorruptionKind, severity: Severity, profile: DatasetProfile) -> CorruptionParams {
    let i = severity.idx();
    match kind {
        CorruptionKind::MotionBlur => {
            let (radius, sigma) = MOTION_BLUR[i];
            CorruptionParams::MotionBlur { radius, sigma }
        }
        CorruptionKind::GaussianNoise => CorruptionParams::GaussianNoise { sigma: GAUSSIAN_SIGMA[i] },
        CorruptionKind::ImpulseNoise => CorruptionParams::ImpulseNoise { proportion: IMPULSE_PERCENT[i] },
        CorruptionKind::Pixelate => CorruptionParams::Pixelate { ratio: PIXELATE_PERCENT[i] },
        CorruptionKind::JpegCompression => CorruptionParams::JpegCompression { quality: JPEG_QUALITY[i] },
        CorruptionKind::ColorQuant => CorruptionParams::ColorQuant { bits: QUANT_BITS[i] },
        CorruptionKind::Brightness => CorruptionParams::Brightness { delta_v: BRIGHTNESS_DV[i] },
        CorruptionKind::Darkness => CorruptionParams::Darkness { gamma: DARKNESS_GAMMA[i] },
        CorruptionKind::Contrast => CorruptionParams::Contrast { factor: CONTRAST_FACTOR[i] },
        CorruptionKind::Mask => {
            let col = match profile {
                DatasetProfile::Coco => 0,
                DatasetProfile::OcHuman => 1,
                DatasetProfile::Ap10k => 2,
            };
            CorruptionParams::Mask { size: MASK_SIZE[i][col] }
        }
    }
}

/// Per-image seed: splitmix64 of the FNV-1a hash of
/// `"<global_seed>/<image_id>/<kind>/<severity>"`.
pub fn derive_seed(global_seed: u64, image_id: u64, kind: CorruptionKind, severity: Severity) -> u64 {
    seed::seed_from_key(&format!("{global_seed}/{image_id}/{}/{}", kind.name(), severity.level()))
}

/// Optional substitutions applied on top of the severity table.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    /// Multiplier on the Gaussian-noise sigma. Default 1.0.
    pub noise_gain: Option<f64>,
    /// Fill value for mask squares. Default 0 (black).
    pub mask_fill: Option<u8>,
    /// Replaces the table entry outright; must match the spec's kind.
    pub params: Option<CorruptionParams>,
}

/// One benchmark cell to apply to an image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub severity: Severity,
    pub global_seed: u64,
    pub profile: DatasetProfile,
    pub overrides: Overrides,
}

impl CorruptionSpec {
    pub fn new(kind: CorruptionKind, severity: Severity) -> Self {
        Self {
            kind,
            severity,
            global_seed: 0,
            profile: DatasetProfile::Coco,
            overrides: Overrides::default(),
        }
    }

    pub fn with_seed(mut self, global_seed: u64) -> Self {
        self.global_seed = global_seed;
        self
    }

    pub fn with_profile(mut self, profile: DatasetProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_overrides(mut self, overrides: Overrides) -> Self {
        self.overrides = overrides;
        self
    }

    pub fn resolved_params(&self) -> Result<CorruptionParams> {
        match self.overrides.params {
            Some(p) if p.kind() != self.kind => Err(Error::Config(format!(
                "parameter override for {} given to a {} corruption",
                p.kind(),
                self.kind
            ))),
            Some(p) => Ok(p),
            None => Ok(lookup_params(self.kind, self.severity, self.profile)),
        }
    }

    pub fn noise_gain(&self) -> f64 {
        self.overrides.noise_gain.unwrap_or(1.0)
    }

    pub fn mask_fill(&self) -> u8 {
        self.overrides.mask_fill.unwrap_or(0)
    }
}

/// Applies one benchmark cell to the image with id `image_id`.
///
/// `targets` is required for [`CorruptionKind::Mask`] and ignored otherwise.
pub fn apply(
    img: &RgbImage,
    spec: &CorruptionSpec,
    image_id: u64,
    targets: Option<&[MaskTarget]>,
) -> Result<RgbImage> {
    let params = spec.resolved_params()?;
    let seed = derive_seed(spec.global_seed, image_id, spec.kind, spec.severity);
    let gain = spec.noise_gain();
    if !(gain > 0.0 && gain.is_finite()) {
        return Err(Error::Config(format!("noise gain must be positive, got {gain}")));
    }
    Ok(match params {
        CorruptionParams::MotionBlur { radius, sigma } => motion_blur(img, radius, sigma, seed),
        CorruptionParams::GaussianNoise { sigma } => gaussian_noise(img, sigma, gain, seed),
        CorruptionParams::ImpulseNoise { proportion } => impulse_noise(img, proportion, seed),
        CorruptionParams::Pixelate { ratio } => pixelate(img, ratio),
        CorruptionParams::JpegCompression { quality } => jpeg_compress(img, quality)?,
        CorruptionParams::ColorQuant { bits } => color_quant(img, bits),
        CorruptionParams::Brightness { delta_v } => brightness(img, delta_v),
        CorruptionParams::Darkness { gamma } => darkness(img, gamma),
        CorruptionParams::Contrast { factor } => contrast(img, factor),
        CorruptionParams::Mask { size } => {
            let targets = targets.ok_or_else(|| {
                Error::Usage("mask corruption requires keypoint targets".into())
            })?;
            keypoint_mask(img, targets, size, spec.mask_fill())
        }
    })
}
