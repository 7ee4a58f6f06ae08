//! Training-time augmentation sets A-D and offline export.
//!
//! Every transform preserves geometry, so keypoint annotations carry over
//! to augmented images unchanged.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corruption::{gaussian_noise, hsv_to_rgb, jpeg_compress, motion_blur, rgb_to_hsv};
use crate::data::{Annotation, DatasetIndex, ImageRecord};
use crate::error::{Error, Result};
use crate::image::{self, to_u8, RgbImage};
use crate::seed::seed_from_key;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AugmentationSetId {
    A,
    B,
    C,
    D,
}

impl AugmentationSetId {
    pub const ALL: [AugmentationSetId; 4] = [Self::A, Self::B, Self::C, Self::D];

    pub fn members(self) -> &'static [TransformKind] {
        use TransformKind::*;
        match self {
            Self::A => &[BoxBlur, MedianBlur, GaussianBlur, GaussianNoise, IsoNoise, MotionBlur],
            Self::B => &[ColorJitter, JpegReencode, RgbShift, ToGray, PixelDropout],
            Self::C => &[HsvJitter, BrightnessJitter, ContrastJitter, GammaJitter, Shadow],
            Self::D => &[XyMasking, GridDropout, CoarseDropout],
        }
    }
}

impl FromStr for AugmentationSetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            "D" => Ok(Self::D),
            other => Err(Error::Usage(format!("unknown augmentation set {other:?} (valid: A, B, C, D)"))),
        }
    }
}

impl fmt::Display for AugmentationSetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    BoxBlur,
    MedianBlur,
    GaussianBlur,
    GaussianNoise,
    IsoNoise,
    MotionBlur,
    ColorJitter,
    JpegReencode,
    RgbShift,
    ToGray,
    PixelDropout,
    HsvJitter,
    BrightnessJitter,
    ContrastJitter,
    GammaJitter,
    Shadow,
    XyMasking,
    GridDropout,
    CoarseDropout,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        use TransformKind::*;
        match self {
            BoxBlur => "box_blur",
            MedianBlur => "median_blur",
            GaussianBlur => "gaussian_blur",
            GaussianNoise => "gaussian_noise",
            IsoNoise => "iso_noise",
            MotionBlur => "motion_blur",
            ColorJitter => "color_jitter",
            JpegReencode => "jpeg_reencode",
            RgbShift => "rgb_shift",
            ToGray => "to_gray",
            PixelDropout => "pixel_dropout",
            HsvJitter => "hsv_jitter",
            BrightnessJitter => "brightness_jitter",
            ContrastJitter => "contrast_jitter",
            GammaJitter => "gamma_jitter",
            Shadow => "shadow",
            XyMasking => "xy_masking",
            GridDropout => "grid_dropout",
            CoarseDropout => "coarse_dropout",
        }
    }

    /// Default sampling range of the transform's main parameter.
    ///
    /// | transform | parameter |
    /// |---|---|
    /// | box / median blur | kernel size (rounded up to odd) |
    /// | gaussian blur | sigma in pixels |
    /// | gaussian noise | sigma in 8-bit units |
    /// | iso noise | intensity |
    /// | motion blur | line radius |
    /// | color jitter | max relative change of brightness, contrast, saturation |
    /// | jpeg re-encode | quality |
    /// | rgb shift | max per-channel shift in 8-bit units |
    /// | to gray | blend weight toward gray |
    /// | pixel dropout | fraction of pixels zeroed |
    /// | hsv jitter | max hue shift (turns) and relative S/V change |
    /// | brightness jitter | additive V offset |
    /// | contrast jitter | contrast factor |
    /// | gamma jitter | gamma exponent |
    /// | shadow | intensity multiplier inside the shadow |
    /// | xy masking | stripe width as a fraction of the image side |
    /// | grid dropout | fraction of each grid cell dropped |
    /// | coarse dropout | hole side as a fraction of the shorter image side |
    pub fn default_range(self) -> (f64, f64) {
        use TransformKind::*;
        match self {
            BoxBlur => (3.0, 7.0),
            MedianBlur => (3.0, 5.0),
            GaussianBlur => (0.5, 2.0),
            GaussianNoise => (1.0, 3.0),
            IsoNoise => (0.1, 0.5),
            MotionBlur => (5.0, 15.0),
            ColorJitter => (0.1, 0.3),
            JpegReencode => (18.0, 60.0),
            RgbShift => (5.0, 20.0),
            ToGray => (1.0, 1.0),
            PixelDropout => (0.01, 0.05),
            HsvJitter => (0.02, 0.1),
            BrightnessJitter => (-0.3, 0.3),
            ContrastJitter => (0.2, 1.5),
            GammaJitter => (0.4, 1.6),
            Shadow => (0.3, 0.7),
            XyMasking => (0.05, 0.15),
            GridDropout => (0.2, 0.4),
            CoarseDropout => (0.05, 0.15),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub kind: TransformKind,
    pub range: (f64, f64),
    pub probability: f64,
}

pub const DEFAULT_PROBABILITY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationPipeline {
    pub transforms: Vec<Transform>,
}

/// Transforms of `sets`, in A, B, C, D order, each with the default range and probability.
pub fn build_pipeline(sets: &[AugmentationSetId]) -> Result<AugmentationPipeline> {
    if sets.is_empty() {
        return Err(Error::Usage("at least one augmentation set is required".into()));
    }
    let unique: BTreeSet<_> = sets.iter().copied().collect();
    if unique.len() != sets.len() {
        return Err(Error::Usage("duplicate augmentation set".into()));
    }
    let transforms = unique
        .iter()
        .flat_map(|s| s.members())
        .map(|&kind| Transform { kind, range: kind.default_range(), probability: DEFAULT_PROBABILITY })
        .collect();
    Ok(AugmentationPipeline { transforms })
}

impl AugmentationPipeline {
    pub fn with_probability(mut self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("probability must be in [0, 1], got {p}")));
        }
        for t in &mut self.transforms {
            t.probability = p;
        }
        Ok(self)
    }

    pub fn with_range(mut self, kind: TransformKind, range: (f64, f64)) -> Result<Self> {
        if !range.0.is_finite() || !range.1.is_finite() || range.0 > range.1 {
            return Err(Error::Config(format!("invalid range for {kind}: {range:?}")));
        }
        for t in self.transforms.iter_mut().filter(|t| t.kind == kind) {
            t.range = range;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.transforms {
            if !(0.0..=1.0).contains(&t.probability) {
                return Err(Error::Config(format!("{}: probability must be in [0, 1]", t.kind)));
            }
            if t.range.0.is_nan() || t.range.1.is_nan() || t.range.0 > t.range.1 {
                return Err(Error::Config(format!("{}: invalid range {:?}", t.kind, t.range)));
            }
        }
        Ok(())
    }
}

/// Output of one pipeline run.
#[derive(Debug, Clone)]
pub struct Augmented {
    pub image: RgbImage,
    pub fired: Vec<TransformKind>,
}

/// Runs every transform in order; transform `i` draws from stream `i` of `seed`.
pub fn apply_pipeline(pipeline: &AugmentationPipeline, img: &RgbImage, seed: u64) -> RgbImage {
    apply_pipeline_traced(pipeline, img, seed).image
}

pub fn apply_pipeline_traced(pipeline: &AugmentationPipeline, img: &RgbImage, seed: u64) -> Augmented {
    let mut out = img.clone();
    let mut fired = Vec::new();
    for (i, t) in pipeline.transforms.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        if !rng.random_bool(t.probability.clamp(0.0, 1.0)) {
            continue;
        }
        let x = if t.range.0 < t.range.1 { rng.random_range(t.range.0..=t.range.1) } else { t.range.0 };
        out = apply_transform(t.kind, &out, x, &mut rng);
        fired.push(t.kind);
    }
    Augmented { image: out, fired }
}

fn odd(k: f64) -> usize {
    (k.round().max(1.0) as usize) | 1
}

/// Applies one transform with main parameter `x`; extra randomness comes from `rng`.
pub fn apply_transform(kind: TransformKind, img: &RgbImage, x: f64, rng: &mut ChaCha8Rng) -> RgbImage {
    use TransformKind::*;
    match kind {
        BoxBlur => {
            let k = odd(x);
            separable(img, &vec![1.0 / k as f64; k])
        }
        MedianBlur => median_blur(img, odd(x) / 2),
        GaussianBlur => separable(img, &gaussian_taps(x)),
        GaussianNoise => gaussian_noise(img, x, 1.0, rng.random()),
        IsoNoise => iso_noise(img, x, rng),
        MotionBlur => {
            let r = x.round().max(1.0) as u32;
            motion_blur(img, r, r as f64 / 3.0, rng.random())
        }
        ColorJitter => {
            let b = 1.0 + rng.random_range(-x..=x);
            let c = 1.0 + rng.random_range(-x..=x);
            let s = 1.0 + rng.random_range(-x..=x);
            color_jitter(img, b, c, s)
        }
        JpegReencode => {
            let q = x.round().clamp(1.0, 100.0) as u8;
            jpeg_compress(img, q).unwrap_or_else(|_| img.clone())
        }
        RgbShift => {
            let shift: [f64; 3] = std::array::from_fn(|_| rng.random_range(-x..=x));
            img.map_pixels(|p| std::array::from_fn(|c| to_u8(p[c] as f64 + shift[c])))
        }
        ToGray => img.map_pixels(|p| {
            let g = 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
            std::array::from_fn(|c| to_u8(p[c] as f64 + x * (g - p[c] as f64)))
        }),
        PixelDropout => {
            let mut out = img.clone();
            for y in 0..img.height() {
                for xx in 0..img.width() {
                    if rng.random_bool(x.clamp(0.0, 1.0)) {
                        out.put(xx, y, [0; 3]);
                    }
                }
            }
            out
        }
        HsvJitter => {
            let dh = rng.random_range(-x..=x);
            let ds = 1.0 + rng.random_range(-x..=x);
            let dv = 1.0 + rng.random_range(-x..=x);
            img.map_pixels(|p| {
                let [h, s, v] = rgb_to_hsv(p);
                let rgb = hsv_to_rgb([(h + dh).rem_euclid(1.0), (s * ds).min(1.0), (v * dv).min(1.0)]);
                rgb.map(to_u8)
            })
        }
        BrightnessJitter => img.map_pixels(|p| {
            let [h, s, v] = rgb_to_hsv(p);
            hsv_to_rgb([h, s, (v + x).clamp(0.0, 1.0)]).map(to_u8)
        }),
        ContrastJitter => {
            let mean = crate::corruption::channel_means(img);
            img.map_pixels(|p| std::array::from_fn(|c| to_u8((p[c] as f64 - mean[c]) * x + mean[c])))
        }
        GammaJitter => img.map_samples(|v| to_u8(255.0 * (v as f64 / 255.0).powf(x))),
        Shadow => shadow(img, x, rng),
        XyMasking => xy_masking(img, x, rng),
        GridDropout => grid_dropout(img, x, rng),
        CoarseDropout => coarse_dropout(img, x, rng),
    }
}

fn gaussian_taps(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil().max(1.0) as i64;
    let w: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let sum: f64 = w.iter().sum();
    w.iter().map(|v| v / sum).collect()
}

/// Horizontal then vertical pass of a centred odd-length kernel, replicate borders.
fn separable(img: &RgbImage, taps: &[f64]) -> RgbImage {
    let (w, h) = (img.width(), img.height());
    let r = (taps.len() / 2) as i64;
    let src = img.as_raw();
    let mut tmp = vec![0.0f64; src.len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut acc = 0.0;
                for (j, t) in taps.iter().enumerate() {
                    let sx = (x as i64 + j as i64 - r).clamp(0, w as i64 - 1) as usize;
                    acc += t * src[(y * w + sx) * 3 + c] as f64;
                }
                tmp[(y * w + x) * 3 + c] = acc;
            }
        }
    }
    let mut out = RgbImage::new(w, h);
    let dst = out.as_raw_mut();
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut acc = 0.0;
                for (j, t) in taps.iter().enumerate() {
                    let sy = (y as i64 + j as i64 - r).clamp(0, h as i64 - 1) as usize;
                    acc += t * tmp[(sy * w + x) * 3 + c];
                }
                dst[(y * w + x) * 3 + c] = to_u8(acc);
            }
        }
    }
    out
}

fn median_blur(img: &RgbImage, radius: usize) -> RgbImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let r = radius as i64;
    let mut window = Vec::with_capacity((2 * radius + 1).pow(2));
    RgbImage::from_fn(img.width(), img.height(), |x, y| {
        std::array::from_fn(|c| {
            window.clear();
            for dy in -r..=r {
                for dx in -r..=r {
                    let sx = (x as i64 + dx).clamp(0, w - 1) as usize;
                    let sy = (y as i64 + dy).clamp(0, h - 1) as usize;
                    window.push(img.get(sx, sy)[c]);
                }
            }
            window.sort_unstable();
            window[window.len() / 2]
        })
    })
}

/// Luma noise shared across channels plus independent chroma noise.
fn iso_noise(img: &RgbImage, intensity: f64, rng: &mut ChaCha8Rng) -> RgbImage {
    let luma = Normal::new(0.0, 10.0 * intensity).expect("finite std");
    let chroma = Normal::new(0.0, 5.0 * intensity).expect("finite std");
    let mut out = img.clone();
    for px in out.as_raw_mut().chunks_exact_mut(3) {
        let l = luma.sample(rng);
        for v in px.iter_mut() {
            *v = to_u8(*v as f64 + l + chroma.sample(rng));
        }
    }
    out
}

fn color_jitter(img: &RgbImage, brightness: f64, contrast: f64, saturation: f64) -> RgbImage {
    let gray = |p: [f64; 3]| 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    let scaled: Vec<[f64; 3]> = img
        .as_raw()
        .chunks_exact(3)
        .map(|p| std::array::from_fn(|c| p[c] as f64 * brightness))
        .collect();
    let mean = scaled.iter().map(|&p| gray(p)).sum::<f64>() / scaled.len().max(1) as f64;
    let mut out = img.clone();
    for (dst, p) in out.as_raw_mut().chunks_exact_mut(3).zip(&scaled) {
        let p: [f64; 3] = std::array::from_fn(|c| (p[c] - mean) * contrast + mean);
        let g = gray(p);
        for c in 0..3 {
            dst[c] = to_u8(g + (p[c] - g) * saturation);
        }
    }
    out
}

/// Darkens a random convex quadrilateral.
fn shadow(img: &RgbImage, factor: f64, rng: &mut ChaCha8Rng) -> RgbImage {
    let (w, h) = (img.width() as f64, img.height() as f64);
    let (cx, cy) = (rng.random_range(0.0..w), rng.random_range(0.0..h));
    let (rx, ry) = (rng.random_range(0.15..0.5) * w, rng.random_range(0.15..0.5) * h);
    let start = rng.random_range(0.0..std::f64::consts::TAU);
    let corners: Vec<(f64, f64)> = (0..4)
        .map(|i| {
            let a = start + i as f64 * std::f64::consts::FRAC_PI_2 + rng.random_range(-0.4..0.4);
            (cx + rx * a.cos(), cy + ry * a.sin())
        })
        .collect();
    let inside = |px: f64, py: f64| {
        let mut sign = 0.0f64;
        for i in 0..4 {
            let (ax, ay) = corners[i];
            let (bx, by) = corners[(i + 1) % 4];
            let cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
            if cross != 0.0 {
                if sign != 0.0 && cross.signum() != sign {
                    return false;
                }
                sign = cross.signum();
            }
        }
        true
    };
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            if inside(x as f64 + 0.5, y as f64 + 0.5) {
                let p = img.get(x, y);
                out.put(x, y, p.map(|v| to_u8(v as f64 * factor)));
            }
        }
    }
    out
}

fn fill_rect(img: &mut RgbImage, x0: usize, y0: usize, x1: usize, y1: usize) {
    for y in y0..y1.min(img.height()) {
        for x in x0..x1.min(img.width()) {
            img.put(x, y, [0; 3]);
        }
    }
}

/// One vertical and one horizontal zero-filled stripe.
fn xy_masking(img: &RgbImage, frac: f64, rng: &mut ChaCha8Rng) -> RgbImage {
    let (w, h) = (img.width(), img.height());
    let sw = ((w as f64 * frac).round() as usize).clamp(1, w);
    let sh = ((h as f64 * frac).round() as usize).clamp(1, h);
    let x0 = rng.random_range(0..=w - sw);
    let y0 = rng.random_range(0..=h - sh);
    let mut out = img.clone();
    fill_rect(&mut out, x0, 0, x0 + sw, h);
    fill_rect(&mut out, 0, y0, w, y0 + sh);
    out
}

/// Zeroes a square of side `ratio * unit` at the same offset in every grid cell.
fn grid_dropout(img: &RgbImage, ratio: f64, rng: &mut ChaCha8Rng) -> RgbImage {
    let (w, h) = (img.width(), img.height());
    let unit = (w.min(h) / rng.random_range(4..=8usize)).max(2);
    let side = ((unit as f64 * ratio).round() as usize).clamp(1, unit);
    let (ox, oy) = (rng.random_range(0..=unit - side), rng.random_range(0..=unit - side));
    let mut out = img.clone();
    for gy in (0..h).step_by(unit) {
        for gx in (0..w).step_by(unit) {
            fill_rect(&mut out, gx + ox, gy + oy, gx + ox + side, gy + oy + side);
        }
    }
    out
}

/// Between 1 and 8 zero-filled square holes.
fn coarse_dropout(img: &RgbImage, frac: f64, rng: &mut ChaCha8Rng) -> RgbImage {
    let (w, h) = (img.width(), img.height());
    let side = ((w.min(h) as f64 * frac).round() as usize).clamp(1, w.min(h));
    let mut out = img.clone();
    for _ in 0..rng.random_range(1..=8) {
        let x0 = rng.random_range(0..=w - side);
        let y0 = rng.random_range(0..=h - side);
        fill_rect(&mut out, x0, y0, x0 + side, y0 + side);
    }
    out
}

/// One row of the export manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub source_path: String,
    pub output_path: String,
    pub seed: u64,
    pub transforms_fired: String,
}

/// Seed for copy `k` of image `image_id`.
pub fn augment_seed(global_seed: u64, image_id: u64, copy: u32) -> u64 {
    seed_from_key(&format!("{global_seed}/{image_id}/augment/{copy}"))
}

/// Writes `copies` augmented variants of every image plus `annotations.json`
/// and `manifest.csv` under `out_root`.
///
/// Copy `k` of image `id` gets id `id * copies + k` (annotations likewise), so
/// a single copy keeps all ids. A copy where no transform fired is the source
/// file copied verbatim; every other copy is written as PNG.
pub fn export_augmented(
    index: &DatasetIndex,
    images_root: &Path,
    pipeline: &AugmentationPipeline,
    copies: u32,
    out_root: &Path,
    global_seed: u64,
) -> Result<Vec<ManifestRow>> {
    if copies == 0 {
        return Err(Error::Usage("copies must be >= 1".into()));
    }
    pipeline.validate()?;
    let img_dir = out_root.join("images");
    fs::create_dir_all(&img_dir).map_err(|e| Error::io(&img_dir, e))?;

    let jobs: Vec<(&ImageRecord, u32)> =
        index.images.iter().flat_map(|r| (0..copies).map(move |k| (r, k))).collect();
    let results: Vec<Result<(ImageRecord, ManifestRow)>> = jobs
        .par_iter()
        .map(|&(rec, k)| {
            let src = images_root.join(&rec.file_name);
            let bytes = fs::read(&src).map_err(|e| Error::io(&src, e))?;
            let img = image::decode(&bytes).map_err(|e| match e {
                Error::Codec(m) => Error::Codec(format!("{}: {m}", src.display())),
                other => other,
            })?;
            let seed = augment_seed(global_seed, rec.id, k);
            let aug = apply_pipeline_traced(pipeline, &img, seed);
            let stem = Path::new(&rec.file_name).file_stem().and_then(|s| s.to_str()).unwrap_or("image");
            let (name, data) = if aug.fired.is_empty() {
                let ext = Path::new(&rec.file_name).extension().and_then(|s| s.to_str()).unwrap_or("png");
                (format!("{stem}__aug{k}.{ext}"), bytes)
            } else {
                (format!("{stem}__aug{k}.png"), image::encode_png(&aug.image)?)
            };
            let dst: PathBuf = img_dir.join(&name);
            fs::write(&dst, data).map_err(|e| Error::io(&dst, e))?;
            let mut out_rec = rec.clone();
            out_rec.id = rec.id * copies as u64 + k as u64;
            out_rec.file_name = name;
            let row = ManifestRow {
                source_path: src.display().to_string(),
                output_path: dst.display().to_string(),
                seed,
                transforms_fired: aug.fired.iter().map(|t| t.name()).collect::<Vec<_>>().join("+"),
            };
            Ok((out_rec, row))
        })
        .collect();

    let mut images = Vec::with_capacity(results.len());
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        let (rec, row) = r?;
        images.push(rec);
        rows.push(row);
    }
    let annotations: Vec<Annotation> = index
        .annotations
        .iter()
        .flat_map(|a| {
            (0..copies).map(move |k| {
                let mut a = a.clone();
                a.id = a.id * copies as u64 + k as u64;
                a.image_id = a.image_id * copies as u64 + k as u64;
                a
            })
        })
        .collect();
    let ann_path = out_root.join("annotations.json");
    let text = serde_json::to_string_pretty(&index.to_json_with(&images, &annotations)).expect("json");
    fs::write(&ann_path, text).map_err(|e| Error::io(&ann_path, e))?;

    rows.sort_by(|a, b| a.output_path.cmp(&b.output_path));
    let manifest = out_root.join("manifest.csv");
    let mut w = csv::Writer::from_path(&manifest).map_err(|e| Error::io(&manifest, e.into()))?;
    for r in &rows {
        w.serialize(r).map_err(|e| Error::io(&manifest, e.into()))?;
    }
    w.flush().map_err(|e| Error::io(&manifest, e))?;
    Ok(rows)
}
