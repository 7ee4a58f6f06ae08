use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::image::{to_u8, RgbImage};
use crate::seed;

/// Adds zero-mean Gaussian noise with standard deviation `gain * sigma`
/// (8-bit intensity units) to every sample.
pub fn gaussian_noise(img: &RgbImage, sigma: f64, gain: f64, seed: u64) -> RgbImage {
    let std = sigma * gain;
    if std == 0.0 {
        return img.clone();
    }
    let normal = Normal::new(0.0, std).expect("noise std must be finite and non-negative");
    let mut rng = seed::rng(seed);
    let mut out = img.clone();
    for v in out.as_raw_mut() {
        *v = to_u8(*v as f64 + normal.sample(&mut rng));
    }
    out
}

fn replaced_count(width: usize, height: usize, proportion: f64) -> usize {
    let n = width * height;
    ((proportion / 100.0 * n as f64).floor() as usize).min(n)
}

fn select_positions<R: Rng>(rng: &mut R, width: usize, height: usize, proportion: f64) -> Vec<usize> {
    let n = width * height;
    index::sample(rng, n, replaced_count(width, height, proportion)).into_vec()
}

/// Pixel indices (row-major) that `impulse_noise` replaces for this seed.
pub fn impulse_positions(width: usize, height: usize, proportion: f64, seed: u64) -> Vec<usize> {
    select_positions(&mut seed::rng(seed), width, height, proportion)
}

/// Salt-and-pepper noise: `proportion` percent of pixels, chosen without
/// replacement, become black or white on all three channels.
pub fn impulse_noise(img: &RgbImage, proportion: f64, seed: u64) -> RgbImage {
    let mut rng = seed::rng(seed);
    let positions = select_positions(&mut rng, img.width(), img.height(), proportion);
    let mut out = img.clone();
    let data = out.as_raw_mut();
    for p in positions {
        let v = if rng.random_bool(0.5) { 255 } else { 0 };
        data[p * 3..p * 3 + 3].fill(v);
    }
    out
}
