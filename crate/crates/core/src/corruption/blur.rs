use rand::Rng;

use crate::image::{to_u8, RgbImage};
use crate::seed;

/// Sparse 2-D convolution kernel: `(dx, dy, weight)` taps whose weights sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LineKernel {
    pub taps: Vec<(i64, i64, f64)>,
}

impl LineKernel {
    /// Gaussian-weighted line of `2 * radius + 1` samples through the origin at
    /// `angle_deg`, rasterized to the nearest pixel offsets and normalized.
    pub fn new(radius: u32, sigma: f64, angle_deg: f64) -> Self {
        let (sin, cos) = angle_deg.to_radians().sin_cos();
        let r = radius as i64;
        let mut taps: Vec<(i64, i64, f64)> = Vec::with_capacity(2 * radius as usize + 1);
        for i in -r..=r {
            let w = if sigma > 0.0 {
                (-((i * i) as f64) / (2.0 * sigma * sigma)).exp()
            } else if i == 0 {
                1.0
            } else {
                0.0
            };
            if w == 0.0 {
                continue;
            }
            let dx = (i as f64 * cos).round() as i64;
            let dy = (i as f64 * sin).round() as i64;
            match taps.iter_mut().find(|t| t.0 == dx && t.1 == dy) {
                Some(t) => t.2 += w,
                None => taps.push((dx, dy, w)),
            }
        }
        let total: f64 = taps.iter().map(|t| t.2).sum();
        for t in &mut taps {
            t.2 /= total;
        }
        Self { taps }
    }

    pub fn is_identity(&self) -> bool {
        self.taps.len() == 1 && self.taps[0].0 == 0 && self.taps[0].1 == 0
    }
}

/// Direction in degrees, uniform in [-45, 45], drawn from `seed`.
pub fn motion_angle(seed: u64) -> f64 {
    seed::rng(seed).random_range(-45.0..=45.0)
}

/// Motion blur along a seeded direction. Border pixels are replicated.
pub fn motion_blur(img: &RgbImage, radius: u32, sigma: f64, seed: u64) -> RgbImage {
    let kernel = LineKernel::new(radius, sigma, motion_angle(seed));
    convolve(img, &kernel)
}

pub fn convolve(img: &RgbImage, kernel: &LineKernel) -> RgbImage {
    if kernel.is_identity() {
        return img.clone();
    }
    let (w, h) = (img.width() as i64, img.height() as i64);
    let src = img.as_raw();
    let mut out = RgbImage::new(img.width(), img.height());
    let dst = out.as_raw_mut();
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f64; 3];
            for &(dx, dy, wt) in &kernel.taps {
                let sx = (x + dx).clamp(0, w - 1);
                let sy = (y + dy).clamp(0, h - 1);
                let i = ((sy * w + sx) * 3) as usize;
                acc[0] += wt * src[i] as f64;
                acc[1] += wt * src[i + 1] as f64;
                acc[2] += wt * src[i + 2] as f64;
            }
            let o = ((y * w + x) * 3) as usize;
            for c in 0..3 {
                dst[o + c] = to_u8(acc[c]);
            }
        }
    }
    out
}
