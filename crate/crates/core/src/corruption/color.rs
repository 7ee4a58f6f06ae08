use crate::image::{to_u8, RgbImage};

/// Posterize: keep the top `bits` bits of every sample.
pub fn color_quant(img: &RgbImage, bits: u8) -> RgbImage {
    let bits = bits.clamp(1, 8);
    let mask = !((1u16 << (8 - bits)) - 1) as u8;
    img.map_samples(|v| v & mask)
}

/// Hexagonal HSV with all components in [0, 1]. Hue is in turns.
pub fn rgb_to_hsv(rgb: [u8; 3]) -> [f64; 3] {
    let [r, g, b] = rgb.map(|c| c as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let v = max;
    let s = if max == 0.0 { 0.0 } else { (max - min) / max };
    let delta = max - min;
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        ((g - b) / delta).rem_euclid(6.0) / 6.0
    } else if max == g {
        ((b - r) / delta + 2.0) / 6.0
    } else {
        ((r - g) / delta + 4.0) / 6.0
    };
    [h, s, v]
}

/// Inverse of [`rgb_to_hsv`], returning unrounded 0..255 components.
pub fn hsv_to_rgb(hsv: [f64; 3]) -> [f64; 3] {
    let [h, s, v] = hsv;
    let h6 = (h * 6.0).rem_euclid(6.0);
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let rgb = match sector as u8 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    };
    rgb.map(|c| c * 255.0)
}

/// Raises HSV value by `delta_v` (saturating at 1) with hue and saturation fixed.
pub fn brightness(img: &RgbImage, delta_v: f64) -> RgbImage {
    img.map_pixels(|px| {
        let [h, s, v] = rgb_to_hsv(px);
        let v = (v + delta_v).min(1.0);
        hsv_to_rgb([h, s, v]).map(to_u8)
    })
}

/// Linear scaling of every sample by `gamma` in (0, 1].
pub fn darkness(img: &RgbImage, gamma: f64) -> RgbImage {
    img.map_samples(|v| to_u8(gamma * v as f64))
}

/// Per-channel mean over the whole image, in channel order.
pub fn channel_means(img: &RgbImage) -> [f64; 3] {
    let mut sums = [0u64; 3];
    for px in img.as_raw().chunks_exact(3) {
        for c in 0..3 {
            sums[c] += px[c] as u64;
        }
    }
    let n = img.pixel_count() as f64;
    sums.map(|s| s as f64 / n)
}

/// Scales each channel's deviation from its mean by `factor`.
pub fn contrast(img: &RgbImage, factor: f64) -> RgbImage {
    let means = channel_means(img);
    let mut out = img.clone();
    for px in out.as_raw_mut().chunks_exact_mut(3) {
        for c in 0..3 {
            px[c] = to_u8((px[c] as f64 - means[c]) * factor + means[c]);
        }
    }
    out
}
