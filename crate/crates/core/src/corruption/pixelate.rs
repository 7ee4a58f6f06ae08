use crate::image::RgbImage;

/// Integer overlap weights between `dst` output cells and `src` input cells
/// when `src` pixels are area-averaged into `dst` pixels. Lengths are in
/// units of `1 / dst` source pixels, so every row sums to `src`.
fn area_weights(src: usize, dst: usize) -> Vec<Vec<(usize, u64)>> {
    (0..dst)
        .map(|j| {
            let start = j * src;
            let end = (j + 1) * src;
            let first = start / dst;
            let last = (end - 1) / dst;
            (first..=last)
                .filter_map(|i| {
                    let lo = start.max(i * dst);
                    let hi = end.min((i + 1) * dst);
                    (hi > lo).then_some((i, (hi - lo) as u64))
                })
                .collect()
        })
        .collect()
}

/// Area-averaging downscale with half-away-from-zero rounding. Exact integer arithmetic.
pub fn downscale_area(img: &RgbImage, new_w: usize, new_h: usize) -> RgbImage {
    let wx = area_weights(img.width(), new_w);
    let wy = area_weights(img.height(), new_h);
    let src = img.as_raw();
    let w = img.width();
    let den = (img.width() * img.height()) as u64;

    // horizontal pass, unnormalized
    let mut rows = vec![0u64; img.height() * new_w * 3];
    for y in 0..img.height() {
        for (j, taps) in wx.iter().enumerate() {
            for &(i, wt) in taps {
                let s = (y * w + i) * 3;
                let d = (y * new_w + j) * 3;
                for c in 0..3 {
                    rows[d + c] += wt * src[s + c] as u64;
                }
            }
        }
    }

    let mut out = RgbImage::new(new_w, new_h);
    let dst = out.as_raw_mut();
    for (k, taps) in wy.iter().enumerate() {
        for j in 0..new_w {
            let mut acc = [0u64; 3];
            for &(i, wt) in taps {
                let s = (i * new_w + j) * 3;
                for c in 0..3 {
                    acc[c] += wt * rows[s + c];
                }
            }
            let d = (k * new_w + j) * 3;
            for c in 0..3 {
                dst[d + c] = ((2 * acc[c] + den) / (2 * den)) as u8;
            }
        }
    }
    out
}

/// Nearest-neighbour upscale sampling at pixel centres, so each output pixel
/// takes the source cell that covers most of it.
pub fn upscale_nearest(img: &RgbImage, new_w: usize, new_h: usize) -> RgbImage {
    let (w, h) = (img.width(), img.height());
    let centre = |i: usize, src: usize, dst: usize| ((2 * i + 1) * src / (2 * dst)).min(src - 1);
    RgbImage::from_fn(new_w, new_h, |x, y| img.get(centre(x, w, new_w), centre(y, h, new_h)))
}

/// Target size for a `ratio` percent downscale, at least one pixel.
pub fn scaled_dim(dim: usize, ratio: f64) -> usize {
    ((dim as f64 * ratio / 100.0).ceil() as usize).clamp(1, dim)
}

/// Block pixelation: area-average down to `ratio` percent, nearest-neighbour back up.
pub fn pixelate(img: &RgbImage, ratio: f64) -> RgbImage {
    let nw = scaled_dim(img.width(), ratio);
    let nh = scaled_dim(img.height(), ratio);
    if nw == img.width() && nh == img.height() {
        return img.clone();
    }
    upscale_nearest(&downscale_area(img, nw, nh), img.width(), img.height())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_half_rounds_up() {
        let img = RgbImage::from_raw(2, 2, vec![0, 0, 0, 0, 0, 0, 255, 255, 255, 255, 255, 255]).unwrap();
        let out = pixelate(&img, 50.0);
        assert!(out.as_raw().iter().all(|&v| v == 128));
    }

    #[test]
    fn weights_cover_source_exactly() {
        for (src, dst) in [(10, 3), (640, 384), (7, 7), (5, 2), (3, 1)] {
            let w = area_weights(src, dst);
            for taps in &w {
                assert_eq!(taps.iter().map(|t| t.1).sum::<u64>(), src as u64);
            }
            let mut per_src = vec![0u64; src];
            for taps in &w {
                for &(i, wt) in taps {
                    per_src[i] += wt;
                }
            }
            assert!(per_src.iter().all(|&t| t == dst as u64));
        }
    }

    #[test]
    fn full_ratio_and_constant_images_are_identity() {
        let img = RgbImage::from_fn(11, 6, |x, y| [(x * 20) as u8, (y * 40) as u8, 9]);
        assert_eq!(pixelate(&img, 100.0), img);
        let flat = RgbImage::filled(13, 9, [17, 171, 250]);
        for r in [60.0, 50.0, 40.0, 30.0, 25.0, 3.0] {
            assert_eq!(pixelate(&flat, r), flat);
        }
    }

    #[test]
    fn upscale_samples_pixel_centres() {
        let small = RgbImage::from_fn(3, 1, |x, _| [x as u8; 3]);
        let up = upscale_nearest(&small, 5, 1);
        // centres 0.5..4.5 scaled by 3/5 land in cells 0, 0, 1, 2, 2
        let got: Vec<u8> = (0..5).map(|x| up.get(x, 0)[0]).collect();
        assert_eq!(got, [0, 0, 1, 2, 2]);
    }

    #[test]
    fn downscale_matches_block_mean_for_integer_factor() {
        let img = RgbImage::from_fn(4, 4, |x, y| [(x + 4 * y) as u8 * 10, 0, 0]);
        let small = downscale_area(&img, 2, 2);
        // top-left block holds 0, 10, 40, 50
        assert_eq!(small.get(0, 0)[0], 25);
        assert_eq!(small.get(1, 1)[0], 125);
    }
}
