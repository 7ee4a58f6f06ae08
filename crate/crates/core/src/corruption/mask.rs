use crate::image::RgbImage;

/// One keypoint to occlude. Coordinates may fall outside the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskTarget {
    pub x: f64,
    pub y: f64,
    /// Visibility flag: 0 unlabeled, 1 occluded, 2 visible.
    pub v: u8,
}

pub type MaskTargetSet = Vec<MaskTarget>;

/// Paints a `size` x `size` square of `fill` around every labeled keypoint.
///
/// Keypoints are snapped to the nearest pixel (half away from zero). The
/// square spans `[x - size/2, x - size/2 + size)` on each axis, clipped to
/// the image.
pub fn keypoint_mask(img: &RgbImage, targets: &[MaskTarget], size: u32, fill: u8) -> RgbImage {
    let mut out = img.clone();
    if size == 0 {
        return out;
    }
    let (w, h) = (img.width() as i64, img.height() as i64);
    let size = size as i64;
    let half = size / 2;
    let data = out.as_raw_mut();
    for t in targets.iter().filter(|t| t.v > 0) {
        if !t.x.is_finite() || !t.y.is_finite() {
            continue;
        }
        let x0 = t.x.round() as i64 - half;
        let y0 = t.y.round() as i64 - half;
        let (xa, xb) = (x0.max(0), (x0 + size).min(w));
        let (ya, yb) = (y0.max(0), (y0 + size).min(h));
        if xa >= xb || ya >= yb {
            continue;
        }
        for y in ya..yb {
            let row = (y * w) as usize * 3;
            data[row + xa as usize * 3..row + xb as usize * 3].fill(fill);
        }
    }
    out
}
