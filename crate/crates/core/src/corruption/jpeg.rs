use jpeg_encoder::{ColorType, Encoder, SamplingFactor};

use crate::error::{Error, Result};
use crate::image::{decode_jpeg, RgbImage};

/// Baseline JPEG, 4:2:0 chroma subsampling, Annex K tables scaled with the
/// libjpeg quality convention.
pub fn encode_jpeg(img: &RgbImage, quality: u8) -> Result<Vec<u8>> {
    if !(1..=100).contains(&quality) {
        return Err(Error::Domain(format!(
            "jpeg quality {quality} out of range (valid range 1..=100)"
        )));
    }
    let (w, h) = (img.width(), img.height());
    if w > u16::MAX as usize || h > u16::MAX as usize {
        return Err(Error::Domain(format!(
            "{w}x{h} exceeds the baseline JPEG size limit of 65535"
        )));
    }
    let mut buf = Vec::new();
    let mut encoder = Encoder::new(&mut buf, quality);
    encoder.set_sampling_factor(SamplingFactor::F_2_2);
    encoder.set_progressive(false);
    encoder.set_optimized_huffman_tables(false);
    encoder
        .encode(img.as_raw(), w as u16, h as u16, ColorType::Rgb)
        .map_err(|e| Error::Codec(format!("jpeg encode: {e}")))?;
    Ok(buf)
}

/// Encode at `quality` and decode back to RGB.
pub fn jpeg_compress(img: &RgbImage, quality: u8) -> Result<RgbImage> {
    let bytes = encode_jpeg(img, quality)?;
    decode_jpeg(&bytes)
}
