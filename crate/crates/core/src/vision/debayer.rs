use super::image::{MonoImage, RawImage};

/// Convert a Bayer mosaic into grayscale by cell-mean luminance.
///
/// Each 2x2 Bayer cell is replaced by the mean of its four samples,
/// rounded half-up, and the mean is replicated to all four pixels of the
/// cell. Output keeps the input dimensions and bit depth.
pub fn debayer_to_mono(raw: &RawImage) -> MonoImage {
    let width = raw.width() as usize;
    let height = raw.height() as usize;
    let src = raw.samples();
    let mut out = vec![0u16; width * height];

    for cy in (0..height).step_by(2) {
        for cx in (0..width).step_by(2) {
            let a = u32::from(src[cy * width + cx]);
            let b = u32::from(src[cy * width + cx + 1]);
            let c = u32::from(src[(cy + 1) * width + cx]);
            let d = u32::from(src[(cy + 1) * width + cx + 1]);
            let mean = ((a + b + c + d + 2) / 4) as u16;
            out[cy * width + cx] = mean;
            out[cy * width + cx + 1] = mean;
            out[(cy + 1) * width + cx] = mean;
            out[(cy + 1) * width + cx + 1] = mean;
        }
    }

    MonoImage::new(raw.width(), raw.height(), raw.bit_depth(), out)
        .expect("cell means stay within the input bit depth")
}
