use thiserror::Error;

/// Bayer mosaic layout of a RAW sensor image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BayerPattern {
    Rggb,
    Bggr,
    Grbg,
    Gbrg,
}

impl BayerPattern {
    pub fn as_str(self) -> &'static str {
        match self {
            BayerPattern::Rggb => "RGGB",
            BayerPattern::Bggr => "BGGR",
            BayerPattern::Grbg => "GRBG",
            BayerPattern::Gbrg => "GBRG",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RGGB" => Some(BayerPattern::Rggb),
            "BGGR" => Some(BayerPattern::Bggr),
            "GRBG" => Some(BayerPattern::Grbg),
            "GBRG" => Some(BayerPattern::Gbrg),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("bit depth {0} out of range (8..=16)")]
    BadBitDepth(u8),
    #[error("sample {value} at index {index} exceeds bit depth {bit_depth}")]
    SampleOutOfRange {
        index: usize,
        value: u16,
        bit_depth: u8,
    },
    #[error("sample buffer has {got} values, expected {expected} ({width}x{height})")]
    BadSampleCount {
        got: usize,
        expected: usize,
        width: u32,
        height: u32,
    },
    #[error("RAW image dimensions {width}x{height} must be even")]
    OddRawDimensions { width: u32, height: u32 },
}

fn check_samples(
    width: u32,
    height: u32,
    bit_depth: u8,
    samples: &[u16],
) -> Result<(), ImageError> {
    if !(8..=16).contains(&bit_depth) {
        return Err(ImageError::BadBitDepth(bit_depth));
    }
    let expected = width as usize * height as usize;
    if samples.len() != expected {
        return Err(ImageError::BadSampleCount {
            got: samples.len(),
            expected,
            width,
            height,
        });
    }
    if bit_depth < 16 {
        let limit = 1u32 << bit_depth;
        for (index, &value) in samples.iter().enumerate() {
            if u32::from(value) >= limit {
                return Err(ImageError::SampleOutOfRange {
                    index,
                    value,
                    bit_depth,
                });
            }
        }
    }
    Ok(())
}

/// Single-sensor Bayer mosaic image straight off a camera.
///
/// Samples are row-major, one per photosite, strictly below `2^bit_depth`.
/// Width and height are even (a Bayer cell is 2x2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    width: u32,
    height: u32,
    bit_depth: u8,
    bayer_pattern: BayerPattern,
    samples: Vec<u16>,
}

impl RawImage {
    pub fn new(
        width: u32,
        height: u32,
        bit_depth: u8,
        bayer_pattern: BayerPattern,
        samples: Vec<u16>,
    ) -> Result<Self, ImageError> {
        if !width.is_multiple_of(2) || !height.is_multiple_of(2) {
            return Err(ImageError::OddRawDimensions { width, height });
        }
        check_samples(width, height, bit_depth, &samples)?;
        Ok(RawImage {
            width,
            height,
            bit_depth,
            bayer_pattern,
            samples,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn bayer_pattern(&self) -> BayerPattern {
        self.bayer_pattern
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    /// Highest representable intensity level.
    pub fn max_level(&self) -> u16 {
        max_level(self.bit_depth)
    }

    pub fn get(&self, x: u32, y: u32) -> u16 {
        self.samples[y as usize * self.width as usize + x as usize]
    }

    /// Rebuild with different samples, keeping geometry and metadata.
    pub fn with_samples(&self, samples: Vec<u16>) -> Result<Self, ImageError> {
        RawImage::new(
            self.width,
            self.height,
            self.bit_depth,
            self.bayer_pattern,
            samples,
        )
    }
}

/// Grayscale raster with explicit bit depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoImage {
    width: u32,
    height: u32,
    bit_depth: u8,
    samples: Vec<u16>,
}

impl MonoImage {
    pub fn new(
        width: u32,
        height: u32,
        bit_depth: u8,
        samples: Vec<u16>,
    ) -> Result<Self, ImageError> {
        check_samples(width, height, bit_depth, &samples)?;
        Ok(MonoImage {
            width,
            height,
            bit_depth,
            samples,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn max_level(&self) -> u16 {
        max_level(self.bit_depth)
    }

    pub fn get(&self, x: u32, y: u32) -> u16 {
        self.samples[y as usize * self.width as usize + x as usize]
    }

    /// Number of representable intensity levels (`2^bit_depth`).
    pub fn levels(&self) -> u32 {
        1u32 << self.bit_depth
    }
}

pub(crate) fn max_level(bit_depth: u8) -> u16 {
    ((1u32 << bit_depth) - 1) as u16
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_rejects_odd_dimensions() {
        let err = RawImage::new(3, 4, 8, BayerPattern::Rggb, vec![0; 12]).unwrap_err();
        assert!(matches!(err, ImageError::OddRawDimensions { .. }));
    }

    #[test]
    fn rejects_out_of_range_sample() {
        let err = MonoImage::new(2, 1, 8, vec![255, 256]).unwrap_err();
        assert_eq!(
            err,
            ImageError::SampleOutOfRange {
                index: 1,
                value: 256,
                bit_depth: 8
            }
        );
    }

    #[test]
    fn rejects_wrong_sample_count() {
        let err = MonoImage::new(2, 2, 8, vec![0; 3]).unwrap_err();
        assert!(matches!(
            err,
            ImageError::BadSampleCount {
                got: 3,
                expected: 4,
                ..
            }
        ));
    }

    #[test]
    fn sixteen_bit_accepts_full_range() {
        let img = MonoImage::new(1, 1, 16, vec![u16::MAX]).unwrap();
        assert_eq!(img.max_level(), u16::MAX);
    }
}
