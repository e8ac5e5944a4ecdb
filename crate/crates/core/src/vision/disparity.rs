use super::image::MonoImage;
use super::KernelError;

/// Per-pixel horizontal disparity in pixels; `None` marks invalid pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisparityImage {
    width: u32,
    height: u32,
    values: Vec<Option<u16>>,
}

impl DisparityImage {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[Option<u16>] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> Option<u16> {
        self.values[y as usize * self.width as usize + x as usize]
    }

    /// Build from explicit values; intended for tests and synthetic inputs.
    pub fn from_values(width: u32, height: u32, values: Vec<Option<u16>>) -> Self {
        assert_eq!(values.len(), width as usize * height as usize);
        DisparityImage {
            width,
            height,
            values,
        }
    }
}

/// Winner-take-all block-matching disparity along image rows.
///
/// For each interior left pixel the sum of absolute differences over a
/// `block x block` window is minimized over d in `[0, max_disparity]`,
/// restricted to shifts whose right-image window stays inside the image.
/// Ties and unreachable shifts resolve to the smallest d. A border band of
/// `block/2` pixels is invalid.
pub fn disparity(
    left: &MonoImage,
    right: &MonoImage,
    block: u32,
    max_disparity: u16,
) -> Result<DisparityImage, KernelError> {
    if left.width() != right.width() || left.height() != right.height() {
        return Err(KernelError::DimensionMismatch {
            left_width: left.width(),
            left_height: left.height(),
            right_width: right.width(),
            right_height: right.height(),
        });
    }
    if left.bit_depth() != right.bit_depth() {
        return Err(KernelError::BitDepthMismatch {
            left: left.bit_depth(),
            right: right.bit_depth(),
        });
    }
    if block < 3 || block.is_multiple_of(2) {
        return Err(KernelError::InvalidBlockSize(block));
    }

    let width = left.width() as usize;
    let height = left.height() as usize;
    let half = (block / 2) as usize;
    let ls = left.samples();
    let rs = right.samples();
    let mut values = vec![None; width * height];

    if width < block as usize || height < block as usize {
        return Ok(DisparityImage {
            width: left.width(),
            height: left.height(),
            values,
        });
    }

    for y in half..height - half {
        for x in half..width - half {
            // Shifts beyond x - half would push the right window off the image.
            let d_limit = (x - half).min(max_disparity as usize);
            let mut best_d = 0usize;
            let mut best_cost = u64::MAX;
            for d in 0..=d_limit {
                let mut cost = 0u64;
                for wy in y - half..=y + half {
                    let lrow = wy * width;
                    for wx in x - half..=x + half {
                        let l = i64::from(ls[lrow + wx]);
                        let r = i64::from(rs[lrow + wx - d]);
                        cost += l.abs_diff(r);
                    }
                }
                // Strict less-than keeps the smallest d on ties.
                if cost < best_cost {
                    best_cost = cost;
                    best_d = d;
                }
            }
            values[y * width + x] = Some(best_d as u16);
        }
    }

    Ok(DisparityImage {
        width: left.width(),
        height: left.height(),
        values,
    })
}
