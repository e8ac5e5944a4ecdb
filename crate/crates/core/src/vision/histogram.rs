use super::image::MonoImage;

/// Per-intensity-level pixel counts of a grayscale image.
///
/// `counts` has one slot per representable level (`2^bit_depth`); the sum
/// of all counts equals the pixel count of the source image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn levels(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of levels with at least one pixel.
    pub fn occupied(&self) -> u64 {
        self.counts.iter().filter(|&&c| c > 0).count() as u64
    }

    /// Highest occupied intensity level, if any pixel exists.
    pub fn max_occupied(&self) -> Option<u16> {
        self.counts.iter().rposition(|&c| c > 0).map(|i| i as u16)
    }

    /// Lowest occupied intensity level, if any pixel exists.
    pub fn min_occupied(&self) -> Option<u16> {
        self.counts.iter().position(|&c| c > 0).map(|i| i as u16)
    }
}

/// Count pixels per intensity level.
pub fn histogram(img: &MonoImage) -> Histogram {
    let mut counts = vec![0u64; img.levels() as usize];
    for &v in img.samples() {
        counts[v as usize] += 1;
    }
    Histogram {
        counts,
        total: img.samples().len() as u64,
    }
}
