use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("region '{name}': min corner must be strictly below max on every axis (axis {axis}: {min} vs {max})")]
    EmptyExtent {
        name: String,
        axis: char,
        min: f64,
        max: f64,
    },
    #[error("region '{name}': z range must be strictly positive (min z = {min_z})")]
    NonPositiveZ { name: String, min_z: f64 },
    #[error("region '{name}': corners must be finite")]
    NonFinite { name: String },
}

/// Named axis-aligned box in the left-camera frame (x right, y down,
/// z forward), meters. Used for landmark checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    name: String,
    min: [f64; 3],
    max: [f64; 3],
}

impl Region {
    pub fn new(name: impl Into<String>, min: [f64; 3], max: [f64; 3]) -> Result<Self, RegionError> {
        let name = name.into();
        if min.iter().chain(max.iter()).any(|v| !v.is_finite()) {
            return Err(RegionError::NonFinite { name });
        }
        for (axis, (&lo, &hi)) in ['x', 'y', 'z'].into_iter().zip(min.iter().zip(max.iter())) {
            if lo >= hi {
                return Err(RegionError::EmptyExtent {
                    name,
                    axis,
                    min: lo,
                    max: hi,
                });
            }
        }
        if min[2] <= 0.0 {
            return Err(RegionError::NonPositiveZ {
                name,
                min_z: min[2],
            });
        }
        Ok(Region { name, min, max })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn min(&self) -> [f64; 3] {
        self.min
    }

    pub fn max(&self) -> [f64; 3] {
        self.max
    }

    /// Inclusive containment on all three axes.
    pub fn contains(&self, x: f64, y: f64, z: f64) -> bool {
        x >= self.min[0]
            && x <= self.max[0]
            && y >= self.min[1]
            && y <= self.max[1]
            && z >= self.min[2]
            && z <= self.max[2]
    }
}
