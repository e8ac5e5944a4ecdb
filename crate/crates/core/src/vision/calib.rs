use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibrationError {
    #[error("focal length must be positive, got {0}")]
    BadFocalLength(f64),
    #[error("baseline must be positive, got {0}")]
    BadBaseline(f64),
}

/// Pinhole stereo calibration shared by both cameras.
///
/// One radial coefficient covers the undistortion stage; `radial_k1 = 0`
/// is the ideal lens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationInfo {
    /// Focal length in pixels.
    pub focal_length: f64,
    /// Principal point (cx, cy) in pixels.
    pub principal_point: (f64, f64),
    /// Stereo baseline in meters.
    pub baseline: f64,
    /// First radial distortion coefficient; 0 = ideal.
    #[serde(default)]
    pub radial_k1: f64,
}

impl CalibrationInfo {
    pub fn new(
        focal_length: f64,
        principal_point: (f64, f64),
        baseline: f64,
        radial_k1: f64,
    ) -> Result<Self, CalibrationError> {
        let calib = CalibrationInfo {
            focal_length,
            principal_point,
            baseline,
            radial_k1,
        };
        calib.validate()?;
        Ok(calib)
    }

    pub fn validate(&self) -> Result<(), CalibrationError> {
        if self.focal_length.is_nan() || self.focal_length <= 0.0 {
            return Err(CalibrationError::BadFocalLength(self.focal_length));
        }
        if self.baseline.is_nan() || self.baseline <= 0.0 {
            return Err(CalibrationError::BadBaseline(self.baseline));
        }
        Ok(())
    }
}
