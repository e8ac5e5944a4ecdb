//! Image types and the stereo processing kernels.
//!
//! All kernels are pure functions over immutable inputs and are exactly
//! reproducible: identical inputs yield bit-identical outputs.

mod calib;
mod cloud;
mod debayer;
mod disparity;
mod histogram;
mod image;
pub mod pgm;
mod rectify;

pub use calib::{CalibrationError, CalibrationInfo};
pub use cloud::{in_area, reproject, Point3, PointCloud};
pub use debayer::debayer_to_mono;
pub use disparity::{disparity, DisparityImage};
pub use histogram::{histogram, Histogram};
pub use image::{BayerPattern, ImageError, MonoImage, RawImage};
pub use rectify::rectify;

use thiserror::Error;

/// Errors raised by the processing kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("dimension mismatch: left is {left_width}x{left_height}, right is {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: u32,
        left_height: u32,
        right_width: u32,
        right_height: u32,
    },
    #[error("bit depth mismatch: left is {left} bits, right is {right} bits")]
    BitDepthMismatch { left: u8, right: u8 },
    #[error("invalid block size {0}: must be odd and at least 3")]
    InvalidBlockSize(u32),
}
