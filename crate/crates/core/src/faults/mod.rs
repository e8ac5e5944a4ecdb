//! Synthetic stereo scenes and lens-fault injection.
//!
//! Scenes are a textured background plane plus an optional landmark: a
//! white square with a black cross, placed in the lower part of the field
//! of view. Both cameras render the same world through the pinhole model
//! (horizontal baseline, zero distortion), so every output is a pure
//! function of the configuration and frame number.

mod inject;
mod scene;

use crate::pipeline::CameraSide;
pub use inject::{inject, FaultKind, FaultParseError, FaultSpec};
pub use scene::{
    load_scene_config, render_scene, render_scene_frame, BackgroundConfig, LandmarkConfig,
    SceneConfig, SceneError,
};

/// SplitMix64; the one deterministic bit mixer behind textures and noise.
pub(crate) fn mix(mut state: u64) -> u64 {
    state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Hash a handful of coordinates into one word.
pub(crate) fn hash_coords(seed: u64, parts: &[i64]) -> u64 {
    let mut acc = mix(seed);
    for &p in parts {
        acc = mix(acc ^ (p as u64));
    }
    acc
}

/// Uniform value in [0, 1) from a hash word.
pub(crate) fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 / (1u64 << 53) as f64
}

pub(crate) fn camera_index(side: CameraSide) -> i64 {
    match side {
        CameraSide::Left => 0,
        CameraSide::Right => 1,
    }
}
