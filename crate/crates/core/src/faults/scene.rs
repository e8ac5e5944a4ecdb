use super::{camera_index, hash_coords, unit_f64};
use crate::pipeline::CameraSide;
use crate::vision::{BayerPattern, CalibrationInfo, RawImage};
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("landmark projects outside the {side} image (u={u:.1}, v={v:.1})")]
    FrustumViolation { side: &'static str, u: f64, v: f64 },
    #[error("invalid scene: {0}")]
    BadConfig(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scene config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

/// The white square with a black cross, fronto-parallel at `center[2]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandmarkConfig {
    /// Center in the left-camera frame, meters.
    pub center: [f64; 3],
    /// Square side, meters.
    pub side: f64,
    /// Width of the cross arms, meters.
    pub cross_arm_width: f64,
}

impl Default for LandmarkConfig {
    fn default() -> Self {
        LandmarkConfig {
            center: [0.0, 0.25, 1.5],
            side: 0.28,
            cross_arm_width: 0.04,
        }
    }
}

/// Textured background plane behind the landmark.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundConfig {
    /// Plane depth, meters.
    #[serde(default = "default_bg_depth")]
    pub depth: f64,
    /// Texture cell size, meters.
    #[serde(default = "default_bg_cell")]
    pub cell: f64,
    /// Texture intensity range as fractions of the maximum level.
    #[serde(default = "default_bg_low")]
    pub low: f64,
    #[serde(default = "default_bg_high")]
    pub high: f64,
}

fn default_bg_depth() -> f64 {
    2.5
}
fn default_bg_cell() -> f64 {
    0.025
}
fn default_bg_low() -> f64 {
    0.05
}
fn default_bg_high() -> f64 {
    0.75
}

impl Default for BackgroundConfig {
    fn default() -> Self {
        BackgroundConfig {
            depth: default_bg_depth(),
            cell: default_bg_cell(),
            low: default_bg_low(),
            high: default_bg_high(),
        }
    }
}

/// Everything needed to render a deterministic stereo pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub width: u32,
    pub height: u32,
    pub bit_depth: u8,
    pub calibration: CalibrationInfo,
    pub landmark: Option<LandmarkConfig>,
    pub background: BackgroundConfig,
    /// Seed for the world texture.
    pub texture_seed: u64,
    /// Per-pixel uniform noise amplitude in intensity levels.
    pub noise_amplitude: u16,
    /// Landmark fill intensity as a fraction of the maximum level.
    pub landmark_white: f64,
    /// Cross intensity as a fraction of the maximum level.
    pub landmark_black: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            width: 160,
            height: 160,
            bit_depth: 12,
            calibration: CalibrationInfo {
                focal_length: 300.0,
                principal_point: (79.5, 79.5),
                baseline: 0.12,
                radial_k1: 0.0,
            },
            landmark: Some(LandmarkConfig::default()),
            background: BackgroundConfig::default(),
            texture_seed: 1,
            noise_amplitude: 2,
            landmark_white: 0.95,
            landmark_black: 0.02,
        }
    }
}

impl SceneConfig {
    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |m: &str| Err(SceneError::BadConfig(m.to_string()));
        if self.width < 16 || self.height < 16 || !self.width.is_multiple_of(2) || !self.height.is_multiple_of(2) {
            return bad("image size must be even and at least 16x16");
        }
        if !(8..=16).contains(&self.bit_depth) {
            return bad("bit depth must be within 8..=16");
        }
        self.calibration
            .validate()
            .map_err(|e| SceneError::BadConfig(e.to_string()))?;
        if let Some(lm) = &self.landmark {
            if lm.side.is_nan() || lm.side <= 0.0 {
                return bad("landmark side must be positive");
            }
            if lm.center[2].is_nan() || lm.center[2] <= 0.0 {
                return bad("landmark must be in front of the cameras (z > 0)");
            }
            if !(lm.cross_arm_width >= 0.0 && lm.cross_arm_width < lm.side) {
                return bad("cross arm width must be within the square");
            }
        }
        if !(self.background.depth > 0.0 && self.background.cell > 0.0) {
            return bad("background depth and cell size must be positive");
        }
        if !(0.0..=1.0).contains(&self.background.low)
            || !(0.0..=1.0).contains(&self.background.high)
            || self.background.low >= self.background.high
        {
            return bad("background intensity range must satisfy 0 <= low < high <= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    #[serde(default = "default_width")]
    width: u32,
    #[serde(default = "default_height")]
    height: u32,
    #[serde(default = "default_depth")]
    bit_depth: u8,
    #[serde(default)]
    calibration: Option<CalibrationInfo>,
    #[serde(default)]
    landmark: Option<LandmarkConfig>,
    /// Present but empty `[landmark]` tables are rejected by serde; use
    /// `no_landmark = true` to render a scene without one.
    #[serde(default)]
    no_landmark: bool,
    #[serde(default)]
    background: Option<BackgroundConfig>,
    #[serde(default = "default_seed")]
    texture_seed: u64,
    #[serde(default = "default_noise")]
    noise_amplitude: u16,
    #[serde(default = "default_white")]
    landmark_white: f64,
    #[serde(default = "default_black")]
    landmark_black: f64,
}

fn default_width() -> u32 {
    160
}
fn default_height() -> u32 {
    160
}
fn default_depth() -> u8 {
    12
}
fn default_seed() -> u64 {
    1
}
fn default_noise() -> u16 {
    2
}
fn default_white() -> f64 {
    0.95
}
fn default_black() -> f64 {
    0.02
}

/// Load a scene description, falling back to `default_calibration` when the
/// file does not pin its own.
pub fn load_scene_config(
    path: &Path,
    default_calibration: CalibrationInfo,
) -> Result<SceneConfig, SceneError> {
    let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: SceneFile = toml::from_str(&text)?;
    let landmark = if file.no_landmark {
        None
    } else {
        Some(file.landmark.unwrap_or_default())
    };
    let cfg = SceneConfig {
        width: file.width,
        height: file.height,
        bit_depth: file.bit_depth,
        calibration: file.calibration.unwrap_or(default_calibration),
        landmark,
        background: file.background.unwrap_or_default(),
        texture_seed: file.texture_seed,
        noise_amplitude: file.noise_amplitude,
        landmark_white: file.landmark_white,
        landmark_black: file.landmark_black,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Render frame 0 of the scene.
pub fn render_scene(cfg: &SceneConfig) -> Result<(RawImage, RawImage), SceneError> {
    render_scene_frame(cfg, 0)
}

/// Render one stereo frame. The world is static; only the per-pixel sensor
/// noise varies with `frame_id`. Bit-identical for identical inputs.
pub fn render_scene_frame(
    cfg: &SceneConfig,
    frame_id: u64,
) -> Result<(RawImage, RawImage), SceneError> {
    cfg.validate()?;
    check_frustum(cfg)?;
    let left = render_camera(cfg, CameraSide::Left, frame_id);
    let right = render_camera(cfg, CameraSide::Right, frame_id);
    Ok((left, right))
}

fn check_frustum(cfg: &SceneConfig) -> Result<(), SceneError> {
    let Some(lm) = &cfg.landmark else {
        return Ok(());
    };
    let c = &cfg.calibration;
    let half = lm.side / 2.0;
    for (side_name, bx) in [("left", 0.0), ("right", c.baseline)] {
        for (sx, sy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            let x = lm.center[0] + sx * half - bx;
            let y = lm.center[1] + sy * half;
            let u = c.focal_length * x / lm.center[2] + c.principal_point.0;
            let v = c.focal_length * y / lm.center[2] + c.principal_point.1;
            if u < 0.0 || v < 0.0 || u > f64::from(cfg.width - 1) || v > f64::from(cfg.height - 1) {
                return Err(SceneError::FrustumViolation {
                    side: side_name,
                    u,
                    v,
                });
            }
        }
    }
    Ok(())
}

fn render_camera(cfg: &SceneConfig, side: CameraSide, frame_id: u64) -> RawImage {
    let c = &cfg.calibration;
    let bx = match side {
        CameraSide::Left => 0.0,
        CameraSide::Right => c.baseline,
    };
    let max_level = i64::from((1u32 << cfg.bit_depth) - 1);
    let white = (cfg.landmark_white * max_level as f64).round() as i64;
    let black = (cfg.landmark_black * max_level as f64).round() as i64;
    let tex_lo = cfg.background.low * max_level as f64;
    let tex_hi = cfg.background.high * max_level as f64;
    let cam = camera_index(side);

    let mut samples = Vec::with_capacity(cfg.width as usize * cfg.height as usize);
    for v in 0..cfg.height {
        for u in 0..cfg.width {
            let xn = (f64::from(u) - c.principal_point.0) / c.focal_length;
            let yn = (f64::from(v) - c.principal_point.1) / c.focal_length;

            let mut level: i64 = 0;
            let mut hit = false;
            if let Some(lm) = &cfg.landmark {
                // World intersection on the landmark plane.
                let x = xn * lm.center[2] + bx;
                let y = yn * lm.center[2];
                let dx = (x - lm.center[0]).abs();
                let dy = (y - lm.center[1]).abs();
                if dx <= lm.side / 2.0 && dy <= lm.side / 2.0 {
                    hit = true;
                    let on_cross = dx <= lm.cross_arm_width / 2.0 || dy <= lm.cross_arm_width / 2.0;
                    level = if on_cross { black } else { white };
                }
            }
            if !hit {
                // Background plane, textured per world-space cell.
                let x = xn * cfg.background.depth + bx;
                let y = yn * cfg.background.depth;
                let cell_x = (x / cfg.background.cell).floor() as i64;
                let cell_y = (y / cfg.background.cell).floor() as i64;
                let word = hash_coords(cfg.texture_seed, &[cell_x, cell_y]);
                level = (tex_lo + unit_f64(word) * (tex_hi - tex_lo)).round() as i64;
            }

            if cfg.noise_amplitude > 0 {
                let amp = i64::from(cfg.noise_amplitude);
                let word = hash_coords(
                    cfg.texture_seed ^ 0x6e6f697365, // separate noise stream
                    &[i64::from(u), i64::from(v), frame_id as i64, cam],
                );
                let noise = (word % (2 * amp as u64 + 1)) as i64 - amp;
                level += noise;
            }

            samples.push(level.clamp(0, max_level) as u16);
        }
    }

    RawImage::new(
        cfg.width,
        cfg.height,
        cfg.bit_depth,
        BayerPattern::Rggb,
        samples,
    )
    .expect("rendered samples are clamped to the bit depth")
}
