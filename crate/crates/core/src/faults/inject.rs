use super::hash_coords;
use crate::pipeline::CameraSide;
use crate::vision::RawImage;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FaultParseError {
    #[error("bad fault spec '{0}': expected KIND:TARGET[:PARAM]")]
    BadShape(String),
    #[error("unknown fault kind '{0}'")]
    UnknownKind(String),
    #[error("unknown target '{0}': expected left or right")]
    UnknownTarget(String),
    #[error("bad parameter '{param}' for {kind}: {message}")]
    BadParam {
        kind: &'static str,
        param: String,
        message: String,
    },
}

/// What goes wrong with the lens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaultKind {
    /// Lens fully covered: every sample drops to a low constant with a
    /// little sensor noise.
    Cover,
    /// Overexposure: gain and offset (offset as a fraction of the maximum
    /// level) followed by clamping.
    Overexpose { gain: f64, offset: f64 },
    /// A contiguous band of leftmost columns covered; the rest untouched.
    PartialCover { fraction: f64 },
}

/// A fault applied to one camera's RAW image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultSpec {
    pub kind: FaultKind,
    pub target: CameraSide,
}

impl FaultSpec {
    pub const DEFAULT_OVEREXPOSE_GAIN: f64 = 20.0;
    pub const DEFAULT_OVEREXPOSE_OFFSET: f64 = 0.1;

    /// Parse the CLI form `KIND:TARGET[:PARAM]`, e.g. `cover:left`,
    /// `overexpose:left:20,0.1`, `partial_cover:left:0.3`.
    pub fn parse(text: &str) -> Result<Self, FaultParseError> {
        let mut parts = text.splitn(3, ':');
        let kind_text = parts.next().filter(|s| !s.is_empty());
        let target_text = parts.next().filter(|s| !s.is_empty());
        let (Some(kind_text), Some(target_text)) = (kind_text, target_text) else {
            return Err(FaultParseError::BadShape(text.to_string()));
        };
        let param = parts.next();

        let target = match target_text {
            "left" => CameraSide::Left,
            "right" => CameraSide::Right,
            other => return Err(FaultParseError::UnknownTarget(other.to_string())),
        };

        let kind = match kind_text {
            "cover" => FaultKind::Cover,
            "overexpose" => {
                let (gain, offset) = match param {
                    None => (
                        Self::DEFAULT_OVEREXPOSE_GAIN,
                        Self::DEFAULT_OVEREXPOSE_OFFSET,
                    ),
                    Some(p) => {
                        let bad = |message: &str| FaultParseError::BadParam {
                            kind: "overexpose",
                            param: p.to_string(),
                            message: message.to_string(),
                        };
                        let (g, o) = match p.split_once(',') {
                            Some((g, o)) => (
                                g.parse::<f64>().map_err(|_| bad("gain must be a number"))?,
                                o.parse::<f64>()
                                    .map_err(|_| bad("offset must be a number"))?,
                            ),
                            None => (
                                p.parse::<f64>().map_err(|_| bad("gain must be a number"))?,
                                Self::DEFAULT_OVEREXPOSE_OFFSET,
                            ),
                        };
                        if g.is_nan() || g <= 0.0 {
                            return Err(bad("gain must be positive"));
                        }
                        if !(0.0..=1.0).contains(&o) {
                            return Err(bad("offset must be within 0..=1"));
                        }
                        (g, o)
                    }
                };
                FaultKind::Overexpose { gain, offset }
            }
            "partial_cover" => {
                let p = param.ok_or_else(|| FaultParseError::BadParam {
                    kind: "partial_cover",
                    param: String::new(),
                    message: "cover fraction required".to_string(),
                })?;
                let fraction: f64 = p.parse().map_err(|_| FaultParseError::BadParam {
                    kind: "partial_cover",
                    param: p.to_string(),
                    message: "fraction must be a number".to_string(),
                })?;
                if !(fraction > 0.0 && fraction <= 1.0) {
                    return Err(FaultParseError::BadParam {
                        kind: "partial_cover",
                        param: p.to_string(),
                        message: "fraction must be in (0, 1]".to_string(),
                    });
                }
                FaultKind::PartialCover { fraction }
            }
            other => return Err(FaultParseError::UnknownKind(other.to_string())),
        };

        Ok(FaultSpec { kind, target })
    }
}

impl std::fmt::Display for FaultSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let target = match self.target {
            CameraSide::Left => "left",
            CameraSide::Right => "right",
        };
        match self.kind {
            FaultKind::Cover => write!(f, "cover:{target}"),
            FaultKind::Overexpose { gain, offset } => {
                write!(f, "overexpose:{target}:{gain},{offset}")
            }
            FaultKind::PartialCover { fraction } => {
                write!(f, "partial_cover:{target}:{fraction}")
            }
        }
    }
}

const COVER_LEVEL: i64 = 2;

fn covered_sample(x: u32, y: u32) -> u16 {
    // Constant level 2 plus deterministic noise in {-1, 0, +1}.
    let word = hash_coords(0x636f766572, &[i64::from(x), i64::from(y)]);
    let noise = (word % 3) as i64 - 1;
    (COVER_LEVEL + noise) as u16
}

/// Apply a lens fault to a RAW image, preserving dimensions, bit depth and
/// Bayer metadata.
pub fn inject(img: &RawImage, fault: &FaultSpec) -> RawImage {
    let width = img.width();
    let max_level = i64::from(img.max_level());
    let samples: Vec<u16> = match fault.kind {
        FaultKind::Cover => (0..img.samples().len())
            .map(|i| covered_sample(i as u32 % width, i as u32 / width))
            .collect(),
        FaultKind::Overexpose { gain, offset } => img
            .samples()
            .iter()
            .map(|&v| {
                let mapped = (f64::from(v) * gain + offset * max_level as f64).round() as i64;
                mapped.clamp(0, max_level) as u16
            })
            .collect(),
        FaultKind::PartialCover { fraction } => {
            let band = (fraction * f64::from(width)).ceil() as u32;
            img.samples()
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let x = i as u32 % width;
                    if x < band {
                        covered_sample(x, i as u32 / width)
                    } else {
                        v
                    }
                })
                .collect()
        }
    };
    img.with_samples(samples)
        .expect("fault injection preserves geometry")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faults::{render_scene, SceneConfig};
    use crate::vision::{debayer_to_mono, histogram};

    fn scene_left() -> RawImage {
        render_scene(&SceneConfig::default()).unwrap().0
    }

    #[test]
    fn cover_leaves_at_most_three_occupied_levels() {
        let raw = scene_left();
        let covered = inject(
            &raw,
            &FaultSpec {
                kind: FaultKind::Cover,
                target: CameraSide::Left,
            },
        );
        let hist = histogram(&debayer_to_mono(&covered));
        assert!(hist.occupied() <= 3, "occupied = {}", hist.occupied());
        assert_eq!(covered.width(), raw.width());
        assert_eq!(covered.bit_depth(), raw.bit_depth());
    }

    #[test]
    fn overexpose_saturates_95_percent_of_samples() {
        let raw = scene_left();
        let fault = FaultSpec {
            kind: FaultKind::Overexpose {
                gain: FaultSpec::DEFAULT_OVEREXPOSE_GAIN,
                offset: FaultSpec::DEFAULT_OVEREXPOSE_OFFSET,
            },
            target: CameraSide::Left,
        };
        let bright = inject(&raw, &fault);
        let max = bright.max_level();
        // Count-after-clamp oracle.
        let saturated = bright.samples().iter().filter(|&&v| v == max).count();
        let fraction = saturated as f64 / bright.samples().len() as f64;
        assert!(fraction >= 0.95, "saturated fraction {fraction}");
    }

    #[test]
    fn partial_cover_covers_exactly_the_leftmost_band() {
        let raw = scene_left();
        let fault = FaultSpec {
            kind: FaultKind::PartialCover { fraction: 0.3 },
            target: CameraSide::Left,
        };
        let partial = inject(&raw, &fault);
        let band = (0.3 * f64::from(raw.width())).ceil() as u32;
        assert_eq!(band, 48);
        for y in 0..raw.height() {
            for x in 0..raw.width() {
                if x < band {
                    assert!(partial.get(x, y) <= 3, "({x},{y}) should be covered");
                } else {
                    assert_eq!(
                        partial.get(x, y),
                        raw.get(x, y),
                        "({x},{y}) should be untouched"
                    );
                }
            }
        }
    }

    #[test]
    fn parse_round_trips_the_cli_forms() {
        let spec = FaultSpec::parse("cover:left").unwrap();
        assert_eq!(
            spec,
            FaultSpec {
                kind: FaultKind::Cover,
                target: CameraSide::Left
            }
        );

        let spec = FaultSpec::parse("overexpose:right").unwrap();
        assert_eq!(
            spec.kind,
            FaultKind::Overexpose {
                gain: 20.0,
                offset: 0.1
            }
        );
        assert_eq!(spec.target, CameraSide::Right);

        let spec = FaultSpec::parse("overexpose:left:8,0.2").unwrap();
        assert_eq!(
            spec.kind,
            FaultKind::Overexpose {
                gain: 8.0,
                offset: 0.2
            }
        );

        let spec = FaultSpec::parse("partial_cover:left:0.3").unwrap();
        assert_eq!(spec.kind, FaultKind::PartialCover { fraction: 0.3 });

        assert!(FaultSpec::parse("melt:left").is_err());
        assert!(FaultSpec::parse("cover:up").is_err());
        assert!(FaultSpec::parse("partial_cover:left").is_err());
        assert!(FaultSpec::parse("partial_cover:left:1.5").is_err());
    }

    #[test]
    fn injection_is_deterministic() {
        let raw = scene_left();
        let fault = FaultSpec {
            kind: FaultKind::Cover,
            target: CameraSide::Left,
        };
        assert_eq!(inject(&raw, &fault), inject(&raw, &fault));
    }
}
