//! Frame sources: synthetic scenes or directories of PGM stereo pairs.

use anyhow::{bail, Context};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use vismon::faults::{render_scene_frame, SceneConfig};
use vismon::vision::{pgm, RawImage};

pub enum FrameSource {
    Synthetic {
        cfg: SceneConfig,
        frames: u64,
    },
    Directory {
        pairs: Vec<(String, PathBuf, PathBuf)>,
    },
}

impl FrameSource {
    pub fn frame_count(&self) -> u64 {
        match self {
            FrameSource::Synthetic { frames, .. } => *frames,
            FrameSource::Directory { pairs } => pairs.len() as u64,
        }
    }

    /// Produce the RAW pair for a frame index.
    pub fn frame(&self, index: u64) -> anyhow::Result<(RawImage, RawImage)> {
        match self {
            FrameSource::Synthetic { cfg, .. } => {
                let (left, right) = render_scene_frame(cfg, index)
                    .with_context(|| format!("rendering synthetic frame {index}"))?;
                Ok((left, right))
            }
            FrameSource::Directory { pairs } => {
                let (name, left_path, right_path) = &pairs[index as usize];
                let left =
                    read_raw(left_path).with_context(|| format!("frame '{name}' left image"))?;
                let right =
                    read_raw(right_path).with_context(|| format!("frame '{name}' right image"))?;
                Ok((left, right))
            }
        }
    }
}

fn read_raw(path: &Path) -> anyhow::Result<RawImage> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    pgm::read_raw(&mut BufReader::new(file))
        .with_context(|| format!("cannot decode {}", path.display()))
}

/// Scan a directory for `<frame>_L.pgm` / `<frame>_R.pgm` pairs, sorted by
/// frame name.
pub fn scan_stereo_directory(dir: &Path, limit: Option<u64>) -> anyhow::Result<FrameSource> {
    let mut pairs = Vec::new();
    let entries = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read input directory {}", dir.display()))?;
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(frame) = name.strip_suffix("_L.pgm") {
            let right = dir.join(format!("{frame}_R.pgm"));
            if !right.is_file() {
                bail!(
                    "frame '{frame}' has a left image but no {}",
                    right.display()
                );
            }
            pairs.push((frame.to_string(), entry.path(), right));
        }
    }
    if pairs.is_empty() {
        bail!("no <frame>_L.pgm files in {}", dir.display());
    }
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(limit) = limit {
        pairs.truncate(limit as usize);
    }
    Ok(FrameSource::Directory { pairs })
}
