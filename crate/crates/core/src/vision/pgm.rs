//! Binary portable graymap (P5) reading and writing.
//!
//! Mono images are plain P5 files; samples wider than 8 bits are stored as
//! two bytes big-endian, per the portable-graymap convention. RAW images
//! are P5 files carrying one extra metadata comment line in the header:
//!
//! ```text
//! # raw bayer=RGGB bit_depth=12
//! ```

use super::image::{BayerPattern, ImageError, MonoImage, RawImage};
use std::io::{self, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a P5 graymap (bad magic)")]
    BadMagic,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("maxval {0} out of range (1..=65535)")]
    BadMaxval(u32),
    #[error("sample data truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("missing raw metadata line (`# raw bayer=.. bit_depth=..`)")]
    MissingRawMetadata,
    #[error("invalid raw metadata: {0}")]
    BadRawMetadata(String),
    #[error(transparent)]
    Image(#[from] ImageError),
}

fn bit_depth_for_maxval(maxval: u32) -> u8 {
    // Smallest depth whose max level covers maxval, floored at 8.
    let mut depth = 8u8;
    while depth < 16 && (1u32 << depth) - 1 < maxval {
        depth += 1;
    }
    depth
}

fn write_p5<W: Write>(
    w: &mut W,
    width: u32,
    height: u32,
    bit_depth: u8,
    samples: &[u16],
    raw_meta: Option<(BayerPattern, u8)>,
) -> io::Result<()> {
    let maxval = (1u32 << bit_depth) - 1;
    writeln!(w, "P5")?;
    if let Some((pattern, depth)) = raw_meta {
        writeln!(w, "# raw bayer={} bit_depth={}", pattern.as_str(), depth)?;
    }
    write!(w, "{} {}\n{}\n", width, height, maxval)?;
    if bit_depth <= 8 {
        let bytes: Vec<u8> = samples.iter().map(|&v| v as u8).collect();
        w.write_all(&bytes)?;
    } else {
        let mut bytes = Vec::with_capacity(samples.len() * 2);
        for &v in samples {
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        w.write_all(&bytes)?;
    }
    Ok(())
}

pub fn write_mono<W: Write>(w: &mut W, img: &MonoImage) -> io::Result<()> {
    write_p5(
        w,
        img.width(),
        img.height(),
        img.bit_depth(),
        img.samples(),
        None,
    )
}

pub fn write_raw<W: Write>(w: &mut W, img: &RawImage) -> io::Result<()> {
    write_p5(
        w,
        img.width(),
        img.height(),
        img.bit_depth(),
        img.samples(),
        Some((img.bayer_pattern(), img.bit_depth())),
    )
}

struct Header {
    width: u32,
    height: u32,
    maxval: u32,
    comments: Vec<String>,
}

fn read_header<R: Read>(r: &mut R) -> Result<(Header, Vec<u8>), PgmError> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    if data.len() < 2 || &data[..2] != b"P5" {
        return Err(PgmError::BadMagic);
    }

    let mut comments = Vec::new();
    let mut fields = Vec::new();
    let mut pos = 2usize;
    // Header: three whitespace-separated integers; `#` starts a comment
    // running to end of line.
    while fields.len() < 3 {
        match data.get(pos) {
            None => return Err(PgmError::BadHeader("unexpected end of header".into())),
            Some(b'#') => {
                let end = data[pos..]
                    .iter()
                    .position(|&b| b == b'\n')
                    .map(|i| pos + i)
                    .unwrap_or(data.len());
                comments.push(
                    String::from_utf8_lossy(&data[pos + 1..end])
                        .trim()
                        .to_string(),
                );
                pos = end;
            }
            Some(b) if b.is_ascii_whitespace() => pos += 1,
            Some(b) if b.is_ascii_digit() => {
                let start = pos;
                while data.get(pos).is_some_and(|b| b.is_ascii_digit()) {
                    pos += 1;
                }
                let text = std::str::from_utf8(&data[start..pos]).unwrap();
                let value: u32 = text
                    .parse()
                    .map_err(|_| PgmError::BadHeader(format!("bad integer {text}")))?;
                fields.push(value);
            }
            Some(&b) => {
                return Err(PgmError::BadHeader(format!("unexpected byte {:#x}", b)));
            }
        }
    }
    // Exactly one whitespace byte separates the header from the samples.
    if !data.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
        return Err(PgmError::BadHeader(
            "missing separator before samples".into(),
        ));
    }
    pos += 1;

    let header = Header {
        width: fields[0],
        height: fields[1],
        maxval: fields[2],
        comments,
    };
    if header.maxval == 0 || header.maxval > 65535 {
        return Err(PgmError::BadMaxval(header.maxval));
    }
    Ok((header, data[pos..].to_vec()))
}

fn decode_samples(header: &Header, body: &[u8]) -> Result<Vec<u16>, PgmError> {
    let count = header.width as usize * header.height as usize;
    if header.maxval <= 255 {
        if body.len() < count {
            return Err(PgmError::Truncated {
                expected: count,
                got: body.len(),
            });
        }
        Ok(body[..count].iter().map(|&b| u16::from(b)).collect())
    } else {
        if body.len() < count * 2 {
            return Err(PgmError::Truncated {
                expected: count * 2,
                got: body.len(),
            });
        }
        Ok(body[..count * 2]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect())
    }
}

pub fn read_mono<R: Read>(r: &mut R) -> Result<MonoImage, PgmError> {
    let (header, body) = read_header(r)?;
    let samples = decode_samples(&header, &body)?;
    let depth = bit_depth_for_maxval(header.maxval);
    Ok(MonoImage::new(header.width, header.height, depth, samples)?)
}

pub fn read_raw<R: Read>(r: &mut R) -> Result<RawImage, PgmError> {
    let (header, body) = read_header(r)?;
    let samples = decode_samples(&header, &body)?;

    let meta = header
        .comments
        .iter()
        .find(|c| c.starts_with("raw "))
        .ok_or(PgmError::MissingRawMetadata)?;
    let mut bayer = None;
    let mut depth = None;
    for part in meta.split_whitespace().skip(1) {
        if let Some(v) = part.strip_prefix("bayer=") {
            bayer = Some(
                BayerPattern::parse(v)
                    .ok_or_else(|| PgmError::BadRawMetadata(format!("unknown pattern {v}")))?,
            );
        } else if let Some(v) = part.strip_prefix("bit_depth=") {
            depth = Some(
                v.parse::<u8>()
                    .map_err(|_| PgmError::BadRawMetadata(format!("bad bit depth {v}")))?,
            );
        }
    }
    let bayer = bayer.ok_or_else(|| PgmError::BadRawMetadata("missing bayer=".into()))?;
    let depth = depth.ok_or_else(|| PgmError::BadRawMetadata("missing bit_depth=".into()))?;
    if (1u32 << depth) - 1 != header.maxval {
        return Err(PgmError::BadRawMetadata(format!(
            "declared depth {depth} does not match maxval {}",
            header.maxval
        )));
    }
    Ok(RawImage::new(
        header.width,
        header.height,
        depth,
        bayer,
        samples,
    )?)
}
