//! Tensor files and grayscale image sequences.
//!
//! # Tensor file layout
//!
//! All integers and floats are little-endian.
//!
//! | offset | size        | content                                  |
//! |--------|-------------|------------------------------------------|
//! | 0      | 4           | magic `TEN3`                             |
//! | 4      | 4           | version, `u32`, currently 1              |
//! | 8      | 12          | `n1`, `n2`, `n3` as `u32`                |
//! | 20     | 8·n1·n2·n3  | entries as `f64`, row index fastest, then column, then tube |
//!
//! Nothing may follow the payload.
//!
//! Frames are binary graymaps (`P5`) with maxval 255 or 65535. Frame `k`
//! of a sequence becomes frontal slice `k`, image row `r` maps to tensor
//! row `r` and image column `c` to tensor column `c`.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use tubal_core::Tensor3;

pub const MAGIC: [u8; 4] = *b"TEN3";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 20;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad magic {found:?}, expected \"TEN3\"")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported tensor file version {0}")]
    BadVersion(u32),
    #[error("truncated header: {0} bytes")]
    TruncatedHeader(usize),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("invalid tensor data: {0}")]
    Tensor(#[from] tubal_core::Error),
    #[error("not a supported binary graymap: {0}")]
    BadImage(String),
    #[error("frame {index} is {found:?}, expected {expected:?} (width, height)")]
    InconsistentDims { index: usize, expected: (usize, usize), found: (usize, usize) },
    #[error("frame sequence is empty")]
    EmptySequence,
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

pub fn encode_tensor(a: &Tensor3) -> Vec<u8> {
    let (n1, n2, n3) = a.shape();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * a.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for d in [n1, n2, n3] {
        out.extend_from_slice(&u32::try_from(d).expect("dimension exceeds u32").to_le_bytes());
    }
    for v in a.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_tensor(bytes: &[u8]) -> Result<Tensor3> {
    if bytes.len() < 4 {
        return Err(IoError::TruncatedHeader(bytes.len()));
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(IoError::BadMagic { found: magic });
    }
    if bytes.len() < HEADER_LEN {
        return Err(IoError::TruncatedHeader(bytes.len()));
    }
    let word = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = word(4);
    if version != VERSION {
        return Err(IoError::BadVersion(version));
    }
    let (n1, n2, n3) = (word(8) as usize, word(12) as usize, word(16) as usize);
    let expected = n1
        .checked_mul(n2)
        .and_then(|m| m.checked_mul(n3))
        .and_then(|m| m.checked_mul(8))
        .ok_or(IoError::TruncatedPayload { expected: usize::MAX, found: bytes.len() - HEADER_LEN })?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() < expected {
        return Err(IoError::TruncatedPayload { expected, found: payload.len() });
    }
    if payload.len() > expected {
        return Err(IoError::TrailingBytes(payload.len() - expected));
    }
    let data = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(Tensor3::from_vec(n1, n2, n3, data)?)
}

pub fn write_tensor(path: &Path, a: &Tensor3) -> Result<()> {
    fs::write(path, encode_tensor(a)).map_err(io_err(path))
}

pub fn read_tensor(path: &Path) -> Result<Tensor3> {
    decode_tensor(&fs::read(path).map_err(io_err(path))?)
}

/// One grayscale image, pixels in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    /// 255 or 65535.
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

impl Frame {
    pub fn new(width: usize, height: usize, maxval: u16, pixels: Vec<u16>) -> Result<Self> {
        if maxval != 255 && maxval != 65535 {
            return Err(IoError::BadImage(format!("maxval {maxval} not supported")));
        }
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(IoError::BadImage(format!("{} pixels for {width}x{height}", pixels.len())));
        }
        if let Some(p) = pixels.iter().find(|&&p| p > maxval) {
            return Err(IoError::BadImage(format!("pixel {p} exceeds maxval {maxval}")));
        }
        Ok(Self { width, height, maxval, pixels })
    }

    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> u16 {
        self.pixels[row * self.width + col]
    }
}

/// Equally sized frames in temporal order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrameSequence {
    pub frames: Vec<Frame>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Normalize {
    /// Keep raw pixel counts.
    None,
    /// Divide by the maxval so entries lie in `[0, 1]`.
    Unit,
}

impl Normalize {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalize::None => "none",
            Normalize::Unit => "unit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Clamp {
    /// Clip to `[0, 1]`, then scale to 0..=255.
    Clip,
    /// Map `[min, max]` affinely onto 0..=255.
    Rescale,
}

impl Clamp {
    pub fn as_str(self) -> &'static str {
        match self {
            Clamp::Clip => "clip",
            Clamp::Rescale => "rescale",
        }
    }
}

fn skip_ws_and_comments(data: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < data.len() && data[pos] == b'#' {
            while pos < data.len() && data[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn header_number(data: &[u8], pos: &mut usize) -> Result<usize> {
    *pos = skip_ws_and_comments(data, *pos);
    let start = *pos;
    while *pos < data.len() && data[*pos].is_ascii_digit() {
        *pos += 1;
    }
    std::str::from_utf8(&data[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| IoError::BadImage("malformed header".into()))
}

pub fn decode_pgm(data: &[u8]) -> Result<Frame> {
    if data.len() < 2 || &data[..2] != b"P5" {
        return Err(IoError::BadImage("missing P5 signature".into()));
    }
    let mut pos = 2;
    let width = header_number(data, &mut pos)?;
    let height = header_number(data, &mut pos)?;
    let maxval = header_number(data, &mut pos)?;
    if pos >= data.len() || !data[pos].is_ascii_whitespace() {
        return Err(IoError::BadImage("malformed header".into()));
    }
    pos += 1;
    let maxval = match maxval {
        255 => 255u16,
        65535 => 65535u16,
        other => return Err(IoError::BadImage(format!("maxval {other} not supported"))),
    };
    let bytes_per = if maxval == 255 { 1 } else { 2 };
    let count = width * height;
    let raster = &data[pos..];
    if raster.len() < count * bytes_per {
        return Err(IoError::BadImage(format!("raster has {} bytes, expected {}", raster.len(), count * bytes_per)));
    }
    let pixels = if bytes_per == 1 {
        raster[..count].iter().map(|&b| b as u16).collect()
    } else {
        raster[..2 * count].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    };
    Frame::new(width, height, maxval, pixels)
}

pub fn encode_pgm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n{}\n", frame.width, frame.height, frame.maxval).into_bytes();
    if frame.maxval == 255 {
        out.extend(frame.pixels.iter().map(|&p| p as u8));
    } else {
        for p in &frame.pixels {
            out.extend_from_slice(&p.to_be_bytes());
        }
    }
    out
}

pub fn read_pgm(path: &Path) -> Result<Frame> {
    decode_pgm(&fs::read(path).map_err(io_err(path))?)
}

pub fn write_pgm(path: &Path, frame: &Frame) -> Result<()> {
    fs::write(path, encode_pgm(frame)).map_err(io_err(path))
}

/// `.pgm` files of a directory in lexicographic file-name order.
pub fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        let is_pgm = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
        if path.is_file() && is_pgm {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

pub fn read_frame_dir(dir: &Path) -> Result<FrameSequence> {
    let frames = frame_paths(dir)?.iter().map(|p| read_pgm(p)).collect::<Result<Vec<_>>>()?;
    Ok(FrameSequence { frames })
}

/// Writes `frame_0000.pgm`, `frame_0001.pgm`, ... into `dir`, creating it if needed.
pub fn write_frame_dir(dir: &Path, seq: &FrameSequence) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (k, f) in seq.frames.iter().enumerate() {
        write_pgm(&dir.join(format!("frame_{k:04}.pgm")), f)?;
    }
    Ok(())
}

/// Stacks frames as frontal slices.
pub fn frames_to_tensor(seq: &FrameSequence, normalize: Normalize) -> Result<Tensor3> {
    let first = seq.frames.first().ok_or(IoError::EmptySequence)?;
    let expected = (first.width, first.height);
    for (index, f) in seq.frames.iter().enumerate() {
        if (f.width, f.height) != expected {
            return Err(IoError::InconsistentDims { index, expected, found: (f.width, f.height) });
        }
    }
    let (n1, n2, n3) = (first.height, first.width, seq.frames.len());
    Ok(Tensor3::from_fn(n1, n2, n3, |i, j, k| {
        let f = &seq.frames[k];
        let p = f.pixel(i, j) as f64;
        match normalize {
            Normalize::None => p,
            Normalize::Unit => p / f.maxval as f64,
        }
    })?)
}

/// Quantizes every frontal slice to an 8-bit frame.
///
/// Rounding is half away from zero.
pub fn tensor_to_frames(a: &Tensor3, clamp: Clamp) -> FrameSequence {
    let (n1, n2, n3) = a.shape();
    let (lo, hi) = a.as_slice().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let quantize = |v: f64| -> u16 {
        let unit = match clamp {
            Clamp::Clip => v.clamp(0.0, 1.0),
            Clamp::Rescale if hi > lo => (v - lo) / (hi - lo),
            Clamp::Rescale => 0.0,
        };
        (unit * 255.0).round().clamp(0.0, 255.0) as u16
    };
    let frames = (0..n3)
        .map(|k| {
            let mut pixels = Vec::with_capacity(n1 * n2);
            for i in 0..n1 {
                for j in 0..n2 {
                    pixels.push(quantize(a.get(i, j, k)));
                }
            }
            Frame { width: n2, height: n1, maxval: 255, pixels }
        })
        .collect();
    FrameSequence { frames }
}
