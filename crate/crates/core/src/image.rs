//! Image containers shared by every module.
//!
//! All grids are row-major with a top-left origin. Colour images store
//! interleaved RGB triples.

use crate::error::{check_dims, Error, Result};

/// Linear HDR radiance image. Every sample is finite and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl LinearImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples for a {width}x{height} RGB image, got {}",
                width * height * 3,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain(format!(
                "sample {i} is {}, radiance must be finite and >= 0",
                data[i]
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height * 3])
    }

    /// Builds an image from a per-pixel generator `f(x, y) -> [r, g, b]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(3)
    }

    /// Largest sample value, or 0 for an empty image.
    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Applies `f` to every sample.
    ///
    /// `f` must map `[0, inf)` into finite nonnegative values; anything else
    /// panics.
    pub fn map_pixels(&self, f: impl Fn(f64) -> f64) -> LinearImage {
        let data: Vec<f64> = self.data.iter().map(|&v| f(v)).collect();
        assert!(
            data.iter().all(|v| v.is_finite() && *v >= 0.0),
            "map_pixels: mapping produced a negative or non-finite sample"
        );
        LinearImage {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

/// Transfer characteristic of 8-bit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transfer {
    /// Display-referred codes, gamma encoded.
    GammaEncoded,
    /// Codes proportional to linear radiance.
    LinearCode,
}

/// 8-bit RGB image with a transfer tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ldr8Image {
    width: usize,
    height: usize,
    data: Vec<u8>,
    transfer: Transfer,
}

impl Ldr8Image {
    pub fn new(width: usize, height: usize, data: Vec<u8>, transfer: Transfer) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::InvalidArgument(format!(
                "expected {} bytes for a {width}x{height} RGB image, got {}",
                width * height * 3,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
            transfer,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn transfer(&self) -> Transfer {
        self.transfer
    }

    pub fn with_transfer(mut self, transfer: Transfer) -> Self {
        self.transfer = transfer;
        self
    }
}

/// Binary per-pixel mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BoolMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {width}x{height} mask, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Single-channel real grid (one scalar per pixel).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl ScalarGrid {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Per-pixel mean of absolute channel differences.
pub fn mean_abs_channel_diff(a: &LinearImage, b: &LinearImage) -> Result<ScalarGrid> {
    check_dims(a.dims(), b.dims())?;
    let data = a
        .pixels()
        .zip(b.pixels())
        .map(|(pa, pb)| ((pa[0] - pb[0]).abs() + (pa[1] - pb[1]).abs() + (pa[2] - pb[2]).abs()) / 3.0)
        .collect();
    Ok(ScalarGrid {
        width: a.width,
        height: a.height,
        data,
    })
}

/// Clamps to [0, 1] and rounds to the nearest 8-bit code, halves away from zero.
pub fn quantize8(x: f64) -> u8 {
    // f64::round rounds half away from zero.
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn dequantize8(v: u8) -> f64 {
    f64::from(v) / 255.0
}
