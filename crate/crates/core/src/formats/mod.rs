//! Readers and writers for Radiance RGBE, PFM, binary PPM/PGM and the
//! `key=value` gain-map sidecar.
//!
//! Readers take a complete byte buffer and reject anything after the declared
//! payload. Writers are deterministic.

mod netpbm;
mod pfm;
mod rgbe;
mod sidecar;

pub use netpbm::{
    read_gainmap, read_mask_pgm, read_pgm, read_ppm, write_gainmap_ppm, write_mask_pgm, write_pgm, write_ppm, GrayImage,
};
pub use pfm::{read_pfm, write_pfm};
pub use rgbe::{decode_rgbe_pixel, encode_rgbe_pixel, read_rgbe, write_rgbe};
pub use sidecar::{read_sidecar, write_sidecar, GainMapSidecar, SidecarError, SidecarMeta, SIDECAR_FORMAT_VERSION};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("bad magic number")]
    BadMagic,
    #[error("unsupported pixel format {0:?}")]
    UnsupportedFormat(String),
    #[error("missing FORMAT header line")]
    MissingFormat,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("unexpected end of data")]
    Truncated,
    #[error("run-length run overflows the scanline")]
    RunOverflow,
    #[error("trailing data after payload")]
    TrailingData,
}

/// A parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{format} parse error at byte {offset}: {kind}")]
pub struct ParseError {
    pub format: &'static str,
    pub offset: usize,
    pub kind: ParseErrorKind,
}

/// Byte cursor shared by the header parsers.
struct Cursor<'a> {
    format: &'static str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(format: &'static str, bytes: &'a [u8]) -> Self {
        Self { format, bytes, pos: 0 }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        self.err_at(self.pos, kind)
    }

    fn err_at(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            format: self.format,
            offset,
            kind,
        }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ParseError> {
        if self.remaining() < n {
            return Err(self.err_at(self.bytes.len(), ParseErrorKind::Truncated));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn byte(&mut self) -> Result<u8, ParseError> {
        Ok(self.take(1)?[0])
    }

    /// Reads up to and excluding the next `\n`, consuming the newline.
    fn line(&mut self) -> Result<&'a [u8], ParseError> {
        let rest = &self.bytes[self.pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| self.err_at(self.bytes.len(), ParseErrorKind::Truncated))?;
        self.pos += end + 1;
        Ok(&rest[..end])
    }

    /// Skips whitespace and, when `comments` is set, `#` comments to end of line.
    fn skip_space(&mut self, comments: bool) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if comments && b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self, comments: bool) -> Result<(usize, &'a str), ParseError> {
        self.skip_space(comments);
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(ParseErrorKind::Truncated));
        }
        let tok = std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| self.err_at(start, ParseErrorKind::BadHeader("non-ASCII header token".into())))?;
        Ok((start, tok))
    }

    fn dimension(&mut self, comments: bool, what: &str) -> Result<usize, ParseError> {
        let (at, tok) = self.token(comments)?;
        tok.parse::<usize>()
            .ok()
            .filter(|&v| v <= MAX_DIMENSION)
            .ok_or_else(|| self.err_at(at, ParseErrorKind::BadHeader(format!("invalid {what} {tok:?}"))))
    }

    /// Consumes exactly one whitespace byte ending the header.
    fn single_space(&mut self) -> Result<(), ParseError> {
        match self.byte() {
            Ok(b) if b.is_ascii_whitespace() => Ok(()),
            Ok(_) => Err(self.err_at(
                self.pos - 1,
                ParseErrorKind::BadHeader("expected whitespace after header".into()),
            )),
            Err(e) => Err(e),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.remaining() != 0 {
            return Err(self.err(ParseErrorKind::TrailingData));
        }
        Ok(())
    }
}

/// Largest width or height accepted by the readers.
pub const MAX_DIMENSION: usize = 1 << 20;

fn payload_len(
    format: &'static str,
    w: usize,
    h: usize,
    bytes_per_pixel: usize,
    at: usize,
) -> Result<usize, ParseError> {
    w.checked_mul(h)
        .and_then(|n| n.checked_mul(bytes_per_pixel))
        .ok_or(ParseError {
            format,
            offset: at,
            kind: ParseErrorKind::BadHeader(format!("image size {w}x{h} overflows")),
        })
}
