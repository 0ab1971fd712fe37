//! Binary PPM (P6) and PGM (P5) with maxval 255.

use super::{payload_len, read_sidecar, Cursor, GainMapSidecar, ParseErrorKind};
use crate::codec::GainMap;
use crate::error::{Error, Result};
use crate::image::{BoolMask, Ldr8Image, Transfer};

/// 8-bit single-channel raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

fn read_pnm<'a>(
    bytes: &'a [u8],
    magic: &str,
    format: &'static str,
    channels: usize,
) -> Result<(usize, usize, &'a [u8])> {
    let mut c = Cursor::new(format, bytes);
    let (at, tok) = c.token(true).map_err(|_| c.err_at(0, ParseErrorKind::BadMagic))?;
    if tok != magic {
        let kind = if matches!(tok, "P1" | "P2" | "P3" | "P4" | "P5" | "P6") {
            ParseErrorKind::Unsupported(format!("netpbm variant {tok}, expected {magic}"))
        } else {
            ParseErrorKind::BadMagic
        };
        return Err(c.err_at(at, kind).into());
    }
    let width = c.dimension(true, "width")?;
    let height = c.dimension(true, "height")?;
    let (at, maxval) = c.token(true)?;
    if maxval != "255" {
        return Err(c
            .err_at(
                at,
                ParseErrorKind::Unsupported(format!("maxval {maxval}, only 255 is supported")),
            )
            .into());
    }
    c.single_space()?;
    let n = payload_len(format, width, height, channels, at)?;
    let body = c.take(n)?;
    c.finish()?;
    Ok((width, height, body))
}

/// Reads a P6 image. The result is tagged [`Transfer::GammaEncoded`].
pub fn read_ppm(bytes: &[u8]) -> Result<Ldr8Image> {
    let (w, h, body) = read_pnm(bytes, "P6", "ppm", 3)?;
    Ldr8Image::new(w, h, body.to_vec(), Transfer::GammaEncoded)
}

pub fn write_ppm(img: &Ldr8Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let (width, height, body) = read_pnm(bytes, "P5", "pgm", 1)?;
    Ok(GrayImage {
        width,
        height,
        data: body.to_vec(),
    })
}

pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

/// Masks are stored as 255 (set) and 0 (clear).
pub fn write_mask_pgm(mask: &BoolMask) -> Vec<u8> {
    write_pgm(&GrayImage {
        width: mask.width(),
        height: mask.height(),
        data: mask.data().iter().map(|&b| if b { 255 } else { 0 }).collect(),
    })
}

/// Any nonzero sample reads as set.
pub fn read_mask_pgm(bytes: &[u8]) -> Result<BoolMask> {
    let g = read_pgm(bytes)?;
    BoolMask::new(g.width, g.height, g.data.iter().map(|&v| v != 0).collect())
}

/// Gain codes as a P6 image; metadata goes to the sidecar.
pub fn write_gainmap_ppm(gm: &GainMap) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", gm.width(), gm.height()).into_bytes();
    out.extend_from_slice(gm.data());
    out
}

/// Combines a P6 gain-code image with its sidecar text.
pub fn read_gainmap(ppm: &[u8], sidecar: &str) -> Result<(GainMap, GainMapSidecar)> {
    let (w, h, body) = read_pnm(ppm, "P6", "ppm", 3)?;
    let side = read_sidecar(sidecar)?;
    if (side.width, side.height) != (w, h) {
        return Err(Error::MetadataMismatch(format!(
            "sidecar declares {}x{}, gain image is {w}x{h}",
            side.width, side.height
        )));
    }
    let gm = GainMap::new(w, h, body.to_vec(), side.meta)?;
    Ok((gm, side))
}
