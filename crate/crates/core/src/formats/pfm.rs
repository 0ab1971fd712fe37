//! Portable float map (`PF`, RGB). Rows are stored bottom to top; the sign of
//! the scale field selects the byte order (negative means little endian).

use super::{payload_len, Cursor, ParseErrorKind};
use crate::error::Result;
use crate::image::LinearImage;

const FORMAT: &str = "pfm";

pub fn read_pfm(bytes: &[u8]) -> Result<LinearImage> {
    let mut c = Cursor::new(FORMAT, bytes);
    let (at, magic) = c.token(false).map_err(|_| c.err_at(0, ParseErrorKind::BadMagic))?;
    match magic {
        "PF" => {}
        "Pf" => {
            return Err(c
                .err_at(at, ParseErrorKind::Unsupported("grayscale PFM (Pf)".into()))
                .into())
        }
        _ => return Err(c.err_at(at, ParseErrorKind::BadMagic).into()),
    }
    let width = c.dimension(false, "width")?;
    let height = c.dimension(false, "height")?;
    let (at, scale_tok) = c.token(false)?;
    let scale: f64 = scale_tok
        .parse()
        .map_err(|_| c.err_at(at, ParseErrorKind::BadHeader(format!("invalid scale {scale_tok:?}"))))?;
    if !scale.is_finite() || scale == 0.0 {
        return Err(c
            .err_at(
                at,
                ParseErrorKind::InvalidValue(format!("scale {scale_tok} must be finite and nonzero")),
            )
            .into());
    }
    c.single_space()?;
    let little_endian = scale < 0.0;
    let n = payload_len(FORMAT, width, height, 12, at)?;
    let payload_start = c.pos;
    let payload = c.take(n)?;
    c.finish()?;

    let mut data = vec![0.0f64; width * height * 3];
    for (k, chunk) in payload.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        if !v.is_finite() || v < 0.0 {
            return Err(c
                .err_at(
                    payload_start + 4 * k,
                    ParseErrorKind::InvalidValue(format!("sample {v} is not a finite nonnegative radiance")),
                )
                .into());
        }
        let stored_row = k / (width * 3);
        let rest = k % (width * 3);
        let y = height - 1 - stored_row;
        data[y * width * 3 + rest] = f64::from(v);
    }
    LinearImage::new(width, height, data)
}

/// Writes little-endian `PF` data. Samples are narrowed to `f32`, saturating
/// at `f32::MAX`.
pub fn write_pfm(img: &LinearImage) -> Vec<u8> {
    let (w, h) = img.dims();
    let mut out = format!("PF\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * 12);
    for y in (0..h).rev() {
        let row = &img.data()[y * w * 3..(y + 1) * w * 3];
        for &v in row {
            out.extend_from_slice(&(v.min(f64::from(f32::MAX)) as f32).to_le_bytes());
        }
    }
    out
}
