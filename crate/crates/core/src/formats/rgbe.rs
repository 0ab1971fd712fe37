//! Radiance RGBE (`.hdr`) reader and writer.

use super::{payload_len, Cursor, ParseError, ParseErrorKind};
use crate::error::Result;
use crate::image::LinearImage;

const FORMAT: &str = "rgbe";
const MIN_RLE_WIDTH: usize = 8;
const MAX_RLE_WIDTH: usize = 0x7fff;
/// Shortest repeat that is emitted as a run instead of literals.
const MIN_RUN: usize = 4;

/// `2^n` for `n` in the normal exponent range.
fn pow2(n: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&n));
    f64::from_bits(((n + 1023) as u64) << 52)
}

/// Decodes one RGBE quadruple: `m * 2^(e - 128) / 256`, or black when `e == 0`.
pub fn decode_rgbe_pixel(px: [u8; 4]) -> [f64; 3] {
    if px[3] == 0 {
        return [0.0; 3];
    }
    let f = pow2(i32::from(px[3]) - 136);
    [f64::from(px[0]) * f, f64::from(px[1]) * f, f64::from(px[2]) * f]
}

/// Encodes one pixel with a shared exponent chosen so the largest channel's
/// mantissa lies in [128, 256). Mantissas are truncated.
pub fn encode_rgbe_pixel(rgb: [f64; 3]) -> [u8; 4] {
    let maxc = rgb[0].max(rgb[1]).max(rgb[2]);
    if maxc.is_nan() || maxc < 1e-38 {
        return [0; 4];
    }
    // maxc = frac * 2^exp with frac in [0.5, 1)
    let exp = ((maxc.to_bits() >> 52) & 0x7ff) as i32 - 1022;
    let e = (exp + 128).min(255);
    let scale = pow2(136 - e);
    let m = |c: f64| (c.max(0.0) * scale).floor().min(255.0) as u8;
    [m(rgb[0]), m(rgb[1]), m(rgb[2]), e as u8]
}

fn header_err(c: &Cursor, at: usize, msg: impl Into<String>) -> ParseError {
    c.err_at(at, ParseErrorKind::BadHeader(msg.into()))
}

pub fn read_rgbe(bytes: &[u8]) -> Result<LinearImage> {
    let mut c = Cursor::new(FORMAT, bytes);
    let magic = c.line().map_err(|_| c.err_at(0, ParseErrorKind::BadMagic))?;
    let magic = magic.strip_suffix(b"\r").unwrap_or(magic);
    if magic != b"#?RADIANCE" && magic != b"#?RGBE" {
        return Err(c.err_at(0, ParseErrorKind::BadMagic).into());
    }
    let mut saw_format = false;
    loop {
        let at = c.pos;
        let line = c.line()?;
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.is_empty() {
            break;
        }
        if let Some(value) = line.strip_prefix(b"FORMAT=") {
            if value != b"32-bit_rle_rgbe" {
                let value = String::from_utf8_lossy(value).into_owned();
                return Err(c.err_at(at, ParseErrorKind::UnsupportedFormat(value)).into());
            }
            saw_format = true;
        }
    }
    if !saw_format {
        return Err(c.err(ParseErrorKind::MissingFormat).into());
    }
    let at = c.pos;
    let res = c.line()?;
    let res = std::str::from_utf8(res).map_err(|_| header_err(&c, at, "non-ASCII resolution line"))?;
    let toks: Vec<&str> = res.split_ascii_whitespace().collect();
    let (height, width) = match toks.as_slice() {
        ["-Y", h, "+X", w] => {
            let parse = |s: &str| {
                s.parse::<usize>()
                    .ok()
                    .filter(|&v| v <= super::MAX_DIMENSION)
                    .ok_or_else(|| header_err(&c, at, format!("invalid dimension {s:?}")))
            };
            (parse(h)?, parse(w)?)
        }
        [a, _, b, _] if matches!(*a, "+Y" | "-Y" | "+X" | "-X") && matches!(*b, "+Y" | "-Y" | "+X" | "-X") => {
            return Err(c
                .err_at(at, ParseErrorKind::Unsupported(format!("image orientation {res:?}")))
                .into())
        }
        _ => return Err(header_err(&c, at, format!("bad resolution line {res:?}")).into()),
    };
    let n = payload_len(FORMAT, width, height, 3, at)?;
    // Every pixel takes at least one byte per channel pair in the best RLE case;
    // reject absurd sizes before allocating.
    if height > 0 && width > 0 && c.remaining() < height * 4 {
        return Err(c.err_at(bytes.len(), ParseErrorKind::Truncated).into());
    }
    let mut data = Vec::with_capacity(n.min(c.remaining() * 64));
    let mut line = vec![0u8; width * 4];
    for _ in 0..height {
        read_scanline(&mut c, width, &mut line)?;
        for px in line.chunks_exact(4) {
            data.extend_from_slice(&decode_rgbe_pixel([px[0], px[1], px[2], px[3]]));
        }
    }
    c.finish()?;
    LinearImage::new(width, height, data)
}

/// Fills `out` with `width` RGBE quadruples, interleaved.
fn read_scanline(c: &mut Cursor, width: usize, out: &mut [u8]) -> Result<(), ParseError> {
    let rest = &c.bytes[c.pos..];
    let is_rle = (MIN_RLE_WIDTH..=MAX_RLE_WIDTH).contains(&width)
        && rest.len() >= 4
        && rest[0] == 2
        && rest[1] == 2
        && rest[2] & 0x80 == 0;
    if !is_rle {
        out.copy_from_slice(c.take(width * 4)?);
        return Ok(());
    }
    let at = c.pos;
    let declared = (usize::from(rest[2]) << 8) | usize::from(rest[3]);
    if declared != width {
        return Err(c.err_at(
            at,
            ParseErrorKind::InvalidValue(format!("scanline width {declared}, expected {width}")),
        ));
    }
    c.pos += 4;
    for ch in 0..4 {
        let mut x = 0;
        while x < width {
            let at = c.pos;
            let count = c.byte()?;
            if count > 128 {
                let run = usize::from(count - 128);
                if run > width - x {
                    return Err(c.err_at(at, ParseErrorKind::RunOverflow));
                }
                let v = c.byte()?;
                for i in 0..run {
                    out[(x + i) * 4 + ch] = v;
                }
                x += run;
            } else {
                let run = usize::from(count);
                if run == 0 {
                    return Err(c.err_at(at, ParseErrorKind::InvalidValue("zero-length run".into())));
                }
                if run > width - x {
                    return Err(c.err_at(at, ParseErrorKind::RunOverflow));
                }
                let lit = c.take(run)?;
                for (i, &v) in lit.iter().enumerate() {
                    out[(x + i) * 4 + ch] = v;
                }
                x += run;
            }
        }
    }
    Ok(())
}

/// Run-length encodes one channel plane of a scanline.
fn write_rle_channel(out: &mut Vec<u8>, data: &[u8]) {
    let n = data.len();
    let mut cur = 0;
    while cur < n {
        // Find the next run of at least MIN_RUN equal bytes.
        let mut beg_run = cur;
        let mut run_count = 0;
        while run_count < MIN_RUN && beg_run < n {
            beg_run += run_count;
            run_count = 1;
            while beg_run + run_count < n && run_count < 127 && data[beg_run] == data[beg_run + run_count] {
                run_count += 1;
            }
        }
        if run_count < MIN_RUN {
            beg_run = n;
        }
        // Literals up to the run.
        while cur < beg_run {
            let len = (beg_run - cur).min(128);
            out.push(len as u8);
            out.extend_from_slice(&data[cur..cur + len]);
            cur += len;
        }
        if run_count >= MIN_RUN && beg_run < n {
            out.push(128 + run_count as u8);
            out.push(data[beg_run]);
            cur = beg_run + run_count;
        }
    }
}

/// Writes `#?RADIANCE` with new-style RLE scanlines when the width allows it.
pub fn write_rgbe(img: &LinearImage) -> Vec<u8> {
    let (w, h) = img.dims();
    let mut out = format!("#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y {h} +X {w}\n").into_bytes();
    let rle = (MIN_RLE_WIDTH..=MAX_RLE_WIDTH).contains(&w);
    let mut plane = vec![0u8; w];
    for y in 0..h {
        let row: Vec<[u8; 4]> = (0..w).map(|x| encode_rgbe_pixel(img.pixel(x, y))).collect();
        if rle {
            out.extend_from_slice(&[2, 2, (w >> 8) as u8, (w & 0xff) as u8]);
            for ch in 0..4 {
                for (p, px) in plane.iter_mut().zip(&row) {
                    *p = px[ch];
                }
                write_rle_channel(&mut out, &plane);
            }
        } else {
            for px in &row {
                out.extend_from_slice(px);
            }
        }
    }
    out
}
