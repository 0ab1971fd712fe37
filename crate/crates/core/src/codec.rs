//! Dual-layer gain-map codec.
//!
//! An HDR image `H` is represented by a linear base layer `L` in [0, 1] and an
//! 8-bit normalized gain map `G`:
//!
//! ```text
//! H = (L + alpha) * expand(1 + G * q_max)
//! ```
//!
//! where `expand` is either `2^x` ([`GainVariant::Exp2`]) or the inverse
//! mu-law curve extended past 1 ([`GainVariant::InvMuLaw`]). The minimum
//! multiplier is therefore 2 (Exp2) or 1 (InvMuLaw); ratios below that floor
//! clamp the gain to zero and are reported through `clip_fraction`.

use crate::companding::{mulaw_compress_unbounded, mulaw_expand_unbounded, DEFAULT_MU};
use crate::error::{check_dims, Error, Result};
use crate::image::{dequantize8, quantize8, LinearImage};

pub const DEFAULT_ALPHA: f64 = 1.0 / 64.0;
/// Floor for an automatically chosen `q_max`.
pub const MIN_AUTO_Q_MAX: f64 = 1e-6;
/// Continuous gains within this distance of [0, 1] are treated as in range
/// when counting clipped pixels.
const CLIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainVariant {
    Exp2,
    InvMuLaw,
}

impl GainVariant {
    pub fn name(self) -> &'static str {
        match self {
            GainVariant::Exp2 => "exp2",
            GainVariant::InvMuLaw => "mulaw",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "exp2" => Some(GainVariant::Exp2),
            "mulaw" => Some(GainVariant::InvMuLaw),
            _ => None,
        }
    }
}

/// Parameters needed to invert a gain map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainMapMeta {
    pub q_max: f64,
    pub alpha: f64,
    pub variant: GainVariant,
    /// Only used by [`GainVariant::InvMuLaw`].
    pub mu: f64,
    /// Fraction of pixels whose continuous gain fell outside [0, 1] before
    /// clamping.
    pub clip_fraction: f64,
}

impl GainMapMeta {
    pub fn new(q_max: f64, variant: GainVariant) -> Result<Self> {
        let meta = Self {
            q_max,
            alpha: DEFAULT_ALPHA,
            variant,
            mu: DEFAULT_MU,
            clip_fraction: 0.0,
        };
        meta.validate()?;
        Ok(meta)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("q_max", self.q_max)?;
        positive("alpha", self.alpha)?;
        positive("mu", self.mu)?;
        if !(0.0..=1.0).contains(&self.clip_fraction) {
            return Err(Error::InvalidArgument(format!(
                "clip_fraction must lie in [0, 1], got {}",
                self.clip_fraction
            )));
        }
        Ok(())
    }

    /// Log-domain value of an HDR/base ratio: the exponent `x` with
    /// `expand(x) = ratio`.
    fn compress_ratio(&self, ratio: f64) -> f64 {
        match self.variant {
            GainVariant::Exp2 => ratio.log2(),
            GainVariant::InvMuLaw => mulaw_compress_unbounded(ratio, self.mu),
        }
    }
}

/// 8-bit, 3-channel normalized gain map plus metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMap {
    width: usize,
    height: usize,
    data: Vec<u8>,
    meta: GainMapMeta,
}

impl GainMap {
    pub fn new(width: usize, height: usize, data: Vec<u8>, meta: GainMapMeta) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::InvalidArgument(format!(
                "expected {} gain codes for {width}x{height}, got {}",
                width * height * 3,
                data.len()
            )));
        }
        meta.validate()?;
        Ok(Self {
            width,
            height,
            data,
            meta,
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

    pub fn meta(&self) -> &GainMapMeta {
        &self.meta
    }
}

/// Multiplier applied to `base + alpha` for a normalized gain `g`.
pub fn expansion(g: f64, meta: &GainMapMeta) -> f64 {
    let x = 1.0 + g * meta.q_max;
    match meta.variant {
        GainVariant::Exp2 => x.exp2(),
        GainVariant::InvMuLaw => mulaw_expand_unbounded(x, meta.mu),
    }
}

/// Reconstructs HDR from a linear base layer and a gain map.
pub fn decode(base: &LinearImage, gm: &GainMap) -> Result<LinearImage> {
    check_dims(gm.dims(), base.dims())?;
    let meta = gm.meta();
    let data = base
        .data()
        .iter()
        .zip(gm.data())
        .map(|(&l, &code)| (l + meta.alpha) * expansion(dequantize8(code), meta))
        .collect();
    LinearImage::new(base.width(), base.height(), data)
}

/// Unquantized gains, clamped to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousGain {
    pub width: usize,
    pub height: usize,
    /// Interleaved RGB gains.
    pub data: Vec<f64>,
    pub clip_fraction: f64,
}

fn check_base(base: &LinearImage) -> Result<()> {
    if let Some(v) = base.data().iter().find(|v| **v > 1.0) {
        return Err(Error::Domain(format!(
            "base layer must be linear code in [0, 1], found {v}"
        )));
    }
    Ok(())
}

fn log_ratios(hdr: &LinearImage, base: &LinearImage, meta: &GainMapMeta) -> Result<Vec<f64>> {
    check_dims(base.dims(), hdr.dims())?;
    check_base(base)?;
    hdr.data()
        .iter()
        .zip(base.data())
        .map(|(&h, &l)| {
            let ratio = h / (l + meta.alpha);
            if !ratio.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite gain ratio {h} / ({l} + {})",
                    meta.alpha
                )));
            }
            // Zero or negative radiance has no logarithm; it maps below the
            // floor and clamps to gain 0.
            Ok(if ratio > 0.0 {
                meta.compress_ratio(ratio)
            } else {
                f64::NEG_INFINITY
            })
        })
        .collect()
}

/// Inverts the reconstruction formula per sample.
pub fn compute_gain_continuous(hdr: &LinearImage, base: &LinearImage, meta: &GainMapMeta) -> Result<ContinuousGain> {
    meta.validate()?;
    let logs = log_ratios(hdr, base, meta)?;
    Ok(gains_from_logs(hdr.width(), hdr.height(), &logs, meta.q_max))
}

fn gains_from_logs(width: usize, height: usize, logs: &[f64], q_max: f64) -> ContinuousGain {
    let mut clipped = 0usize;
    let mut data = Vec::with_capacity(logs.len());
    for px in logs.chunks_exact(3) {
        let mut any_clipped = false;
        for &l in px {
            let g = (l - 1.0) / q_max;
            if !(-CLIP_TOLERANCE..=1.0 + CLIP_TOLERANCE).contains(&g) {
                any_clipped = true;
            }
            data.push(g.clamp(0.0, 1.0));
        }
        if any_clipped {
            clipped += 1;
        }
    }
    let pixels = width * height;
    ContinuousGain {
        width,
        height,
        data,
        clip_fraction: if pixels == 0 {
            0.0
        } else {
            clipped as f64 / pixels as f64
        },
    }
}

/// How `q_max` is chosen when encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QMax {
    /// Smallest value that avoids clipping at the top of the gain range.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodeOptions {
    pub q_max: QMax,
    pub variant: GainVariant,
    pub mu: f64,
    pub alpha: f64,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            q_max: QMax::Auto,
            variant: GainVariant::Exp2,
            mu: DEFAULT_MU,
            alpha: DEFAULT_ALPHA,
        }
    }
}

/// Encodes `hdr` against the linear base layer `base` into an 8-bit gain map.
pub fn encode(hdr: &LinearImage, base: &LinearImage, opts: &EncodeOptions) -> Result<GainMap> {
    let mut meta = GainMapMeta {
        q_max: match opts.q_max {
            QMax::Fixed(q) => q,
            QMax::Auto => 1.0,
        },
        alpha: opts.alpha,
        variant: opts.variant,
        mu: opts.mu,
        clip_fraction: 0.0,
    };
    meta.validate()?;
    let logs = log_ratios(hdr, base, &meta)?;
    if opts.q_max == QMax::Auto {
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - 1.0;
        meta.q_max = top.max(MIN_AUTO_Q_MAX);
    }
    let gains = gains_from_logs(hdr.width(), hdr.height(), &logs, meta.q_max);
    meta.clip_fraction = gains.clip_fraction;
    let codes = gains.data.iter().map(|&g| quantize8(g)).collect();
    GainMap::new(hdr.width(), hdr.height(), codes, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn meta(variant: GainVariant, q_max: f64) -> GainMapMeta {
        GainMapMeta::new(q_max, variant).unwrap()
    }

    fn ramp_base(w: usize, h: usize) -> LinearImage {
        let n = (w * h * 3) as f64;
        LinearImage::new(w, h, (0..w * h * 3).map(|i| i as f64 / n).collect()).unwrap()
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(expansion(0.0, &meta(GainVariant::Exp2, 7.0)), 2.0);
        assert_eq!(expansion(1.0, &meta(GainVariant::Exp2, 4.0)), 32.0);
        let r1 = expansion(0.0, &meta(GainVariant::InvMuLaw, 4.0));
        assert!((r1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decode_examples() {
        let m = meta(GainVariant::Exp2, 4.0);
        let zeros = LinearImage::filled(2, 2, 0.0).unwrap();
        let gm0 = GainMap::new(2, 2, vec![0; 12], m).unwrap();
        let out = decode(&zeros, &gm0).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.03125));

        let ones = LinearImage::filled(2, 2, 1.0).unwrap();
        let gm1 = GainMap::new(2, 2, vec![255; 12], m).unwrap();
        let out = decode(&ones, &gm1).unwrap();
        assert!(out.data().iter().all(|&v| v == 32.5));

        let base = ramp_base(2, 2);
        let gm = GainMap::new(2, 2, vec![0; 12], meta(GainVariant::InvMuLaw, 4.0)).unwrap();
        let out = decode(&base, &gm).unwrap();
        for (o, b) in out.data().iter().zip(base.data()) {
            assert!((o - (b + DEFAULT_ALPHA)).abs() < 1e-15);
        }
    }

    #[test]
    fn decode_dimension_mismatch() {
        let base = LinearImage::filled(2, 1, 0.0).unwrap();
        let gm = GainMap::new(1, 2, vec![0; 6], meta(GainVariant::Exp2, 1.0)).unwrap();
        assert!(decode(&base, &gm).unwrap_err().is_contract_violation());
    }

    #[test]
    fn continuous_gain_examples() {
        let base = ramp_base(3, 2);
        let m = meta(GainVariant::Exp2, 4.0);

        let hdr = decode(&base, &GainMap::new(3, 2, vec![0; 18], m).unwrap()).unwrap();
        let g = compute_gain_continuous(&hdr, &base, &m).unwrap();
        assert!(g.data.iter().all(|&v| v == 0.0));
        assert_eq!(g.clip_fraction, 0.0);

        let hdr = base.map_pixels(|l| 64.0 * (l + DEFAULT_ALPHA));
        let g = compute_gain_continuous(&hdr, &base, &m).unwrap();
        assert!(g.data.iter().all(|&v| v == 1.0));
        assert_eq!(g.clip_fraction, 1.0);
    }

    #[test]
    fn inv_mulaw_zero_gain_round_trip() {
        let base = ramp_base(3, 2);
        let m = meta(GainVariant::InvMuLaw, 3.0);
        let hdr = decode(&base, &GainMap::new(3, 2, vec![0; 18], m).unwrap()).unwrap();
        let g = compute_gain_continuous(&hdr, &base, &m).unwrap();
        assert!(g.data.iter().all(|&v| v.abs() < 1e-12));
        assert_eq!(g.clip_fraction, 0.0);
    }

    #[test]
    fn dark_and_zero_radiance_clamp_to_zero_gain() {
        let base = LinearImage::filled(2, 1, 0.5).unwrap();
        let hdr = LinearImage::new(2, 1, vec![0.0, 0.0, 0.0, 0.6, 0.6, 0.6]).unwrap();
        let g = compute_gain_continuous(&hdr, &base, &meta(GainVariant::Exp2, 2.0)).unwrap();
        assert!(g.data.iter().all(|&v| v == 0.0));
        assert_eq!(g.clip_fraction, 1.0);
    }

    #[test]
    fn base_outside_unit_range_is_rejected() {
        let base = LinearImage::filled(1, 1, 1.5).unwrap();
        let hdr = LinearImage::filled(1, 1, 4.0).unwrap();
        assert!(encode(&hdr, &base, &EncodeOptions::default()).is_err());
    }

    #[test]
    fn auto_q_max_saturates_codes() {
        let base = ramp_base(4, 4);
        let hdr = base.map_pixels(|l| 64.0 * (l + DEFAULT_ALPHA));
        let gm = encode(&hdr, &base, &EncodeOptions::default()).unwrap();
        assert!((gm.meta().q_max - 5.0).abs() < 1e-12);
        assert!(gm.data().iter().all(|&c| c == 255));
        assert_eq!(gm.meta().clip_fraction, 0.0);
    }

    #[test]
    fn auto_q_max_degenerate_dark_input() {
        let base = ramp_base(2, 2);
        let hdr = LinearImage::filled(2, 2, 0.0).unwrap();
        let gm = encode(&hdr, &base, &EncodeOptions::default()).unwrap();
        assert_eq!(gm.meta().q_max, MIN_AUTO_Q_MAX);
        assert!(gm.data().iter().all(|&c| c == 0));
    }

    #[test]
    fn encode_of_decode_is_a_fixed_point() {
        let base = ramp_base(16, 16);
        for variant in [GainVariant::Exp2, GainVariant::InvMuLaw] {
            let m = meta(variant, 6.5);
            let codes: Vec<u8> = (0..16 * 16 * 3).map(|i| (i * 7 % 256) as u8).collect();
            let gm = GainMap::new(16, 16, codes, m).unwrap();
            let hdr = decode(&base, &gm).unwrap();
            let opts = EncodeOptions {
                q_max: QMax::Fixed(6.5),
                variant,
                ..EncodeOptions::default()
            };
            let again = encode(&hdr, &base, &opts).unwrap();
            assert_eq!(again.data(), gm.data(), "{variant:?}");
            assert_eq!(again.meta().clip_fraction, 0.0);
        }
    }

    fn arb_case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
        (
            prop::collection::vec(0.0f64..=1.0, 27),
            prop::collection::vec(0.0f64..=1.0, 27),
            0.5f64..8.0,
        )
    }

    proptest! {
        #[test]
        fn gain_of_expansion_is_identity((bases, gains, q) in arb_case()) {
            for variant in [GainVariant::Exp2, GainVariant::InvMuLaw] {
                let m = meta(variant, q);
                let base = LinearImage::new(3, 3, bases.clone()).unwrap();
                let hdr = LinearImage::new(
                    3,
                    3,
                    bases.iter().zip(&gains).map(|(l, g)| (l + m.alpha) * expansion(*g, &m)).collect(),
                ).unwrap();
                let back = compute_gain_continuous(&hdr, &base, &m).unwrap();
                for (a, b) in back.data.iter().zip(&gains) {
                    prop_assert!((a - b).abs() <= 1e-10);
                }
                prop_assert_eq!(back.clip_fraction, 0.0);
            }
        }

        #[test]
        fn exp2_round_trip_multiplicative_bound((bases, gains, q) in arb_case()) {
            let m = meta(GainVariant::Exp2, q);
            let base = LinearImage::new(3, 3, bases.clone()).unwrap();
            let hdr = LinearImage::new(
                3,
                3,
                bases.iter().zip(&gains).map(|(l, g)| (l + m.alpha) * expansion(*g, &m)).collect(),
            ).unwrap();
            let gm = encode(&hdr, &base, &EncodeOptions::default()).unwrap();
            prop_assert_eq!(gm.meta().clip_fraction, 0.0);
            let q_auto = gm.meta().q_max;
            let bound = (q_auto * 0.5 / 255.0).exp2() * (1.0 + 1e-12);
            let out = decode(&base, &gm).unwrap();
            for (o, h) in out.data().iter().zip(hdr.data()) {
                let r = o / h;
                prop_assert!(r <= bound && r >= 1.0 / bound, "ratio {}", r);
            }
        }

        #[test]
        fn decode_monotone_in_code(code in 0u8..255, l in 0.0f64..=1.0, q in 0.1f64..8.0) {
            for variant in [GainVariant::Exp2, GainVariant::InvMuLaw] {
                let m = meta(variant, q);
                let base = LinearImage::filled(1, 1, l).unwrap();
                let lo = decode(&base, &GainMap::new(1, 1, vec![code; 3], m).unwrap()).unwrap();
                let hi = decode(&base, &GainMap::new(1, 1, vec![code + 1; 3], m).unwrap()).unwrap();
                prop_assert!(hi.data()[0] >= lo.data()[0]);
            }
        }
    }
}
