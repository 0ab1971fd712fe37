//! Exposure stacks: synthesis from HDR, linearization, and a classical
//! triangle-weighted merge used as the initial HDR/gain-map estimate.

use crate::codec::{encode, EncodeOptions, GainMap};
use crate::companding::{gamma_decode, gamma_encode};
use crate::error::{check_dims, Error, Result};
use crate::image::{dequantize8, quantize8, Ldr8Image, LinearImage, Transfer};

/// Floor of the merge weight.
pub const WEIGHT_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub image: Ldr8Image,
    /// Exposure offset in stops relative to the reference frame.
    pub ev: f64,
}

/// Bracketed LDR frames sorted by exposure, with the EV 0 frame as reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureStack {
    frames: Vec<Frame>,
    reference_index: usize,
    gamma: f64,
}

impl ExposureStack {
    /// Frames are sorted by EV. Duplicate EVs or a missing EV 0 frame are errors.
    pub fn new(mut frames: Vec<Frame>, gamma: f64) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::InvalidArgument("exposure stack is empty".into()));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument(format!("gamma must be > 0, got {gamma}")));
        }
        if let Some(f) = frames.iter().find(|f| !f.ev.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite EV {}", f.ev)));
        }
        frames.sort_by(|a, b| a.ev.total_cmp(&b.ev));
        if frames.windows(2).any(|w| w[0].ev == w[1].ev) {
            return Err(Error::InvalidArgument("duplicate EV in exposure stack".into()));
        }
        let reference_index = frames
            .iter()
            .position(|f| f.ev == 0.0)
            .ok_or_else(|| Error::InvalidArgument("exposure stack has no EV 0 frame".into()))?;
        Ok(Self {
            frames,
            reference_index,
            gamma,
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn reference_index(&self) -> usize {
        self.reference_index
    }

    pub fn reference(&self) -> &Frame {
        &self.frames[self.reference_index]
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn evs(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.ev).collect()
    }
}

/// Renders one gamma-encoded 8-bit frame per EV with hard clipping at 1.
pub fn synth_stack(hdr: &LinearImage, evs: &[f64], gamma: f64) -> Result<ExposureStack> {
    if !evs.contains(&0.0) {
        return Err(Error::InvalidArgument(
            "EV list must contain the 0 reference exposure".into(),
        ));
    }
    let frames = evs
        .iter()
        .map(|&ev| {
            let scale = ev.exp2();
            let codes = hdr
                .data()
                .iter()
                .map(|&v| quantize8(gamma_encode((v * scale).clamp(0.0, 1.0), gamma)))
                .collect();
            Ok(Frame {
                image: Ldr8Image::new(hdr.width(), hdr.height(), codes, Transfer::GammaEncoded)?,
                ev,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ExposureStack::new(frames, gamma)
}

fn linearize_code(code: u8, inv_scale: f64, gamma: f64) -> f64 {
    gamma_decode(dequantize8(code), gamma) * inv_scale
}

/// Maps a gamma-encoded frame back to the EV 0 radiance scale.
pub fn linearize_ldr(frame: &Ldr8Image, ev: f64, gamma: f64) -> Result<LinearImage> {
    if frame.transfer() != Transfer::GammaEncoded {
        return Err(Error::InvalidArgument(
            "linearize_ldr expects a gamma-encoded frame".into(),
        ));
    }
    let inv_scale = (-ev).exp2();
    let data = frame
        .data()
        .iter()
        .map(|&c| linearize_code(c, inv_scale, gamma))
        .collect();
    LinearImage::new(frame.width(), frame.height(), data)
}

/// Triangle weight on the code fraction, floored at [`WEIGHT_FLOOR`].
pub fn merge_weight(z: f64) -> f64 {
    (1.0 - (2.0 * z - 1.0).abs()).max(WEIGHT_FLOOR)
}

/// Weighted average of the linearized frames. Samples where every frame sits
/// at the weight floor (all clipped or all black) take the reference value.
pub fn merge_baseline(stack: &ExposureStack) -> Result<LinearImage> {
    let reference = &stack.reference().image;
    for f in stack.frames() {
        check_dims(reference.dims(), f.image.dims())?;
        if f.image.transfer() != Transfer::GammaEncoded {
            return Err(Error::InvalidArgument("merge expects gamma-encoded frames".into()));
        }
    }
    let gamma = stack.gamma();
    let inv_scales: Vec<f64> = stack.frames().iter().map(|f| (-f.ev).exp2()).collect();
    let floor_sum = stack.frames().len() as f64 * WEIGHT_FLOOR * (1.0 + 1e-9);
    let n = reference.data().len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut num = 0.0;
        let mut den = 0.0;
        for (f, &inv) in stack.frames().iter().zip(&inv_scales) {
            let code = f.image.data()[i];
            let w = merge_weight(dequantize8(code));
            num += w * linearize_code(code, inv, gamma);
            den += w;
        }
        out.push(if den <= floor_sum {
            linearize_code(reference.data()[i], 1.0, gamma)
        } else {
            num / den
        });
    }
    LinearImage::new(reference.width(), reference.height(), out)
}

/// Merges the stack and encodes the result as a gain map over the linearized
/// reference frame. Returns the gain map and the merged HDR estimate.
pub fn initial_gainmap(stack: &ExposureStack, opts: &EncodeOptions) -> Result<(GainMap, LinearImage)> {
    let merged = merge_baseline(stack)?;
    let base = linearize_ldr(&stack.reference().image, 0.0, stack.gamma())?;
    let gm = encode(&merged, &base, opts)?;
    Ok((gm, merged))
}
