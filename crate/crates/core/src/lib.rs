//! Gain-map HDR toolkit.
//!
//! * [`codec`]: encode an HDR image against an 8-bit base layer into an 8-bit
//!   gain map and reconstruct it.
//! * [`exposure`]: synthesize bracketed LDR stacks, linearize them and merge
//!   them into an HDR estimate.
//! * [`degradation`]: tone-mapped consistency masks between HDR estimates.
//! * [`diffusion`]: noise-schedule algebra and one-step clean-latent recovery.
//! * [`metrics`]: PSNR/SSIM in linear, mu-law and PU21 domains, plus L1 losses.
//! * [`formats`]: RGBE, PFM, PPM/PGM and sidecar I/O.

pub mod codec;
pub mod companding;
pub mod degradation;
pub mod diffusion;
pub mod error;
pub mod exposure;
pub mod formats;
pub mod image;
pub mod metrics;

pub use codec::{decode, encode, EncodeOptions, GainMap, GainMapMeta, GainVariant, QMax};
pub use error::{Error, Result};
pub use image::{BoolMask, Ldr8Image, LinearImage, ScalarGrid, Transfer};
