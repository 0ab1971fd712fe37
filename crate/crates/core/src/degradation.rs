//! Degradation mask: marks pixels whose tone-mapped estimate departs from the
//! ground truth by more than a fixed threshold.

use crate::companding::{mulaw_forward, MuLawParams, DEFAULT_MU};
use crate::error::{check_dims, Error, Result};
use crate::image::{mean_abs_channel_diff, BoolMask, LinearImage, ScalarGrid};

pub const DEFAULT_SIGMA: f64 = 4.0 / 255.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskParams {
    pub sigma: f64,
    pub mu: f64,
}

impl Default for MaskParams {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_SIGMA,
            mu: DEFAULT_MU,
        }
    }
}

/// Common divisor that brings a pair of HDR images into [0, 1]: the larger of
/// 1 and the brightest sample of either image. Pairs already in [0, 1] are
/// left unscaled.
pub fn shared_scale(a: &LinearImage, b: &LinearImage) -> f64 {
    a.max_value().max(b.max_value()).max(1.0)
}

/// Normalizes by `scale`, clamps to [0, 1] and applies the mu-law curve.
pub fn tonemap(img: &LinearImage, scale: f64, mu: MuLawParams) -> LinearImage {
    img.map_pixels(|v| mulaw_forward((v / scale).min(1.0), mu).expect("nonnegative input"))
}

/// Strict threshold on a per-pixel difference grid.
pub fn threshold_mask(diff: &ScalarGrid, sigma: f64) -> BoolMask {
    BoolMask::new(diff.width, diff.height, diff.data.iter().map(|&d| d > sigma).collect())
        .expect("grid dimensions are consistent")
}

pub fn compute_mask(hdr_gt: &LinearImage, hdr_est: &LinearImage, params: MaskParams) -> Result<BoolMask> {
    check_dims(hdr_gt.dims(), hdr_est.dims())?;
    if !(params.sigma.is_finite() && params.sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be > 0, got {}",
            params.sigma
        )));
    }
    let mu = MuLawParams::new(params.mu)?;
    let scale = shared_scale(hdr_gt, hdr_est);
    let diff = mean_abs_channel_diff(&tonemap(hdr_gt, scale, mu), &tonemap(hdr_est, scale, mu))?;
    Ok(threshold_mask(&diff, params.sigma))
}

/// Fraction of set pixels; 0 for an empty mask.
pub fn mask_fraction(mask: &BoolMask) -> f64 {
    let n = mask.data().len();
    if n == 0 {
        0.0
    } else {
        mask.count() as f64 / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskAgreement {
    pub precision: f64,
    pub recall: f64,
    pub iou: f64,
}

/// Confusion-matrix ratios of `pred` against `gt`. A ratio with a zero
/// denominator is reported as 1.
pub fn mask_agreement(pred: &BoolMask, gt: &BoolMask) -> Result<MaskAgreement> {
    check_dims(gt.dims(), pred.dims())?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &g) in pred.data().iter().zip(gt.data()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    Ok(MaskAgreement {
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        iou: ratio(tp, tp + fp + fn_),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_images_give_empty_mask() {
        let a = LinearImage::from_fn(4, 4, |x, y| [x as f64, y as f64, 0.3]).unwrap();
        let m = compute_mask(&a, &a, MaskParams::default()).unwrap();
        assert_eq!(m.count(), 0);
    }

    #[test]
    fn threshold_is_strict() {
        let zero = LinearImage::filled(2, 1, 0.0).unwrap();
        let t = LinearImage::new(
            2,
            1,
            vec![
                5.0 / 255.0,
                5.0 / 255.0,
                5.0 / 255.0,
                4.0 / 255.0,
                4.0 / 255.0,
                4.0 / 255.0,
            ],
        )
        .unwrap();
        let diff = mean_abs_channel_diff(&t, &zero).unwrap();
        let m = threshold_mask(&diff, DEFAULT_SIGMA);
        assert_eq!(m.data(), &[true, false]);
    }

    #[test]
    fn mask_dimension_mismatch() {
        let a = LinearImage::filled(2, 1, 0.0).unwrap();
        let b = LinearImage::filled(1, 1, 0.0).unwrap();
        assert!(compute_mask(&a, &b, MaskParams::default())
            .unwrap_err()
            .is_contract_violation());
    }

    #[test]
    fn fraction_examples() {
        assert_eq!(mask_fraction(&BoolMask::new(2, 2, vec![false; 4]).unwrap()), 0.0);
        assert_eq!(mask_fraction(&BoolMask::new(2, 2, vec![true; 4]).unwrap()), 1.0);
        let mut d = vec![false; 12];
        d[0] = true;
        d[5] = true;
        d[11] = true;
        assert_eq!(mask_fraction(&BoolMask::new(4, 3, d).unwrap()), 0.25);
    }

    #[test]
    fn agreement_examples() {
        let gt = BoolMask::new(2, 2, vec![true, false, false, true]).unwrap();
        let same = mask_agreement(&gt, &gt).unwrap();
        assert_eq!((same.precision, same.recall, same.iou), (1.0, 1.0, 1.0));

        let empty = BoolMask::new(2, 2, vec![false; 4]).unwrap();
        let e = mask_agreement(&empty, &gt).unwrap();
        assert_eq!((e.precision, e.recall, e.iou), (1.0, 0.0, 0.0));

        let comp = BoolMask::new(2, 2, vec![false, true, true, false]).unwrap();
        let c = mask_agreement(&comp, &gt).unwrap();
        assert_eq!((c.precision, c.recall, c.iou), (0.0, 0.0, 0.0));

        let other = BoolMask::new(4, 1, vec![false; 4]).unwrap();
        assert!(mask_agreement(&other, &gt).is_err());
    }

    fn arb_img() -> impl Strategy<Value = LinearImage> {
        prop::collection::vec(0.0f64..3.0, 48).prop_map(|v| LinearImage::new(4, 4, v).unwrap())
    }

    proptest! {
        #[test]
        fn mask_properties(a in arb_img(), b in arb_img(), s1 in 0.001f64..0.2, s2 in 0.001f64..0.2) {
            let p = |sigma| MaskParams { sigma, ..MaskParams::default() };
            prop_assert_eq!(compute_mask(&a, &a, p(s1)).unwrap().count(), 0);
            prop_assert_eq!(
                compute_mask(&a, &b, p(s1)).unwrap(),
                compute_mask(&b, &a, p(s1)).unwrap()
            );
            let (lo, hi) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
            let m_lo = compute_mask(&a, &b, p(lo)).unwrap();
            let m_hi = compute_mask(&a, &b, p(hi)).unwrap();
            for (h, l) in m_hi.data().iter().zip(m_lo.data()) {
                prop_assert!(!h || *l);
            }
        }
    }
}
