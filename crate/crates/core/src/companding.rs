//! Scalar transfer functions: mu-law companding, power-law gamma and the
//! PU21 perceptually uniform luminance encoding.

use crate::error::{Error, Result};

pub const DEFAULT_MU: f64 = 100.0;
pub const DEFAULT_GAMMA: f64 = 2.2;

/// Parameter of the mu-law compander.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuLawParams {
    mu: f64,
}

impl MuLawParams {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidArgument(format!("mu must be > 0, got {mu}")));
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

impl Default for MuLawParams {
    fn default() -> Self {
        Self { mu: DEFAULT_MU }
    }
}

/// `ln(1 + mu*x) / ln(1 + mu)` without any range handling.
///
/// This is the closed-form inverse of [`mulaw_expand_unbounded`] and is used by
/// the gain-map codec for ratios above 1.
pub fn mulaw_compress_unbounded(x: f64, mu: f64) -> f64 {
    (mu * x).ln_1p() / mu.ln_1p()
}

/// `(exp(y * ln(1 + mu)) - 1) / mu` without any range handling.
pub fn mulaw_expand_unbounded(y: f64, mu: f64) -> f64 {
    (y * mu.ln_1p()).exp_m1() / mu
}

/// Mu-law tone curve T on [0, 1]. Inputs above 1 are clamped.
pub fn mulaw_forward(x: f64, params: MuLawParams) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("mu-law input {x} is negative or NaN")));
    }
    Ok(mulaw_compress_unbounded(x.min(1.0), params.mu))
}

/// Inverse mu-law curve R on [0, 1].
pub fn mulaw_inverse(y: f64, params: MuLawParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("inverse mu-law input {y} outside [0, 1]")));
    }
    Ok(mulaw_expand_unbounded(y, params.mu))
}

/// Power-law decode: `code^gamma`. Input is clamped to [0, 1].
pub fn gamma_decode(code: f64, gamma: f64) -> f64 {
    code.clamp(0.0, 1.0).powf(gamma)
}

/// Power-law encode: `x^(1/gamma)`. Input is clamped to [0, 1].
pub fn gamma_encode(x: f64, gamma: f64) -> f64 {
    x.clamp(0.0, 1.0).powf(gamma.recip())
}

/// Coefficient sets of the PU21 encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pu21Variant {
    Banding,
    #[default]
    BandingGlare,
    Peaks,
    PeaksGlare,
}

impl Pu21Variant {
    pub fn name(self) -> &'static str {
        match self {
            Pu21Variant::Banding => "banding",
            Pu21Variant::BandingGlare => "banding_glare",
            Pu21Variant::Peaks => "peaks",
            Pu21Variant::PeaksGlare => "peaks_glare",
        }
    }

    pub fn coefficients(self) -> [f64; 7] {
        PU21_COEFFICIENTS
            .iter()
            .find(|(v, _)| *v == self)
            .map(|(_, p)| *p)
            .expect("every variant has a coefficient row")
    }
}

/// Fitted PU21 parameters p1..p7, one row per variant.
const PU21_COEFFICIENTS: [(Pu21Variant, [f64; 7]); 4] = [
    (
        Pu21Variant::Banding,
        [
            1.070275272,
            0.4088273932,
            0.153224308,
            0.2520326168,
            1.063512885,
            1.14115047,
            521.4527484,
        ],
    ),
    (
        Pu21Variant::BandingGlare,
        [
            0.353487901,
            0.3734658629,
            8.277049286e-05,
            0.9062562627,
            0.09150303166,
            0.9099517204,
            596.3148142,
        ],
    ),
    (
        Pu21Variant::Peaks,
        [
            1.043882782,
            0.6459495343,
            0.3194584211,
            0.374025247,
            1.114783422,
            1.095360363,
            384.9217577,
        ],
    ),
    (
        Pu21Variant::PeaksGlare,
        [
            816.885024,
            1479.463946,
            0.001253215609,
            0.9329636822,
            0.06746643971,
            1.573435413,
            419.6006374,
        ],
    ),
];

/// Valid luminance range of the PU21 fits, in cd/m^2.
pub const PU21_L_MIN: f64 = 0.005;
pub const PU21_L_MAX: f64 = 10000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pu21Params {
    pub p: [f64; 7],
    pub variant: Pu21Variant,
}

impl Pu21Params {
    pub fn for_variant(variant: Pu21Variant) -> Self {
        Self {
            p: variant.coefficients(),
            variant,
        }
    }
}

impl Default for Pu21Params {
    fn default() -> Self {
        Self::for_variant(Pu21Variant::default())
    }
}

/// Maps absolute luminance (cd/m^2) to PU units.
///
/// Luminance is clamped to `[PU21_L_MIN, PU21_L_MAX]` first; the result is
/// floored at zero.
pub fn pu21_encode(luminance: f64, params: &Pu21Params) -> Result<f64> {
    if !luminance.is_finite() {
        return Err(Error::Domain(format!("PU21 input {luminance} is not finite")));
    }
    let y = luminance.clamp(PU21_L_MIN, PU21_L_MAX);
    let [p1, p2, p3, p4, p5, p6, p7] = params.p;
    let yp = y.powf(p4);
    let v = p7 * (((p1 + p2 * yp) / (1.0 + p3 * yp)).powf(p5) - p6);
    Ok(v.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // PU21 banding-glare values at 20 log-spaced luminances, evaluated at 50
    // digits with mpmath from the published coefficients.
    #[allow(clippy::excessive_precision)]
    const PU21_ORACLE: [(f64, f64); 20] = [
        (0.005, 5.4707789222223099e-10),
        (0.01073008499241959, 0.42465420524954742),
        (0.023026944788909626, 1.2632678144304692),
        (0.04941621494015073, 2.9011428896130084),
        (0.10604803726229842, 6.0340102116158087),
        (0.22758089062074835, 11.80701635709389),
        (0.4883924598022353, 21.814948887805075),
        (1.0480985206669704, 37.715997546813186),
        (2.2492372414371666, 60.493092706764785),
        (4.826901353747236, 90.017342895757357),
        (10.358612355146606, 125.39337885811505),
        (22.22975819485015, 165.61557014254072),
        (47.7054389583356, 209.93802224635453),
        (102.37668292472513, 257.91112684804244),
        (219.70210180485842, 309.2685291823644),
        (471.48444507587044, 363.76882683535648),
        (1011.8136336535752, 420.99412384939892),
        (2171.369257118352, 480.05861383804642),
        (4659.795335761381, 539.19911528552522),
        (10000.0, 595.39392002009497),
    ];

    #[test]
    fn mulaw_examples() {
        let p = MuLawParams::default();
        assert_eq!(mulaw_forward(0.0, p).unwrap(), 0.0);
        assert_eq!(mulaw_forward(1.0, p).unwrap(), 1.0);
        // ln 2 / ln 101
        assert!((mulaw_forward(0.01, p).unwrap() - 0.15019048322368794).abs() < 1e-15);
        assert_eq!(mulaw_forward(1.5, p).unwrap(), 1.0);
        assert!(matches!(mulaw_forward(-0.1, p), Err(Error::Domain(_))));

        assert_eq!(mulaw_inverse(0.0, p).unwrap(), 0.0);
        assert!((mulaw_inverse(1.0, p).unwrap() - 1.0).abs() < 1e-15);
        // (sqrt(101) - 1) / 100
        assert!((mulaw_inverse(0.5, p).unwrap() - 0.0904987562112089).abs() < 1e-15);
        assert!(mulaw_inverse(1.01, p).is_err());
        assert!(mulaw_inverse(-0.01, p).is_err());
    }

    #[test]
    fn mu_must_be_positive() {
        assert!(MuLawParams::new(0.0).is_err());
        assert!(MuLawParams::new(-1.0).is_err());
        assert!(MuLawParams::new(f64::NAN).is_err());
    }

    #[test]
    fn mulaw_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for mu in [10.0, 100.0, 5000.0] {
            let p = MuLawParams::new(mu).unwrap();
            for _ in 0..10_000 {
                let x: f64 = rng.gen();
                let rt = mulaw_inverse(mulaw_forward(x, p).unwrap(), p).unwrap();
                assert!((rt - x).abs() <= 1e-12, "mu={mu} x={x}");
                let tr = mulaw_forward(mulaw_inverse(x, p).unwrap(), p).unwrap();
                assert!((tr - x).abs() <= 1e-12, "mu={mu} y={x}");
            }
        }
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_decode(0.0, 2.2), 0.0);
        assert_eq!(gamma_decode(1.0, 2.2), 1.0);
        assert!((gamma_decode(0.5, 2.2) - 0.217637640824031).abs() < 1e-14);
        assert!((gamma_encode(0.5, 2.2) - 0.7297400528407231).abs() < 1e-14);
    }

    #[test]
    fn pu21_matches_oracle_table() {
        let p = Pu21Params::default();
        for (y, expected) in PU21_ORACLE {
            let v = pu21_encode(y, &p).unwrap();
            assert!((v - expected).abs() <= 1e-3, "P({y}) = {v}, oracle {expected}");
        }
        let white = pu21_encode(100.0, &p).unwrap();
        assert!((white - 256.383_897_312_704).abs() < 1e-3);
    }

    #[test]
    fn pu21_clamps_and_rejects_non_finite() {
        let p = Pu21Params::default();
        assert_eq!(pu21_encode(0.0, &p).unwrap(), pu21_encode(PU21_L_MIN, &p).unwrap());
        assert_eq!(pu21_encode(1e6, &p).unwrap(), pu21_encode(PU21_L_MAX, &p).unwrap());
        assert!(pu21_encode(f64::NAN, &p).is_err());
        assert!(pu21_encode(f64::INFINITY, &p).is_err());
    }

    #[test]
    fn pu21_strictly_increasing_for_every_variant() {
        for variant in [
            Pu21Variant::Banding,
            Pu21Variant::BandingGlare,
            Pu21Variant::Peaks,
            Pu21Variant::PeaksGlare,
        ] {
            let p = Pu21Params::for_variant(variant);
            let n = 1000;
            let (lo, hi) = (PU21_L_MIN.log10(), PU21_L_MAX.log10());
            let mut prev = f64::NEG_INFINITY;
            for i in 0..n {
                let y = 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64);
                let v = pu21_encode(y, &p).unwrap();
                // The floor at zero can flatten the very bottom of some fits.
                if v > 0.0 || prev > 0.0 {
                    assert!(v > prev, "{} not increasing at {y}", variant.name());
                }
                prev = v;
            }
        }
    }

    proptest! {
        #[test]
        fn mulaw_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            prop_assume!(a < b);
            let p = MuLawParams::default();
            prop_assert!(mulaw_forward(a, p).unwrap() < mulaw_forward(b, p).unwrap());
        }

        #[test]
        fn gamma_round_trip(x in 0.0f64..=1.0, g in 1.0f64..3.0) {
            prop_assert!((gamma_encode(gamma_decode(x, g), g) - x).abs() <= 1e-12);
            prop_assert!((gamma_decode(gamma_encode(x, g), g) - x).abs() <= 1e-12);
        }
    }
}
