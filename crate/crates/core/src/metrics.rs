//! Full-reference distortion metrics in linear, mu-law and PU21 domains, and
//! L1 losses on gain maps and tone-mapped HDR.
//!
//! HDR pairs are brought to [0, 1] with [`shared_scale`] before tone mapping.
//! In the PU21 domain, normalized values are scaled to absolute luminance by
//! `peak_luminance` (cd/m^2) and PU-encoded per channel.

use std::fmt;

use crate::codec::GainMap;
use crate::companding::{mulaw_forward, pu21_encode, MuLawParams, Pu21Params, DEFAULT_MU, PU21_L_MIN};
use crate::degradation::{shared_scale, tonemap};
use crate::error::{check_dims, Error, Result};
use crate::image::LinearImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Linear,
    MuLaw,
    Pu21,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Linear => "linear",
            Domain::MuLaw => "mulaw",
            Domain::Pu21 => "pu21",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Domain::Linear),
            "mulaw" => Some(Domain::MuLaw),
            "pu21" => Some(Domain::Pu21),
            _ => None,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    /// Side of the square Gaussian window.
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    pub mu: f64,
    /// Display luminance (cd/m^2) of a normalized value of 1 in the PU21 domain.
    pub peak_luminance: f64,
    pub pu21: Pu21Params,
    pub ssim: SsimParams,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            mu: DEFAULT_MU,
            peak_luminance: 100.0,
            pu21: Pu21Params::default(),
            ssim: SsimParams::default(),
        }
    }
}

/// Sums in a fixed pairwise tree so results do not depend on how callers
/// split the work.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if v.len() <= LEAF {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// A pair of images mapped into one metric domain.
struct Mapped {
    a: Vec<f64>,
    b: Vec<f64>,
    peak: f64,
    params: Vec<(String, String)>,
}

fn pu21_peak(cfg: &MetricConfig) -> Result<f64> {
    Ok(pu21_encode(cfg.peak_luminance, &cfg.pu21)? - pu21_encode(PU21_L_MIN, &cfg.pu21)?)
}

fn map_pair(a: &LinearImage, b: &LinearImage, domain: Domain, cfg: &MetricConfig) -> Result<Mapped> {
    check_dims(a.dims(), b.dims())?;
    let scale = shared_scale(a, b);
    match domain {
        Domain::Linear => Ok(Mapped {
            a: a.data().to_vec(),
            b: b.data().to_vec(),
            peak: 1.0,
            params: vec![("peak".into(), "1".into())],
        }),
        Domain::MuLaw => {
            let mu = MuLawParams::new(cfg.mu)?;
            Ok(Mapped {
                a: tonemap(a, scale, mu).into_data(),
                b: tonemap(b, scale, mu).into_data(),
                peak: 1.0,
                params: vec![
                    ("mu".into(), fmt_real(cfg.mu)),
                    ("norm".into(), "shared_max".into()),
                    ("scale".into(), fmt_real(scale)),
                    ("peak".into(), "1".into()),
                ],
            })
        }
        Domain::Pu21 => {
            if !(cfg.peak_luminance.is_finite() && cfg.peak_luminance > PU21_L_MIN) {
                return Err(Error::InvalidArgument(format!(
                    "peak luminance must exceed {PU21_L_MIN} cd/m^2, got {}",
                    cfg.peak_luminance
                )));
            }
            let encode = |img: &LinearImage| -> Result<Vec<f64>> {
                img.data()
                    .iter()
                    .map(|&v| pu21_encode((v / scale).min(1.0) * cfg.peak_luminance, &cfg.pu21))
                    .collect()
            };
            let peak = pu21_peak(cfg)?;
            Ok(Mapped {
                a: encode(a)?,
                b: encode(b)?,
                peak,
                params: vec![
                    ("l_peak".into(), fmt_real(cfg.peak_luminance)),
                    ("l_min".into(), fmt_real(PU21_L_MIN)),
                    ("pu21_variant".into(), cfg.pu21.variant.name().into()),
                    ("norm".into(), "shared_max".into()),
                    ("scale".into(), fmt_real(scale)),
                    ("peak".into(), fmt_real(peak)),
                ],
            })
        }
    }
}

fn psnr_mapped(m: &Mapped) -> f64 {
    let sq: Vec<f64> = m.a.iter().zip(&m.b).map(|(x, y)| (x - y) * (x - y)).collect();
    let mse = pairwise_sum(&sq) / sq.len().max(1) as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (m.peak * m.peak / mse).log10()
    }
}

/// PSNR in dB; `f64::INFINITY` for identical inputs.
pub fn psnr(a: &LinearImage, b: &LinearImage, domain: Domain, cfg: &MetricConfig) -> Result<f64> {
    Ok(psnr_mapped(&map_pair(a, b, domain, cfg)?))
}

fn gaussian_window(p: &SsimParams) -> Vec<f64> {
    let n = p.window;
    let c = (n as f64 - 1.0) / 2.0;
    let g: Vec<f64> = (0..n)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * p.sigma * p.sigma)).exp())
        .collect();
    let mut w: Vec<f64> = (0..n * n).map(|k| g[k / n] * g[k % n]).collect();
    let total = pairwise_sum(&w);
    w.iter_mut().for_each(|v| *v /= total);
    w
}

fn luma(interleaved: &[f64]) -> Vec<f64> {
    interleaved
        .chunks_exact(3)
        .map(|p| (p[0] + p[1] + p[2]) / 3.0)
        .collect()
}

fn ssim_mapped(m: &Mapped, width: usize, height: usize, p: &SsimParams) -> Result<f64> {
    let n = p.window;
    if n == 0 || width < n || height < n {
        return Err(Error::InvalidArgument(format!(
            "SSIM needs at least {n}x{n} pixels, image is {width}x{height}"
        )));
    }
    let (a, b) = (luma(&m.a), luma(&m.b));
    let w = gaussian_window(p);
    let c1 = (p.k1 * m.peak).powi(2);
    let c2 = (p.k2 * m.peak).powi(2);
    let mut local = Vec::with_capacity((width - n + 1) * (height - n + 1));
    for y0 in 0..=height - n {
        for x0 in 0..=width - n {
            let idx = |k: usize| (y0 + k / n) * width + x0 + k % n;
            let (mut mu_a, mut mu_b) = (0.0, 0.0);
            for (k, wk) in w.iter().enumerate() {
                mu_a += wk * a[idx(k)];
                mu_b += wk * b[idx(k)];
            }
            let (mut var_a, mut var_b, mut cov) = (0.0, 0.0, 0.0);
            for (k, wk) in w.iter().enumerate() {
                let da = a[idx(k)] - mu_a;
                let db = b[idx(k)] - mu_b;
                var_a += wk * da * da;
                var_b += wk * db * db;
                cov += wk * da * db;
            }
            let num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            let den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            local.push(num / den);
        }
    }
    Ok(pairwise_sum(&local) / local.len() as f64)
}

/// Mean SSIM over valid (unpadded) window positions of the channel-mean luma.
pub fn ssim(a: &LinearImage, b: &LinearImage, domain: Domain, cfg: &MetricConfig) -> Result<f64> {
    let m = map_pair(a, b, domain, cfg)?;
    ssim_mapped(&m, a.width(), a.height(), &cfg.ssim)
}

/// Mean absolute difference of dequantized gain codes.
pub fn gm_l1(g_hat: &GainMap, g: &GainMap) -> Result<f64> {
    check_dims(g.dims(), g_hat.dims())?;
    if g.meta().variant != g_hat.meta().variant {
        return Err(Error::MetadataMismatch(format!(
            "gain map variants differ: {} vs {}",
            g_hat.meta().variant.name(),
            g.meta().variant.name()
        )));
    }
    // Integer accumulation keeps the result exact up to the final division.
    let total: u64 = g_hat
        .data()
        .iter()
        .zip(g.data())
        .map(|(&x, &y)| u64::from(x.abs_diff(y)))
        .sum();
    Ok(total as f64 / (255.0 * g.data().len().max(1) as f64))
}

/// Mean absolute difference of mu-law tone-mapped images.
pub fn mulaw_l1(h_hat: &LinearImage, h: &LinearImage, mu: f64) -> Result<f64> {
    check_dims(h.dims(), h_hat.dims())?;
    let mu = MuLawParams::new(mu)?;
    let scale = shared_scale(h, h_hat);
    let t = |v: f64| mulaw_forward((v / scale).min(1.0), mu);
    let d = h_hat
        .data()
        .iter()
        .zip(h.data())
        .map(|(&x, &y)| Ok((t(x)? - t(y)?).abs()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&d) / d.len().max(1) as f64)
}

/// Shortest text that parses back to the same `f64`.
pub fn fmt_real(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// CSV header of [`MetricReport::to_csv_row`].
pub const CSV_HEADER: &str = "name,domain,value,params";

/// One metric result together with every constant that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub name: String,
    pub domain: Domain,
    pub value: f64,
    pub params: Vec<(String, String)>,
}

impl MetricReport {
    /// `name,domain,value,k1=v1;k2=v2`. Identical-pair PSNR prints `inf`.
    pub fn to_csv_row(&self) -> String {
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        format!("{},{},{},{}", self.name, self.domain, fmt_real(self.value), params)
    }
}

pub fn psnr_report(a: &LinearImage, b: &LinearImage, domain: Domain, cfg: &MetricConfig) -> Result<MetricReport> {
    let m = map_pair(a, b, domain, cfg)?;
    Ok(MetricReport {
        name: "psnr".into(),
        domain,
        value: psnr_mapped(&m),
        params: m.params,
    })
}

pub fn ssim_report(a: &LinearImage, b: &LinearImage, domain: Domain, cfg: &MetricConfig) -> Result<MetricReport> {
    let m = map_pair(a, b, domain, cfg)?;
    let value = ssim_mapped(&m, a.width(), a.height(), &cfg.ssim)?;
    let mut params = m.params;
    let s = &cfg.ssim;
    params.extend([
        ("window".to_string(), s.window.to_string()),
        ("gauss_sigma".to_string(), fmt_real(s.sigma)),
        ("k1".to_string(), fmt_real(s.k1)),
        ("k2".to_string(), fmt_real(s.k2)),
    ]);
    Ok(MetricReport {
        name: "ssim".into(),
        domain,
        value,
        params,
    })
}

pub fn mulaw_l1_report(h_hat: &LinearImage, h: &LinearImage, mu: f64) -> Result<MetricReport> {
    let scale = shared_scale(h, h_hat);
    Ok(MetricReport {
        name: "mulaw_l1".into(),
        domain: Domain::MuLaw,
        value: mulaw_l1(h_hat, h, mu)?,
        params: vec![
            ("mu".into(), fmt_real(mu)),
            ("norm".into(), "shared_max".into()),
            ("scale".into(), fmt_real(scale)),
        ],
    })
}

pub fn gm_l1_report(g_hat: &GainMap, g: &GainMap) -> Result<MetricReport> {
    let m = g.meta();
    Ok(MetricReport {
        name: "gm_l1".into(),
        domain: Domain::Linear,
        value: gm_l1(g_hat, g)?,
        params: vec![
            ("variant".into(), m.variant.name().into()),
            ("q_max".into(), fmt_real(m.q_max)),
            ("alpha".into(), fmt_real(m.alpha)),
            ("mu".into(), fmt_real(m.mu)),
        ],
    })
}
