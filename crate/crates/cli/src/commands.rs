use std::path::Path;

use gmkit::codec::{encode, EncodeOptions, QMax};
use gmkit::degradation::{compute_mask, mask_fraction, MaskParams};
use gmkit::exposure::{merge_baseline, synth_stack};
use gmkit::formats::write_mask_pgm;
use gmkit::metrics::{
    gm_l1_report, mulaw_l1_report, psnr_report, ssim_report, Domain, MetricConfig, MetricReport, CSV_HEADER,
};
use gmkit::{GainVariant, LinearImage};

use crate::error::{CliError, CliResult};
use crate::io::{
    load_gainmap, read_base, read_hdr, read_stack, write_bytes, write_gainmap, write_hdr, write_stack, HdrFormat,
};

fn parse_list<T>(list: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> CliResult<Vec<T>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).ok_or_else(|| CliError::Usage(format!("invalid {what} `{s}`"))))
        .collect()
}

fn parse_evs(evs: &str) -> CliResult<Vec<f64>> {
    let evs = parse_list(evs, "exposure value", |s| {
        s.parse::<f64>().ok().filter(|v| v.is_finite())
    })?;
    if !evs.contains(&0.0) {
        return Err(CliError::Usage("--evs must include 0 (the reference exposure)".into()));
    }
    Ok(evs)
}

fn parse_qmax(s: &str) -> CliResult<QMax> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(QMax::Auto);
    }
    match s.parse::<f64>() {
        Ok(q) if q.is_finite() && q > 0.0 => Ok(QMax::Fixed(q)),
        _ => Err(CliError::Usage(format!(
            "--qmax must be `auto` or a positive number, got `{s}`"
        ))),
    }
}

pub fn synth(input: &Path, evs: &str, gamma: f64, out_dir: &Path, format: HdrFormat) -> CliResult<()> {
    let evs = parse_evs(evs)?;
    let hdr = read_hdr(input, format)?;
    let stack = synth_stack(&hdr, &evs, gamma).map_err(|e| CliError::file(input, e))?;
    let manifest = write_stack(out_dir, &stack)?;
    eprintln!("wrote {} frames and {}", stack.frames().len(), manifest.display());
    Ok(())
}

pub fn merge(manifest: &Path, out: &Path) -> CliResult<()> {
    let stack = read_stack(manifest)?;
    let merged = merge_baseline(&stack)?;
    write_hdr(out, &merged)
}

#[allow(clippy::too_many_arguments)]
pub fn gm_encode(
    hdr: &Path,
    base: &Path,
    variant: GainVariant,
    qmax: &str,
    alpha: f64,
    mu: f64,
    out: &Path,
    format: HdrFormat,
) -> CliResult<()> {
    let opts = EncodeOptions {
        q_max: parse_qmax(qmax)?,
        variant,
        mu,
        alpha,
    };
    let hdr_img = read_hdr(hdr, format)?;
    let base_img = read_base(base, format)?;
    let gm = encode(&hdr_img, &base_img, &opts)?;
    let meta_path = write_gainmap(out, &gm)?;
    let meta = gm.meta();
    eprintln!(
        "q_max={} clip_fraction={} sidecar={}",
        gmkit::metrics::fmt_real(meta.q_max),
        gmkit::metrics::fmt_real(meta.clip_fraction),
        meta_path.display()
    );
    if meta.clip_fraction > 0.0 {
        eprintln!(
            "warning: {:.1}% of pixels have a clipped gain; samples below the smallest multiplier of the base cannot be represented",
            100.0 * meta.clip_fraction
        );
    }
    Ok(())
}

pub fn gm_decode(base: &Path, gm: &Path, meta: Option<&Path>, out: &Path, format: HdrFormat) -> CliResult<()> {
    let base_img = read_base(base, format)?;
    let gm = load_gainmap(gm, meta)?;
    let hdr = gmkit::decode(&base_img, &gm)?;
    write_hdr(out, &hdr)
}

pub fn mask(gt: &Path, est: &Path, sigma: f64, mu: f64, out: &Path, format: HdrFormat) -> CliResult<()> {
    let a = read_hdr(gt, format)?;
    let b = read_hdr(est, format)?;
    let m = compute_mask(&a, &b, MaskParams { sigma, mu })?;
    write_bytes(out, &write_mask_pgm(&m))?;
    println!("mask_fraction={}", gmkit::metrics::fmt_real(mask_fraction(&m)));
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Metric {
    Psnr,
    Ssim,
    GmL1,
    MulawL1,
}

impl Metric {
    fn from_name(s: &str) -> Option<Self> {
        match s {
            "psnr" => Some(Metric::Psnr),
            "ssim" => Some(Metric::Ssim),
            "gm_l1" => Some(Metric::GmL1),
            "mulaw_l1" => Some(Metric::MulawL1),
            _ => None,
        }
    }
}

pub struct EvalArgs<'a> {
    pub gt: &'a Path,
    pub est: &'a Path,
    pub metrics: &'a str,
    pub domains: &'a str,
    pub peak: f64,
    pub mu: f64,
    pub base: Option<&'a Path>,
    pub variant: GainVariant,
    pub format: HdrFormat,
}

/// Gain maps of both images against one base layer. The estimate is encoded
/// with the ground truth's q_max so the two code spaces coincide.
fn gain_map_pair(
    gt: &LinearImage,
    est: &LinearImage,
    base: &LinearImage,
    variant: GainVariant,
    mu: f64,
) -> CliResult<(gmkit::GainMap, gmkit::GainMap)> {
    let opts = EncodeOptions {
        variant,
        mu,
        ..EncodeOptions::default()
    };
    let g = encode(gt, base, &opts)?;
    let fixed = EncodeOptions {
        q_max: QMax::Fixed(g.meta().q_max),
        ..opts
    };
    let g_hat = encode(est, base, &fixed)?;
    Ok((g_hat, g))
}

pub fn eval(args: &EvalArgs) -> CliResult<()> {
    let metrics = parse_list(args.metrics, "metric", Metric::from_name)?;
    let domains = parse_list(args.domains, "domain", Domain::from_name)?;
    if !(args.peak.is_finite() && args.peak > 0.0) {
        return Err(CliError::Usage("--peak must be a positive number".into()));
    }
    let gt = read_hdr(args.gt, args.format)?;
    let est = read_hdr(args.est, args.format)?;
    let cfg = MetricConfig {
        mu: args.mu,
        peak_luminance: args.peak,
        ..MetricConfig::default()
    };

    let mut rows: Vec<MetricReport> = Vec::new();
    for metric in &metrics {
        match metric {
            Metric::Psnr => {
                for &d in &domains {
                    rows.push(psnr_report(&est, &gt, d, &cfg)?);
                }
            }
            Metric::Ssim => {
                for &d in &domains {
                    rows.push(ssim_report(&est, &gt, d, &cfg)?);
                }
            }
            Metric::MulawL1 => rows.push(mulaw_l1_report(&est, &gt, args.mu)?),
            Metric::GmL1 => match args.base {
                Some(base_path) => {
                    let base = read_base(base_path, args.format)?;
                    let (g_hat, g) = gain_map_pair(&gt, &est, &base, args.variant, args.mu)?;
                    rows.push(gm_l1_report(&g_hat, &g)?);
                }
                None => eprintln!("note: gm_l1 skipped, it needs --base"),
            },
        }
    }

    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &rows {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evs_require_reference() {
        assert_eq!(parse_evs("-2, 0 ,2").unwrap(), vec![-2.0, 0.0, 2.0]);
        assert!(matches!(parse_evs("-2,2"), Err(CliError::Usage(_))));
        assert!(parse_evs("0,x").is_err());
        assert!(parse_evs("0,inf").is_err());
    }

    #[test]
    fn qmax_parsing() {
        assert_eq!(parse_qmax("auto").unwrap(), QMax::Auto);
        assert_eq!(parse_qmax("4").unwrap(), QMax::Fixed(4.0));
        assert!(parse_qmax("0").is_err());
        assert!(parse_qmax("-1").is_err());
        assert!(parse_qmax("nan").is_err());
    }

    #[test]
    fn metric_lists() {
        let m = parse_list("psnr,gm_l1", "metric", Metric::from_name).unwrap();
        assert_eq!(m, vec![Metric::Psnr, Metric::GmL1]);
        assert!(parse_list("psnr,lpips", "metric", Metric::from_name).is_err());
    }
}
