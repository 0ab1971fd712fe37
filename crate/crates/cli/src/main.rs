//! `gmkit` command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage or I/O errors, 3 on contract
//! violations (mismatched dimensions or metadata, failed checks). Results go
//! to standard output; diagnostics go to standard error.

mod commands;
mod diffcheck;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gmkit::codec::DEFAULT_ALPHA;
use gmkit::companding::{DEFAULT_GAMMA, DEFAULT_MU};
use gmkit::degradation::DEFAULT_SIGMA;

use crate::io::HdrFormat;

#[derive(Parser, Debug)]
#[command(
    name = "gmkit",
    version,
    about = "Gain-map HDR codec and exposure-stack evaluation tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Base-2 exponential expansion
    Exp2,
    /// Inverse mu-law expansion
    Mulaw,
}

impl From<VariantArg> for gmkit::GainVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Exp2 => gmkit::GainVariant::Exp2,
            VariantArg::Mulaw => gmkit::GainVariant::InvMuLaw,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a bracketed LDR stack (one PPM per EV plus stack.manifest) from an HDR image
    Synth {
        /// HDR input (.hdr or .pfm), scaled so the EV 0 exposure covers [0, 1]
        input: PathBuf,
        /// Comma-separated exposure offsets in stops; must include 0
        #[arg(long, default_value = "-2,0,2", allow_hyphen_values = true)]
        evs: String,
        /// Display gamma used to encode the frames
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
        /// Directory receiving the frames and manifest
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Input format override
        #[arg(long, value_enum, default_value_t = HdrFormat::Auto)]
        format: HdrFormat,
    },
    /// Merge a stack into an HDR estimate with triangle weighting
    Merge {
        /// Path to stack.manifest
        manifest: PathBuf,
        /// Output HDR (.pfm or .hdr)
        #[arg(long, default_value = "merged.pfm")]
        out: PathBuf,
    },
    /// Encode an HDR image against a linear base layer into a gain map (PPM plus .meta sidecar)
    GmEncode {
        /// HDR image to encode (.hdr or .pfm)
        hdr: PathBuf,
        /// Linear base layer in [0, 1] (.pfm/.hdr), or a stack.manifest whose EV 0 frame is linearized
        base: PathBuf,
        /// Expansion curve
        #[arg(long, value_enum, default_value_t = VariantArg::Exp2)]
        variant: VariantArg,
        /// Maximum gain: `auto` or a positive number
        #[arg(long, default_value = "auto")]
        qmax: String,
        /// Offset added to the base layer
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Mu for the mulaw variant
        #[arg(long, default_value_t = DEFAULT_MU)]
        mu: f64,
        /// Gain-map image; the sidecar is written next to it with a .meta extension
        #[arg(long, default_value = "gm.ppm")]
        out: PathBuf,
        /// Input format override for HDR inputs
        #[arg(long, value_enum, default_value_t = HdrFormat::Auto)]
        format: HdrFormat,
    },
    /// Reconstruct HDR from a base layer and a gain map
    GmDecode {
        /// Linear base layer (.pfm/.hdr) or stack.manifest
        base: PathBuf,
        /// Gain-map PPM
        gm: PathBuf,
        /// Sidecar path [default: gain-map path with .meta extension]
        #[arg(long)]
        meta: Option<PathBuf>,
        /// Output HDR (.pfm or .hdr)
        #[arg(long, default_value = "out.pfm")]
        out: PathBuf,
        /// Input format override for HDR inputs
        #[arg(long, value_enum, default_value_t = HdrFormat::Auto)]
        format: HdrFormat,
    },
    /// Degradation mask between ground truth and an estimate; prints mask_fraction
    Mask {
        /// Ground-truth HDR (.hdr or .pfm)
        gt: PathBuf,
        /// Estimated HDR (.hdr or .pfm)
        est: PathBuf,
        /// Threshold on the mean tone-mapped channel difference (default 4/255)
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        /// Mu of the tone curve
        #[arg(long, default_value_t = DEFAULT_MU)]
        mu: f64,
        /// Output PGM (255 = degraded)
        #[arg(long, default_value = "mask.pgm")]
        out: PathBuf,
        /// Input format override
        #[arg(long, value_enum, default_value_t = HdrFormat::Auto)]
        format: HdrFormat,
    },
    /// Compare an estimate with ground truth; writes CSV `name,domain,value,params` to stdout
    Eval {
        /// Ground-truth HDR (.hdr or .pfm)
        gt: PathBuf,
        /// Estimated HDR (.hdr or .pfm)
        est: PathBuf,
        /// Comma-separated subset of psnr,ssim,gm_l1,mulaw_l1
        #[arg(long, default_value = "psnr,ssim,gm_l1,mulaw_l1")]
        metrics: String,
        /// Comma-separated subset of linear,mulaw,pu21 (applies to psnr and ssim)
        #[arg(long, default_value = "linear,mulaw,pu21")]
        domains: String,
        /// Display luminance in cd/m^2 of normalized value 1 for the pu21 domain
        #[arg(long, default_value_t = 100.0)]
        peak: f64,
        /// Mu of the tone curve
        #[arg(long, default_value_t = DEFAULT_MU)]
        mu: f64,
        /// Linear base layer (or stack.manifest) used to derive gain maps for gm_l1; gm_l1 is skipped without it
        #[arg(long)]
        base: Option<PathBuf>,
        /// Gain-map variant for gm_l1
        #[arg(long, value_enum, default_value_t = VariantArg::Exp2)]
        variant: VariantArg,
        /// Input format override
        #[arg(long, value_enum, default_value_t = HdrFormat::Auto)]
        format: HdrFormat,
    },
    /// Check the one-step clean-latent identity on seeded random latents; prints the max-abs error
    Diffcheck {
        /// Number of diffusion steps in the linear schedule
        #[arg(long, default_value_t = gmkit::diffusion::DEFAULT_STEPS)]
        steps: usize,
        /// Timestep index to test
        #[arg(long, default_value_t = 999)]
        t: usize,
        /// Seed of the ChaCha8 generator
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Latent shape CxHxW
        #[arg(long, default_value = "4x8x8")]
        shape: String,
        /// First beta of the schedule
        #[arg(long, default_value_t = gmkit::diffusion::DEFAULT_BETA_START)]
        beta_start: f64,
        /// Last beta of the schedule
        #[arg(long, default_value_t = gmkit::diffusion::DEFAULT_BETA_END)]
        beta_end: f64,
    },
}

fn run(cli: Cli) -> error::CliResult<()> {
    match cli.command {
        Command::Synth {
            input,
            evs,
            gamma,
            out_dir,
            format,
        } => commands::synth(&input, &evs, gamma, &out_dir, format),
        Command::Merge { manifest, out } => commands::merge(&manifest, &out),
        Command::GmEncode {
            hdr,
            base,
            variant,
            qmax,
            alpha,
            mu,
            out,
            format,
        } => commands::gm_encode(&hdr, &base, variant.into(), &qmax, alpha, mu, &out, format),
        Command::GmDecode {
            base,
            gm,
            meta,
            out,
            format,
        } => commands::gm_decode(&base, &gm, meta.as_deref(), &out, format),
        Command::Mask {
            gt,
            est,
            sigma,
            mu,
            out,
            format,
        } => commands::mask(&gt, &est, sigma, mu, &out, format),
        Command::Eval {
            gt,
            est,
            metrics,
            domains,
            peak,
            mu,
            base,
            variant,
            format,
        } => commands::eval(&commands::EvalArgs {
            gt: &gt,
            est: &est,
            metrics: &metrics,
            domains: &domains,
            peak,
            mu,
            base: base.as_deref(),
            variant: variant.into(),
            format,
        }),
        Command::Diffcheck {
            steps,
            t,
            seed,
            shape,
            beta_start,
            beta_end,
        } => diffcheck::run(steps, t, seed, &shape, beta_start, beta_end),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
