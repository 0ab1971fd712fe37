//! Seeded check of the one-step clean-latent identity.
//!
//! Samples come from `ChaCha8Rng::seed_from_u64(seed)`: each uniform draw is
//! the top 53 bits of one `next_u64` scaled to [0, 1). Clean latents are
//! uniform on [-1, 1); noise is standard normal via Box-Muller, using two
//! uniforms per pair of samples.

use gmkit::diffusion::{linear_schedule, one_step_x0, q_sample, LatentGrid};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

pub const TOLERANCE: f64 = 1e-9;

struct Sampler(ChaCha8Rng);

impl Sampler {
    fn new(seed: u64) -> Self {
        Sampler(ChaCha8Rng::seed_from_u64(seed))
    }

    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn normals(&mut self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        while out.len() < n {
            let u1 = 1.0 - self.uniform();
            let u2 = self.uniform();
            let r = (-2.0 * u1.ln()).sqrt();
            let theta = std::f64::consts::TAU * u2;
            out.push(r * theta.cos());
            out.push(r * theta.sin());
        }
        out.truncate(n);
        out
    }
}

fn parse_shape(s: &str) -> CliResult<(usize, usize, usize)> {
    let dims: Vec<usize> = s
        .split(['x', 'X'])
        .map(|d| d.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--shape must look like CxHxW, got `{s}`")))?;
    match dims[..] {
        [c, h, w] if c > 0 && h > 0 && w > 0 => Ok((c, h, w)),
        _ => Err(CliError::Usage(format!(
            "--shape must be three positive sizes CxHxW, got `{s}`"
        ))),
    }
}

/// Max-abs error between the sampled clean latent and its one-step recovery.
pub fn recovery_error(
    steps: usize,
    t: usize,
    seed: u64,
    shape: (usize, usize, usize),
    beta_start: f64,
    beta_end: f64,
) -> CliResult<f64> {
    let sched = linear_schedule(steps, beta_start, beta_end)?;
    let n = shape.0 * shape.1 * shape.2;
    let mut rng = Sampler::new(seed);
    let z0: Vec<f64> = (0..n).map(|_| 2.0 * rng.uniform() - 1.0).collect();
    let eps = rng.normals(n);
    let z0 = LatentGrid::new(shape, z0)?;
    let eps = LatentGrid::new(shape, eps)?;
    let zt = q_sample(&z0, t, &eps, &sched)?;
    let rec = one_step_x0(&zt, &eps, t, &sched)?;
    Ok(rec.max_abs_diff(&z0)?)
}

pub fn run(steps: usize, t: usize, seed: u64, shape: &str, beta_start: f64, beta_end: f64) -> CliResult<()> {
    let shape = parse_shape(shape)?;
    let err = recovery_error(steps, t, seed, shape, beta_start, beta_end)?;
    println!("max_abs_error={err:e}");
    if err <= TOLERANCE {
        Ok(())
    } else {
        Err(CliError::Check(format!("max_abs_error {err:e} exceeds {TOLERANCE:e}")))
    }
}
