//! Forward noising and one-step clean-latent recovery for a discrete
//! diffusion schedule.

use crate::error::{Error, Result};

pub const DEFAULT_STEPS: usize = 1000;
pub const DEFAULT_BETA_START: f64 = 1e-4;
pub const DEFAULT_BETA_END: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    betas: Vec<f64>,
    alpha_bars: Vec<f64>,
}

impl NoiseSchedule {
    pub fn from_betas(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::InvalidArgument("schedule needs at least one step".into()));
        }
        if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && **b < 1.0)) {
            return Err(Error::InvalidArgument(format!("beta {b} outside (0, 1)")));
        }
        let alpha_bars = betas
            .iter()
            .scan(1.0, |acc, b| {
                *acc *= 1.0 - b;
                Some(*acc)
            })
            .collect::<Vec<_>>();
        if alpha_bars.last().is_some_and(|&a| a <= 0.0) {
            return Err(Error::InvalidArgument("cumulative alpha underflows to 0".into()));
        }
        Ok(Self { betas, alpha_bars })
    }

    pub fn num_steps(&self) -> usize {
        self.betas.len()
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn alpha_bars(&self) -> &[f64] {
        &self.alpha_bars
    }

    pub fn alpha_bar(&self, t: usize) -> Result<f64> {
        self.alpha_bars.get(t).copied().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "timestep {t} out of range for a {}-step schedule",
                self.num_steps()
            ))
        })
    }
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        linear_schedule(DEFAULT_STEPS, DEFAULT_BETA_START, DEFAULT_BETA_END).expect("default schedule is valid")
    }
}

/// Betas interpolated linearly from `beta_start` to `beta_end`, both inclusive.
pub fn linear_schedule(steps: usize, beta_start: f64, beta_end: f64) -> Result<NoiseSchedule> {
    if steps == 0 || !(0.0 < beta_start && beta_start <= beta_end && beta_end < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid schedule: steps={steps}, beta range [{beta_start}, {beta_end}]"
        )));
    }
    let betas = if steps == 1 {
        vec![beta_start]
    } else {
        let span = beta_end - beta_start;
        (0..steps)
            .map(|i| beta_start + span * i as f64 / (steps - 1) as f64)
            .collect()
    };
    NoiseSchedule::from_betas(betas)
}

/// Latent tensor of shape (channels, height, width).
#[derive(Debug, Clone, PartialEq)]
pub struct LatentGrid {
    shape: (usize, usize, usize),
    data: Vec<f64>,
}

impl LatentGrid {
    pub fn new(shape: (usize, usize, usize), data: Vec<f64>) -> Result<Self> {
        let (c, h, w) = shape;
        if data.len() != c * h * w {
            return Err(Error::InvalidArgument(format!(
                "latent of shape {shape:?} needs {} values, got {}",
                c * h * w,
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: (usize, usize, usize)) -> Self {
        Self {
            shape,
            data: vec![0.0; shape.0 * shape.1 * shape.2],
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            shape: self.shape,
            data: self.data.iter().map(|v| v * a).collect(),
        }
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &LatentGrid) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn check_shape(&self, other: &LatentGrid) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                expected: (self.shape.0, self.shape.1 * self.shape.2),
                found: (other.shape.0, other.shape.1 * other.shape.2),
            });
        }
        Ok(())
    }
}

/// `z_t = sqrt(abar_t) * z0 + sqrt(1 - abar_t) * eps`.
pub fn q_sample(z0: &LatentGrid, t: usize, eps: &LatentGrid, sched: &NoiseSchedule) -> Result<LatentGrid> {
    z0.check_shape(eps)?;
    let ab = sched.alpha_bar(t)?;
    let (signal, noise) = (ab.sqrt(), (1.0 - ab).sqrt());
    let data = z0
        .data
        .iter()
        .zip(&eps.data)
        .map(|(z, e)| signal * z + noise * e)
        .collect();
    Ok(LatentGrid { shape: z0.shape, data })
}

/// Clean-latent estimate from a noised latent and a noise prediction:
/// `(z_t - sqrt(1 - abar_t) * eps_hat) / sqrt(abar_t)`.
pub fn one_step_x0(z_t: &LatentGrid, eps_hat: &LatentGrid, t: usize, sched: &NoiseSchedule) -> Result<LatentGrid> {
    z_t.check_shape(eps_hat)?;
    let ab = sched.alpha_bar(t)?;
    let (signal, noise) = (ab.sqrt(), (1.0 - ab).sqrt());
    let data = z_t
        .data
        .iter()
        .zip(&eps_hat.data)
        .map(|(z, e)| (z - noise * e) / signal)
        .collect();
    Ok(LatentGrid { shape: z_t.shape, data })
}
