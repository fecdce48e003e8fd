//! Event-driven Monte Carlo of the telegraph process `ξ(t) ∈ {±1}`.
//!
//! Each direction flips at rate `γ/2`, so the stationary autocorrelation is
//! `⟨ξ(t+τ)ξ(t)⟩ = e^{-γ|τ|}`. A trajectory accumulates the phase
//! `φ(t) = (v/2) ∫₀ᵗ ξ(t') dt'`, integrated exactly over the piecewise-constant
//! path. The ensemble average of `e^{iφ}` has the same modulus as the bracket
//! of the closed-form coherence in [`crate::noise`].
//!
//! Trajectory `j` draws from its own ChaCha stream `(seed, j)` and partial sums
//! are reduced in trajectory order, so results do not depend on the number of
//! worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::noise::RtnParams;
use crate::Complex;

/// Trajectories per work item; fixes the reduction tree.
const CHUNK: usize = 512;

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_trajectories: usize,
    pub seed: u64,
    pub time_grid: Vec<f64>,
    /// Multiplies the flip rate. Anything other than 1 deliberately breaks
    /// the rate convention and is only used as a negative control.
    #[serde(default = "default_scale")]
    pub flip_rate_scale: f64,
}

impl McConfig {
    pub fn new(n_trajectories: usize, seed: u64, time_grid: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            n_trajectories,
            seed,
            time_grid,
            flip_rate_scale: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.n_trajectories >= 1,
            "n_trajectories",
            self.n_trajectories as f64,
            "at least one trajectory is required",
        )?;
        ensure(
            self.flip_rate_scale.is_finite() && self.flip_rate_scale > 0.0,
            "flip_rate_scale",
            self.flip_rate_scale,
            "must be finite and positive",
        )?;
        validate_grid(&self.time_grid)
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    let Some(&first) = grid.first() else {
        return Err(Error::Grid("time grid is empty"));
    };
    if !(first.is_finite() && first >= 0.0) {
        return Err(Error::Grid("first time must be finite and non-negative"));
    }
    if grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) || !w[1].is_finite())
    {
        return Err(Error::Grid("times must be finite and strictly increasing"));
    }
    Ok(())
}

/// Independent random stream for trajectory `index`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One realisation of `ξ` on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TelegraphPath {
    initial: f64,
    flips: Vec<f64>,
    /// `∫₀ ξ` up to each flip epoch; `prefix[0] = 0`.
    prefix: Vec<f64>,
}

impl TelegraphPath {
    /// Samples a path with the given per-direction flip rate. The initial value
    /// is `+1` with probability `(1 + δp0)/2`; at `δp0 = ±1` no draw is made.
    pub fn sample<R: Rng + ?Sized>(
        flip_rate: f64,
        delta_p0: f64,
        horizon: f64,
        rng: &mut R,
    ) -> Self {
        let initial = if delta_p0 >= 1.0 {
            1.0
        } else if delta_p0 <= -1.0 {
            -1.0
        } else if rng.random::<f64>() < (1.0 + delta_p0) / 2.0 {
            1.0
        } else {
            -1.0
        };

        let mut flips = Vec::new();
        let mut prefix = vec![0.0];
        let mut t = 0.0;
        let mut sign = initial;
        let mut acc = 0.0;
        loop {
            let wait: f64 = Exp1.sample(rng);
            let next = t + wait / flip_rate;
            if next > horizon {
                break;
            }
            acc += sign * (next - t);
            flips.push(next);
            prefix.push(acc);
            t = next;
            sign = -sign;
        }
        Self {
            initial,
            flips,
            prefix,
        }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn flips(&self) -> &[f64] {
        &self.flips
    }

    fn segment(&self, t: f64) -> (usize, f64) {
        let j = self.flips.partition_point(|&f| f <= t);
        let sign = if j % 2 == 0 {
            self.initial
        } else {
            -self.initial
        };
        (j, sign)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.segment(t).1
    }

    /// `∫₀ᵗ ξ`, exact for the sampled path.
    pub fn integral_to(&self, t: f64) -> f64 {
        let (j, sign) = self.segment(t);
        let start = if j == 0 { 0.0 } else { self.flips[j - 1] };
        self.prefix[j] + sign * (t - start)
    }
}

fn phases_on<'a>(
    path: &'a TelegraphPath,
    v: f64,
    grid: &'a [f64],
) -> impl Iterator<Item = f64> + 'a {
    grid.iter().map(move |&t| 0.5 * v * path.integral_to(t))
}

/// Accumulated phase `φ(t_k) = (v/2) ∫₀^{t_k} ξ` along one sampled trajectory.
pub fn sample_trajectory_phase<R: Rng + ?Sized>(
    p: &RtnParams,
    time_grid: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let horizon = time_grid.last().copied().unwrap_or(0.0);
    let path = TelegraphPath::sample(p.gamma / 2.0, p.delta_p0, horizon, rng);
    phases_on(&path, p.v, time_grid).collect()
}

/// Ensemble average of `e^{iφ(t_k)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleEstimate {
    pub times: Vec<f64>,
    pub mean: Vec<Complex>,
    /// Standard error of `|mean|` (delta method along the direction of the mean).
    pub std_err: Vec<f64>,
    pub n_used: usize,
}

impl EnsembleEstimate {
    pub fn modulus(&self) -> Vec<f64> {
        self.mean.iter().map(|m| m.norm()).collect()
    }
}

#[derive(Clone)]
struct PhaseSums {
    first: Vec<Complex>,
    second: Vec<Complex>,
}

impl PhaseSums {
    fn zeros(n: usize) -> Self {
        Self {
            first: vec![Complex::new(0.0, 0.0); n],
            second: vec![Complex::new(0.0, 0.0); n],
        }
    }

    fn absorb(&mut self, other: &PhaseSums) {
        for (a, b) in self.first.iter_mut().zip(&other.first) {
            *a += b;
        }
        for (a, b) in self.second.iter_mut().zip(&other.second) {
            *a += b;
        }
    }
}

/// Runs `per_chunk` over fixed trajectory ranges in parallel and returns the
/// results in chunk order.
fn map_chunks<T, F>(n: usize, per_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
{
    let n_chunks = n.div_ceil(CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| per_chunk(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect()
}

pub fn ensemble_coherence(p: &RtnParams, cfg: &McConfig) -> Result<EnsembleEstimate> {
    p.validate()?;
    cfg.validate()?;
    let grid = &cfg.time_grid;
    let horizon = *grid.last().expect("validated grid is non-empty");
    let flip_rate = cfg.flip_rate_scale * p.gamma / 2.0;

    let partials = map_chunks(cfg.n_trajectories, |range| {
        let mut sums = PhaseSums::zeros(grid.len());
        for j in range {
            let mut rng = trajectory_rng(cfg.seed, j as u64);
            let path = TelegraphPath::sample(flip_rate, p.delta_p0, horizon, &mut rng);
            for (k, phi) in phases_on(&path, p.v, grid).enumerate() {
                let z = Complex::from_polar(1.0, phi);
                sums.first[k] += z;
                sums.second[k] += z * z;
            }
        }
        sums
    });
    let mut total = PhaseSums::zeros(grid.len());
    for part in &partials {
        total.absorb(part);
    }

    let n = cfg.n_trajectories as f64;
    let mut mean = Vec::with_capacity(grid.len());
    let mut std_err = Vec::with_capacity(grid.len());
    for (s1, s2) in total.first.iter().zip(&total.second) {
        let m = s1 / n;
        let modulus = m.norm();
        let dir = if modulus > 0.0 {
            m / modulus
        } else {
            Complex::new(1.0, 0.0)
        };
        // Σ cos²(φ − θ) = N/2 + Re(Σ z² · e^{−2iθ})/2
        let sum_sq = 0.5 * n + 0.5 * (s2 * dir.conj() * dir.conj()).re;
        let var = if cfg.n_trajectories > 1 {
            ((sum_sq - n * modulus * modulus) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        mean.push(m);
        std_err.push((var / n).sqrt());
    }

    Ok(EnsembleEstimate {
        times: grid.clone(),
        mean,
        std_err,
        n_used: cfg.n_trajectories,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub lag: f64,
    pub value: f64,
    pub std_err: f64,
}

/// Estimates `⟨ξ(t+τ)ξ(t)⟩`, averaging over the reference times in
/// `cfg.time_grid` within each trajectory and then over trajectories.
pub fn autocorrelation_estimate(
    p: &RtnParams,
    cfg: &McConfig,
    lags: &[f64],
) -> Result<Vec<CorrelationEstimate>> {
    p.validate()?;
    cfg.validate()?;
    for &lag in lags {
        ensure(
            lag.is_finite() && lag >= 0.0,
            "lag",
            lag,
            "must be finite and non-negative",
        )?;
    }
    let grid = &cfg.time_grid;
    let max_lag = lags.iter().copied().fold(0.0, f64::max);
    let horizon = grid.last().expect("validated grid is non-empty") + max_lag;
    let flip_rate = cfg.flip_rate_scale * p.gamma / 2.0;
    let refs = grid.len() as f64;

    let partials = map_chunks(cfg.n_trajectories, |range| {
        let mut sums = vec![(0.0, 0.0); lags.len()];
        for j in range {
            let mut rng = trajectory_rng(cfg.seed, j as u64);
            let path = TelegraphPath::sample(flip_rate, p.delta_p0, horizon, &mut rng);
            for (acc, &lag) in sums.iter_mut().zip(lags) {
                let y: f64 = grid
                    .iter()
                    .map(|&t| path.value_at(t) * path.value_at(t + lag))
                    .sum::<f64>()
                    / refs;
                acc.0 += y;
                acc.1 += y * y;
            }
        }
        sums
    });

    let n = cfg.n_trajectories as f64;
    let mut totals = vec![(0.0, 0.0); lags.len()];
    for part in &partials {
        for (t, s) in totals.iter_mut().zip(part) {
            t.0 += s.0;
            t.1 += s.1;
        }
    }
    Ok(lags
        .iter()
        .zip(totals)
        .map(|(&lag, (s1, s2))| {
            let mean = s1 / n;
            let var = if n > 1.0 {
                ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            CorrelationEstimate {
                lag,
                value: mean,
                std_err: (var / n).sqrt(),
            }
        })
        .collect())
}
