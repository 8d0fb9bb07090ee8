//! Monte Carlo simulation of the full game with sampled rabbit paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{make_trajectory, Trajectory, TrajectoryKind};
use crate::error::{Error, Result};
use crate::stepdist::StepLaw;

/// Trials per independent generator stream.
pub const CHUNK: u64 = 4096;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub trials: u64,
    pub successes: u64,
    pub point: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
}

/// Wilson score interval.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

impl McEstimate {
    fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let point = successes as f64 / trials as f64;
        let (lo, hi) = wilson(successes, trials, Z95);
        McEstimate { trials, successes, point, ci95: (lo, hi), seed }
    }

    pub fn covers(&self, p: f64) -> bool {
        self.ci95.0 <= p && p <= self.ci95.1
    }
}

/// First `n` with the rabbit on the hunter's cell, or `None`.
fn play<R: Rng>(law: &StepLaw, n: usize, cells: &[i64], rng: &mut R) -> Option<usize> {
    let modulus = n as i64;
    let mut pos = rng.gen_range(0..modulus);
    for (t, &y) in cells.iter().enumerate() {
        pos = (pos + law.sample(rng).rem_euclid(modulus)) % modulus;
        if pos == y {
            return Some(t + 1);
        }
    }
    None
}

/// Runs `trials` games split into chunks of [`CHUNK`]; chunk `c` draws from
/// stream `c` of the seeded generator, so output does not depend on the
/// thread count.
fn run_chunks<T, F, M>(trials: u64, seed: u64, per_trial: F, merge: M, empty: T) -> T
where
    T: Send + Sync + Clone,
    F: Fn(&mut ChaCha8Rng, &mut T) + Sync,
    M: Fn(T, T) -> T + Sync + Send,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(trials - c * CHUNK);
            let mut acc = empty.clone();
            for _ in 0..count {
                per_trial(&mut rng, &mut acc);
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(empty.clone(), &merge)
}

pub fn simulate_catch(
    law: &StepLaw,
    n: usize,
    trajectory: &Trajectory,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if trials < 100 {
        return Err(Error::ParameterOutOfRange(format!("trials = {trials} must be >= 100")));
    }
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("N = {n} must be >= 2")));
    }
    let cells: Vec<i64> = trajectory.positions().iter().map(|y| y.rem_euclid(n as i64)).collect();
    let successes = run_chunks(
        trials,
        seed,
        |rng, acc: &mut u64| {
            if play(law, n, &cells, rng).is_some() {
                *acc += 1;
            }
        },
        |a, b| a + b,
        0u64,
    );
    Ok(McEstimate::from_counts(successes, trials, seed))
}

/// First-catch times over `1..=horizon` plus the censored count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatchHistogram {
    /// `counts[t − 1]` games first caught at time `t`.
    pub counts: Vec<u64>,
    pub censored: u64,
    pub trials: u64,
    pub seed: u64,
}

impl CatchHistogram {
    /// Empirical `P{caught by t}`.
    pub fn cdf(&self, t: usize) -> f64 {
        self.counts.iter().take(t).sum::<u64>() as f64 / self.trials as f64
    }

    /// Mean catch time among caught games.
    pub fn mean_caught(&self) -> f64 {
        let caught: u64 = self.counts.iter().sum();
        let weighted: f64 = self.counts.iter().enumerate().map(|(i, &c)| (i + 1) as f64 * c as f64).sum();
        weighted / caught as f64
    }
}

pub fn catch_time_histogram(
    law: &StepLaw,
    n: usize,
    kind: &TrajectoryKind,
    trials: u64,
    horizon: usize,
    seed: u64,
) -> Result<CatchHistogram> {
    if horizon < 1 {
        return Err(Error::ParameterOutOfRange("horizon must be >= 1".into()));
    }
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("N = {n} must be >= 2")));
    }
    let trajectory = make_trajectory(kind, horizon)?;
    let cells: Vec<i64> = trajectory.positions().iter().map(|y| y.rem_euclid(n as i64)).collect();
    let counts = run_chunks(
        trials,
        seed,
        |rng, acc: &mut Vec<u64>| {
            let slot = play(law, n, &cells, rng).map_or(cells.len(), |t| t - 1);
            acc[slot] += 1;
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
        vec![0u64; cells.len() + 1],
    );
    let censored = counts[cells.len()];
    Ok(CatchHistogram { counts: counts[..cells.len()].to_vec(), censored, trials, seed })
}
