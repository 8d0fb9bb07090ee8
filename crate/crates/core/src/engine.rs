//! Exact catch probabilities for a fixed hunter trajectory by survival
//! dynamic programming on `Z_N`.
//!
//! The rabbit starts uniformly on `Z_N` and is caught at step `n` when its
//! position after the `n`-th move equals `y_n mod N`; meeting at time zero
//! does not count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{wrap, Convolver, KernelSpectrum};
use crate::stepdist::StepLaw;

/// Hunter positions `y_1..y_T` with `|y_{n+1} − y_n| ≤ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    positions: Vec<i64>,
}

impl Trajectory {
    pub fn new(positions: Vec<i64>) -> Result<Self> {
        for (index, w) in positions.windows(2).enumerate() {
            let step = w[1] - w[0];
            if step.abs() > 1 {
                return Err(Error::LipschitzViolation { index, step });
            }
        }
        Ok(Trajectory { positions })
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Hunter strategies. Each starts at `y_0 = 0` unless a start is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryKind {
    /// `y_n = v`.
    Stationary { vertex: i64 },
    /// `y_n = start + direction·n`.
    Sweep { start: i64, direction: i64 },
    /// Explicit list; its own length wins over `T`.
    Custom { positions: Vec<i64> },
    /// i.i.d. increments with `P{−1}, P{0}, P{+1}` given by `pmf`.
    RandomHunter { pmf: [f64; 3], seed: u64 },
}

fn check_hunter_pmf(pmf: &[f64; 3]) -> Result<()> {
    let total: f64 = pmf.iter().sum();
    if pmf.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::ParameterOutOfRange(format!("hunter pmf {pmf:?} is not a distribution")));
    }
    Ok(())
}

/// `y_n = Σ_{k≤n} Y_k` with `Y_k` drawn from `pmf` over `{−1, 0, 1}`.
pub fn random_walk_trajectory<R: Rng + ?Sized>(pmf: &[f64; 3], t: usize, rng: &mut R) -> Trajectory {
    let mut y = 0i64;
    let positions = (0..t)
        .map(|_| {
            let u: f64 = rng.gen();
            y += if u < pmf[0] {
                -1
            } else if u < pmf[0] + pmf[1] {
                0
            } else {
                1
            };
            y
        })
        .collect();
    Trajectory { positions }
}

pub fn make_trajectory(kind: &TrajectoryKind, t: usize) -> Result<Trajectory> {
    match kind {
        TrajectoryKind::Stationary { vertex } => Ok(Trajectory { positions: vec![*vertex; t] }),
        TrajectoryKind::Sweep { start, direction } => {
            if direction.abs() > 1 {
                return Err(Error::LipschitzViolation { index: 0, step: *direction });
            }
            Ok(Trajectory { positions: (1..=t as i64).map(|n| start + direction * n).collect() })
        }
        TrajectoryKind::Custom { positions } => Trajectory::new(positions.clone()),
        TrajectoryKind::RandomHunter { pmf, seed } => {
            check_hunter_pmf(pmf)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(random_walk_trajectory(pmf, t, &mut rng))
        }
    }
}

/// Result of the exact dynamic programs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatchReport {
    pub n_vertices: usize,
    /// `per_start[l]`: catch probability for a rabbit starting at `l`.
    /// Empty when only the forward pass ran.
    pub per_start: Vec<f64>,
    /// Uniform-start catch probability.
    pub average: f64,
    /// Cumulative uniform-start catch probability after each step.
    pub caught_by_time: Vec<f64>,
}

/// Reusable DP state for one law on one cycle.
pub struct CatchEngine {
    n: usize,
    conv: Convolver,
}

impl CatchEngine {
    pub fn new(law: &StepLaw, n: usize) -> Result<Self> {
        let kernel = wrap(law, n)?;
        let spectrum = KernelSpectrum::new(law, n);
        Ok(CatchEngine { n, conv: Convolver::new(&kernel, &spectrum) })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    fn cell(&self, y: i64) -> usize {
        y.rem_euclid(self.n as i64) as usize
    }

    /// Survival DP from the uniform start: convolve, absorb at the hunter.
    pub fn forward(&mut self, trajectory: &Trajectory) -> CatchReport {
        let n = self.n;
        let mut u = vec![1.0 / n as f64; n];
        let mut caught = 0.0;
        let mut caught_by_time = Vec::with_capacity(trajectory.len());
        for &y in trajectory.positions() {
            self.conv.apply(&mut u);
            let c = self.cell(y);
            caught += u[c];
            u[c] = 0.0;
            caught_by_time.push(caught);
        }
        CatchReport { n_vertices: n, per_start: Vec::new(), average: caught, caught_by_time }
    }

    /// Catch probability for every start at once, by backward recursion
    /// `v_n = kernel ⊛ (1 at y_n, v_{n+1} elsewhere)`.
    pub fn backward_per_start(&mut self, trajectory: &Trajectory) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        for &y in trajectory.positions().iter().rev() {
            let c = self.cell(y);
            v[c] = 1.0;
            self.conv.apply(&mut v);
            for x in &mut v {
                *x = x.min(1.0);
            }
        }
        v
    }

    /// Forward pass for the time profile plus backward pass for the starts.
    pub fn full(&mut self, trajectory: &Trajectory) -> CatchReport {
        let mut report = self.forward(trajectory);
        report.per_start = self.backward_per_start(trajectory);
        report
    }
}

pub fn exact_catch_forward(law: &StepLaw, n: usize, trajectory: &Trajectory) -> Result<CatchReport> {
    Ok(CatchEngine::new(law, n)?.forward(trajectory))
}

/// Full report; `average` is the forward value and `per_start` comes from
/// the backward recursion.
pub fn exact_catch_backward(law: &StepLaw, n: usize, trajectory: &Trajectory) -> Result<CatchReport> {
    Ok(CatchEngine::new(law, n)?.full(trajectory))
}

/// `(Σ_{n≤H} n·P{catch at n}, P{no catch by H})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatchTime {
    pub truncated_mean: f64,
    pub tail_mass: f64,
    pub horizon: usize,
}

pub fn expected_catch_time(
    law: &StepLaw,
    n: usize,
    kind: &TrajectoryKind,
    horizon: usize,
) -> Result<CatchTime> {
    if horizon < n {
        return Err(Error::PreconditionViolated(format!("horizon {horizon} < N = {n}")));
    }
    let trajectory = make_trajectory(kind, horizon)?;
    if trajectory.len() < horizon {
        return Err(Error::PreconditionViolated(format!(
            "trajectory of length {} cannot reach horizon {horizon}",
            trajectory.len()
        )));
    }
    let report = exact_catch_forward(law, n, &trajectory)?;
    let mut prev = 0.0;
    let mut mean = 0.0;
    for (i, &c) in report.caught_by_time.iter().take(horizon).enumerate() {
        mean += (i + 1) as f64 * (c - prev);
        prev = c;
    }
    Ok(CatchTime { truncated_mean: mean, tail_mass: 1.0 - prev, horizon })
}

/// Mean and standard error of the exact catch probability over random
/// hunter trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Samples hunter trajectories of length `N` and scores each exactly, so
/// only the hunter's randomness is left to Monte Carlo.
pub fn joint_random_hunter(
    law: &StepLaw,
    n: usize,
    hunter_pmf: [f64; 3],
    samples: usize,
    seed: u64,
) -> Result<JointEstimate> {
    check_hunter_pmf(&hunter_pmf)?;
    if samples == 0 {
        return Err(Error::ParameterOutOfRange("need at least one hunter sample".into()));
    }
    let values = joint_samples(law, n, hunter_pmf, samples, seed)?;
    let mean = values.iter().sum::<f64>() / samples as f64;
    let std_error = if samples > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        (var / samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(JointEstimate { mean, std_error, samples, seed })
}

/// Exact catch probability of each sampled trajectory. Sample `i` uses
/// stream `i` of the seeded generator, independent of scheduling.
pub fn joint_samples(
    law: &StepLaw,
    n: usize,
    hunter_pmf: [f64; 3],
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    // build once to surface errors before the parallel section
    CatchEngine::new(law, n)?;
    Ok((0..samples)
        .into_par_iter()
        .map_init(
            || CatchEngine::new(law, n).expect("validated above"),
            |engine, i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let t = random_walk_trajectory(&hunter_pmf, n, &mut rng);
                engine.forward(&t).average
            },
        )
        .collect())
}
