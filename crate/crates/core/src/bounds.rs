//! Trajectory-independent bounds on the catch probability: the `p`/`q`
//! sandwich, specialized stationary and sweep sums, closed-form lower
//! curves and the constant pipeline `(C*, r*, ρ*)` behind them.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::KernelSpectrum;
use crate::stepdist::{SpectralProfile, StepLaw};

/// Residues `{y mod N : |y| ≤ i}`.
pub fn reachable_residues(n: usize, i: usize) -> Vec<usize> {
    if 2 * i + 1 >= n {
        return (0..n).collect();
    }
    let mut r: Vec<usize> = (0..=i).collect();
    r.extend((1..=i).map(|y| n - y));
    r
}

/// `(p_i, q_i)` for `i = 0..N−1`: max and min of the `i`-step table over
/// the residues reachable from offsets `|y| ≤ i`.
pub fn profiles(law: &StepLaw, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("N = {n} must be >= 2")));
    }
    let spectrum = KernelSpectrum::new(law, n);
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            if i == 0 {
                return Ok((1.0, 1.0));
            }
            let table = spectrum.nstep(i as u64)?;
            let mut hi = 0.0f64;
            let mut lo = f64::INFINITY;
            for l in reachable_residues(n, i) {
                hi = hi.max(table.probs[l]);
                lo = lo.min(table.probs[l]);
            }
            Ok((hi, lo))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().unzip())
}

pub fn p_profile(law: &StepLaw, n: usize) -> Result<Vec<f64>> {
    profiles(law, n).map(|(p, _)| p)
}

pub fn q_profile(law: &StepLaw, n: usize) -> Result<Vec<f64>> {
    profiles(law, n).map(|(_, q)| q)
}

/// `1/Σp_i ≤ P ≤ 2/Σq_i` for every Lipschitz hunter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichBound {
    pub lower: f64,
    pub upper: f64,
    pub p_sums: f64,
    pub q_sums: f64,
}

impl SandwichBound {
    /// `min(upper, 1)`.
    pub fn upper_capped(&self) -> f64 {
        self.upper.min(1.0)
    }

    pub fn contains(&self, p: f64, tol: f64) -> bool {
        self.lower - tol <= p && p <= self.upper_capped() + tol
    }
}

pub fn sandwich(law: &StepLaw, n: usize) -> Result<SandwichBound> {
    let (p, q) = profiles(law, n)?;
    let p_sums: f64 = p.iter().sum();
    let q_sums: f64 = q.iter().sum();
    Ok(SandwichBound { lower: 1.0 / p_sums, upper: 2.0 / q_sums, p_sums, q_sums })
}

/// `P{S_i ∈ [offset(i)]_N}` from the spectrum without a full inverse
/// transform.
fn residue_prob(spectrum: &KernelSpectrum, i: u64, offset: usize) -> f64 {
    let n = spectrum.n_vertices;
    let mut acc = 0.0;
    for (j, &lam) in spectrum.eigenvalues.iter().enumerate() {
        let angle = 2.0 * PI * ((j * offset) % n) as f64 / n as f64;
        acc += lam.powi(i as i32) * angle.cos();
    }
    (acc / n as f64).max(0.0)
}

/// `Σ_{i=1}^{N−1} P{S_i ∈ [0]_N}`.
pub fn stationary_sum(law: &StepLaw, n: usize) -> f64 {
    let spectrum = KernelSpectrum::new(law, n);
    (1..n as u64).into_par_iter().map(|i| residue_prob(&spectrum, i, 0)).sum()
}

/// `Σ_{i=1}^{N−1} P{S_i ∈ [i]_N}`.
pub fn sweep_sum(law: &StepLaw, n: usize) -> f64 {
    let spectrum = KernelSpectrum::new(law, n);
    (1..n as u64).into_par_iter().map(|i| residue_prob(&spectrum, i, i as usize % n)).sum()
}

fn bounds_from_sum(s: f64) -> (f64, f64) {
    (1.0 / (1.0 + s), (2.0 / (1.0 + s)).min(1.0))
}

/// Bounds for the stationary hunter; upper capped at 1.
pub fn cor2_bounds(law: &StepLaw, n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("N = {n} must be >= 2")));
    }
    Ok(bounds_from_sum(stationary_sum(law, n)))
}

/// Bounds for the sweep hunter `y_i = i`; upper capped at 1.
pub fn cor3_bounds(law: &StepLaw, n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("N = {n} must be >= 2")));
    }
    Ok(bounds_from_sum(sweep_sum(law, n)))
}

/// `(1 + ε̃)/(1 + Σ_{i=1}^{⌊ε̃N⌋} P{S_i ∈ [0]_N})`.
pub fn remark5_upper(law: &StepLaw, n: usize, eps_tilde: f64) -> Result<f64> {
    if eps_tilde.is_nan() || eps_tilde <= 0.0 || (n as f64) * eps_tilde < 1.0 {
        return Err(Error::PreconditionViolated(format!(
            "need eps_tilde > 0 and N >= 1/eps_tilde (N = {n}, eps_tilde = {eps_tilde})"
        )));
    }
    let m = (eps_tilde * n as f64).floor() as u64;
    let spectrum = KernelSpectrum::new(law, n);
    let s: f64 = (1..=m).into_par_iter().map(|i| residue_prob(&spectrum, i, 0)).sum();
    Ok((1.0 + eps_tilde) / (1.0 + s))
}

/// Grid resolution of [`constant_pipeline`].
pub const PIPELINE_GRID: usize = 100_000;

/// Constants `C*`, `r*`, `ρ*` of the local expansion of `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantPipeline {
    pub profile: SpectralProfile,
    /// `sup |φ(θ) − (1 − c*θ^β)| / θ^{β+ε}` on `(0, π]`.
    pub c_big: f64,
    /// Where the supremum was found.
    pub c_big_at: f64,
    /// Change of `C*` under local refinement, a measure of grid error.
    pub c_big_refinement: f64,
    pub r_star: f64,
    /// Grid maximum of `|φ|` on `[r*, π]` plus `rho_margin`.
    pub rho_star: f64,
    /// Largest change of `|φ|` between neighbouring grid points.
    pub rho_margin: f64,
}

/// Below this the remainder ratio is dominated by cancellation in
/// `1 − φ(θ)` and is skipped.
const RATIO_FLOOR: f64 = 1e-8;

pub fn constant_pipeline(law: &StepLaw) -> Result<ConstantPipeline> {
    let profile = law.spectral_profile()?;
    let SpectralProfile { beta, c_star, epsilon } = profile;
    let ratio = |t: f64| {
        let denom = t.powf(beta + epsilon);
        if denom < RATIO_FLOOR {
            return 0.0;
        }
        (law.char_fn(t) - (1.0 - c_star * t.powf(beta))).abs() / denom
    };
    let h = PI / PIPELINE_GRID as f64;
    let (k_best, coarse) = (1..=PIPELINE_GRID)
        .into_par_iter()
        .map(|k| (k, ratio(k as f64 * h)))
        .reduce(|| (0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    // refine around the best cell
    let lo = (k_best as f64 - 1.0) * h;
    let fine = 2000;
    let (mut c_big, mut at) = (coarse, k_best as f64 * h);
    for m in 0..=fine {
        let t = (lo + 2.0 * h * m as f64 / fine as f64).min(PI);
        let v = ratio(t);
        if v > c_big {
            c_big = v;
            at = t;
        }
    }
    let r_star = (c_star / (2.0 * c_big))
        .powf(1.0 / epsilon)
        .min((1.0 / (3.0 * c_star)).powf(1.0 / beta))
        .min(PI);
    let step = (PI - r_star) / PIPELINE_GRID as f64;
    let values: Vec<f64> = (0..=PIPELINE_GRID)
        .into_par_iter()
        .map(|k| law.char_fn(r_star + k as f64 * step).abs())
        .collect();
    let grid_max = values.iter().copied().fold(0.0, f64::max);
    let rho_margin = values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    Ok(ConstantPipeline {
        profile,
        c_big,
        c_big_at: at,
        c_big_refinement: c_big - coarse,
        r_star,
        rho_star: (grid_max + rho_margin).min(1.0),
        rho_margin,
    })
}

/// Which power of `π` multiplies `B_N` when `β ∈ (1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BnVariant {
    /// `2^{2−β}/(c*π^β)`, as obtained from the direct sum estimate.
    #[default]
    PiBeta,
    /// `2^{2−β}/(c*π)`.
    Pi,
}

/// `(A_N, B_N)` of the closed-form lower curve.
pub fn an_bn(pipeline: &ConstantPipeline, n: usize, variant: BnVariant) -> (f64, f64) {
    let SpectralProfile { beta, c_star: c, epsilon } = pipeline.profile;
    let nf = n as f64;
    let growth = nf.powf((beta - 1.0) / beta);
    let a_n = if beta <= 1.0 {
        2f64.powf(2.0 + epsilon - beta) * PI.powf(epsilon - beta) * pipeline.c_big / (c * c)
    } else {
        2.0 * growth
    };
    let b_n = if beta < 1.0 {
        2f64.powf(1.0 - beta) / (PI.powf(beta) * c * (1.0 - beta))
    } else if beta == 1.0 {
        (nf.ln() + 1.0) / (PI * c)
    } else {
        let pi_pow = match variant {
            BnVariant::PiBeta => PI.powf(beta),
            BnVariant::Pi => PI,
        };
        2f64.powf(2.0 - beta) / (c * pi_pow) * (1.0 + 1.0 / (beta - 1.0)) * growth
    };
    (a_n, b_n)
}

/// `L(N) = 1/(1 + A_N + B_N + 1/(1 − ρ*))`.
pub fn closed_form_l(pipeline: &ConstantPipeline, n: usize, variant: BnVariant) -> f64 {
    let (a_n, b_n) = an_bn(pipeline, n, variant);
    1.0 / (1.0 + a_n + b_n + 1.0 / (1.0 - pipeline.rho_star))
}

/// Reference lower curves for the three example laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LPreset {
    /// Heavy-tailed law, `a = 1`: `1/((2/π²) ln N + 6.50503)`.
    Example1,
    /// Power law `β = 1`, `a = 2.5`: `1/((5/π²) ln N + 4.65936)`.
    Example2,
    /// Lazy law: `1/((1 + 6/π²)√N + 4.26301)`.
    Example3,
}

impl LPreset {
    /// `1/L(N)`.
    pub fn inverse(self, n: usize) -> f64 {
        let nf = n as f64;
        let pi2 = PI * PI;
        match self {
            LPreset::Example1 => 2.0 / pi2 * nf.ln() + 6.50503,
            LPreset::Example2 => 5.0 / pi2 * nf.ln() + 4.65936,
            LPreset::Example3 => (1.0 + 6.0 / pi2) * nf.sqrt() + 4.26301,
        }
    }

    pub fn value(self, n: usize) -> f64 {
        1.0 / self.inverse(n)
    }
}

/// Frequency sums behind the closed-form curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiSums {
    pub phi_n: f64,
    pub phi_tilde: f64,
    pub e_n: f64,
    pub phi1: f64,
    pub phi2: f64,
    /// Number of frequencies `1 ≤ j < (r*/2π)N`.
    pub frequencies: usize,
}

pub fn phi_sums(law: &StepLaw, n: usize, pipeline: &ConstantPipeline) -> Result<PhiSums> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("N = {n} must be >= 2")));
    }
    let SpectralProfile { beta, c_star: c, .. } = pipeline.profile;
    let nf = n as f64;
    let j_end = pipeline.r_star / (2.0 * PI) * nf;
    let n_beta = nf.powf((beta - 1.0) / beta).min(j_end);
    let mut s = PhiSums { phi_n: 0.0, phi_tilde: 0.0, e_n: 0.0, phi1: 0.0, phi2: 0.0, frequencies: 0 };
    let mut j = 1usize;
    let mut harmonic = 0.0;
    while (j as f64) < j_end {
        let theta = 2.0 * PI * j as f64 / nf;
        let phi = law.char_fn(theta);
        let abs = phi.abs();
        s.phi_n += 2.0 / nf * (1.0 - abs.powi(n as i32)) / (1.0 - abs);
        s.e_n += 2.0 / nf * (1.0 / (1.0 - phi) - 1.0 / (c * theta.powf(beta)));
        if (j as f64) < n_beta {
            s.phi1 += 2.0 / nf * (1.0 - phi.powi(n as i32)).abs() / (1.0 - phi).abs();
        } else {
            s.phi2 += 2.0 / nf / (1.0 - phi).abs();
        }
        harmonic += (j as f64).powf(-beta);
        s.frequencies += 1;
        j += 1;
    }
    s.phi_tilde = 2f64.powf(1.0 - beta) / (PI.powf(beta) * c) * nf.powf(beta - 1.0) * harmonic;
    Ok(s)
}
