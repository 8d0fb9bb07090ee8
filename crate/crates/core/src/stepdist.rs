//! Rabbit step laws: construction, evaluation, characteristic functions and
//! sampling.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

/// Default certified absolute error for series evaluations.
pub const DEFAULT_EVAL_TOL: f64 = 1e-10;

/// Largest `eval_tol` a law accepts.
pub const MAX_EVAL_TOL: f64 = 1e-6;

/// Family of a step law.
#[derive(Debug, Clone, PartialEq)]
pub enum LawKind {
    /// `P{X=k} = 1/(2a(|k|+1)(|k|+2))` off zero, atom `1 − 1/(2a)` at zero.
    HeavyTailed { a: f64 },
    /// `P{X=k} = 1/(2a|k|^{β+1})` off zero, atom `1 − ζ(β+1)/a` at zero.
    PowerLaw { beta: f64, a: f64 },
    /// Uniform on `{−1, 0, 1}`.
    Lazy,
    /// Finite symmetric table.
    Custom(BTreeMap<i64, f64>),
}

/// `(β, c*, ε)` with `φ(θ) = 1 − c*|θ|^β + O(|θ|^{β+ε})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub beta: f64,
    pub c_star: f64,
    pub epsilon: f64,
}

/// JSON form of a law, as accepted on the command line:
/// `{"kind":"power_law","beta":1.0,"a":2.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawSpec {
    HeavyTailed { a: f64 },
    PowerLaw { beta: f64, a: f64 },
    Lazy,
    Custom { table: BTreeMap<String, f64> },
}

impl LawSpec {
    pub fn build(&self, eval_tol: f64) -> Result<StepLaw> {
        let kind = match self {
            LawSpec::HeavyTailed { a } => LawKind::HeavyTailed { a: *a },
            LawSpec::PowerLaw { beta, a } => LawKind::PowerLaw { beta: *beta, a: *a },
            LawSpec::Lazy => LawKind::Lazy,
            LawSpec::Custom { table } => {
                let mut parsed = BTreeMap::new();
                for (key, p) in table {
                    let k: i64 = key.trim().parse().map_err(|_| {
                        Error::ParameterOutOfRange(format!("table key {key:?} is not an integer"))
                    })?;
                    parsed.insert(k, *p);
                }
                LawKind::Custom(parsed)
            }
        };
        StepLaw::new(kind, eval_tol)
    }
}

/// A symmetric integer-valued step law satisfying strong aperiodicity.
#[derive(Debug, Clone)]
pub struct StepLaw {
    kind: LawKind,
    eval_tol: f64,
    /// Atom at zero.
    p0: f64,
    /// `ζ(β+1)` for power laws.
    zeta: f64,
    /// Dense `pmf(0..=radius)` for finite-support laws.
    finite: Option<Vec<f64>>,
    sampler: OnceLock<Sampler>,
}

impl PartialEq for StepLaw {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.eval_tol == other.eval_tol
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl StepLaw {
    /// Validates parameters and builds the law (`make_law`).
    pub fn new(kind: LawKind, eval_tol: f64) -> Result<Self> {
        if !(eval_tol > 0.0 && eval_tol <= MAX_EVAL_TOL) {
            return Err(Error::ParameterOutOfRange(format!(
                "eval_tol {eval_tol} must lie in (0, {MAX_EVAL_TOL}]"
            )));
        }
        let mut zeta = 0.0;
        let mut finite = None;
        let p0 = match &kind {
            LawKind::HeavyTailed { a } => {
                if !(a.is_finite() && *a >= 0.5) {
                    return Err(Error::ParameterOutOfRange(format!("a = {a} must be >= 1/2")));
                }
                1.0 - 1.0 / (2.0 * a)
            }
            LawKind::PowerLaw { beta, a } => {
                if !(*beta > 0.0 && *beta < 2.0) {
                    return Err(Error::ParameterOutOfRange(format!(
                        "beta = {beta} must lie in (0, 2)"
                    )));
                }
                zeta = special::zeta(beta + 1.0);
                if !(a.is_finite() && *a > zeta) {
                    return Err(Error::ParameterOutOfRange(format!(
                        "a = {a} must exceed zeta(beta + 1) = {zeta}"
                    )));
                }
                1.0 - zeta / a
            }
            LawKind::Lazy => {
                finite = Some(vec![1.0 / 3.0; 2]);
                1.0 / 3.0
            }
            LawKind::Custom(table) => {
                let dense = Self::check_custom(table)?;
                let p0 = dense[0];
                finite = Some(dense);
                p0
            }
        };
        Ok(Self { kind, eval_tol, p0, zeta, finite, sampler: OnceLock::new() })
    }

    /// Symmetry, normalization and (A1) for a finite table; returns the
    /// symmetrized dense half-table `pmf(0..=radius)`.
    fn check_custom(table: &BTreeMap<i64, f64>) -> Result<Vec<f64>> {
        let radius = table.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0) as usize;
        let mut dense = vec![0.0; radius + 1];
        let mut total = 0.0;
        for (&k, &p) in table {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::ParameterOutOfRange(format!("pmf({k}) = {p}")));
            }
            let mirror = table.get(&-k).copied().unwrap_or(0.0);
            if (p - mirror).abs() > 1e-12 {
                return Err(Error::NotSymmetric { k });
            }
            if k >= 0 {
                dense[k as usize] = if k == 0 { p } else { 0.5 * (p + mirror) };
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { total });
        }
        // (A1): the support differences must generate Z
        let support: Vec<i64> = (-(radius as i64)..=radius as i64)
            .filter(|k| dense[k.unsigned_abs() as usize] > 0.0)
            .collect();
        let g = support.windows(2).fold(0, |g, w| gcd(g, (w[1] - w[0]) as u64));
        if g != 1 {
            return Err(Error::AperiodicityViolated { gcd: g });
        }
        Ok(dense)
    }

    pub fn heavy_tailed(a: f64) -> Result<Self> {
        Self::new(LawKind::HeavyTailed { a }, DEFAULT_EVAL_TOL)
    }

    pub fn power_law(beta: f64, a: f64) -> Result<Self> {
        Self::new(LawKind::PowerLaw { beta, a }, DEFAULT_EVAL_TOL)
    }

    pub fn lazy() -> Self {
        Self::new(LawKind::Lazy, DEFAULT_EVAL_TOL).expect("lazy law is valid")
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    pub fn eval_tol(&self) -> f64 {
        self.eval_tol
    }

    /// Largest `|k|` with positive mass, `None` for infinite support.
    pub fn support_radius(&self) -> Option<u64> {
        self.finite.as_ref().map(|d| {
            d.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64
        })
    }

    /// `pmf(k)` is non-increasing in `|k|`.
    pub fn is_unimodal(&self) -> bool {
        match &self.finite {
            Some(d) => d.windows(2).all(|w| w[0] >= w[1]),
            None => self.p0 >= self.pmf(1),
        }
    }

    pub fn pmf(&self, k: i64) -> f64 {
        let m = k.unsigned_abs();
        if m == 0 {
            return self.p0;
        }
        match &self.kind {
            LawKind::HeavyTailed { a } => {
                let m = m as f64;
                1.0 / (2.0 * a * (m + 1.0) * (m + 2.0))
            }
            LawKind::PowerLaw { beta, a } => 1.0 / (2.0 * a * (m as f64).powf(beta + 1.0)),
            LawKind::Lazy | LawKind::Custom(_) => {
                let d = self.finite.as_ref().expect("finite table");
                d.get(m as usize).copied().unwrap_or(0.0)
            }
        }
    }

    /// `P{|X| > k}`.
    pub fn tail_mass(&self, k: u64) -> f64 {
        match &self.kind {
            LawKind::HeavyTailed { a } => 1.0 / (a * (k as f64 + 2.0)),
            LawKind::PowerLaw { beta, a } => special::hurwitz_zeta(beta + 1.0, k as f64 + 1.0) / a,
            LawKind::Lazy | LawKind::Custom(_) => {
                let d = self.finite.as_ref().expect("finite table");
                d.iter().skip(k as usize + 1).map(|p| 2.0 * p).sum()
            }
        }
    }

    /// `ζ(β+1)` for power laws, zero otherwise.
    pub fn zeta_constant(&self) -> f64 {
        self.zeta
    }

    /// Characteristic function `φ(θ) = Σ_k cos(kθ) pmf(k)`.
    ///
    /// Closed forms are used for every family: a log/arctan expression for
    /// the heavy-tailed law and the polylogarithm inversion for power laws.
    /// Both are accurate to a few ulps, well inside `eval_tol`.
    pub fn char_fn(&self, theta: f64) -> f64 {
        let t = theta.abs() % (2.0 * PI);
        match &self.kind {
            LawKind::Lazy => (1.0 + 2.0 * theta.cos()) / 3.0,
            LawKind::HeavyTailed { a } => {
                if t == 0.0 {
                    return 1.0;
                }
                1.0 - 1.0 / (2.0 * a) + heavy_tailed_cosine_sum(t) / a
            }
            LawKind::PowerLaw { beta, a } => {
                let s = beta + 1.0;
                1.0 - (self.zeta - special::cosine_power_series(s, t)) / a
            }
            LawKind::Custom(_) => {
                let d = self.finite.as_ref().expect("finite table");
                let mut acc = 0.0;
                for (m, p) in d.iter().enumerate().skip(1).rev() {
                    acc += 2.0 * p * (m as f64 * t).cos();
                }
                acc + d[0]
            }
        }
    }

    /// Closed-form `(β, c*, ε)`.
    pub fn spectral_profile(&self) -> Result<SpectralProfile> {
        match &self.kind {
            LawKind::HeavyTailed { a } => {
                Ok(SpectralProfile { beta: 1.0, c_star: PI / (2.0 * a), epsilon: 0.5 })
            }
            LawKind::PowerLaw { beta, a } => Ok(SpectralProfile {
                beta: *beta,
                c_star: PI
                    / (2.0 * a * special::gamma(beta + 1.0) * (beta * PI / 2.0).sin()),
                epsilon: (2.0 - beta) / 2.0,
            }),
            LawKind::Lazy => Ok(SpectralProfile { beta: 2.0, c_star: 1.0 / 3.0, epsilon: 2.0 }),
            LawKind::Custom(_) => Err(Error::NoClosedForm),
        }
    }

    /// Sampler shared by all callers of [`StepLaw::sample`].
    pub fn sampler(&self) -> &Sampler {
        self.sampler.get_or_init(|| Sampler::new(self))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        self.sampler().sample(rng)
    }
}

/// `Σ_{k≥1} cos(kθ)/((k+1)(k+2))` for `θ ∈ (0, 2π)`.
///
/// With `L = −ln(1 − e^{iθ}) = −ln(2 sin(θ/2)) + i(π − θ)/2` the partial
/// fractions give `Re[(e^{−iθ} − e^{−2iθ}) L] − 1 + cos θ + 1/2`.
fn heavy_tailed_cosine_sum(t: f64) -> f64 {
    let log = Complex64::new(-(2.0 * (t / 2.0).sin()).ln(), (PI - t) / 2.0);
    let half = (t / 2.0).sin();
    // e^{-iθ}(1 - e^{-iθ}) with 1 - e^{-iθ} = 2 sin²(θ/2) + i sin θ
    let lead = Complex64::from_polar(1.0, -t) * Complex64::new(2.0 * half * half, t.sin());
    (lead * log).re - 0.5 + t.cos()
}

/// Magnitude table plus an exact rejection sampler for the far tail.
#[derive(Debug, Clone)]
pub struct Sampler {
    /// `cdf[m] = P{|X| ≤ m}` for `m ≤ cdf.len() − 1`.
    cdf: Vec<f64>,
    tail: TailSampler,
}

#[derive(Debug, Clone)]
enum TailSampler {
    /// Table covers all mass.
    None,
    /// `P{|X| ≥ m | |X| ≥ 1} = 2/(m+1)`: exact inversion.
    HeavyTailed,
    /// Rejection from a continuous Pareto proposal on `[start − 1/2, ∞)`.
    PowerLaw { start: u64, beta: f64 },
}

/// Retained magnitudes for the power-law table.
const POWER_LAW_TABLE: u64 = 4096;

impl Sampler {
    fn new(law: &StepLaw) -> Self {
        match &law.kind {
            LawKind::HeavyTailed { .. } => {
                Sampler { cdf: vec![law.p0], tail: TailSampler::HeavyTailed }
            }
            LawKind::PowerLaw { beta, .. } => {
                let mut cdf = Vec::with_capacity(POWER_LAW_TABLE as usize + 1);
                for m in 0..=POWER_LAW_TABLE {
                    cdf.push(if m == 0 { law.p0 } else { 2.0 * law.pmf(m as i64) });
                }
                // suffix sums from the exact tail keep the table consistent
                // with tail_mass rather than accumulating prefix round-off
                let mut run = law.tail_mass(POWER_LAW_TABLE);
                for p in cdf.iter_mut().rev() {
                    run += *p;
                    *p += 1.0 - run;
                }
                Sampler {
                    cdf,
                    tail: TailSampler::PowerLaw { start: POWER_LAW_TABLE + 1, beta: *beta },
                }
            }
            LawKind::Lazy | LawKind::Custom(_) => {
                let d = law.finite.as_ref().expect("finite table");
                let mut cdf = Vec::with_capacity(d.len());
                let mut run = 0.0;
                for (m, p) in d.iter().enumerate() {
                    run += if m == 0 { *p } else { 2.0 * p };
                    cdf.push(run);
                }
                *cdf.last_mut().expect("non-empty") = 1.0;
                Sampler { cdf, tail: TailSampler::None }
            }
        }
    }

    /// Draws one step; the sign is an independent fair bit, so the sampler
    /// is exactly symmetric.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.gen();
        let magnitude = if u < *self.cdf.last().expect("non-empty") {
            self.cdf.partition_point(|&c| c <= u) as u64
        } else {
            match self.tail {
                TailSampler::None => (self.cdf.len() - 1) as u64,
                TailSampler::HeavyTailed => {
                    // V uniform on (0, 1]: |X| = floor(2/V) − 1
                    let v = 1.0 - rng.gen::<f64>();
                    ((2.0 / v).floor() as u64).saturating_sub(1).max(1)
                }
                TailSampler::PowerLaw { start, beta } => sample_power_tail(rng, start, beta),
            }
        };
        if magnitude == 0 {
            0
        } else if rng.gen::<bool>() {
            magnitude as i64
        } else {
            -(magnitude as i64)
        }
    }
}

/// Exact draw from `P{K = k} ∝ k^{−β−1}`, `k ≥ start`.
///
/// Proposal: round a Pareto variable on `[start − 1/2, ∞)`. Its cell mass
/// `∫_{k−1/2}^{k+1/2} x^{−β−1} dx` dominates `k^{−β−1}` by convexity, so
/// the acceptance ratio is at most one.
fn sample_power_tail<R: Rng + ?Sized>(rng: &mut R, start: u64, beta: f64) -> u64 {
    let x0 = start as f64 - 0.5;
    loop {
        let v = 1.0 - rng.gen::<f64>();
        let x = x0 * v.powf(-1.0 / beta);
        if !x.is_finite() || x > 9.0e18 {
            continue;
        }
        let k = (x + 0.5).floor().max(start as f64);
        let cell = ((k - 0.5).powf(-beta) - (k + 0.5).powf(-beta)) / beta;
        let target = k.powf(-beta - 1.0);
        if rng.gen::<f64>() * cell <= target {
            return k as u64;
        }
    }
}
