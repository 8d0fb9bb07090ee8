//! Wrapped step kernels on `Z_N`, `n`-step tables via the discrete Fourier
//! transform, unwrapped line probabilities and local limit diagnostics.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::quad;
use crate::special;
use crate::stepdist::{LawKind, StepLaw};

/// Below this size transforms are replaced by direct `O(N²)` sums.
pub const DIRECT_LIMIT: usize = 32;

/// Largest embedding modulus accepted by [`line_table`].
pub const MAX_MODULUS: u64 = 1 << 23;

/// Target for the certified wrap-around error of [`line_table`].
pub const LINE_WRAP_TOL: f64 = 1e-10;

/// Drift below which clamped tables are silently renormalized.
const DRIFT_TOL: f64 = 1e-9;

/// The step law folded onto `Z_N`: `weights[l] = P{X ∈ [l]_N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WrappedKernel {
    pub n_vertices: usize,
    pub weights: Vec<f64>,
}

/// Folds `law` onto `Z_N`.
///
/// Residue classes of the series laws are summed in closed form (pair sums
/// for the heavy-tailed law, Hurwitz zeta for power laws), so the only
/// residual is round-off; it is spread uniformly over all entries.
pub fn wrap(law: &StepLaw, n: usize) -> Result<WrappedKernel> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("N = {n} must be >= 2")));
    }
    let nf = n as f64;
    let mut w = vec![0.0; n];
    match law.kind() {
        LawKind::HeavyTailed { a } => {
            // t(j) = Σ_{i≥0} 1/((j+iN+1)(j+iN+2))
            let t = |j: usize| special::pair_sum((j as f64 + 1.0) / nf, (j as f64 + 2.0) / nf) / (nf * nf);
            w[0] = law.pmf(0) + t(n) / a;
            for (l, wl) in w.iter_mut().enumerate().skip(1) {
                *wl = (t(l) + t(n - l)) / (2.0 * a);
            }
        }
        LawKind::PowerLaw { beta, a } => {
            let s = beta + 1.0;
            let scale = nf.powf(-s);
            // t(j) = Σ_{i≥0} (j + iN)^{-s}
            let t = |j: usize| scale * special::hurwitz_zeta(s, j as f64 / nf);
            w[0] = law.pmf(0) + t(n) / a;
            for (l, wl) in w.iter_mut().enumerate().skip(1) {
                *wl = (t(l) + t(n - l)) / (2.0 * a);
            }
        }
        LawKind::Lazy | LawKind::Custom(_) => {
            let r = law.support_radius().unwrap_or(0) as i64;
            for k in -r..=r {
                w[k.rem_euclid(n as i64) as usize] += law.pmf(k);
            }
        }
    }
    let residual = 1.0 - w.iter().sum::<f64>();
    if residual.abs() > 1e-10 {
        return Err(Error::NumericalDrift { drift: residual });
    }
    for x in &mut w {
        *x += residual / nf;
    }
    Ok(WrappedKernel { n_vertices: n, weights: w })
}

impl WrappedKernel {
    /// Real DFT coefficients `Σ_l w_l cos(2πjl/N)`.
    pub fn dft(&self) -> Vec<f64> {
        let n = self.n_vertices;
        let mut buf: Vec<Complex64> = self.weights.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }
}

/// Eigenvalues `λ_j = φ(2πj/N)` of the circulant step operator.
#[derive(Debug, Clone)]
pub struct KernelSpectrum {
    pub n_vertices: usize,
    pub eigenvalues: Vec<f64>,
}

impl KernelSpectrum {
    pub fn new(law: &StepLaw, n: usize) -> Self {
        let mut eig = vec![0.0; n];
        for j in 0..=n / 2 {
            let v = law.char_fn(2.0 * PI * j as f64 / n as f64);
            eig[j] = v;
            eig[(n - j) % n] = v;
        }
        KernelSpectrum { n_vertices: n, eigenvalues: eig }
    }

    /// Largest `|λ_j|` over non-zero frequencies.
    pub fn second_modulus(&self) -> f64 {
        self.eigenvalues.iter().skip(1).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `n`-step table `probs[l] = (1/N) Σ_j λ_j^n cos(2πjl/N)`.
    pub fn nstep(&self, steps: u64) -> Result<NStepTable> {
        let n = self.n_vertices;
        if steps == 0 {
            let mut probs = vec![0.0; n];
            probs[0] = 1.0;
            return Ok(NStepTable { n_vertices: n, horizon: 0, probs });
        }
        let powered: Vec<f64> = self.eigenvalues.iter().map(|&v| power(v, steps)).collect();
        let raw = inverse_real(&powered);
        Ok(NStepTable { n_vertices: n, horizon: steps, probs: sanitize(raw)? })
    }
}

fn power(v: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        v.powi(n as i32)
    } else {
        v.signum().powi((n % 2) as i32) * v.abs().powf(n as f64)
    }
}

/// `(1/N) Σ_j x_j cos(2πjl/N)` for an even spectrum `x`.
fn inverse_real(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let nf = n as f64;
    if n < DIRECT_LIMIT {
        return (0..n)
            .map(|l| {
                let mut acc = 0.0;
                for (j, v) in x.iter().enumerate() {
                    acc += v * (2.0 * PI * ((j * l) % n) as f64 / nf).cos();
                }
                acc / nf
            })
            .collect();
    }
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / nf).collect()
}

/// Clamps round-off negatives and renormalizes, refusing large drift.
fn sanitize(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    for p in &mut probs {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = probs.iter().sum();
    let drift = total - 1.0;
    if drift.abs() >= DRIFT_TOL {
        return Err(Error::NumericalDrift { drift });
    }
    for p in &mut probs {
        *p /= total;
    }
    Ok(probs)
}

/// `probs[l] = P{S_n ∈ [l]_N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NStepTable {
    pub n_vertices: usize,
    pub horizon: u64,
    pub probs: Vec<f64>,
}

pub fn nstep_wrapped(law: &StepLaw, n: usize, steps: u64) -> Result<NStepTable> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("N = {n} must be >= 2")));
    }
    KernelSpectrum::new(law, n).nstep(steps)
}

/// In-place circular convolution with a fixed kernel, direct below
/// [`DIRECT_LIMIT`] and through the transform above.
pub struct Convolver {
    kernel: Vec<f64>,
    eigenvalues: Vec<f64>,
    forward: Option<Arc<dyn Fft<f64>>>,
    inverse: Option<Arc<dyn Fft<f64>>>,
    buf: Vec<Complex64>,
    scratch: Vec<f64>,
}

impl Convolver {
    pub fn new(kernel: &WrappedKernel, spectrum: &KernelSpectrum) -> Self {
        let n = kernel.n_vertices;
        let (forward, inverse) = if n >= DIRECT_LIMIT {
            let mut planner = FftPlanner::new();
            (Some(planner.plan_fft_forward(n)), Some(planner.plan_fft_inverse(n)))
        } else {
            (None, None)
        };
        Convolver {
            kernel: kernel.weights.clone(),
            eigenvalues: spectrum.eigenvalues.clone(),
            forward,
            inverse,
            buf: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.kernel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernel.is_empty()
    }

    /// `u ← u ⊛ kernel`; negative round-off is clamped.
    pub fn apply(&mut self, u: &mut [f64]) {
        let n = self.kernel.len();
        match (&self.forward, &self.inverse) {
            (Some(fwd), Some(inv)) => {
                for (b, &x) in self.buf.iter_mut().zip(u.iter()) {
                    *b = Complex64::new(x, 0.0);
                }
                fwd.process(&mut self.buf);
                for (b, &l) in self.buf.iter_mut().zip(&self.eigenvalues) {
                    *b *= l;
                }
                inv.process(&mut self.buf);
                let nf = n as f64;
                for (x, b) in u.iter_mut().zip(&self.buf) {
                    *x = (b.re / nf).max(0.0);
                }
            }
            _ => {
                self.scratch.iter_mut().for_each(|x| *x = 0.0);
                for (i, &ui) in u.iter().enumerate() {
                    if ui == 0.0 {
                        continue;
                    }
                    for (k, &wk) in self.kernel.iter().enumerate() {
                        let j = if i + k >= n { i + k - n } else { i + k };
                        self.scratch[j] += ui * wk;
                    }
                }
                u.copy_from_slice(&self.scratch);
            }
        }
    }
}

/// `P{S_n = l}` on the integer line, read from a wrapped table whose
/// modulus is large enough that aliasing is certified negligible.
#[derive(Debug, Clone)]
pub struct LineTable {
    pub steps: u64,
    pub modulus: u64,
    /// Certified `|l|` range.
    pub l_max: u64,
    /// Certified bound on the aliasing error at `|l| ≤ l_max`.
    pub wrap_error: f64,
    probs: Vec<f64>,
}

impl LineTable {
    pub fn prob(&self, l: i64) -> f64 {
        debug_assert!(l.unsigned_abs() <= self.l_max);
        self.probs[l.rem_euclid(self.modulus as i64) as usize]
    }
}

/// Power-law envelope `P{S_n = y} ≤ Σ c_i y^{−p_i}` for `y ≥ y_min`.
struct Envelope {
    terms: Vec<(f64, f64)>,
    y_min: f64,
}

impl Envelope {
    fn for_law(law: &StepLaw, n: u64) -> Option<Self> {
        let nf = n as f64;
        let unimodal = law.is_unimodal();
        match law.kind() {
            // symmetric unimodal laws stay unimodal under convolution, so
            // P{S_n = y} ≤ P{|S_n| ≥ y/2}/y; truncating steps at y/2 and
            // applying Chebyshev bounds the right side
            LawKind::HeavyTailed { a } if unimodal => {
                Some(Envelope { terms: vec![(4.0 * nf / a, 2.0)], y_min: 2.0 })
            }
            LawKind::PowerLaw { beta, a } if unimodal => Some(Envelope {
                terms: vec![
                    (
                        nf / a * (4f64.powf(*beta) / beta + 4.0 / (2.0 - beta)),
                        1.0 + beta,
                    ),
                    (4.0 * nf / a, 3.0),
                ],
                y_min: 4.0,
            }),
            // P{S_n = y} ≤ n · max_{|k| ≥ y/n} pmf(k)
            LawKind::HeavyTailed { a } => Some(Envelope {
                terms: vec![(nf.powi(3) / (2.0 * a), 2.0)],
                y_min: nf,
            }),
            LawKind::PowerLaw { beta, a } => Some(Envelope {
                terms: vec![(nf * nf.powf(1.0 + beta) / (2.0 * a), 1.0 + beta)],
                y_min: nf,
            }),
            LawKind::Lazy | LawKind::Custom(_) => None,
        }
    }

    /// `Σ_{i≥1} [B(iM − l) + B(iM + l)] ≤ 2 Σ_i c M^{−p} ζ(p, 1 − l/M)`.
    fn wrap_error(&self, m: f64, l: f64) -> f64 {
        if m - l < self.y_min {
            return f64::INFINITY;
        }
        self.terms
            .iter()
            .map(|&(c, p)| 2.0 * c * m.powf(-p) * special::hurwitz_zeta(p, 1.0 - l / m))
            .sum()
    }
}

/// Smallest power-of-two modulus certifying `|l| ≤ l_max` to
/// [`LINE_WRAP_TOL`].
pub fn line_modulus(law: &StepLaw, steps: u64, l_max: u64) -> Result<(u64, f64)> {
    if let Some(r) = law.support_radius() {
        let m = (steps * r + l_max + 1).next_power_of_two().max(2);
        return if m > MAX_MODULUS {
            Err(Error::ModulusOverflow { required: m, limit: MAX_MODULUS })
        } else {
            Ok((m, 0.0))
        };
    }
    let env = Envelope::for_law(law, steps).expect("series law");
    let mut m = (2 * l_max + 64).next_power_of_two();
    loop {
        let err = env.wrap_error(m as f64, l_max as f64);
        if err < LINE_WRAP_TOL {
            return Ok((m, err));
        }
        m *= 2;
        if m > MAX_MODULUS {
            return Err(Error::ModulusOverflow { required: m, limit: MAX_MODULUS });
        }
    }
}

pub fn line_table(law: &StepLaw, steps: u64, l_max: u64) -> Result<LineTable> {
    if steps == 0 {
        return Err(Error::ParameterOutOfRange("n must be >= 1".into()));
    }
    let (modulus, wrap_error) = line_modulus(law, steps, l_max)?;
    let table = nstep_wrapped(law, modulus as usize, steps)?;
    Ok(LineTable { steps, modulus, l_max, wrap_error, probs: table.probs })
}

/// `P{S_n = l}`.
pub fn nstep_line(law: &StepLaw, steps: u64, l: i64) -> Result<f64> {
    Ok(line_table(law, steps, l.unsigned_abs())?.prob(l))
}

/// Scaling-limit density `I_0(n, l) = (1/2π) ∫ e^{−c*|x|^β} e^{−ixl/n^{1/β}} dx`.
pub fn i0(n: u64, l: i64, beta: f64, c_star: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 2.0 && c_star > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("beta = {beta}, c* = {c_star}")));
    }
    let u = l as f64 / (n as f64).powf(1.0 / beta);
    if l == 0 {
        return Ok(special::gamma(1.0 / beta) / (beta * c_star.powf(1.0 / beta) * PI));
    }
    if beta == 1.0 {
        return Ok(c_star / (c_star * c_star + u * u) / PI);
    }
    if beta == 2.0 {
        return Ok((-u * u / (4.0 * c_star)).exp() / (2.0 * (PI * c_star).sqrt()));
    }
    // truncate where the remaining ∫_X^∞ e^{−c x^β} dx is below 1e−11
    let shape = 1.0 / beta;
    let tail = |x: f64| {
        special::gamma(shape) * statrs::function::gamma::gamma_ur(shape, c_star * x.powf(beta))
            / (beta * c_star.powf(shape))
    };
    let mut x_max = (12.0 * std::f64::consts::LN_10 / c_star).powf(shape);
    while tail(x_max) > 1e-11 {
        x_max *= 1.25;
    }
    let v = quad::integrate(|x| (-c_star * x.powf(beta)).exp() * (x * u).cos(), 0.0, x_max, 1e-9 * PI)?;
    Ok(v / PI)
}

/// `sup_l |n^{1/β} P{S_n = l} − I_0(n, l)|`.
///
/// The supremum runs over `|l| ≤ L`, where `L` is where the limit density
/// drops below `1e−9`, capped by the largest certified line range. Offsets
/// up to 4096 are visited densely and sparsely (ratio 1.01) beyond.
pub fn llt_error(law: &StepLaw, steps: u64) -> Result<f64> {
    let profile = law.spectral_profile()?;
    let (beta, c) = (profile.beta, profile.c_star);
    let scale = (steps as f64).powf(1.0 / beta);
    let u_cut = if beta == 2.0 {
        // (1/(2√(πc))) e^{−u²/4c} < 1e−9
        (4.0 * c * (1e9 / (2.0 * (PI * c).sqrt())).ln()).sqrt()
    } else {
        // large-u expansion of the stable density
        let k = c * beta * special::gamma(beta) * (PI * beta / 2.0).sin() / PI;
        (k / 1e-9).powf(1.0 / (1.0 + beta))
    };
    let mut l_max = (u_cut * scale).ceil() as u64 + 1;
    if let Some(r) = law.support_radius() {
        l_max = l_max.min(steps * r);
    }
    let table = loop {
        match line_table(law, steps, l_max) {
            Ok(t) => break t,
            Err(Error::ModulusOverflow { .. }) if l_max > 64 => l_max /= 2,
            Err(e) => return Err(e),
        }
    };
    let mut worst = 0.0f64;
    let mut l = 0u64;
    while l <= l_max {
        let d = (scale * table.prob(l as i64) - i0(steps, l as i64, beta, c)?).abs();
        worst = worst.max(d);
        l = if l < 4096 { l + 1 } else { ((l as f64) * 1.01).ceil() as u64 };
    }
    Ok(worst)
}
