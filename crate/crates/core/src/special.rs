//! Lattice sums evaluated with Euler–Maclaurin tails.
//!
//! Every series over the step laws (normalizing constants, wrapped kernels,
//! characteristic functions) reduces to one of the sums below. Each routine
//! sums a short explicit prefix and then closes the tail with the
//! Euler–Maclaurin expansion up to `B_20`; with the shift point at least
//! [`SHIFT`] the first omitted correction is below `1e-17` relative to the
//! leading term.

use std::f64::consts::PI;

/// Even-index Bernoulli numbers `B_2, B_4, ..., B_20`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Minimum abscissa at which the Euler–Maclaurin tail is applied.
pub const SHIFT: f64 = 12.0;

/// Hurwitz zeta `ζ(s, q) = Σ_{k≥0} (q + k)^{-s}` for real `s ≠ 1`, `q > 0`.
///
/// For `s < 1` this is the analytic continuation, which is what the
/// Jonquière inversion in [`cosine_power_series`] needs.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(q > 0.0 && (s - 1.0).abs() > 1e-12);
    let mut head = 0.0;
    let mut x = q;
    while x < SHIFT {
        head += x.powf(-s);
        x += 1.0;
    }
    head + hurwitz_tail(s, x)
}

/// Euler–Maclaurin value of `Σ_{k≥0} (x + k)^{-s}` for `x ≥ SHIFT`.
fn hurwitz_tail(s: f64, x: f64) -> f64 {
    let x_neg_s = x.powf(-s);
    let mut sum = x * x_neg_s / (s - 1.0) + 0.5 * x_neg_s;
    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^{-s-2j+1}
    let inv_x2 = 1.0 / (x * x);
    let mut rising = s; // s(s+1)...(s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut power = x_neg_s / x; // x^{-s-2j+1}
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / fact * rising * power;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let m = 2.0 * j as f64 + 2.0;
        rising *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        power *= inv_x2;
    }
    sum
}

/// `Σ_{m≥0} 1 / ((m + q1)(m + q2))` for `0 < q1 < q2`.
///
/// The summand is handled in factored form so the tail never subtracts two
/// nearly equal harmonic sums, which keeps full relative accuracy when
/// `q2 − q1` is tiny.
pub fn pair_sum(q1: f64, q2: f64) -> f64 {
    debug_assert!(q1 > 0.0 && q2 > q1);
    let d = q2 - q1;
    let mut head = 0.0;
    let mut m = 0.0;
    while m + q1 < SHIFT {
        head += 1.0 / ((m + q1) * (m + q2));
        m += 1.0;
    }
    let a = m + q1;
    let b = m + q2;
    let ratio = (d / a).ln_1p(); // ln(b / a)
    let mut sum = head + ratio / d + 0.5 / (a * b);
    // -B_{2j}/(2j)! f^{(2j-1)}(0) with f(t) = (1/d)(1/(a+t) - 1/(b+t))
    // equals B_{2j}/(2j) * (a^{-2j} - b^{-2j}) / d.
    let inv_a2 = 1.0 / (a * a);
    let mut a_pow = 1.0;
    for (j, bern) in BERNOULLI.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        a_pow *= inv_a2;
        let diff = -(-two_j * ratio).exp_m1(); // 1 - (a/b)^{2j}
        let term = bern / two_j * a_pow * diff / d;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Riemann zeta `ζ(s)` for `s > 1`.
pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// Gamma function for positive arguments.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `Σ_{k≥1} cos(kθ) k^{-s}` for `s ∈ (1, 3)` and any real `θ`.
///
/// Uses Jonquière's inversion of the polylogarithm, written with the
/// prefactor `π (2π)^{s-1} / (2 Γ(s) cos(πs/2))` so the integer case `s = 2`
/// is regular.
pub fn cosine_power_series(s: f64, theta: f64) -> f64 {
    debug_assert!(s > 1.0 && s < 3.0);
    let two_pi = 2.0 * PI;
    let t = theta.abs() % two_pi;
    if t == 0.0 {
        return zeta(s);
    }
    let x = t / two_pi;
    let pref = PI * two_pi.powf(s - 1.0) / (2.0 * gamma(s) * (PI * s / 2.0).cos());
    pref * (hurwitz_zeta(1.0 - s, x) + hurwitz_zeta(1.0 - s, 1.0 - x))
}
