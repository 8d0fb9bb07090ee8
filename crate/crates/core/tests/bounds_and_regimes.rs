use cyclewalk::bounds::{self, BnVariant, LPreset};
use cyclewalk::engine::{exact_catch_forward, make_trajectory, TrajectoryKind};
use cyclewalk::StepLaw;

fn stationary_exact(law: &StepLaw, n: usize) -> f64 {
    let t = make_trajectory(&TrajectoryKind::Stationary { vertex: 0 }, n).unwrap();
    exact_catch_forward(law, n, &t).unwrap().average
}

fn sweep_exact(law: &StepLaw, n: usize) -> f64 {
    let t = make_trajectory(&TrajectoryKind::Sweep { start: 0, direction: 1 }, n).unwrap();
    exact_catch_forward(law, n, &t).unwrap().average
}

fn laws() -> [StepLaw; 3] {
    [StepLaw::heavy_tailed(1.0).unwrap(), StepLaw::power_law(1.0, 2.5).unwrap(), StepLaw::lazy()]
}

#[test]
fn stationary_corollary_brackets_exact() {
    for law in laws() {
        for n in [16, 64] {
            let (lo, hi) = bounds::cor2_bounds(&law, n).unwrap();
            let p = stationary_exact(&law, n);
            assert!(lo <= p && p <= hi, "{:?} N={n}: {lo} {p} {hi}", law.kind());
        }
    }
}

#[test]
fn sweep_corollary_brackets_exact() {
    for law in laws() {
        let (lo, hi) = bounds::cor3_bounds(&law, 32).unwrap();
        let p = sweep_exact(&law, 32);
        assert!(lo <= p && p <= hi);
    }
}

#[test]
fn lazy_sweep_sum_stays_bounded() {
    let law = StepLaw::lazy();
    let sums: Vec<f64> = [64, 256, 1024].iter().map(|&n| 1.0 + bounds::sweep_sum(&law, n)).collect();
    assert!(sums.iter().all(|&s| s < 2.0), "{sums:?}");
}

#[test]
fn remark5_dominates_stationary_exact() {
    let law = StepLaw::lazy();
    let v = bounds::remark5_upper(&law, 64, 0.25).unwrap();
    assert!(v >= stationary_exact(&law, 64));
}

#[test]
fn remark5_with_unit_eps_is_cor2_upper() {
    let law = StepLaw::heavy_tailed(1.0).unwrap();
    let n = 50;
    let v = bounds::remark5_upper(&law, n, 1.0).unwrap();
    let (_, hi) = bounds::cor2_bounds(&law, n).unwrap();
    // the sums differ only by the i = N term
    assert!((v.min(1.0) - hi).abs() < 0.02);
}

#[test]
fn heavy_tailed_cor2_above_preset() {
    let law = StepLaw::heavy_tailed(1.0).unwrap();
    let (lo, _) = bounds::cor2_bounds(&law, 100).unwrap();
    assert!(lo >= LPreset::Example1.value(100) && lo <= 1.0);
}

#[test]
fn presets_below_sandwich_and_exact() {
    for (law, preset) in laws().into_iter().zip([LPreset::Example1, LPreset::Example2, LPreset::Example3]) {
        for n in [100, 500, 1000] {
            let s = bounds::sandwich(&law, n).unwrap();
            let p = stationary_exact(&law, n);
            assert!(preset.value(n) <= s.lower && s.lower <= p, "{preset:?} N={n}");
        }
    }
}

#[test]
fn sandwich_regime_shapes() {
    let grid = [32usize, 64, 128, 256, 512, 1024];
    // β < 1: bounded below
    let pl = StepLaw::power_law(0.5, 3.0).unwrap();
    let lows: Vec<f64> = grid.iter().map(|&n| bounds::sandwich(&pl, n).unwrap().lower).collect();
    assert!(lows.iter().all(|&l| l > 0.5 * lows[0]));
    // β = 1: denominator tracks (1/(c*π)) ln N
    let ht = StepLaw::heavy_tailed(1.0).unwrap();
    let c = ht.spectral_profile().unwrap().c_star;
    let ratios: Vec<f64> = grid
        .iter()
        .map(|&n| bounds::sandwich(&ht, n).unwrap().p_sums / ((n as f64).ln() / (c * std::f64::consts::PI)))
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 3.0, "{ratios:?}");
    // β ∈ (1, 2]: slope −(β−1)/β
    for (law, beta) in [(StepLaw::lazy(), 2.0), (StepLaw::power_law(1.5, 2.0).unwrap(), 1.5)] {
        let xs: Vec<f64> = grid.iter().map(|&n| (n as f64).ln()).collect();
        let ys: Vec<f64> = grid.iter().map(|&n| bounds::sandwich(&law, n).unwrap().lower.ln()).collect();
        let slope = (ys[ys.len() - 1] - ys[1]) / (xs[xs.len() - 1] - xs[1]);
        assert!((slope + (beta - 1.0) / beta).abs() <= 0.1, "beta={beta}: slope {slope}");
    }
}

#[test]
fn stationary_two_sided_bracket() {
    for (law, beta) in [(StepLaw::lazy(), 2.0), (StepLaw::power_law(1.5, 2.0).unwrap(), 1.5)] {
        let scaled: Vec<f64> = [64, 128, 256, 512]
            .iter()
            .map(|&n| stationary_exact(&law, n) * (n as f64).powf((beta - 1.0) / beta))
            .collect();
        let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().copied().fold(0.0, f64::max);
        assert!(lo > 0.0 && hi / lo < 1.5, "beta={beta}: {scaled:?}");
    }
}

#[test]
fn lazy_sweep_bounded_below() {
    let law = StepLaw::lazy();
    for n in [64, 256, 1024] {
        assert!(sweep_exact(&law, n) > 0.5);
    }
}

#[test]
fn closed_form_variants_order() {
    let law = StepLaw::lazy();
    let pipe = bounds::constant_pipeline(&law).unwrap();
    for n in [100, 1000] {
        // π^β > π for β = 2, so that variant gives the smaller B_N
        let a = bounds::closed_form_l(&pipe, n, BnVariant::PiBeta);
        let b = bounds::closed_form_l(&pipe, n, BnVariant::Pi);
        assert!(a > b);
        assert!(a <= bounds::sandwich(&law, n).unwrap().lower);
    }
}

#[test]
fn heavy_tailed_closed_form_is_valid() {
    let law = StepLaw::heavy_tailed(1.0).unwrap();
    let pipe = bounds::constant_pipeline(&law).unwrap();
    for n in [100, 500, 1000] {
        let l = bounds::closed_form_l(&pipe, n, BnVariant::default());
        assert!(l <= bounds::sandwich(&law, n).unwrap().lower);
    }
}
