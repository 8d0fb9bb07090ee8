use std::f64::consts::PI;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use cyclewalk::bounds::{self, BnVariant, LPreset};
use cyclewalk::engine::{exact_catch_backward, exact_catch_forward, make_trajectory, TrajectoryKind};
use cyclewalk::mc::{catch_time_histogram, simulate_catch};
use cyclewalk::spectral::KernelSpectrum;
use cyclewalk::stepdist::LawSpec;
use cyclewalk::StepLaw;

use crate::config::RunConfig;
use crate::output::{emit, emit_summary, jnum, num, Csv};

/// A named check reported in the summary; any failure makes the exit code 2.
pub struct Footer {
    checks: Vec<(String, bool, Value)>,
}

impl Footer {
    fn new() -> Self {
        Footer { checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool, detail: Value) {
        self.checks.push((name.into(), ok, detail));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.checks
                .iter()
                .map(|(name, ok, detail)| json!({ "name": name, "pass": ok, "detail": detail }))
                .collect(),
        )
    }
}

const MASS_TOL: f64 = 1e-9;

fn finish(command: &str, cfg: &RunConfig, results: Value, footer: &Footer) -> Result<()> {
    let summary = json!({
        "command": command,
        "config": cfg,
        "law": cfg.law_spec()?,
        "log_base": "e",
        "results": results,
        "invariants": footer.to_json(),
    });
    emit_summary(cfg.out.as_deref(), &summary)
}

fn is_probability(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

pub fn dist(cfg: &RunConfig) -> Result<Footer> {
    let law = cfg.law()?;
    let n = cfg.size()?;
    let steps = cfg.horizon_for(n) as u64;
    let spectrum = KernelSpectrum::new(&law, n);
    let table = spectrum.nstep(steps)?;

    let mut csv = Csv::new(&["l", "prob"]);
    for (l, p) in table.probs.iter().enumerate() {
        csv.row(&[l.to_string(), num(*p)]);
    }
    let sum: f64 = table.probs.iter().sum();
    csv.row(&["sum".into(), num(sum)]);

    let mut phi = Csv::new(&["theta", "phi"]);
    for j in 0..n {
        let theta = 2.0 * PI * j as f64 / n as f64;
        phi.row(&[num(theta), num(law.char_fn(theta))]);
    }

    let out = cfg.out.as_deref();
    match out {
        Some(_) => {
            emit(out, "dist.csv", csv.as_str())?;
            emit(out, "phi.csv", phi.as_str())?;
        }
        None => emit(None, "", &format!("{}\n{}", csv.as_str(), phi.as_str()))?,
    }

    let mut footer = Footer::new();
    footer.check("mass_sum", (sum - 1.0).abs() <= MASS_TOL, jnum(sum));
    footer.check("nonnegative", table.probs.iter().all(|&p| p >= 0.0), Value::Null);
    let results = json!({
        "steps": steps,
        "sum": jnum(sum),
        "second_modulus": jnum(spectrum.second_modulus()),
    });
    finish("dist", cfg, results, &footer)?;
    Ok(footer)
}

pub fn bounds_cmd(cfg: &RunConfig) -> Result<Footer> {
    let law = cfg.law()?;
    let sizes = cfg.sizes()?;
    let pipeline = bounds::constant_pipeline(&law)?;
    let mut csv = Csv::new(&["N", "p_sum", "q_sum", "lower", "upper", "L_closed_form", "rho_star", "C_star", "r_star"]);
    let mut footer = Footer::new();
    for &n in &sizes {
        let s = bounds::sandwich(&law, n)?;
        let l = bounds::closed_form_l(&pipeline, n, BnVariant::default());
        csv.row(&[
            n.to_string(),
            num(s.p_sums),
            num(s.q_sums),
            num(s.lower),
            num(s.upper),
            num(l),
            num(pipeline.rho_star),
            num(pipeline.c_big),
            num(pipeline.r_star),
        ]);
        footer.check(format!("lower_le_upper[N={n}]"), s.lower <= s.upper, json!([jnum(s.lower), jnum(s.upper)]));
        footer.check(format!("closed_form_le_lower[N={n}]"), l <= s.lower, jnum(l));
    }
    emit(cfg.out.as_deref(), "bounds.csv", csv.as_str())?;
    let results = json!({
        "beta": jnum(pipeline.profile.beta),
        "c_star": jnum(pipeline.profile.c_star),
        "C_star": jnum(pipeline.c_big),
        "r_star": jnum(pipeline.r_star),
        "rho_star": jnum(pipeline.rho_star),
        "rho_margin": jnum(pipeline.rho_margin),
    });
    finish("bounds", cfg, results, &footer)?;
    Ok(footer)
}

pub fn exact(cfg: &RunConfig) -> Result<Footer> {
    let law = cfg.law()?;
    let n = cfg.size()?;
    let trajectory = cfg.trajectory(n)?;
    let report = exact_catch_backward(&law, n, &trajectory)?;

    let mut csv = Csv::new(&["start", "probability"]);
    for (s, p) in report.per_start.iter().enumerate() {
        csv.row(&[s.to_string(), num(*p)]);
    }
    emit(cfg.out.as_deref(), "per_start.csv", csv.as_str())?;

    let mut footer = Footer::new();
    footer.check("per_start_in_unit_interval", report.per_start.iter().all(|&p| is_probability(p)), Value::Null);
    let mean = report.per_start.iter().sum::<f64>() / n as f64;
    footer.check("average_is_mean", (mean - report.average).abs() <= MASS_TOL, jnum(mean));
    let mut results = json!({
        "N": n,
        "horizon": trajectory.len(),
        "average": jnum(report.average),
        "caught_by_time": report.caught_by_time.iter().map(|&p| jnum(p)).collect::<Vec<_>>(),
    });
    if trajectory.len() == n {
        let s = bounds::sandwich(&law, n)?;
        footer.check(
            "sandwich_contains_average",
            s.lower <= report.average + MASS_TOL && report.average <= s.upper_capped() + MASS_TOL,
            json!([jnum(s.lower), jnum(s.upper_capped())]),
        );
        results["sandwich"] = json!({ "lower": jnum(s.lower), "upper": jnum(s.upper) });
    }
    if let Some(preset) = cfg.preset()? {
        results["L_preset"] = jnum(preset.value(n));
    }
    finish("exact", cfg, results, &footer)?;
    Ok(footer)
}

pub fn simulate(cfg: &RunConfig) -> Result<Footer> {
    let law = cfg.law()?;
    let n = cfg.size()?;
    let horizon = cfg.horizon_for(n);
    let kind = cfg.trajectory_kind()?;
    let hist = catch_time_histogram(&law, n, &kind, cfg.trials, horizon, cfg.seed)?;

    let mut csv = Csv::new(&["time", "count"]);
    for (t, c) in hist.counts.iter().enumerate() {
        csv.row(&[(t + 1).to_string(), c.to_string()]);
    }
    csv.row(&["censored".into(), hist.censored.to_string()]);
    emit(cfg.out.as_deref(), "histogram.csv", csv.as_str())?;

    let trajectory = make_trajectory(&kind, horizon)?;
    let est = simulate_catch(&law, n, &trajectory, cfg.trials, cfg.seed)?;
    let mut footer = Footer::new();
    let total = hist.counts.iter().sum::<u64>() + hist.censored;
    footer.check("counts_sum_to_trials", total == hist.trials, json!(total));
    footer.check(
        "ci_contains_point",
        est.ci95.0 <= est.point && est.point <= est.ci95.1 && is_probability(est.ci95.0) && is_probability(est.ci95.1),
        json!([jnum(est.ci95.0), jnum(est.point), jnum(est.ci95.1)]),
    );
    let mut results = json!({
        "trials": est.trials,
        "successes": est.successes,
        "point": jnum(est.point),
        "ci95": [jnum(est.ci95.0), jnum(est.ci95.1)],
        "censored": hist.censored,
        "mean_catch_time_given_caught": jnum(hist.mean_caught()),
    });
    // a random hunter is drawn once from the seed, so the exact value applies
    let exact = exact_catch_forward(&law, n, &trajectory)?.average;
    results["exact"] = jnum(exact);
    results["exact_in_ci95"] = json!(est.covers(exact));
    finish("simulate", cfg, results, &footer)?;
    Ok(footer)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Artifact {
    Table1,
    Table2,
    Fig1,
    Fig2,
    Fig3,
    Limit,
}

const TABLE_SIZES: [usize; 3] = [100, 500, 1000];
const FIG_SIZE: usize = 100;

fn preset_law(preset: LPreset, tol: f64) -> Result<StepLaw> {
    let spec = match preset {
        LPreset::Example1 => LawSpec::HeavyTailed { a: 1.0 },
        LPreset::Example2 => LawSpec::PowerLaw { beta: 1.0, a: 2.5 },
        LPreset::Example3 => LawSpec::Lazy,
    };
    Ok(spec.build(tol)?)
}

fn stationary_average(law: &StepLaw, n: usize) -> Result<(f64, Vec<f64>)> {
    let t = make_trajectory(&TrajectoryKind::Stationary { vertex: 0 }, n)?;
    let r = exact_catch_backward(law, n, &t)?;
    Ok((r.average, r.per_start))
}

pub fn reproduce(cfg: &RunConfig, artifact: Artifact, grid: &str) -> Result<Footer> {
    let out = cfg.out.as_deref();
    let mut footer = Footer::new();
    let results = match artifact {
        Artifact::Table1 | Artifact::Table2 => {
            let (preset, name) = match artifact {
                Artifact::Table1 => (LPreset::Example1, "table1"),
                _ => (LPreset::Example2, "table2"),
            };
            let law = preset_law(preset, cfg.tol)?;
            let mut csv = Csv::new(&["N", "inv_L", "A", "A_over_L"]);
            for n in TABLE_SIZES {
                let (a, _) = stationary_average(&law, n)?;
                let inv = preset.inverse(n);
                csv.row(&[n.to_string(), num(inv), num(a), num(a * inv)]);
                footer.check(format!("A_at_least_L[N={n}]"), a * inv >= 1.0 && is_probability(a), jnum(a));
            }
            emit(out, &format!("{name}.csv"), csv.as_str())?;
            json!({ "artifact": name, "sizes": TABLE_SIZES })
        }
        Artifact::Fig1 | Artifact::Fig2 | Artifact::Fig3 => {
            let (preset, name) = match artifact {
                Artifact::Fig1 => (LPreset::Example1, "fig1"),
                Artifact::Fig2 => (LPreset::Example2, "fig2"),
                _ => (LPreset::Example3, "fig3"),
            };
            let law = preset_law(preset, cfg.tol)?;
            let (avg, per_start) = stationary_average(&law, FIG_SIZE)?;
            let mut csv = Csv::new(&["start", "probability"]);
            for (s, p) in per_start.iter().enumerate() {
                csv.row(&[s.to_string(), num(*p)]);
            }
            emit(out, &format!("{name}.csv"), csv.as_str())?;
            footer.check("per_start_in_unit_interval", per_start.iter().all(|&p| is_probability(p)), Value::Null);
            footer.check("average_at_least_L", avg >= preset.value(FIG_SIZE), jnum(avg));
            json!({
                "artifact": name,
                "N": FIG_SIZE,
                "average": jnum(avg),
                "L_preset": jnum(preset.value(FIG_SIZE)),
            })
        }
        Artifact::Limit => {
            let law = cfg.law()?;
            let c = law.spectral_profile().context("limit needs a law with a spectral profile")?.c_star;
            let sizes: Vec<usize> = grid
                .split(',')
                .map(|s| s.trim().parse().with_context(|| format!("bad grid entry {s:?}")))
                .collect::<Result<_>>()?;
            let mut csv = Csv::new(&["N", "product"]);
            for &n in &sizes {
                let (a, _) = stationary_average(&law, n)?;
                let product = (n as f64).ln() / (c * PI) * a;
                csv.row(&[n.to_string(), num(product)]);
                footer.check(format!("probability[N={n}]"), is_probability(a), jnum(a));
            }
            emit(out, "limit.csv", csv.as_str())?;
            json!({ "artifact": "limit", "c_star": jnum(c), "grid": sizes })
        }
    };
    finish("reproduce", cfg, results, &footer)?;
    Ok(footer)
}
