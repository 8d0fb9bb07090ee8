//! Law and hunter selection from command-line flags.

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use cyclewalk::bounds::LPreset;
use cyclewalk::engine::{make_trajectory, Trajectory, TrajectoryKind};
use cyclewalk::stepdist::{LawSpec, DEFAULT_EVAL_TOL};
use cyclewalk::StepLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HunterKind {
    Stationary,
    Sweep,
    Random,
    Custom,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Step law: a JSON object, a preset (example1, example2, example3) or a
    /// family name (heavy_tailed, power_law, lazy) completed by --a/--beta.
    #[arg(long, default_value = "example1")]
    pub law: String,
    /// Overrides the law's `a`.
    #[arg(long)]
    pub a: Option<f64>,
    /// Overrides the law's `beta`.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Cycle size; `bounds` also accepts a comma-separated list.
    #[arg(long = "N", default_value = "100")]
    pub n: String,
    #[arg(long, value_enum, default_value_t = HunterKind::Stationary)]
    pub hunter: HunterKind,
    /// Vertex of the stationary hunter, start of the sweep.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub vertex: i64,
    /// Sweep direction, −1 or 1.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub direction: i64,
    /// Comma-separated positions for the custom hunter.
    #[arg(long, allow_hyphen_values = true)]
    pub positions: Option<String>,
    /// `P{−1},P{0},P{+1}` for the random hunter.
    #[arg(long, default_value = "0.25,0.5,0.25")]
    pub hunter_pmf: String,
    /// Trajectory length or step count; defaults to N.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Certified error budget for series evaluations.
    #[arg(long, default_value_t = DEFAULT_EVAL_TOL)]
    pub tol: f64,
    /// Output directory; without it the main table goes to stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().with_context(|| format!("bad {what} entry {x:?}")))
        .collect()
}

impl RunConfig {
    pub fn sizes(&self) -> Result<Vec<usize>> {
        let v: Vec<usize> = parse_list(&self.n, "N")?;
        if v.iter().any(|&n| n < 2) {
            bail!("N must be >= 2");
        }
        Ok(v)
    }

    pub fn size(&self) -> Result<usize> {
        let v = self.sizes()?;
        if v.len() != 1 {
            bail!("this subcommand takes a single N");
        }
        Ok(v[0])
    }

    pub fn horizon_for(&self, n: usize) -> usize {
        self.horizon.unwrap_or(n)
    }

    /// The law after applying presets and overrides.
    pub fn law_spec(&self) -> Result<LawSpec> {
        let text = self.law.trim();
        let mut spec = if text.starts_with('{') {
            serde_json::from_str(text).context("parsing --law JSON")?
        } else {
            match text {
                "example1" => LawSpec::HeavyTailed { a: 1.0 },
                "example2" => LawSpec::PowerLaw { beta: 1.0, a: 2.5 },
                "example3" | "lazy" => LawSpec::Lazy,
                "heavy_tailed" => LawSpec::HeavyTailed { a: self.a.context("heavy_tailed needs --a")? },
                "power_law" => LawSpec::PowerLaw {
                    beta: self.beta.context("power_law needs --beta")?,
                    a: self.a.context("power_law needs --a")?,
                },
                other => bail!("unknown law {other:?}"),
            }
        };
        match &mut spec {
            LawSpec::HeavyTailed { a } => {
                if let Some(v) = self.a {
                    *a = v;
                }
            }
            LawSpec::PowerLaw { beta, a } => {
                if let Some(v) = self.a {
                    *a = v;
                }
                if let Some(v) = self.beta {
                    *beta = v;
                }
            }
            LawSpec::Lazy | LawSpec::Custom { .. } => {}
        }
        Ok(spec)
    }

    pub fn law(&self) -> Result<StepLaw> {
        Ok(self.law_spec()?.build(self.tol)?)
    }

    /// Reference lower curve matching the law, if any.
    pub fn preset(&self) -> Result<Option<LPreset>> {
        Ok(match self.law_spec()? {
            LawSpec::HeavyTailed { a: 1.0 } => Some(LPreset::Example1),
            LawSpec::PowerLaw { beta: 1.0, a: 2.5 } => Some(LPreset::Example2),
            LawSpec::Lazy => Some(LPreset::Example3),
            _ => None,
        })
    }

    pub fn trajectory_kind(&self) -> Result<TrajectoryKind> {
        Ok(match self.hunter {
            HunterKind::Stationary => TrajectoryKind::Stationary { vertex: self.vertex },
            HunterKind::Sweep => TrajectoryKind::Sweep { start: self.vertex, direction: self.direction },
            HunterKind::Custom => TrajectoryKind::Custom {
                positions: parse_list(self.positions.as_deref().context("custom hunter needs --positions")?, "position")?,
            },
            HunterKind::Random => {
                let p: Vec<f64> = parse_list(&self.hunter_pmf, "hunter pmf")?;
                let pmf: [f64; 3] = p.try_into().map_err(|_| anyhow::anyhow!("--hunter-pmf needs three entries"))?;
                TrajectoryKind::RandomHunter { pmf, seed: self.seed }
            }
        })
    }

    pub fn trajectory(&self, n: usize) -> Result<Trajectory> {
        Ok(make_trajectory(&self.trajectory_kind()?, self.horizon_for(n))?)
    }
}
