//! Exact and bounded catch probabilities for the hunter-versus-rabbit game
//! on the cycle `Z_N`.
//!
//! The rabbit performs a symmetric random walk with a chosen step law; the
//! hunter follows a trajectory with steps in `{−1, 0, 1}`. Modules:
//!
//! * [`stepdist`]: step laws, characteristic functions, samplers.
//! * [`spectral`]: wrapped kernels, `n`-step tables, local limit theorems.
//! * [`bounds`]: sandwich bounds and closed-form lower bounds.
//! * [`engine`]: exact catch probabilities for a given trajectory.
//! * [`mc`]: Monte Carlo estimates with Wilson intervals.

mod error;
pub mod special;
pub mod quad;
pub mod stepdist;
pub mod spectral;
pub mod bounds;
pub mod engine;
pub mod mc;

pub use error::{Error, Result};
pub use stepdist::{LawKind, LawSpec, SpectralProfile, StepLaw};
pub use spectral::{KernelSpectrum, LineTable, NStepTable, WrappedKernel};
pub use bounds::{BnVariant, ConstantPipeline, LPreset, PhiSums, SandwichBound};
pub use engine::{CatchEngine, CatchReport, CatchTime, Trajectory, TrajectoryKind};
pub use mc::{CatchHistogram, McEstimate};
