//! Configuration schemas for every subcommand.
//!
//! Configs are TOML with strict parsing: any unrecognized key is a fatal
//! error, so a typo cannot silently fall back to a default. Each schema
//! mirrors the corresponding library request type plus output/limit
//! plumbing. Optional fields have explicit defaults filled at load time so
//! the manifest always echoes the full resolved configuration.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Resource caps shared by all subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    /// Upper bound on the estimated working-set size, in megabytes.
    #[serde(default = "default_mem_mb")]
    pub max_mem_mb: u64,
    /// Soft wall-clock budget; exceeded ⇒ the run aborts as an error.
    #[serde(default = "default_seconds")]
    pub max_seconds: u64,
}

fn default_mem_mb() -> u64 {
    3500
}

fn default_seconds() -> u64 {
    86_400
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_mem_mb: default_mem_mb(),
            max_seconds: default_seconds(),
        }
    }
}

impl Limits {
    /// Memory cap in bytes.
    pub fn mem_cap_bytes(&self) -> u64 {
        self.max_mem_mb.saturating_mul(1024 * 1024)
    }
}

/// Output destination.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Directory all artifacts are written into (created if missing).
    pub dir: PathBuf,
}

/// Equation parameters (mirrors the solver's problem type).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    /// Fractional order α ∈ (1, 2).
    pub alpha: f64,
    /// Nonlinearity sign (+1 defocusing, −1 focusing).
    pub mu: f64,
    /// Odd power p ≥ 3 of the |u|^{p−1}u nonlinearity.
    pub p: u32,
}

impl Problem {
    /// Converts to the library problem type.
    pub fn to_core(self) -> fnls_core::solver::NlsProblem {
        fnls_core::solver::NlsProblem {
            alpha: self.alpha,
            mu: self.mu,
            p: self.p,
        }
    }
}

/// Initial-data recipes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Data {
    /// `A·exp(−a|x|²)`, sampled by cell averaging.
    Gaussian {
        /// Peak amplitude A.
        amplitude: f64,
        /// Quadratic decay rate a.
        decay: f64,
    },
}

impl Data {
    /// Produces the initial field on a grid.
    pub fn build(&self, grid: fnls_core::grid::Grid) -> Result<fnls_core::field::Field> {
        match *self {
            Data::Gaussian { amplitude, decay } => {
                fnls_core::bridge::gaussian_cell_average(grid, amplitude, decay)
                    .map_err(|e| anyhow::anyhow!("initial data: {e}"))
            }
        }
    }
}

/// `simulate` — integrate one trajectory and record invariants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub problem: Problem,
    pub grid: GridSpec,
    pub data: Data,
    pub time: TimeSpec,
    pub output: Output,
    #[serde(default)]
    pub limits: Limits,
}

/// Uniform lattice block.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Dimension d ∈ {1, 2, 3}.
    pub dim: usize,
    /// Points per axis.
    pub m: usize,
    /// Mesh spacing h.
    pub h: f64,
}

impl GridSpec {
    /// Converts to the library grid.
    pub fn to_core(self) -> Result<fnls_core::grid::Grid> {
        fnls_core::grid::Grid::new(self.dim, self.m, self.h)
            .map_err(|e| anyhow::anyhow!("grid: {e}"))
    }
}

/// Time-stepping plan for `simulate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    /// Strang step size.
    pub dt: f64,
    /// Times at which the state is sampled (strictly increasing, > 0).
    pub sample_times: Vec<f64>,
    /// Write binary field dumps for every sample.
    #[serde(default)]
    pub dump_fields: bool,
}

/// `converge` — h-refinement rate experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub problem: Problem,
    pub experiment: ExperimentSpec,
    pub data: Data,
    pub output: Output,
    #[serde(default)]
    pub limits: Limits,
}

/// Ladder/reference layout of a rate experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Dimension d ∈ {1, 2, 3}.
    pub dim: usize,
    /// Half-length L of the box [−L, L]^d shared by every grid.
    pub box_half_length: f64,
    /// Per-axis resolutions of the ladder, coarse → fine.
    pub ladder_m: Vec<usize>,
    /// Per-axis resolution of the certified reference grid.
    pub reference_m: usize,
    /// Strang step size.
    pub dt: f64,
    /// Sample times (0 allowed: pure discretization error).
    pub sample_times: Vec<f64>,
}

impl ConvergeConfig {
    /// Converts to the library rate plan.
    pub fn to_plan(&self) -> fnls_core::converge::RatePlan {
        let data = match self.data {
            Data::Gaussian { amplitude, decay } => {
                fnls_core::converge::InitialData::Gaussian { amplitude, decay }
            }
        };
        fnls_core::converge::RatePlan {
            problem: self.problem.to_core(),
            dim: self.experiment.dim,
            box_half_length: self.experiment.box_half_length,
            data,
            ladder_m: self.experiment.ladder_m.clone(),
            reference_m: self.experiment.reference_m,
            dt: self.experiment.dt,
            sample_times: self.experiment.sample_times.clone(),
        }
    }
}

/// `kernel-decay` — dispersive-bound sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDecayConfig {
    pub sweep: DecaySweep,
    pub output: Output,
    #[serde(default)]
    pub limits: Limits,
}

/// Cartesian sweep of the kernel-sup boundedness experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySweep {
    /// Symbol exponents, each in (1, 2).
    pub alphas: Vec<f64>,
    /// Mesh spacings, each in (0, 1].
    pub hs: Vec<f64>,
    /// Dyadic block scales, each in (0, 1].
    pub n_scales: Vec<f64>,
    /// Physical times, strictly increasing, within [1, 100].
    pub t_samples: Vec<f64>,
}

/// `strichartz` — mesh-uniformity of the space-time estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrichartzConfig {
    pub estimate: EstimateSpec,
    pub ladder: MeshLadder,
    pub data: Data,
    pub output: Output,
    #[serde(default)]
    pub limits: Limits,
}

/// Exponent pair and time quadrature.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSpec {
    /// Fractional order α ∈ (1, 2).
    pub alpha: f64,
    /// Time exponent (`"inf"` or a number ≥ 2).
    pub q: ExponentValue,
    /// Space exponent in [2, ∞).
    pub r: f64,
    /// Window end T_w.
    pub t_end: f64,
    /// Trapezoid steps (even, ≥ 4).
    pub steps: usize,
    /// Multiplicative slack allowed between consecutive ratios.
    #[serde(default = "default_growth_tolerance")]
    pub growth_tolerance: f64,
}

fn default_growth_tolerance() -> f64 {
    1.05
}

/// A possibly-infinite exponent, written `"inf"` or a number in TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentValue {
    /// Finite exponent.
    Finite(f64),
    /// The string `"inf"`.
    Symbol(String),
}

impl ExponentValue {
    /// Numeric value (`f64::INFINITY` for `"inf"`).
    pub fn value(&self) -> Result<f64> {
        match self {
            ExponentValue::Finite(x) => Ok(*x),
            ExponentValue::Symbol(s) if s == "inf" => Ok(f64::INFINITY),
            ExponentValue::Symbol(s) => bail!("exponent must be a number or \"inf\", got {s:?}"),
        }
    }
}

/// Same-box grid ladder: `m` doubles as `h` halves.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshLadder {
    /// Dimension d ∈ {1, 2, 3}.
    pub dim: usize,
    /// Points per axis at the coarsest spacing.
    pub base_m: usize,
    /// Mesh spacings, strictly decreasing; the box `base_m·hs[0]` is shared,
    /// so each entry must divide evenly into a whole number of points.
    pub hs: Vec<f64>,
}

impl MeshLadder {
    /// Builds the grids, coarse → fine.
    pub fn grids(&self) -> Result<Vec<fnls_core::grid::Grid>> {
        if self.hs.len() < 2 {
            bail!("mesh ladder needs at least two spacings");
        }
        if !self.hs.windows(2).all(|w| w[1] < w[0]) {
            bail!("mesh spacings must be strictly decreasing");
        }
        let side = self.base_m as f64 * self.hs[0];
        let mut grids = Vec::with_capacity(self.hs.len());
        for &h in &self.hs {
            let m_exact = side / h;
            let m = m_exact.round() as usize;
            if (m as f64 - m_exact).abs() > 1e-9 || m == 0 {
                bail!("spacing {h} does not tile the box (side {side}) evenly");
            }
            grids.push(
                fnls_core::grid::Grid::new(self.dim, m, h)
                    .map_err(|e| anyhow::anyhow!("grid at h={h}: {e}"))?,
            );
        }
        Ok(grids)
    }
}

/// `critical-points` — stationary-set sweep and decay fits.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalPointsConfig {
    pub sweep: CriticalSweep,
    #[serde(default)]
    pub fits: Vec<FitSpec>,
    pub output: Output,
    #[serde(default)]
    pub limits: Limits,
}

/// Velocity sweep parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalSweep {
    /// Fractional order α ∈ (1, 2).
    pub alpha: f64,
    /// Explicit velocities to probe.
    #[serde(default)]
    pub velocities: Vec<[f64; 3]>,
    /// Additionally, this many pseudo-random velocities.
    #[serde(default)]
    pub random_count: usize,
    /// Seed for the pseudo-random velocities.
    #[serde(default)]
    pub seed: u64,
    /// Also locate the minimal degeneracy radius.
    #[serde(default)]
    pub compute_r_alpha: bool,
}

/// One oscillatory-integral decay fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    /// Label carried into the outputs.
    pub label: String,
    /// Fractional order α ∈ (1, 2) for this fit.
    pub alpha: f64,
    /// Critical point the bump is centered on.
    pub center: [f64; 3],
    /// Plateau radius.
    pub r_in: f64,
    /// Support radius.
    pub r_out: f64,
    /// Scale ladder (strictly increasing, ≥ 6 points spanning a decade).
    pub taus: Vec<f64>,
}

/// `newton-poly` — polyhedron analysis of polynomial input files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonPolyConfig {
    pub input: NewtonInput,
    pub output: Output,
    #[serde(default)]
    pub limits: Limits,
}

/// Input file list for the polyhedron run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonInput {
    /// Polynomial files (relative paths resolve against the config file's
    /// directory). Format: one `coefficient gamma1 gamma2` triple per line,
    /// `#` comments; coefficients are integers or `num/den` rationals.
    pub files: Vec<PathBuf>,
}

/// Reads and strictly parses a TOML config file.
///
/// An empty (or whitespace-only) file is reported as a distinct error so the
/// caller can print usage instead of a parse diagnostic.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    if text.trim().is_empty() {
        bail!(EmptyConfig);
    }
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Marker error for empty configuration files.
#[derive(Debug, thiserror::Error)]
#[error("configuration file is empty")]
pub struct EmptyConfig;
