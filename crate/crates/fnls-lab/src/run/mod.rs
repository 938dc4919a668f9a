//! One module per subcommand.

pub mod converge;
pub mod critical_points;
pub mod kernel_decay;
pub mod newton_poly;
pub mod simulate;
pub mod strichartz;

use anyhow::{bail, Result};
use std::time::Instant;

/// Exit-status meaning of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Experiment passed its gate, or the run completed (exit 0).
    Pass,
    /// Gate could not be decided (under-resolved, non-monotone…; exit 2).
    Inconclusive,
    /// Experiment definitively violated its gate (exit 1).
    Fail,
}

impl Outcome {
    /// Process exit code.
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Inconclusive => 2,
            Outcome::Fail => 1,
        }
    }
}

/// Soft wall-clock budget checked between work units.
pub struct Deadline {
    start: Instant,
    budget_seconds: u64,
}

impl Deadline {
    /// Starts the clock.
    pub fn new(budget_seconds: u64) -> Deadline {
        Deadline {
            start: Instant::now(),
            budget_seconds,
        }
    }

    /// Errors once the budget is exhausted.
    pub fn check(&self, what: &str) -> Result<()> {
        let elapsed = self.start.elapsed().as_secs();
        if elapsed > self.budget_seconds {
            bail!(
                "wall-clock budget exceeded ({elapsed}s > {}s) before {what}",
                self.budget_seconds
            );
        }
        Ok(())
    }
}

/// Errors when an estimated working set exceeds the configured cap.
pub fn check_memory(estimated_bytes: u64, cap_bytes: u64, what: &str) -> Result<()> {
    if estimated_bytes > cap_bytes {
        bail!(
            "{what} needs ≈{} MB, above the configured cap of {} MB; \
             raise [limits] max_mem_mb or shrink the run",
            estimated_bytes / (1024 * 1024),
            cap_bytes / (1024 * 1024)
        );
    }
    Ok(())
}

/// Working-set estimate for spectral work on an `m^dim` grid: complex f64
/// payload times a copy factor covering scratch, tables, and snapshots.
pub fn grid_bytes(m: usize, dim: usize, copies: u64) -> u64 {
    let points = (m as u64).saturating_pow(dim as u32);
    points.saturating_mul(16).saturating_mul(copies)
}

/// SplitMix64: tiny deterministic generator for reproducible sweeps.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Seeds the stream.
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    /// Next raw word.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [−scale, scale].
    pub fn next_symmetric(&mut self, scale: f64) -> f64 {
        (2.0 * self.next_f64() - 1.0) * scale
    }
}
