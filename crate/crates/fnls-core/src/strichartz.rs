//! Uniform space-time estimates for the free flow: the mixed norm
//! `‖U_h(t)u‖_{L^q_t L^r_h}` over a finite window `[0, T_w]` measured against
//! the weighted data norm `‖|∇_h|^s u‖_{L²_h}` with `s = (3−α)(1/2 − 1/r)`.
//!
//! The point of the estimate is uniformity in the mesh: the ratio
//! `left/right` must not grow as `h` is halved. A pair `(q, r)` is
//! admissible when `1/q + 1/r = 1/2` with `q ∈ [2, ∞]`, `r ∈ [2, ∞)`;
//! `(∞, 2)` degenerates to unitarity and its ratio is exactly 1.
//!
//! The time quadrature is a composite trapezoid rule over an even number of
//! equal steps; every sample is certified by comparing against the
//! every-other-node trapezoid sum (step-halving in reverse), and the
//! disagreement is reported so callers can reject under-resolved windows.

use crate::err::{CoreError, CoreResult};
use crate::field::{Field, FieldTransform};
use crate::norms::{ksum, l2_h, lp_h};
use crate::propagate::{propagate, Localization};
use crate::symbol::{check_alpha, grad_power_table};
use crate::C64;
use alloc::format;
use alloc::vec::Vec;

/// An exponent pair `(q, r)` for the mixed norm, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissiblePair {
    q: f64,
    r: f64,
}

impl AdmissiblePair {
    /// Validates `1/q + 1/r = 1/2`, `q ∈ [2, ∞]`, `r ∈ [2, ∞)`.
    ///
    /// `q = f64::INFINITY` encodes the sup-in-time endpoint. `r = ∞` is
    /// rejected: it is excluded by admissibility.
    pub fn new(q: f64, r: f64) -> CoreResult<Self> {
        if r.is_infinite() {
            return Err(CoreError::InvalidParameter(
                "r = ∞ is excluded by admissibility".into(),
            ));
        }
        if !(2.0..f64::INFINITY).contains(&r) {
            return Err(CoreError::InvalidParameter(format!(
                "r must lie in [2, ∞), got {r}"
            )));
        }
        if !(q >= 2.0) {
            return Err(CoreError::InvalidParameter(format!(
                "q must lie in [2, ∞], got {q}"
            )));
        }
        let lhs = if q.is_infinite() { 0.0 } else { 1.0 / q } + 1.0 / r;
        if (lhs - 0.5).abs() > 1e-12 {
            return Err(CoreError::InvalidParameter(format!(
                "pair ({q}, {r}) is not admissible: 1/q + 1/r = {lhs} ≠ 1/2"
            )));
        }
        Ok(AdmissiblePair { q, r })
    }

    /// Time exponent (possibly `∞`).
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Space exponent.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// The data-weight exponent `s = (3 − α)(1/2 − 1/r)`.
    pub fn weight_exponent(&self, alpha: f64) -> f64 {
        (3.0 - alpha) * (0.5 - 1.0 / self.r)
    }
}

/// One mixed-norm measurement on a fixed grid.
#[derive(Debug, Clone, Copy)]
pub struct StrichartzSample {
    /// Mesh spacing of the grid the sample was taken on.
    pub h: f64,
    /// `‖U_h(t)u‖_{L^q_t L^r_h}` over the window.
    pub left: f64,
    /// `‖|∇_h|^s u‖_{L²_h}`.
    pub right: f64,
    /// `left / right`.
    pub ratio: f64,
    /// Relative disagreement between the full and the half-resolution
    /// trapezoid sums (0 for `q = ∞`, where the norm is a running sup).
    pub quad_check: f64,
}

/// Window and quadrature resolution for the time norm.
#[derive(Debug, Clone, Copy)]
pub struct TimeWindow {
    /// Upper end of the window `[0, T_w]`.
    pub t_end: f64,
    /// Number of trapezoid steps (must be even and ≥ 4 so the
    /// half-resolution check is defined).
    pub steps: usize,
}

impl TimeWindow {
    fn validate(&self) -> CoreResult<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(CoreError::InvalidParameter(format!(
                "window end must be positive and finite, got {}",
                self.t_end
            )));
        }
        if self.steps < 4 || self.steps % 2 != 0 {
            return Err(CoreError::InvalidParameter(format!(
                "trapezoid steps must be even and ≥ 4, got {}",
                self.steps
            )));
        }
        Ok(())
    }
}

/// Measures one Strichartz sample for `u` on its own grid.
///
/// The left side evaluates `F(t) = ‖U_h(t)u‖_{L^r_h}` at the `steps + 1`
/// trapezoid nodes (one inverse transform per node against the cached
/// spectrum), then forms `(∫ F^q dt)^{1/q}`; for `q = ∞` it takes the node
/// maximum instead. The right side applies the `ω_h^{s/α}` multiplier on the
/// transform side and measures `L²_h` back in physical space.
pub fn strichartz_sample(
    u: &Field,
    alpha: f64,
    pair: AdmissiblePair,
    window: TimeWindow,
) -> CoreResult<StrichartzSample> {
    check_alpha(alpha)?;
    window.validate()?;
    let grid = u.grid();

    // F(t_k) at every node.
    let mut spectrum = u.clone();
    let mut tr = FieldTransform::new(&grid)?;
    tr.forward(&mut spectrum);
    let omega = crate::symbol::omega_h_table(&grid, alpha);
    let dt = window.t_end / window.steps as f64;
    let mut node_norms = Vec::with_capacity(window.steps + 1);
    let mut scratch = Field::zeros(grid);
    for k in 0..=window.steps {
        let t = k as f64 * dt;
        scratch
            .data_mut()
            .iter_mut()
            .zip(spectrum.data().iter().zip(&omega))
            .for_each(|(z, (s, &w))| {
                let (sn, cs) = libm::sincos(-t * w);
                *z = *s * C64::new(cs, sn);
            });
        tr.inverse(&mut scratch);
        node_norms.push(lp_h(&scratch, pair.r()));
    }

    let (left, quad_check) = if pair.q().is_infinite() {
        let full = node_norms.iter().cloned().fold(0.0f64, f64::max);
        (full, 0.0)
    } else {
        let q = pair.q();
        let weight = |k: usize, n: usize| if k == 0 || k == n { 0.5 } else { 1.0 };
        let full: f64 = ksum(
            node_norms
                .iter()
                .enumerate()
                .map(|(k, &f)| weight(k, window.steps) * libm::pow(f, q) * dt),
        );
        let half: f64 = ksum(
            node_norms
                .iter()
                .step_by(2)
                .enumerate()
                .map(|(j, &f)| weight(j, window.steps / 2) * libm::pow(f, q) * 2.0 * dt),
        );
        let check = (full - half).abs() / full.max(f64::MIN_POSITIVE);
        (libm::pow(full, 1.0 / q), check)
    };

    // Right side: multiplier ω_h^{s/α} on the spectrum, measured in L²_h.
    let s_exp = pair.weight_exponent(alpha);
    let table = grad_power_table(&grid, s_exp);
    let mut weighted = spectrum;
    weighted
        .data_mut()
        .iter_mut()
        .zip(&table)
        .for_each(|(z, &m)| *z *= m);
    tr.inverse(&mut weighted);
    let right = l2_h(&weighted);
    if !(right > 0.0) {
        return Err(CoreError::InvalidParameter(
            "data has vanishing weighted norm; ratio undefined".into(),
        ));
    }

    Ok(StrichartzSample {
        h: grid.mesh(),
        left,
        right,
        ratio: left / right,
        quad_check,
    })
}

/// Mesh-uniformity report: one sample per grid, coarse to fine.
#[derive(Debug, Clone)]
pub struct StrichartzReport {
    /// Per-grid samples, in the order supplied (expected coarse → fine).
    pub samples: Vec<StrichartzSample>,
    /// Multiplicative slack allowed between consecutive ratios.
    pub growth_tolerance: f64,
    /// Largest relative trapezoid disagreement across samples.
    pub worst_quad_check: f64,
    /// True when no consecutive ratio grew beyond the tolerance.
    pub uniform: bool,
}

/// Runs [`strichartz_sample`] over a ladder of same-box grids carrying the
/// same continuum data, and checks that the ratio does not grow as the mesh
/// refines. `growth_tolerance` is multiplicative slack for plateaued ratios
/// (1.05 allows 5% wiggle); it is recorded in the report.
pub fn strichartz_suite(
    fields: &[Field],
    alpha: f64,
    pair: AdmissiblePair,
    window: TimeWindow,
    growth_tolerance: f64,
) -> CoreResult<StrichartzReport> {
    if fields.len() < 2 {
        return Err(CoreError::InvalidParameter(
            "mesh-uniformity needs at least two grids".into(),
        ));
    }
    if !(growth_tolerance >= 1.0) {
        return Err(CoreError::InvalidParameter(format!(
            "growth tolerance must be ≥ 1, got {growth_tolerance}"
        )));
    }
    for w in fields.windows(2) {
        if w[1].grid().mesh() >= w[0].grid().mesh() {
            return Err(CoreError::InvalidParameter(
                "grids must be ordered coarse → fine (strictly decreasing h)".into(),
            ));
        }
    }
    let mut samples = Vec::with_capacity(fields.len());
    for u in fields {
        samples.push(strichartz_sample(u, alpha, pair, window)?);
    }
    let uniform = samples
        .windows(2)
        .all(|w| w[1].ratio <= w[0].ratio * growth_tolerance);
    let worst_quad_check = samples
        .iter()
        .map(|s| s.quad_check)
        .fold(0.0f64, f64::max);
    Ok(StrichartzReport {
        samples,
        growth_tolerance,
        worst_quad_check,
        uniform,
    })
}

/// Convenience wrapper used by tests and the harness: `U_h(t)u` via the
/// multiplier path (kept thin so kernel-convolution comparisons can call a
/// single named entry point).
pub fn evolve_linear(u: &Field, alpha: f64, t: f64) -> CoreResult<Field> {
    let mut out = u.clone();
    propagate(&mut out, alpha, t, Localization::None)?;
    Ok(out)
}
