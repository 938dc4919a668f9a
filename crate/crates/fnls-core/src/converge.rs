//! Grid-refinement rate experiments: how fast do lattice solutions converge
//! to the continuum flow as `h → 0`?
//!
//! The experiment evolves the same Gaussian initial datum (discretized by
//! cell averages) on a ladder of meshes `h` plus a much finer reference
//! mesh, interpolates each lattice solution onto the reference grid, and
//! measures `‖p_h u_h(t) − u_ref(t)‖_{l²}` per sample time. A log-log
//! least-squares fit of error vs `h` yields the empirical rate, compared
//! against the theoretical envelope exponent `α/(2+α)` (an upper bound on
//! the error, hence a lower bound on acceptable slopes).
//!
//! Reference certification follows the doubling pattern used everywhere in
//! this crate: the reported errors come from the fine reference, and the same
//! errors recomputed against the half-resolution reference must agree to 10%
//! — otherwise the experiment aborts rather than report uncertified numbers.

use crate::bridge::{gaussian_cell_average, interpolate_nested};
use crate::err::{CoreError, CoreResult};
use crate::field::Field;
use crate::grid::Grid;
use crate::norms::l2_h_diff;
use crate::solver::{evolve_sampled, NlsProblem};
use alloc::format;
use alloc::vec::Vec;

/// Initial data selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// `A·exp(−a|x|²)` with amplitude `A` and decay `a`.
    Gaussian { amplitude: f64, decay: f64 },
}

/// Full description of one rate experiment.
#[derive(Debug, Clone)]
pub struct RatePlan {
    /// Model parameters (α, μ, p).
    pub problem: NlsProblem,
    /// Spatial dimension (1–3; the headline theorem lives in 3).
    pub dim: usize,
    /// Half box length `L`; the domain is `[−L, L)^d`.
    pub box_half_length: f64,
    /// Initial datum (discretized by cell averages on every grid).
    pub data: InitialData,
    /// Lattice ladder as points-per-axis, strictly increasing (≥ 4 rungs).
    pub ladder_m: Vec<usize>,
    /// Reference points-per-axis (≥ 4× the finest rung); certification
    /// reruns the reference at half this resolution.
    pub reference_m: usize,
    /// Strang time step (shared by every run; sample times must align).
    pub dt: f64,
    /// Ascending sample times (multiples of `dt`; `0` allowed).
    pub sample_times: Vec<f64>,
}

/// One (h, t) cell of the error table.
#[derive(Debug, Clone, Copy)]
pub struct ErrorCell {
    /// Lattice mesh.
    pub h: f64,
    /// Sample time.
    pub t: f64,
    /// `‖p_h u_h(t) − u_ref(t)‖` on the reference grid.
    pub error: f64,
    /// Relative change of this error when the reference resolution doubles
    /// (half-reference → reference): the certification evidence.
    pub reference_gap: f64,
}

/// Per-time slope fit.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    /// Sample time.
    pub t: f64,
    /// Least-squares slope of log error vs log h.
    pub slope: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// |slope − slope with the coarsest rung dropped|: asymptotic-regime
    /// indicator (small means the ladder sits on one power law).
    pub stability: f64,
}

/// Experiment outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateVerdict {
    /// Every per-time slope meets the envelope exponent minus margin.
    Pass,
    /// Some slope falls short.
    Fail,
    /// Error table not monotone in h: no rate claim made.
    Inconclusive,
}

/// Full experiment report.
#[derive(Debug, Clone)]
pub struct RateReport {
    /// Error table, ladder-major then time-major.
    pub cells: Vec<ErrorCell>,
    /// One fit per sample time (positive times only).
    pub fits: Vec<SlopeFit>,
    /// Envelope exponent `α/(2+α)`.
    pub theorem_exponent: f64,
    /// Slope acceptance threshold `α/(2+α) − 0.1`.
    pub slope_threshold: f64,
    /// True when (p, α) sit inside the theorem's hypotheses.
    pub regime_certified: bool,
    /// Largest reference gap across cells (all < 10% or the run aborts).
    pub worst_reference_gap: f64,
    /// True when errors decrease monotonically along the ladder at every t.
    pub monotone: bool,
    /// Final verdict.
    pub verdict: RateVerdict,
}

/// Acceptance margin subtracted from the envelope exponent.
pub const SLOPE_MARGIN: f64 = 0.1;
/// Reference-certification tolerance (relative error change on doubling).
pub const REFERENCE_GAP_TOLERANCE: f64 = 0.10;

/// Least-squares line fit through `(x_i, y_i)`: returns (slope, stderr).
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> CoreResult<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(CoreError::InvalidParameter(
            "slope fit needs ≥ 2 matched samples".into(),
        ));
    }
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (y - ym);
    }
    if sxx <= 0.0 {
        return Err(CoreError::InvalidParameter(
            "slope fit needs distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let mut ss_res = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let pred = ym + slope * (x - xm);
        ss_res += (y - pred) * (y - pred);
    }
    let dof = (xs.len().max(3) - 2) as f64;
    let stderr = libm::sqrt(ss_res / dof / sxx);
    Ok((slope, stderr))
}

/// `‖p_h u_h − u_ref‖_{l²}` on the reference grid (grids must be nested).
pub fn error_norm(u_h: &Field, u_ref: &Field) -> CoreResult<f64> {
    let lifted = interpolate_nested(u_h, u_ref.grid())?;
    Ok(l2_h_diff(&lifted, u_ref))
}

fn initial_field(plan: &RatePlan, grid: Grid) -> CoreResult<Field> {
    match plan.data {
        InitialData::Gaussian { amplitude, decay } => {
            gaussian_cell_average(grid, amplitude, decay)
        }
    }
}

fn grid_for(plan: &RatePlan, m: usize) -> CoreResult<Grid> {
    let h = 2.0 * plan.box_half_length / m as f64;
    Grid::new(plan.dim, m, h)
}

/// Validates a plan (shape constraints only; regime is reported, not fatal).
pub fn validate_plan(plan: &RatePlan) -> CoreResult<()> {
    plan.problem.validate()?;
    if plan.ladder_m.len() < 4 {
        return Err(CoreError::InvalidParameter(format!(
            "ladder needs ≥ 4 rungs, got {}",
            plan.ladder_m.len()
        )));
    }
    if !plan.ladder_m.windows(2).all(|w| w[0] < w[1]) {
        return Err(CoreError::InvalidParameter(
            "ladder must be strictly increasing in resolution".into(),
        ));
    }
    let finest = *plan.ladder_m.last().expect("non-empty ladder");
    if plan.reference_m < 4 * finest {
        return Err(CoreError::InvalidParameter(format!(
            "reference must be ≥ 4× finer than the finest rung: {} < 4·{finest}",
            plan.reference_m
        )));
    }
    if plan.reference_m % 2 != 0 {
        return Err(CoreError::InvalidParameter(
            "reference resolution must be even (certification halves it)".into(),
        ));
    }
    if plan.sample_times.is_empty() {
        return Err(CoreError::InvalidParameter(
            "at least one sample time required".into(),
        ));
    }
    if !(plan.box_half_length > 0.0) {
        return Err(CoreError::InvalidParameter(
            "box half-length must be positive".into(),
        ));
    }
    Ok(())
}

/// True when (p, α) lie in the theorem regime `3 ≤ p < 5`,
/// `3(p−1)/(p+1) < α < 2`.
pub fn regime_certified(problem: &NlsProblem) -> bool {
    let p = problem.p as f64;
    if !(3.0..5.0).contains(&p) {
        return false;
    }
    let lower = 3.0 * (p - 1.0) / (p + 1.0);
    problem.alpha > lower && problem.alpha < 2.0
}

/// Runs the full ladder experiment.
///
/// Aborts with an error if the reference fails its doubling certification;
/// regime violations are executed but flagged `regime_certified = false`.
pub fn run_rate_experiment(plan: &RatePlan) -> CoreResult<RateReport> {
    validate_plan(plan)?;
    let exponent = plan.problem.alpha / (2.0 + plan.problem.alpha);
    let threshold = exponent - SLOPE_MARGIN;

    // Reference pair: certification leg at half resolution, report leg full.
    let ref_grid = grid_for(plan, plan.reference_m)?;
    let half_grid = grid_for(plan, plan.reference_m / 2)?;
    let u0_ref = initial_field(plan, ref_grid)?;
    let u0_half = initial_field(plan, half_grid)?;
    let ref_snaps = evolve_sampled(&u0_ref, plan.problem, plan.dt, &plan.sample_times)?;
    let half_snaps = evolve_sampled(&u0_half, plan.problem, plan.dt, &plan.sample_times)?;

    let mut cells = Vec::new();
    let mut worst_gap = 0.0f64;
    // errors[t_idx][ladder_idx]
    let mut table = alloc::vec![Vec::new(); plan.sample_times.len()];
    for &m in &plan.ladder_m {
        let grid = grid_for(plan, m)?;
        let u0 = initial_field(plan, grid)?;
        let snaps = evolve_sampled(&u0, plan.problem, plan.dt, &plan.sample_times)?;
        for (ti, (snap, t)) in snaps.iter().zip(&plan.sample_times).enumerate() {
            let e_fine = error_norm(snap, &ref_snaps[ti])?;
            let e_half = error_norm(snap, &half_snaps[ti])?;
            let gap = (e_fine - e_half).abs() / e_fine.max(f64::MIN_POSITIVE);
            worst_gap = worst_gap.max(gap);
            cells.push(ErrorCell {
                h: grid.mesh(),
                t: *t,
                error: e_fine,
                reference_gap: gap,
            });
            table[ti].push((grid.mesh(), e_fine));
        }
    }

    if worst_gap >= REFERENCE_GAP_TOLERANCE {
        return Err(CoreError::NoConvergence(format!(
            "reference not certified: doubling moved an error by {:.1}% (≥ {:.0}%)",
            100.0 * worst_gap,
            100.0 * REFERENCE_GAP_TOLERANCE
        )));
    }

    let mut fits = Vec::new();
    let mut monotone = true;
    for (ti, t) in plan.sample_times.iter().enumerate() {
        let row = &table[ti];
        // Monotonicity: finer h (later rung) must not increase the error.
        for w in row.windows(2) {
            if w[1].1 >= w[0].1 {
                monotone = false;
            }
        }
        if *t == 0.0 {
            continue;
        }
        let xs: Vec<f64> = row.iter().map(|(h, _)| libm::log(*h)).collect();
        let ys: Vec<f64> = row.iter().map(|(_, e)| libm::log(*e)).collect();
        let (slope, stderr) = least_squares_slope(&xs, &ys)?;
        let (slope_drop, _) = least_squares_slope(&xs[1..], &ys[1..])?;
        fits.push(SlopeFit {
            t: *t,
            slope,
            stderr,
            stability: (slope - slope_drop).abs(),
        });
    }

    let verdict = if !monotone {
        RateVerdict::Inconclusive
    } else if fits.iter().all(|f| f.slope >= threshold) {
        RateVerdict::Pass
    } else {
        RateVerdict::Fail
    };

    Ok(RateReport {
        cells,
        fits,
        theorem_exponent: exponent,
        slope_threshold: threshold,
        regime_certified: regime_certified(&plan.problem),
        worst_reference_gap: worst_gap,
        monotone,
        verdict,
    })
}

/// The `t = 0` sanity ladder: pure discretize→interpolate error
/// `‖p_h d_h u₀ − u₀‖` against the reference-grid samples of `u₀`,
/// fitted the same way (smooth data should give slope ≈ 1).
pub fn discretization_slope(plan: &RatePlan) -> CoreResult<SlopeFit> {
    validate_plan(plan)?;
    let ref_grid = grid_for(plan, plan.reference_m)?;
    let u0_ref = initial_field(plan, ref_grid)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &m in &plan.ladder_m {
        let grid = grid_for(plan, m)?;
        let u0 = initial_field(plan, grid)?;
        let e = error_norm(&u0, &u0_ref)?;
        xs.push(libm::log(grid.mesh()));
        ys.push(libm::log(e));
    }
    let (slope, stderr) = least_squares_slope(&xs, &ys)?;
    let (slope_drop, _) = least_squares_slope(&xs[1..], &ys[1..])?;
    Ok(SlopeFit {
        t: 0.0,
        slope,
        stderr,
        stability: (slope - slope_drop).abs(),
    })
}
