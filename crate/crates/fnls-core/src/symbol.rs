//! Dispersion symbols: the lattice fractional Laplacian multiplier and its
//! continuum counterpart.
//!
//! On the mesh-`h` lattice the fractional Laplacian of order `α ∈ (1, 2)` is
//! the Fourier multiplier
//!
//! `ω_h(ξ) = ( (4/h²) Σ_i sin²(h ξ_i / 2) )^{α/2}`,
//!
//! which converges pointwise to the continuum symbol `ω(ξ) = |ξ|^α` as
//! `h → 0`. In mesh-free (rescaled) variables `ζ = hξ` the same symbol reads
//! `w(ζ) = ( Σ_i (2 − 2 cos ζ_i) )^{α/2} / h^α`; the dimensionless `w` with
//! `h = 1` is what the stationary-phase machinery in [`crate::osc`] uses.

use crate::err::{CoreError, CoreResult};
use crate::grid::Grid;
use alloc::format;
use alloc::vec::Vec;

/// Validates a fractional order `α ∈ (1, 2)`.
pub fn check_alpha(alpha: f64) -> CoreResult<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(CoreError::InvalidParameter(format!(
            "fractional order must lie in (1, 2), got {alpha}"
        )));
    }
    Ok(())
}

/// Lattice symbol `ω_h(ξ)` for a frequency vector `ξ` (length = dimension).
pub fn omega_h(xi: &[f64], h: f64, alpha: f64) -> f64 {
    let mut w = 0.0;
    for &x in xi {
        let s = libm::sin(0.5 * h * x);
        w += s * s;
    }
    libm::pow(4.0 / (h * h) * w, 0.5 * alpha)
}

/// Continuum symbol `|ξ|^α`.
pub fn omega_continuum(xi: &[f64], alpha: f64) -> f64 {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    libm::pow(r2, 0.5 * alpha)
}

/// Dimensionless torus symbol `w(ζ) = (Σ 2 − 2cos ζ_i)^{α/2}` (mesh 1).
pub fn omega_torus(zeta: &[f64], alpha: f64) -> f64 {
    let mut w = 0.0;
    for &z in zeta {
        w += 2.0 - 2.0 * libm::cos(z);
    }
    libm::pow(w, 0.5 * alpha)
}

/// Tabulates `ω_h(ξ_j)` over a grid's full dual lattice (row-major `m^d`).
///
/// Built from per-axis tables of `(4/h²)sin²(hξ/2)`, so the cost is one `pow`
/// per point plus cheap adds.
pub fn omega_h_table(grid: &Grid, alpha: f64) -> Vec<f64> {
    let m = grid.points_per_axis();
    let d = grid.dim();
    let h = grid.mesh();
    let axis: Vec<f64> = (0..m)
        .map(|j| {
            let s = libm::sin(0.5 * h * grid.freq(j));
            4.0 / (h * h) * s * s
        })
        .collect();
    let total = grid.total_points();
    let mut out = Vec::with_capacity(total);
    match d {
        1 => {
            for &w in &axis {
                out.push(libm::pow(w, 0.5 * alpha));
            }
        }
        2 => {
            for &w1 in &axis {
                for &w2 in &axis {
                    out.push(libm::pow(w1 + w2, 0.5 * alpha));
                }
            }
        }
        _ => {
            for &w1 in &axis {
                for &w2 in &axis {
                    for &w3 in &axis {
                        out.push(libm::pow(w1 + w2 + w3, 0.5 * alpha));
                    }
                }
            }
        }
    }
    out
}

/// Tabulates the fractional-derivative weight `((4/h²)Σ sin²)^{s/2}` (the
/// multiplier of `|∇_h|^s`) over the dual lattice. Note this equals
/// `ω_h^{s/α}` for every admissible `α`, so it takes no `alpha` argument.
pub fn grad_power_table(grid: &Grid, s: f64) -> Vec<f64> {
    omega_h_table(grid, s)
}
