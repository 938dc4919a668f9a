//! The free propagator `U_h(t) = exp(−i t (−Δ_h)^{α/2})` as a spectral
//! multiplier, with optional frequency localization.
//!
//! `U_h(t)u` is computed by transforming to the dual grid, multiplying by
//! `exp(−i t ω_h(ξ))` (and by a block cutoff when requested), and
//! transforming back. The propagator is exactly unitary on `l²_h` because the
//! multiplier has modulus one and the transform pair is Plancherel-exact.

use crate::err::CoreResult;
use crate::field::{Field, FieldTransform};
use crate::lp::{eta_block, phi_block};
use crate::symbol::{check_alpha, omega_h_table};
use crate::C64;
use alloc::vec::Vec;

/// Frequency localization applied together with the propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Localization {
    /// No cutoff.
    None,
    /// Dyadic block `η(|ξ|/N)`.
    Block(f64),
    /// Low-pass `φ(|ξ|/N)`.
    LowPass(f64),
}

/// Applies `U_h(t)` (optionally localized) to `field`, in place.
pub fn propagate(
    field: &mut Field,
    alpha: f64,
    t: f64,
    loc: Localization,
) -> CoreResult<()> {
    check_alpha(alpha)?;
    let grid = field.grid();
    let omega = omega_h_table(&grid, alpha);
    let mut tr = FieldTransform::new(&grid)?;
    tr.forward(field);
    apply_multiplier(field, &omega, t, loc);
    tr.inverse(field);
    Ok(())
}

/// Multiplies the spectrum in place by `exp(−i t ω)·cutoff`.
fn apply_multiplier(field: &mut Field, omega: &[f64], t: f64, loc: Localization) {
    let grid = field.grid();
    let d = grid.dim();
    let mut xi = [0.0f64; 3];
    for (flat, z) in field.data_mut().iter_mut().enumerate() {
        let cut = match loc {
            Localization::None => 1.0,
            Localization::Block(n) | Localization::LowPass(n) => {
                let idx = grid.decode(flat);
                for ax in 0..d {
                    xi[ax] = grid.freq(idx[ax]);
                }
                match loc {
                    Localization::Block(_) => eta_block(&xi[..d], n),
                    Localization::LowPass(_) => phi_block(&xi[..d], n),
                    Localization::None => unreachable!(),
                }
            }
        };
        if cut == 0.0 {
            *z = C64::new(0.0, 0.0);
            continue;
        }
        let (s, c) = libm::sincos(-t * omega[flat]);
        *z *= C64::new(c, s) * cut;
    }
}

/// Precomputed single-step propagator multiplier `exp(−i·dt·ω_h)` for
/// repeated application (split-step integrators).
pub struct StepMultiplier {
    table: Vec<C64>,
}

impl StepMultiplier {
    /// Builds `exp(−i·dt·ω_h(ξ))` over a grid's dual lattice.
    pub fn new(grid: &crate::grid::Grid, alpha: f64, dt: f64) -> CoreResult<Self> {
        check_alpha(alpha)?;
        let omega = omega_h_table(grid, alpha);
        let table = omega
            .iter()
            .map(|&w| {
                let (s, c) = libm::sincos(-dt * w);
                C64::new(c, s)
            })
            .collect();
        Ok(StepMultiplier { table })
    }

    /// Pointwise multiply a spectrum by the stored table.
    pub fn apply(&self, spectrum: &mut [C64]) {
        assert_eq!(spectrum.len(), self.table.len(), "multiplier shape mismatch");
        for (z, m) in spectrum.iter_mut().zip(&self.table) {
            *z *= m;
        }
    }
}
