//! Periodic lattice grids.
//!
//! A [`Grid`] is the computational torus for mesh size `h`: `m` points per
//! axis in `d` dimensions, sites `x_k = (k − m/2)·h` for `k ∈ [0, m)`, so the
//! box is `[−L, L)^d` with `L = m·h/2`. The dual grid carries frequencies
//! `ξ_j = 2π·(j − m/2)/(m·h)`, covering the Brillouin zone `[−π/h, π/h)^d`.
//!
//! `m` must be a 5-smooth multiple of 4: 5-smooth for the FFT, and a multiple
//! of 4 so the centered transform's checkerboard phase factors close exactly
//! (see [`crate::field`]).

use crate::err::{CoreError, CoreResult};
use crate::fft::is_5_smooth;
use alloc::format;
use alloc::vec::Vec;

/// A centered periodic lattice in `d ∈ {1,2,3}` dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    d: usize,
    m: usize,
    h: f64,
}

impl Grid {
    /// Creates a grid; `d ∈ {1,2,3}`, `m` a 5-smooth multiple of 4, `h > 0`.
    pub fn new(d: usize, m: usize, h: f64) -> CoreResult<Self> {
        if !(1..=3).contains(&d) {
            return Err(CoreError::InvalidParameter(format!(
                "dimension must be 1, 2 or 3, got {d}"
            )));
        }
        if m < 4 || m % 4 != 0 || !is_5_smooth(m) {
            return Err(CoreError::InvalidParameter(format!(
                "points per axis must be a 5-smooth multiple of 4, got {m}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(CoreError::InvalidParameter(format!(
                "mesh size must be positive and finite, got {h}"
            )));
        }
        Ok(Grid { d, m, h })
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Points per axis.
    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    /// Mesh size `h`.
    pub fn mesh(&self) -> f64 {
        self.h
    }

    /// Total number of lattice sites, `m^d`.
    pub fn total_points(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    /// Half box length `L = m·h/2`; the domain is `[−L, L)^d`.
    pub fn half_length(&self) -> f64 {
        0.5 * self.m as f64 * self.h
    }

    /// Site coordinate along one axis: `x = (k − m/2)·h`.
    pub fn coord(&self, k: usize) -> f64 {
        (k as f64 - 0.5 * self.m as f64) * self.h
    }

    /// Dual frequency along one axis: `ξ = 2π(j − m/2)/(m·h)`.
    pub fn freq(&self, j: usize) -> f64 {
        2.0 * core::f64::consts::PI * (j as f64 - 0.5 * self.m as f64) / (self.m as f64 * self.h)
    }

    /// Frequency-cell volume `(2π/(m·h))^d` of the dual grid.
    pub fn freq_cell_volume(&self) -> f64 {
        let dxi = 2.0 * core::f64::consts::PI / (self.m as f64 * self.h);
        crate::ipow(dxi, self.d as u32)
    }

    /// Cell volume `h^d`.
    pub fn cell_volume(&self) -> f64 {
        crate::ipow(self.h, self.d as u32)
    }

    /// Decodes a flat row-major index into per-axis indices (length `d`).
    pub fn decode(&self, mut flat: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for ax in (0..self.d).rev() {
            out[ax] = flat % self.m;
            flat /= self.m;
        }
        out
    }

    /// Encodes per-axis indices into a flat row-major index.
    pub fn encode(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.d);
        let mut flat = 0usize;
        for &i in idx.iter() {
            debug_assert!(i < self.m);
            flat = flat * self.m + i;
        }
        flat
    }

    /// All per-axis site coordinates, as one length-`m` table.
    pub fn coord_table(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.coord(k)).collect()
    }

    /// All per-axis dual frequencies, as one length-`m` table.
    pub fn freq_table(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.freq(j)).collect()
    }
}
