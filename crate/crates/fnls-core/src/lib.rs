//! Core numerics for a fractional dispersive lattice laboratory.
//!
//! This crate hosts the allocation-only (`no_std`-compatible) numerical
//! machinery:
//!
//! * mixed-radix complex FFT and the DCT-I used by the kernel engine
//!   ([`fft`]),
//! * periodic lattice grids, sampled fields, and discrete norms ([`grid`],
//!   [`field`], [`norms`]),
//! * the lattice dispersion symbol and its continuum counterpart
//!   ([`symbol`]),
//! * smooth dyadic frequency cutoffs ([`lp`]),
//! * discretization/interpolation bridges between the continuum and nested
//!   lattices ([`bridge`]),
//! * the free propagator and dispersive-kernel sup engine ([`propagate`],
//!   [`decay`]),
//! * stationary-phase tooling: critical points, degeneracy classes, and
//!   oscillatory-integral decay fits ([`osc`]),
//! * exact rational arithmetic, Newton polygons, and Sturm root counting
//!   ([`rat`], [`newton`]),
//! * a split-step spectral solver for the focusing/defocusing nonlinear
//!   model and grid-refinement rate experiments ([`solver`], [`converge`]).
//!
//! Everything here is deterministic and single-threaded; the `fnls-lab`
//! companion crate layers file formats, configuration, and a CLI on top.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bridge;
pub mod converge;
pub mod decay;
pub mod err;
pub mod fft;
pub mod field;
pub mod grid;
pub mod lp;
pub mod newton;
pub mod norms;
pub mod osc;
pub mod propagate;
pub mod rat;
pub mod solver;
pub mod strichartz;
pub mod symbol;

pub use err::CoreError;

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Integer power by repeated multiplication (exact products, no libm call).
pub(crate) fn ipow(base: f64, exp: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}
