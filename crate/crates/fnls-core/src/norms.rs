//! Discrete norms with compensated summation.
//!
//! All lattice norms carry the cell weight: `‖u‖_{l²_h}² = h^d Σ|u|²`,
//! `‖u‖_{l^p_h}^p = h^d Σ|u|^p`, `‖u‖_∞ = max|u|`. Sums use Kahan
//! compensation so norms of large grids (10⁷–10⁸ entries) keep full double
//! precision.

use crate::field::Field;

/// Kahan-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    /// Fresh accumulator at zero.
    pub fn new() -> Self {
        Kahan::default()
    }

    /// Adds one term.
    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    /// Current compensated total.
    pub fn total(&self) -> f64 {
        self.sum
    }
}

/// Compensated sum of an iterator.
pub fn ksum(it: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Kahan::new();
    for x in it {
        acc.add(x);
    }
    acc.total()
}

/// `‖u‖_{l²_h} = (h^d Σ|u|²)^{1/2}`.
pub fn l2_h(field: &Field) -> f64 {
    let s = ksum(field.data().iter().map(|z| z.norm_sqr()));
    libm::sqrt(field.grid().cell_volume() * s)
}

/// `‖u‖_{l^p_h} = (h^d Σ|u|^p)^{1/p}` for finite `p ≥ 1`.
pub fn lp_h(field: &Field, p: f64) -> f64 {
    debug_assert!(p >= 1.0 && p.is_finite());
    let s = ksum(field.data().iter().map(|z| libm::pow(z.norm(), p)));
    libm::pow(field.grid().cell_volume() * s, 1.0 / p)
}

/// Sup norm `max_k |u(x_k)|`.
pub fn sup(field: &Field) -> f64 {
    field
        .data()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
}

/// `‖u − v‖_{l²_h}` on a shared grid.
pub fn l2_h_diff(a: &Field, b: &Field) -> f64 {
    assert_eq!(a.grid(), b.grid(), "fields live on different grids");
    let s = ksum(
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).norm_sqr()),
    );
    libm::sqrt(a.grid().cell_volume() * s)
}
