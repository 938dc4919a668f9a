//! Smooth dyadic frequency cutoffs (Littlewood–Paley family).
//!
//! Built from the classic smooth step: with `B(t) = e^{−1/t}` for `t > 0`
//! (and 0 otherwise) and `S(t) = B(t)/(B(t) + B(1−t))`, the radial cutoff is
//!
//! * `φ(r) = 1` for `r ≤ π`, `0` for `r ≥ 2π`, and `S((2π − r)/π)` between;
//! * `η(r) = φ(r) − φ(2r)`, supported in the annulus `π/2 ≤ r ≤ 2π`.
//!
//! Dyadic blocks use `η(|ξ|/N)`; the low-pass companion is `φ(|ξ|/N)`. All
//! functions are C^∞, take values in `[0, 1]`, and satisfy the exact
//! partition property `φ(r) + Σ_{k≥0} η(2^{−k} r)… = 1` telescopically.

/// `B(t) = e^{−1/t}` for `t > 0`, else 0 (C^∞ at the junction).
pub fn bump_half(t: f64) -> f64 {
    if t > 0.0 {
        libm::exp(-1.0 / t)
    } else {
        0.0
    }
}

/// Smooth step `S(t)`: 0 for `t ≤ 0`, 1 for `t ≥ 1`, strictly rising between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let b = bump_half(t);
        b / (b + bump_half(1.0 - t))
    }
}

/// Radial low-pass profile `φ`: 1 on `[0, π]`, 0 on `[2π, ∞)`.
pub fn phi(r: f64) -> f64 {
    let pi = core::f64::consts::PI;
    if r <= pi {
        1.0
    } else if r >= 2.0 * pi {
        0.0
    } else {
        smooth_step((2.0 * pi - r) / pi)
    }
}

/// Annulus profile `η(r) = φ(r) − φ(2r)`, supported in `[π/2, 2π]`.
pub fn eta(r: f64) -> f64 {
    phi(r) - phi(2.0 * r)
}

/// Block cutoff `η(|ξ|/N)` for a frequency vector.
pub fn eta_block(xi: &[f64], n_scale: f64) -> f64 {
    let r = libm::sqrt(xi.iter().map(|x| x * x).sum::<f64>());
    eta(r / n_scale)
}

/// Low-pass cutoff `φ(|ξ|/N)` for a frequency vector.
pub fn phi_block(xi: &[f64], n_scale: f64) -> f64 {
    let r = libm::sqrt(xi.iter().map(|x| x * x).sum::<f64>());
    phi(r / n_scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn phi_plateau_and_support() {
        assert_eq!(phi(0.0), 1.0);
        assert_eq!(phi(PI), 1.0);
        assert_eq!(phi(2.0 * PI), 0.0);
        assert_eq!(phi(100.0), 0.0);
        let mid = phi(1.5 * PI);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((phi(1.5 * PI) - 0.5).abs() < 1e-12, "midpoint is exactly 1/2 by symmetry");
    }

    #[test]
    fn phi_is_monotone_nonincreasing() {
        let mut last = 1.0f64;
        for k in 0..=600 {
            let r = 7.0 * k as f64 / 600.0;
            let v = phi(r);
            assert!(v <= last + 1e-15, "phi must not increase (r={r})");
            last = v;
        }
    }

    #[test]
    fn eta_support_is_the_annulus() {
        assert_eq!(eta(0.49 * PI), 0.0);
        assert_eq!(eta(PI / 2.0), 0.0, "boundary value vanishes");
        assert!(eta(PI) > 0.999999, "plateau: φ(π)=1, φ(2π)=0");
        assert_eq!(eta(2.0 * PI), 0.0);
        assert_eq!(eta(7.0), 0.0);
        // Interior positivity on the open annulus.
        for k in 1..40 {
            let r = PI / 2.0 + (2.0 * PI - PI / 2.0) * k as f64 / 40.0;
            if r < 2.0 * PI {
                assert!(eta(r) > 0.0, "eta({r}) should be positive");
            }
        }
    }

    #[test]
    fn dyadic_blocks_telescope_to_low_pass() {
        // φ(r) + Σ_{j=1..J} η(r / 2^j) = φ(r / 2^J) exactly (finite telescope).
        for r in [0.3f64, 1.0, 3.0, 7.0, 20.0, 55.0] {
            let big_j = 6;
            let mut acc = phi(r);
            for j in 1..=big_j {
                acc += eta(r / (1u64 << j) as f64);
            }
            let want = phi(r / (1u64 << big_j) as f64);
            assert!((acc - want).abs() < 1e-14, "telescope at r={r}");
        }
    }

    #[test]
    fn smooth_step_is_flat_to_high_order_at_ends() {
        // Derivative-free check: values hug 0/1 to many digits near the ends,
        // the signature of the e^{−1/t} construction.
        assert!(smooth_step(0.02) < 1e-20);
        assert!(1.0 - smooth_step(0.98) < 1e-20);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn vector_forms_use_euclidean_radius() {
        let n = 0.5;
        let xi = [0.3f64, 0.4];
        let r = 0.5f64;
        assert!((eta_block(&xi, n) - eta(r / n)).abs() < 1e-15);
        assert!((phi_block(&xi, n) - phi(r / n)).abs() < 1e-15);
    }
}
