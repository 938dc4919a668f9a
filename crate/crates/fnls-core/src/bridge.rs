//! Continuum ↔ lattice bridges: cell-average discretization and nested-grid
//! interpolation.
//!
//! * Discretization `d_h` maps a continuum function to lattice data by
//!   averaging over the cell `[x − h/2, x + h/2]^d` (tensor 8-point
//!   Gauss–Legendre; exact-to-roundoff closed form for Gaussians via `erf`).
//! * Interpolation `p_h` maps data on a coarse nested grid (`h_c = r·h_f`,
//!   same box) to the fine grid by the *axis-difference* rule
//!
//!   `(p_h u)(x_J) = u(a) + Σ_i f_i · (u(a + e_i) − u(a))`,
//!
//!   where `a` is the containing coarse site and `f_i ∈ [0,1)` the per-axis
//!   fractions. Unlike tensor-product (tri)linear interpolation there are no
//!   mixed `f_i·f_j` terms; this keeps the operator first-order accurate with
//!   the simplest possible stencil and matches the forward-difference
//!   structure of the lattice gradient.

use crate::err::{CoreError, CoreResult};
use crate::field::Field;
use crate::grid::Grid;
use crate::C64;
use alloc::format;
use alloc::vec::Vec;

/// 8-point Gauss–Legendre nodes on [−1, 1].
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
/// Matching Gauss–Legendre weights (sum = 2).
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Discretizes a continuum function by cell averages (tensor GL8 per cell).
pub fn cell_average_field(grid: Grid, mut f: impl FnMut(&[f64]) -> C64) -> Field {
    let d = grid.dim();
    let h = grid.mesh();
    let mut data = Vec::with_capacity(grid.total_points());
    let mut x = [0.0f64; 3];
    let mut node = [0.0f64; 3];
    for flat in 0..grid.total_points() {
        let idx = grid.decode(flat);
        for ax in 0..d {
            x[ax] = grid.coord(idx[ax]);
        }
        let mut acc = C64::new(0.0, 0.0);
        match d {
            1 => {
                for (q, &gx) in GL8_X.iter().enumerate() {
                    node[0] = x[0] + 0.5 * h * gx;
                    acc += f(&node[..1]) * (0.5 * GL8_W[q]);
                }
            }
            2 => {
                for (q1, &g1) in GL8_X.iter().enumerate() {
                    node[0] = x[0] + 0.5 * h * g1;
                    for (q2, &g2) in GL8_X.iter().enumerate() {
                        node[1] = x[1] + 0.5 * h * g2;
                        acc += f(&node[..2]) * (0.25 * GL8_W[q1] * GL8_W[q2]);
                    }
                }
            }
            _ => {
                for (q1, &g1) in GL8_X.iter().enumerate() {
                    node[0] = x[0] + 0.5 * h * g1;
                    for (q2, &g2) in GL8_X.iter().enumerate() {
                        node[1] = x[1] + 0.5 * h * g2;
                        let w12 = GL8_W[q1] * GL8_W[q2];
                        for (q3, &g3) in GL8_X.iter().enumerate() {
                            node[2] = x[2] + 0.5 * h * g3;
                            acc += f(&node[..3]) * (0.125 * w12 * GL8_W[q3]);
                        }
                    }
                }
            }
        }
        data.push(acc);
    }
    Field::from_data(grid, data).expect("length is total_points by construction")
}

/// Exact cell averages of the Gaussian `A·exp(−a|x|²)` via `erf` differences.
///
/// One-dimensional factor: `(1/h)∫ e^{−a s²} ds` over the cell equals
/// `√(π/a)/(2h) · (erf(√a·(x+h/2)) − erf(√a·(x−h/2)))`; the product over
/// axes gives the d-dimensional average. Digit-exact reference for tests and
/// the fast path for Gaussian initial data.
pub fn gaussian_cell_average(grid: Grid, amplitude: f64, decay: f64) -> CoreResult<Field> {
    if !(decay > 0.0 && decay.is_finite()) {
        return Err(CoreError::InvalidParameter(format!(
            "Gaussian decay rate must be positive, got {decay}"
        )));
    }
    let h = grid.mesh();
    let m = grid.points_per_axis();
    let d = grid.dim();
    let sq = libm::sqrt(decay);
    let pref = libm::sqrt(core::f64::consts::PI / decay) / (2.0 * h);
    let axis: Vec<f64> = (0..m)
        .map(|k| {
            let x = grid.coord(k);
            pref * (libm::erf(sq * (x + 0.5 * h)) - libm::erf(sq * (x - 0.5 * h)))
        })
        .collect();
    let mut data = Vec::with_capacity(grid.total_points());
    for flat in 0..grid.total_points() {
        let idx = grid.decode(flat);
        let mut v = amplitude;
        for ax in 0..d {
            v *= axis[idx[ax]];
        }
        data.push(C64::new(v, 0.0));
    }
    Field::from_data(grid, data)
}

/// Interpolates coarse-grid data onto a nested fine grid (axis-difference
/// rule). Requires the same box and dimension, with `h_c / h_f` integer.
pub fn interpolate_nested(coarse: &Field, fine_grid: Grid) -> CoreResult<Field> {
    let cg = coarse.grid();
    if cg.dim() != fine_grid.dim() {
        return Err(CoreError::ShapeMismatch(format!(
            "dimension mismatch: {} vs {}",
            cg.dim(),
            fine_grid.dim()
        )));
    }
    let mc = cg.points_per_axis();
    let mf = fine_grid.points_per_axis();
    if mf % mc != 0 {
        return Err(CoreError::ShapeMismatch(format!(
            "fine axis count {mf} is not a multiple of coarse {mc}"
        )));
    }
    let r = mf / mc;
    let box_c = cg.half_length();
    let box_f = fine_grid.half_length();
    if (box_c - box_f).abs() > 1e-12 * box_c.max(box_f) {
        return Err(CoreError::ShapeMismatch(format!(
            "grids cover different boxes: {box_c} vs {box_f}"
        )));
    }
    let d = fine_grid.dim();
    let inv_r = 1.0 / r as f64;
    let cdata = coarse.data();
    let mut out = Vec::with_capacity(fine_grid.total_points());
    let mut a = [0usize; 3];
    let mut f = [0.0f64; 3];
    for flat in 0..fine_grid.total_points() {
        let idx = fine_grid.decode(flat);
        for ax in 0..d {
            a[ax] = idx[ax] / r;
            f[ax] = (idx[ax] % r) as f64 * inv_r;
        }
        let base = cg.encode(&a[..d]);
        let mut v = cdata[base];
        for ax in 0..d {
            if f[ax] != 0.0 {
                let mut nb = a;
                nb[ax] = (a[ax] + 1) % mc;
                let shifted = cg.encode(&nb[..d]);
                v += (cdata[shifted] - cdata[base]) * f[ax];
            }
        }
        out.push(v);
    }
    Field::from_data(fine_grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_average_preserves_constants() {
        let g = Grid::new(2, 8, 0.7).unwrap();
        let f = cell_average_field(g, |_| C64::new(2.5, -1.0));
        for z in f.data() {
            assert!((z - C64::new(2.5, -1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn cell_average_of_linear_is_midpoint_value() {
        // Symmetric cells average a linear function to its center value.
        let g = Grid::new(1, 16, 0.3).unwrap();
        let f = cell_average_field(g, |x| C64::new(3.0 * x[0] + 1.0, 0.0));
        for (k, z) in f.data().iter().enumerate() {
            let want = 3.0 * g.coord(k) + 1.0;
            assert!((z.re - want).abs() < 1e-13);
        }
    }

    #[test]
    fn gaussian_quadrature_and_erf_paths_agree() {
        for (d, m) in [(1usize, 16usize), (2, 8), (3, 8)] {
            let g = Grid::new(d, m, 0.5).unwrap();
            let (amp, dec) = (1.3, 2.0);
            let via_erf = gaussian_cell_average(g, amp, dec).unwrap();
            let via_gl = cell_average_field(g, |x| {
                let r2: f64 = x.iter().map(|a| a * a).sum();
                C64::new(amp * libm::exp(-dec * r2), 0.0)
            });
            for (a, b) in via_erf.data().iter().zip(via_gl.data()) {
                assert!((a - b).norm() < 1e-12, "d={d}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn cell_average_converges_quadratically_to_point_values() {
        let f = |x: f64| libm::exp(-x * x) * libm::cos(x);
        let mut errs = Vec::new();
        for m in [16usize, 32, 64] {
            let h = 4.0 / m as f64;
            let g = Grid::new(1, m, h).unwrap();
            let avg = cell_average_field(g, |x| C64::new(f(x[0]), 0.0));
            let err = avg
                .data()
                .iter()
                .enumerate()
                .map(|(k, z)| (z.re - f(g.coord(k))).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        let order = (errs[0] / errs[2]).log2() / 2.0;
        assert!((order - 2.0).abs() < 0.15, "got order {order}");
    }

    #[test]
    fn interpolation_is_exact_on_coarse_sites_and_linear_segments() {
        let coarse_grid = Grid::new(1, 8, 1.0).unwrap();
        let fine_grid = Grid::new(1, 32, 0.25).unwrap();
        let coarse = Field::from_fn(coarse_grid, |x| C64::new(2.0 * x[0] - 0.5, 0.0));
        let fine = interpolate_nested(&coarse, fine_grid).unwrap();
        for (j, z) in fine.data().iter().enumerate() {
            let x = fine_grid.coord(j);
            // Away from the wrap segment (last coarse cell), linear data
            // interpolates exactly.
            if x < coarse_grid.half_length() - 1.0 {
                assert!((z.re - (2.0 * x - 0.5)).abs() < 1e-13, "site {j}");
            }
        }
    }

    #[test]
    fn interpolation_uses_axis_differences_not_tensor_products() {
        // On u(x,y) = x·y the axis-difference rule gives
        // u(a) + f₁h·y_a + f₂h·x_a (no f₁f₂h² term).
        let cg = Grid::new(2, 8, 1.0).unwrap();
        let fg = Grid::new(2, 16, 0.5).unwrap();
        let coarse = Field::from_fn(cg, |x| C64::new(x[0] * x[1], 0.0));
        let fine = interpolate_nested(&coarse, fg).unwrap();
        // Pick the fine site halfway in both axes inside an interior cell:
        // coarse cell a = (2,2) → x_a = (−2,−2), fractions (1/2, 1/2).
        let j = fg.encode(&[5, 5]); // fine coords (−1.5, −1.5), a = (2,2)
        let (xa, ya) = (cg.coord(2), cg.coord(2));
        let expect = xa * ya
            + 0.5 * (cg.coord(3) - cg.coord(2)) * ya
            + 0.5 * (cg.coord(3) - cg.coord(2)) * xa;
        let got = fine.data()[j].re;
        assert!((got - expect).abs() < 1e-13);
        let trilinear = (xa + 0.5) * (ya + 0.5);
        assert!(
            (got - trilinear).abs() > 0.2,
            "rule must differ from tensor-product interpolation here"
        );
    }

    #[test]
    fn interpolation_preserves_constants_everywhere() {
        let cg = Grid::new(3, 8, 0.5).unwrap();
        let fg = Grid::new(3, 16, 0.25).unwrap();
        let coarse = Field::from_fn(cg, |_| C64::new(0.7, -0.2));
        let fine = interpolate_nested(&coarse, fg).unwrap();
        for z in fine.data() {
            assert!((z - C64::new(0.7, -0.2)).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_nested_grids() {
        let cg = Grid::new(1, 12, 1.0).unwrap();
        let fg = Grid::new(1, 16, 0.75).unwrap();
        let coarse = Field::zeros(cg);
        assert!(interpolate_nested(&coarse, fg).is_err());
    }
}
