//! Newton-polyhedron analysis of two-dimensional phase functions.
//!
//! For a phase whose Taylor support at a critical point is a finite set of
//! exponent pairs `γ = (γ₁, γ₂)` with `γ₁ + γ₂ ≥ 2`, the region
//! `N = conv(∪_γ γ + R²₊)` controls the decay of oscillatory integrals with
//! that phase. This module computes, in exact rational arithmetic:
//!
//! * the staircase hull of the support (vertices and compact edges),
//! * the distance `d` — the smallest `t` with `(t, t) ∈ N`,
//! * the principal face — the minimal-dimension face meeting the diagonal,
//! * an adapted-coordinates verdict via root multiplicities of the
//!   restricted polynomial on the principal face, and
//! * a certified decay pair `(β, p)` with `β = −1/d`, `p = 0`, emitted only
//!   for the verified configuration (compact-edge principal face, adapted
//!   coordinates, `d > 1`); everything else stays `None` rather than guess.
//!
//! A one-variable phase `x^k` has the classical stationary-phase decay
//! `(−1/k, 0)`; that is supplied by [`monomial_decay`], not by the hull
//! route (its principal face is unbounded, so the certificate does not
//! apply).

use crate::err::{CoreError, CoreResult};
use crate::rat::{Rat, RatPoly};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Finite Taylor support of a 2D phase: exponent pairs with nonzero rational
/// coefficients, every pair of total degree at least 2 (the phase and its
/// gradient vanish at the base point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaylorSupport2D {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl TaylorSupport2D {
    /// Builds a support from `((γ₁, γ₂), coefficient)` entries.
    ///
    /// Rejects empty input, zero coefficients, duplicate exponent pairs, and
    /// any term of total degree ≤ 1.
    pub fn new(entries: &[((u32, u32), Rat)]) -> CoreResult<TaylorSupport2D> {
        if entries.is_empty() {
            return Err(CoreError::InvalidParameter(
                "taylor support must contain at least one term".into(),
            ));
        }
        let mut terms = BTreeMap::new();
        for &((g1, g2), c) in entries {
            if c.is_zero() {
                return Err(CoreError::InvalidParameter(
                    "taylor support coefficients must be nonzero".into(),
                ));
            }
            if g1 + g2 <= 1 {
                return Err(CoreError::InvalidParameter(
                    "taylor support terms must have total degree at least 2".into(),
                ));
            }
            if terms.insert((g1, g2), c).is_some() {
                return Err(CoreError::InvalidParameter(
                    "taylor support has a duplicate exponent pair".into(),
                ));
            }
        }
        Ok(TaylorSupport2D { terms })
    }

    /// The terms, keyed by exponent pair.
    pub fn terms(&self) -> &BTreeMap<(u32, u32), Rat> {
        &self.terms
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Always false: the constructor rejects empty supports.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Phase value at a real point (used by quadrature-based cross-checks).
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for (&(g1, g2), c) in &self.terms {
            acc += c.to_f64() * libm::pow(x, g1 as f64) * libm::pow(y, g2 as f64);
        }
        acc
    }
}

/// A face of the staircase region that meets the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Face {
    /// The diagonal point is a hull corner.
    Vertex {
        /// The corner.
        at: (u32, u32),
    },
    /// The diagonal crosses the interior of a compact edge with supporting
    /// line `a·γ₁ + b·γ₂ = c` (`a, b > 0`, normalized by the gcd).
    Edge {
        /// Upper-left endpoint (smaller first coordinate).
        from: (u32, u32),
        /// Lower-right endpoint.
        to: (u32, u32),
        /// Supporting line `(a, b, c)`.
        line: (i64, i64, i64),
    },
    /// The diagonal meets an unbounded axis-parallel boundary ray.
    Ray {
        /// The hull vertex the ray emanates from.
        from: (u32, u32),
        /// True for the vertical ray `γ₁ = const`, false for the horizontal.
        vertical: bool,
    },
}

impl Face {
    /// Codimension inside the plane: 2 for a corner, 1 for an edge or ray.
    pub fn codim(&self) -> u8 {
        match self {
            Face::Vertex { .. } => 2,
            _ => 1,
        }
    }

    /// True for faces of finite extent (corners and bounded edges).
    pub fn is_compact(&self) -> bool {
        !matches!(self, Face::Ray { .. })
    }
}

/// Adapted-coordinates verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adapted {
    /// The coordinates are certified adapted.
    Yes,
    /// A root of excessive multiplicity witnesses non-adaptedness.
    No,
    /// The criterion does not apply (unbounded principal face).
    Unknown,
}

/// Complete combinatorial analysis of one support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolyhedron2D {
    /// Staircase hull corners, ordered by increasing first coordinate.
    pub hull_vertices: Vec<(u32, u32)>,
    /// Bounded hull edges `(from, to, (a, b, c))` with `a·γ₁ + b·γ₂ = c`.
    pub compact_edges: Vec<((u32, u32), (u32, u32), (i64, i64, i64))>,
    /// The distance: smallest `t` with `(t, t)` inside the region.
    pub newton_distance: Rat,
    /// Minimal-dimension face meeting the diagonal.
    pub principal_face: Face,
    /// Codimension of the principal face.
    pub codim: u8,
    /// Adapted-coordinates verdict.
    pub adapted: Adapted,
    /// Certified decay pair `(β, p)`, or `None` when not certified here.
    pub decay: Option<(Rat, Rat)>,
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn g(mut a: i64, mut b: i64) -> i64 {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    g(g(a, b), c).max(1)
}

/// Staircase hull corners of `∪ γ + R²₊`: Pareto-minimal support points that
/// survive a strict-convexity sweep (collinear midpoints are dropped, so the
/// corner list is minimal).
fn staircase_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pareto: Vec<(i64, i64)> = Vec::new();
    for &p in points {
        let dominated = points
            .iter()
            .any(|&q| q != p && q.0 <= p.0 && q.1 <= p.1);
        if !dominated {
            pareto.push(p);
        }
    }
    pareto.sort_unstable();
    // Pareto-minimality makes the second coordinate strictly decreasing.
    let mut chain: Vec<(i64, i64)> = Vec::new();
    for c in pareto {
        while chain.len() >= 2 {
            let a = chain[chain.len() - 2];
            let b = chain[chain.len() - 1];
            let cross = (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0);
            // Keep `b` only when the slope strictly increases through it.
            if cross <= 0 {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(c);
    }
    chain
}

/// Full pipeline: hull, distance, principal face, adaptedness, decay.
pub fn build_polyhedron(support: &TaylorSupport2D) -> CoreResult<NewtonPolyhedron2D> {
    let pts: Vec<(i64, i64)> = support
        .terms
        .keys()
        .map(|&(a, b)| (a as i64, b as i64))
        .collect();
    let chain = staircase_hull(&pts);
    debug_assert!(!chain.is_empty());

    let mut compact_edges = Vec::new();
    for w in chain.windows(2) {
        let (v0, v1) = (w[0], w[1]);
        let a = v0.1 - v1.1;
        let b = v1.0 - v0.0;
        let c = a * v0.0 + b * v0.1;
        debug_assert!(a > 0 && b > 0);
        let g = gcd3(a, b, c);
        compact_edges.push((
            (v0.0 as u32, v0.1 as u32),
            (v1.0 as u32, v1.1 as u32),
            (a / g, b / g, c / g),
        ));
    }

    // Distance: the diagonal point (t, t) lies in the region iff it clears
    // the two axis rays and every compact-edge half-plane, so the distance
    // is the largest of those lower bounds.
    let x_min = chain[0].0;
    let y_min = chain[chain.len() - 1].1;
    let mut d = Rat::from_int(x_min.max(y_min));
    for &(_, _, (a, b, c)) in &compact_edges {
        let cut = Rat::new(c as i128, (a + b) as i128)?;
        if cut > d {
            d = cut;
        }
    }

    // Principal face: corner, then edge interior, then boundary ray.
    let corner = if d.den() == 1 {
        let v = d.num();
        chain
            .iter()
            .find(|&&p| p.0 == v as i64 && p.1 == v as i64)
            .copied()
    } else {
        None
    };
    let principal_face = if let Some(v) = corner {
        Face::Vertex {
            at: (v.0 as u32, v.1 as u32),
        }
    } else {
        let mut on_edge = None;
        for &(from, to, (a, b, c)) in &compact_edges {
            let lhs = Rat::from_int(a + b) * d;
            if lhs == Rat::from_int(c)
                && d > Rat::from_int(from.0 as i64)
                && d < Rat::from_int(to.0 as i64)
            {
                on_edge = Some(Face::Edge {
                    from,
                    to,
                    line: (a, b, c),
                });
                break;
            }
        }
        match on_edge {
            Some(f) => f,
            None => {
                if d == Rat::from_int(x_min) {
                    Face::Ray {
                        from: (chain[0].0 as u32, chain[0].1 as u32),
                        vertical: true,
                    }
                } else if d == Rat::from_int(y_min) {
                    let last = chain[chain.len() - 1];
                    Face::Ray {
                        from: (last.0 as u32, last.1 as u32),
                        vertical: false,
                    }
                } else {
                    return Err(CoreError::SearchFailed(
                        "diagonal point matched no face of the staircase hull".into(),
                    ));
                }
            }
        }
    };

    let adapted = adaptedness(support, &principal_face, d)?;
    // Decay is certified only in the configuration backed by the classical
    // stationary-phase estimate with no logarithmic factor: an adapted,
    // compact-edge principal face with distance above 1.
    let decay = match (&principal_face, adapted) {
        (Face::Edge { .. }, Adapted::Yes) if d > Rat::ONE => {
            Some((Rat::from_int(-1) / d, Rat::ZERO))
        }
        _ => None,
    };

    Ok(NewtonPolyhedron2D {
        codim: principal_face.codim(),
        adapted,
        decay,
        hull_vertices: chain.iter().map(|&p| (p.0 as u32, p.1 as u32)).collect(),
        compact_edges,
        newton_distance: d,
        principal_face,
    })
}

/// Terms of the support lying on a face.
pub fn restrict(support: &TaylorSupport2D, face: &Face) -> CoreResult<TaylorSupport2D> {
    let keep: Vec<((u32, u32), Rat)> = support
        .terms
        .iter()
        .filter(|(&(g1, g2), _)| match *face {
            Face::Vertex { at } => (g1, g2) == at,
            Face::Edge { line: (a, b, c), .. } => {
                a * g1 as i64 + b * g2 as i64 == c
            }
            Face::Ray { from, vertical } => {
                if vertical {
                    g1 == from.0
                } else {
                    g2 == from.1
                }
            }
        })
        .map(|(&g, &c)| (g, c))
        .collect();
    if keep.is_empty() {
        return Err(CoreError::SearchFailed(
            "face restriction kept no terms".into(),
        ));
    }
    TaylorSupport2D::new(&keep)
}

/// Restriction of the phase to an edge face, as a polynomial in `y` after
/// substituting `x = σ` (`σ = ±1`).
fn edge_section(support: &TaylorSupport2D, line: (i64, i64, i64), sigma: i32) -> RatPoly {
    let (a, b, c) = line;
    let mut coeffs: Vec<Rat> = Vec::new();
    for (&(g1, g2), &co) in &support.terms {
        if a * g1 as i64 + b * g2 as i64 != c {
            continue;
        }
        let k = g2 as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Rat::ZERO);
        }
        let signed = if sigma < 0 && g1 % 2 == 1 { -co } else { co };
        coeffs[k] = coeffs[k] + signed;
    }
    RatPoly::new(coeffs)
}

fn adaptedness(support: &TaylorSupport2D, face: &Face, d: Rat) -> CoreResult<Adapted> {
    match face {
        // A corner on the diagonal always certifies adapted coordinates.
        Face::Vertex { .. } => Ok(Adapted::Yes),
        // Unbounded face: the multiplicity criterion does not apply.
        Face::Ray { .. } => Ok(Adapted::Unknown),
        Face::Edge { line, .. } => {
            for sigma in [1, -1] {
                let section = edge_section(support, *line, sigma);
                debug_assert!(!section.is_zero());
                // Roots at the origin are exempt; inspect the rest by exact
                // square-free multiplicity.
                let (reduced, _) = section.strip_zero_root();
                if reduced.degree() == Some(0) {
                    continue;
                }
                for (factor, mult) in reduced.square_free()? {
                    if Rat::from_int(mult as i64) >= d && factor.distinct_real_roots()? > 0 {
                        return Ok(Adapted::No);
                    }
                }
            }
            Ok(Adapted::Yes)
        }
    }
}

/// The distance alone (full pipeline internally).
pub fn newton_distance(support: &TaylorSupport2D) -> CoreResult<Rat> {
    Ok(build_polyhedron(support)?.newton_distance)
}

/// The adapted-coordinates verdict alone.
pub fn adapted_check(support: &TaylorSupport2D) -> CoreResult<Adapted> {
    Ok(build_polyhedron(support)?.adapted)
}

/// The certified decay pair `(β, p)`; errors when no certificate applies
/// (callers needing the one-variable monomial rate should use
/// [`monomial_decay`]).
pub fn decay_pair(support: &TaylorSupport2D) -> CoreResult<(Rat, Rat)> {
    let poly = build_polyhedron(support)?;
    poly.decay.ok_or_else(|| {
        CoreError::InvalidParameter(
            "decay pair is only certified for adapted compact-edge principal faces".into(),
        )
    })
}

/// Stationary-phase decay of a one-variable monomial phase `x^k`:
/// `(−1/k, 0)` for `k ≥ 1`.
pub fn monomial_decay(k: u32) -> CoreResult<(Rat, Rat)> {
    if k == 0 {
        return Err(CoreError::InvalidParameter(
            "monomial decay needs a positive exponent".into(),
        ));
    }
    Ok((Rat::new(-1, k as i128)?, Rat::ZERO))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::converge::least_squares_slope;
    use crate::lp::smooth_step;
    use crate::rat::rat;
    use crate::C64;
    use alloc::vec;
    use proptest::prelude::*;

    fn support(entries: &[(u32, u32, i128, i128)]) -> TaylorSupport2D {
        let list: Vec<((u32, u32), Rat)> = entries
            .iter()
            .map(|&(g1, g2, n, d)| ((g1, g2), rat(n, d)))
            .collect();
        TaylorSupport2D::new(&list).expect("valid fixture support")
    }

    // x²y + xy² and friends, written as (γ₁, γ₂, num, den) lists.
    fn s_xxy_xyy(sign: i128) -> TaylorSupport2D {
        support(&[(2, 1, 1, 1), (1, 2, sign, 1)])
    }
    fn s_xxy_yy(sign: i128) -> TaylorSupport2D {
        support(&[(2, 1, 1, 1), (0, 2, sign, 1)])
    }
    fn s_xxy_yy_x4(s1: i128, s2: i128) -> TaylorSupport2D {
        support(&[(2, 1, 1, 1), (0, 2, s1, 1), (4, 0, s2, 1)])
    }

    #[test]
    fn support_validation_rejects_degenerate_input() {
        assert!(TaylorSupport2D::new(&[]).is_err());
        assert!(TaylorSupport2D::new(&[((0, 0), rat(1, 1))]).is_err());
        assert!(TaylorSupport2D::new(&[((1, 0), rat(1, 1))]).is_err());
        assert!(TaylorSupport2D::new(&[((0, 1), rat(1, 1))]).is_err());
        assert!(TaylorSupport2D::new(&[((2, 1), Rat::ZERO)]).is_err());
        assert!(
            TaylorSupport2D::new(&[((2, 1), rat(1, 1)), ((2, 1), rat(2, 1))]).is_err()
        );
        assert!(TaylorSupport2D::new(&[((1, 1), rat(1, 1))]).is_ok());
    }

    #[test]
    fn staircase_hull_examples() {
        let p = build_polyhedron(&s_xxy_xyy(1)).unwrap();
        assert_eq!(p.hull_vertices, vec![(1, 2), (2, 1)]);
        assert_eq!(p.compact_edges, vec![((1, 2), (2, 1), (1, 1, 3))]);

        let p = build_polyhedron(&s_xxy_yy(1)).unwrap();
        assert_eq!(p.hull_vertices, vec![(0, 2), (2, 1)]);
        assert_eq!(p.compact_edges, vec![((0, 2), (2, 1), (1, 2, 4))]);

        // The collinear middle point is not a corner, but stays on the edge.
        let p = build_polyhedron(&s_xxy_yy_x4(1, 1)).unwrap();
        assert_eq!(p.hull_vertices, vec![(0, 2), (4, 0)]);
        assert_eq!(p.compact_edges, vec![((0, 2), (4, 0), (1, 2, 4))]);

        // Single monomial: one corner, no compact edges.
        let p = build_polyhedron(&support(&[(3, 0, 1, 1)])).unwrap();
        assert_eq!(p.hull_vertices, vec![(3, 0)]);
        assert!(p.compact_edges.is_empty());

        // A dominated point is never a corner.
        let p = build_polyhedron(&support(&[(1, 1, 1, 1), (3, 2, 5, 1)])).unwrap();
        assert_eq!(p.hull_vertices, vec![(1, 1)]);
    }

    #[test]
    fn newton_distance_examples() {
        assert_eq!(newton_distance(&s_xxy_xyy(1)).unwrap(), rat(3, 2));
        assert_eq!(newton_distance(&s_xxy_xyy(-1)).unwrap(), rat(3, 2));
        assert_eq!(newton_distance(&s_xxy_yy(1)).unwrap(), rat(4, 3));
        assert_eq!(newton_distance(&s_xxy_yy(-1)).unwrap(), rat(4, 3));
        assert_eq!(newton_distance(&s_xxy_yy_x4(1, 1)).unwrap(), rat(4, 3));
        assert_eq!(newton_distance(&s_xxy_yy_x4(-1, -1)).unwrap(), rat(4, 3));
        assert_eq!(
            newton_distance(&support(&[(3, 0, 1, 1)])).unwrap(),
            rat(3, 1)
        );
        assert_eq!(
            newton_distance(&support(&[(2, 1, 1, 1)])).unwrap(),
            rat(2, 1)
        );
        assert_eq!(
            newton_distance(&support(&[(2, 2, 1, 1)])).unwrap(),
            rat(2, 1)
        );
    }

    #[test]
    fn principal_faces_and_restrictions() {
        // Diagonal crosses the edge interior; both terms survive.
        let p = build_polyhedron(&s_xxy_xyy(1)).unwrap();
        match &p.principal_face {
            Face::Edge { from, to, line } => {
                assert_eq!((*from, *to), ((1, 2), (2, 1)));
                assert_eq!(*line, (1, 1, 3));
            }
            other => panic!("expected edge face, got {other:?}"),
        }
        assert_eq!(p.codim, 1);
        let r = restrict(&s_xxy_xyy(1), &p.principal_face).unwrap();
        assert_eq!(r.len(), 2);

        // The long edge keeps all three terms, including the non-corner one.
        let s = s_xxy_yy_x4(1, 1);
        let p = build_polyhedron(&s).unwrap();
        let r = restrict(&s, &p.principal_face).unwrap();
        assert_eq!(r.len(), 3);

        // Distance 3 sits on the vertical ray above the corner (3, 0); the
        // restriction is still the monomial itself.
        let s = support(&[(3, 0, 1, 1)]);
        let p = build_polyhedron(&s).unwrap();
        match &p.principal_face {
            Face::Ray { from, vertical } => {
                assert_eq!(*from, (3, 0));
                assert!(*vertical);
            }
            other => panic!("expected ray face, got {other:?}"),
        }
        let r = restrict(&s, &p.principal_face).unwrap();
        assert_eq!(r.terms().keys().copied().collect::<Vec<_>>(), vec![(3, 0)]);

        // Horizontal-ray counterpart.
        let s = support(&[(1, 3, 1, 1)]);
        let p = build_polyhedron(&s).unwrap();
        match &p.principal_face {
            Face::Ray { from, vertical } => {
                assert_eq!(*from, (1, 3));
                assert!(!*vertical);
            }
            other => panic!("expected ray face, got {other:?}"),
        }

        // Corner on the diagonal.
        let p = build_polyhedron(&support(&[(2, 2, 1, 1)])).unwrap();
        assert_eq!(p.principal_face, Face::Vertex { at: (2, 2) });
        assert_eq!(p.codim, 2);
    }

    #[test]
    fn adaptedness_examples() {
        // Section roots all simple: adapted.
        assert_eq!(adapted_check(&s_xxy_xyy(1)).unwrap(), Adapted::Yes);
        assert_eq!(adapted_check(&s_xxy_xyy(-1)).unwrap(), Adapted::Yes);
        assert_eq!(adapted_check(&s_xxy_yy(1)).unwrap(), Adapted::Yes);
        assert_eq!(adapted_check(&s_xxy_yy(-1)).unwrap(), Adapted::Yes);
        assert_eq!(adapted_check(&s_xxy_yy_x4(1, 1)).unwrap(), Adapted::Yes);

        // (x² − y)²: the section (1 − y)² has the double root 1 ≥ 4/3.
        let sq = support(&[(4, 0, 1, 1), (2, 1, -2, 1), (0, 2, 1, 1)]);
        assert_eq!(newton_distance(&sq).unwrap(), rat(4, 3));
        assert_eq!(adapted_check(&sq).unwrap(), Adapted::No);

        // Unbounded principal face: the criterion does not apply.
        assert_eq!(
            adapted_check(&support(&[(2, 1, 1, 1)])).unwrap(),
            Adapted::Unknown
        );
        assert_eq!(
            adapted_check(&support(&[(3, 0, 1, 1)])).unwrap(),
            Adapted::Unknown
        );

        // Corner face is always adapted.
        assert_eq!(
            adapted_check(&support(&[(2, 2, 1, 1)])).unwrap(),
            Adapted::Yes
        );
    }

    #[test]
    fn decay_pair_examples() {
        assert_eq!(
            decay_pair(&s_xxy_xyy(1)).unwrap(),
            (rat(-2, 3), Rat::ZERO)
        );
        assert_eq!(
            decay_pair(&s_xxy_xyy(-1)).unwrap(),
            (rat(-2, 3), Rat::ZERO)
        );
        assert_eq!(decay_pair(&s_xxy_yy(1)).unwrap(), (rat(-3, 4), Rat::ZERO));
        assert_eq!(decay_pair(&s_xxy_yy(-1)).unwrap(), (rat(-3, 4), Rat::ZERO));
        assert_eq!(
            decay_pair(&s_xxy_yy_x4(1, 1)).unwrap(),
            (rat(-3, 4), Rat::ZERO)
        );

        // No certificate for unbounded faces, corners, or non-adapted input.
        assert!(decay_pair(&support(&[(3, 0, 1, 1)])).is_err());
        assert!(decay_pair(&support(&[(2, 2, 1, 1)])).is_err());
        let sq = support(&[(4, 0, 1, 1), (2, 1, -2, 1), (0, 2, 1, 1)]);
        assert!(decay_pair(&sq).is_err());
    }

    #[test]
    fn monomial_decay_table() {
        assert!(monomial_decay(0).is_err());
        assert_eq!(monomial_decay(1).unwrap(), (rat(-1, 1), Rat::ZERO));
        assert_eq!(monomial_decay(2).unwrap(), (rat(-1, 2), Rat::ZERO));
        assert_eq!(monomial_decay(3).unwrap(), (rat(-1, 3), Rat::ZERO));
        assert_eq!(monomial_decay(7).unwrap(), (rat(-1, 7), Rat::ZERO));
    }

    // ------------------------------------------------------------------
    // Quadrature cross-checks: the certified exponents must show up in the
    // measured decay of oscillatory integrals with these phases.
    // ------------------------------------------------------------------

    const R_IN: f64 = 0.45;
    const R_OUT: f64 = 0.9;

    fn bump(r: f64) -> f64 {
        if r <= R_IN {
            1.0
        } else if r >= R_OUT {
            0.0
        } else {
            smooth_step((R_OUT - r) / (R_OUT - R_IN))
        }
    }

    /// Midpoint rule for `∫ bump(|x|) e^{iτP(x)} dx` over the plane.
    fn quad2(phase: &TaylorSupport2D, tau: f64, n: usize) -> (C64, f64) {
        let h = 2.0 * R_OUT / n as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        let mut mass = 0.0;
        for i in 0..n {
            let x = -R_OUT + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = -R_OUT + (j as f64 + 0.5) * h;
                let z = bump(libm::sqrt(x * x + y * y));
                if z == 0.0 {
                    continue;
                }
                let p = tau * phase.eval(x, y);
                re += z * libm::cos(p);
                im += z * libm::sin(p);
                mass += z;
            }
        }
        let w = h * h;
        (C64::new(re * w, im * w), mass * w)
    }

    /// Doubling-certified evaluation; `∇P` is probed on a coarse grid to
    /// choose the starting mesh.
    fn j2(phase: &TaylorSupport2D, tau: f64) -> C64 {
        let mut gmax: f64 = 0.0;
        let probe = 33;
        for i in 0..probe {
            for j in 0..probe {
                let x = -R_OUT + 2.0 * R_OUT * (i as f64 + 0.5) / probe as f64;
                let y = -R_OUT + 2.0 * R_OUT * (j as f64 + 0.5) / probe as f64;
                let e = 1e-5;
                let gx = (phase.eval(x + e, y) - phase.eval(x - e, y)) / (2.0 * e);
                let gy = (phase.eval(x, y + e) - phase.eval(x, y - e)) / (2.0 * e);
                gmax = gmax.max(libm::sqrt(gx * gx + gy * gy));
            }
        }
        let waves = tau * gmax * 2.0 * R_OUT / (2.0 * core::f64::consts::PI);
        let mut n = ((4.0 * waves) as usize).max(48);
        let (mut val, mass) = quad2(phase, tau, n);
        for _ in 0..4 {
            n *= 2;
            let (next, _) = quad2(phase, tau, n);
            let delta = (next - val).norm();
            val = next;
            if delta <= 1e-6 * val.norm().max(1e-9 * mass) {
                return val;
            }
        }
        panic!("2d quadrature failed to settle at tau = {tau}");
    }

    fn fitted_slope(values: &[(f64, f64)]) -> f64 {
        let xs: Vec<f64> = values.iter().map(|&(t, _)| libm::log(t)).collect();
        let ys: Vec<f64> = values.iter().map(|&(_, v)| libm::log(v)).collect();
        least_squares_slope(&xs, &ys).expect("slope fit").0
    }

    #[test]
    fn model_phases_decay_at_their_certified_rates() {
        let models: Vec<(&str, TaylorSupport2D)> = vec![
            ("x2y+xy2", s_xxy_xyy(1)),
            ("x2y-xy2", s_xxy_xyy(-1)),
            ("x2y+y2", s_xxy_yy(1)),
            ("x2y-y2", s_xxy_yy(-1)),
            ("x2y+y2+x4", s_xxy_yy_x4(1, 1)),
            ("x2y-y2-x4", s_xxy_yy_x4(-1, -1)),
        ];
        for (label, phase) in &models {
            let (beta, _) = decay_pair(phase).unwrap();
            let mut samples = Vec::new();
            for k in 0..8 {
                let tau = 30.0 * libm::pow(2.0, k as f64 / 2.0);
                let v = j2(phase, tau).norm();
                assert!(v > 1e-12, "{label}: integral vanished at tau = {tau}");
                samples.push((tau, v));
            }
            let slope = fitted_slope(&samples);
            let cap = beta.to_f64() + 0.1;
            assert!(
                slope <= cap,
                "{label}: measured decay {slope:.4} exceeds certified cap {cap:.4}"
            );
        }
    }

    #[test]
    fn monomial_phases_decay_at_the_one_variable_rate() {
        // 1D counterpart of the quadrature above, for phases x^k.
        let quad1 = |k: u32, tau: f64, n: usize| -> (C64, f64) {
            let h = 2.0 * R_OUT / n as f64;
            let mut re = 0.0;
            let mut im = 0.0;
            let mut mass = 0.0;
            for i in 0..n {
                let x = -R_OUT + (i as f64 + 0.5) * h;
                let z = bump(libm::fabs(x));
                if z == 0.0 {
                    continue;
                }
                let p = tau * libm::pow(x, k as f64);
                re += z * libm::cos(p);
                im += z * libm::sin(p);
                mass += z;
            }
            (C64::new(re * h, im * h), mass * h)
        };
        for k in [2u32, 3] {
            let (beta, _) = monomial_decay(k).unwrap();
            let mut samples = Vec::new();
            for step in 0..8 {
                let tau = 30.0 * libm::pow(2.0, step as f64 / 2.0);
                let waves = tau * k as f64 * libm::pow(R_OUT, (k - 1) as f64) * 2.0 * R_OUT
                    / (2.0 * core::f64::consts::PI);
                let mut n = ((4.0 * waves) as usize).max(64);
                let (mut val, mass) = quad1(k, tau, n);
                let mut settled = false;
                for _ in 0..4 {
                    n *= 2;
                    let (next, _) = quad1(k, tau, n);
                    let delta = (next - val).norm();
                    val = next;
                    if delta <= 1e-6 * val.norm().max(1e-9 * mass) {
                        settled = true;
                        break;
                    }
                }
                assert!(settled, "1d quadrature failed to settle at tau = {tau}");
                samples.push((tau, val.norm()));
            }
            let slope = fitted_slope(&samples);
            let cap = beta.to_f64() + 0.1;
            assert!(
                slope <= cap,
                "x^{k}: measured decay {slope:.4} exceeds cap {cap:.4}"
            );
        }
    }

    // ------------------------------------------------------------------
    // Structural invariants.
    // ------------------------------------------------------------------

    /// Strategy: a small valid support with nonzero rational coefficients.
    fn arb_support() -> impl Strategy<Value = Vec<((u32, u32), Rat)>> {
        proptest::collection::vec(
            ((0u32..7, 0u32..7), (-5i128..6, 1i128..4)),
            1..7,
        )
        .prop_map(|raw| {
            let mut seen = BTreeMap::new();
            for ((g1, g2), (n, d)) in raw {
                if g1 + g2 < 2 || n == 0 {
                    continue;
                }
                seen.entry((g1, g2)).or_insert_with(|| rat(n, d));
            }
            seen.into_iter().collect::<Vec<_>>()
        })
        .prop_filter("needs at least one valid term", |v| !v.is_empty())
    }

    proptest! {
        #[test]
        fn distance_is_at_least_one_and_on_the_boundary(entries in arb_support()) {
            let s = TaylorSupport2D::new(&entries).unwrap();
            let p = build_polyhedron(&s).unwrap();
            let d = p.newton_distance;
            prop_assert!(d >= Rat::ONE);

            // (d, d) satisfies every constraint; (d − ε, d − ε) breaks one.
            let x_min = Rat::from_int(p.hull_vertices[0].0 as i64);
            let y_min =
                Rat::from_int(p.hull_vertices[p.hull_vertices.len() - 1].1 as i64);
            let inside = |t: Rat| -> bool {
                t >= x_min
                    && t >= y_min
                    && p.compact_edges.iter().all(|&(_, _, (a, b, c))| {
                        Rat::from_int(a + b) * t >= Rat::from_int(c)
                    })
            };
            prop_assert!(inside(d));
            prop_assert!(!inside(d - rat(1, 1000)));
        }

        #[test]
        fn every_support_point_is_inside_the_hull_region(entries in arb_support()) {
            let s = TaylorSupport2D::new(&entries).unwrap();
            let p = build_polyhedron(&s).unwrap();
            let x_min = p.hull_vertices[0].0 as i64;
            let y_min = p.hull_vertices[p.hull_vertices.len() - 1].1 as i64;
            for &(g1, g2) in s.terms().keys() {
                prop_assert!(g1 as i64 >= x_min);
                prop_assert!(g2 as i64 >= y_min);
                for &(_, _, (a, b, c)) in &p.compact_edges {
                    prop_assert!(a * g1 as i64 + b * g2 as i64 >= c);
                }
            }
        }

        #[test]
        fn adding_a_term_never_increases_the_distance(
            entries in arb_support(),
            extra in (0u32..7, 0u32..7),
            coeff in 1i128..5,
        ) {
            let s = TaylorSupport2D::new(&entries).unwrap();
            let d0 = build_polyhedron(&s).unwrap().newton_distance;
            prop_assume!(extra.0 + extra.1 >= 2);
            prop_assume!(!s.terms().contains_key(&extra));
            let mut bigger = entries.clone();
            bigger.push((extra, rat(coeff, 1)));
            let s2 = TaylorSupport2D::new(&bigger).unwrap();
            let d1 = build_polyhedron(&s2).unwrap().newton_distance;
            prop_assert!(d1 <= d0);
        }

        #[test]
        fn hull_and_distance_ignore_coefficient_values(
            entries in arb_support(),
            seeds in proptest::collection::vec((1i128..9, 1i128..5), 8),
        ) {
            let s = TaylorSupport2D::new(&entries).unwrap();
            let p0 = build_polyhedron(&s).unwrap();
            let rescaled: Vec<((u32, u32), Rat)> = entries
                .iter()
                .enumerate()
                .map(|(i, &(g, _))| {
                    let (n, d) = seeds[i % seeds.len()];
                    (g, rat(n, d))
                })
                .collect();
            let p1 = build_polyhedron(&TaylorSupport2D::new(&rescaled).unwrap()).unwrap();
            prop_assert_eq!(p0.hull_vertices, p1.hull_vertices);
            prop_assert_eq!(p0.compact_edges, p1.compact_edges);
            prop_assert_eq!(p0.newton_distance, p1.newton_distance);
        }
    }
}
