//! Exact rational arithmetic and univariate polynomial algebra over ℚ:
//! reduced `i128` fractions, dense polynomials, Euclidean gcd, Yun
//! square-free decomposition, and Sturm real-root counting.
//!
//! Everything here is exact — overflow aborts loudly rather than wrapping —
//! so downstream combinatorial geometry can promise zero floating error.

use crate::err::{CoreError, CoreResult};
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rat {
    num: i128,
    den: i128,
}

impl Rat {
    /// Zero.
    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    /// One.
    pub const ONE: Rat = Rat { num: 1, den: 1 };

    /// Builds `num/den`, reduced, rejecting a zero denominator.
    pub fn new(num: i128, den: i128) -> CoreResult<Rat> {
        if den == 0 {
            return Err(CoreError::InvalidParameter(
                "rational denominator must be nonzero".into(),
            ));
        }
        Ok(Rat::reduced(num, den))
    }

    fn reduced(num: i128, den: i128) -> Rat {
        debug_assert!(den != 0);
        if num == 0 {
            return Rat::ZERO;
        }
        let g = gcd_i128(num, den);
        let s = if den < 0 { -1 } else { 1 };
        Rat {
            num: s * num / g,
            den: s * den / g,
        }
    }

    /// Integer embedding.
    pub fn from_int(i: i64) -> Rat {
        Rat {
            num: i as i128,
            den: 1,
        }
    }

    /// Numerator (after reduction; sign lives here).
    pub fn num(&self) -> i128 {
        self.num
    }

    /// Denominator (always positive).
    pub fn den(&self) -> i128 {
        self.den
    }

    /// True for 0.
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// −1, 0, or 1.
    pub fn signum(&self) -> i32 {
        match self.num.cmp(&0) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    /// Absolute value.
    pub fn abs(&self) -> Rat {
        Rat {
            num: self.num.abs(),
            den: self.den,
        }
    }

    /// Multiplicative inverse; error on zero.
    pub fn recip(&self) -> CoreResult<Rat> {
        if self.is_zero() {
            return Err(CoreError::InvalidParameter(
                "zero has no reciprocal".into(),
            ));
        }
        Ok(Rat::reduced(self.den, self.num))
    }

    /// Nearest double.
    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn checked_mul_i(a: i128, b: i128) -> i128 {
        a.checked_mul(b).expect("rational arithmetic overflowed i128")
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        let g = gcd_i128(self.den, rhs.den);
        let (da, db) = (self.den / g, rhs.den / g);
        let num = Rat::checked_mul_i(self.num, db)
            .checked_add(Rat::checked_mul_i(rhs.num, da))
            .expect("rational arithmetic overflowed i128");
        Rat::reduced(num, Rat::checked_mul_i(self.den, db))
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        self + (-rhs)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        // Cross-reduce first to keep intermediates small.
        let g1 = gcd_i128(self.num, rhs.den);
        let g2 = gcd_i128(rhs.num, self.den);
        Rat::reduced(
            Rat::checked_mul_i(self.num / g1, rhs.num / g2),
            Rat::checked_mul_i(self.den / g2, rhs.den / g1),
        )
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "rational division by zero");
        self * Rat::reduced(rhs.den, rhs.num)
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        Rat::checked_mul_i(self.num, other.den).cmp(&Rat::checked_mul_i(other.num, self.den))
    }
}

/// Dense univariate polynomial over ℚ, ascending coefficients, normalized
/// (no trailing zero coefficients; the zero polynomial has no coefficients).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    c: Vec<Rat>,
}

impl RatPoly {
    /// Builds from ascending coefficients; trailing zeros are trimmed.
    pub fn new(coeffs: Vec<Rat>) -> RatPoly {
        let mut c = coeffs;
        while c.last().is_some_and(Rat::is_zero) {
            c.pop();
        }
        RatPoly { c }
    }

    /// The zero polynomial.
    pub fn zero() -> RatPoly {
        RatPoly { c: Vec::new() }
    }

    /// A single term `coeff·x^k`.
    pub fn monomial(coeff: Rat, k: usize) -> RatPoly {
        if coeff.is_zero() {
            return RatPoly::zero();
        }
        let mut c = alloc::vec![Rat::ZERO; k + 1];
        c[k] = coeff;
        RatPoly { c }
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Ascending coefficients.
    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    /// Leading coefficient (zero polynomial → 0).
    pub fn lead(&self) -> Rat {
        self.c.last().copied().unwrap_or(Rat::ZERO)
    }

    /// Exact evaluation.
    pub fn eval(&self, x: Rat) -> Rat {
        let mut acc = Rat::ZERO;
        for &co in self.c.iter().rev() {
            acc = acc * x + co;
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> RatPoly {
        if self.c.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly::new(
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, &co)| co * Rat::from_int(i as i64 + 1))
                .collect(),
        )
    }

    /// Sum.
    pub fn add(&self, rhs: &RatPoly) -> RatPoly {
        let n = self.c.len().max(rhs.c.len());
        let mut c = alloc::vec![Rat::ZERO; n];
        for (i, &co) in self.c.iter().enumerate() {
            c[i] = c[i] + co;
        }
        for (i, &co) in rhs.c.iter().enumerate() {
            c[i] = c[i] + co;
        }
        RatPoly::new(c)
    }

    /// Difference.
    pub fn sub(&self, rhs: &RatPoly) -> RatPoly {
        self.add(&rhs.scale(-Rat::ONE))
    }

    /// Scalar multiple.
    pub fn scale(&self, k: Rat) -> RatPoly {
        RatPoly::new(self.c.iter().map(|&co| co * k).collect())
    }

    /// Product.
    pub fn mul(&self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut c = alloc::vec![Rat::ZERO; self.c.len() + rhs.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in rhs.c.iter().enumerate() {
                c[i + j] = c[i + j] + a * b;
            }
        }
        RatPoly::new(c)
    }

    /// Euclidean division: `self = q·rhs + r` with `deg r < deg rhs`.
    pub fn div_rem(&self, rhs: &RatPoly) -> CoreResult<(RatPoly, RatPoly)> {
        if rhs.is_zero() {
            return Err(CoreError::InvalidParameter(
                "polynomial division by zero".into(),
            ));
        }
        let dr = rhs.degree().expect("nonzero divisor");
        let lead_inv = rhs.lead().recip()?;
        let mut rem = self.c.clone();
        let mut quo = alloc::vec![Rat::ZERO; self.c.len().saturating_sub(dr)];
        while rem.len() > dr {
            let k = rem.len() - 1 - dr;
            let f = *rem.last().expect("nonempty remainder") * lead_inv;
            if !f.is_zero() {
                quo[k] = f;
                for (i, &co) in rhs.c.iter().enumerate() {
                    rem[k + i] = rem[k + i] - f * co;
                }
            }
            rem.pop();
            while rem.last().is_some_and(Rat::is_zero) {
                rem.pop();
            }
            if rem.len() <= dr {
                break;
            }
        }
        Ok((RatPoly::new(quo), RatPoly::new(rem)))
    }

    /// Monic rescaling (zero polynomial unchanged).
    pub fn monic(&self) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        self.scale(self.lead().recip().expect("nonzero lead"))
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, rhs: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor in gcd loop");
            a = b;
            b = r.monic(); // normalization keeps coefficient growth in check
        }
        a.monic()
    }

    /// Splits off the root at the origin: returns `(g, m)` with
    /// `self = x^m · g`, `g(0) ≠ 0` (zero polynomial → `(0, 0)`).
    pub fn strip_zero_root(&self) -> (RatPoly, usize) {
        if self.is_zero() {
            return (RatPoly::zero(), 0);
        }
        let m = self
            .c
            .iter()
            .position(|co| !co.is_zero())
            .expect("normalized nonzero polynomial");
        (RatPoly::new(self.c[m..].to_vec()), m)
    }

    /// Yun square-free decomposition: returns `(gᵢ, i)` pairs with
    /// `self = lead · Π gᵢ^i`, each `gᵢ` monic square-free, `deg gᵢ ≥ 1`.
    pub fn square_free(&self) -> CoreResult<Vec<(RatPoly, usize)>> {
        if self.is_zero() {
            return Err(CoreError::InvalidParameter(
                "square-free decomposition of the zero polynomial".into(),
            ));
        }
        let f = self.monic();
        if f.degree() == Some(0) {
            return Ok(Vec::new());
        }
        let df = f.derivative();
        let g = f.gcd(&df);
        let mut b = f.div_rem(&g)?.0;
        let mut d = df.div_rem(&g)?.0.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1usize;
        while b.degree().is_some_and(|dg| dg > 0) {
            let a = b.gcd(&d);
            if a.degree().is_some_and(|dg| dg > 0) {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a)?.0;
            let c = d.div_rem(&a)?.0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        Ok(out)
    }

    /// Number of distinct real roots, by Sturm's theorem on the square-free
    /// part.
    pub fn distinct_real_roots(&self) -> CoreResult<usize> {
        if self.is_zero() {
            return Err(CoreError::InvalidParameter(
                "root counting needs a nonzero polynomial".into(),
            ));
        }
        if self.degree() == Some(0) {
            return Ok(0);
        }
        let sf = {
            let g = self.gcd(&self.derivative());
            self.div_rem(&g)?.0
        };
        if sf.degree() == Some(0) {
            return Ok(0);
        }
        // Sturm chain.
        let mut chain = alloc::vec![sf.clone(), sf.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1])?;
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(-Rat::ONE));
        }
        let variations = |at_minus_inf: bool| {
            let mut count = 0usize;
            let mut last = 0i32;
            for p in &chain {
                let deg = p.degree().unwrap_or(0);
                let mut s = p.lead().signum();
                if at_minus_inf && deg % 2 == 1 {
                    s = -s;
                }
                if s != 0 {
                    if last != 0 && s != last {
                        count += 1;
                    }
                    last = s;
                }
            }
            count
        };
        Ok(variations(true) - variations(false))
    }

    /// True when the polynomial has a real root other than the origin.
    pub fn has_nonzero_real_root(&self) -> CoreResult<bool> {
        if self.is_zero() {
            return Err(CoreError::InvalidParameter(
                "root query needs a nonzero polynomial".into(),
            ));
        }
        let (g, _) = self.strip_zero_root();
        if g.degree() == Some(0) {
            return Ok(false);
        }
        Ok(g.distinct_real_roots()? > 0)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, co) in self.c.iter().enumerate().rev() {
            if co.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{co}")?,
                1 => write!(f, "({co})·x")?,
                _ => write!(f, "({co})·x^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Convenience constructor used across tests and the polyhedron module.
pub fn rat(num: i128, den: i128) -> Rat {
    Rat::new(num, den).unwrap_or_else(|_| panic!("bad literal rational {num}/{den}"))
}

/// Parses "n" or "n/d" into a rational.
pub fn parse_rat(text: &str) -> CoreResult<Rat> {
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: i128 = n
        .parse()
        .map_err(|_| CoreError::InvalidParameter(format!("bad rational numerator: {t}")))?;
    let den: i128 = d
        .parse()
        .map_err(|_| CoreError::InvalidParameter(format!("bad rational denominator: {t}")))?;
    Rat::new(num, den)
}
