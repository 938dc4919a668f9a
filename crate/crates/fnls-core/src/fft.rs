//! Mixed-radix FFT (factors 2/3/5) and the type-I discrete cosine transform.
//!
//! The transform lengths used by this crate are always 5-smooth (products of
//! 2, 3 and 5), which keeps the recursion simple while allowing grid sizes to
//! track analytically chosen resolutions much more tightly than powers of two.
//!
//! Conventions match the usual engineering ones: `forward` computes
//! `X[k] = Σ_j x[j]·exp(−2πi·jk/n)` with no scaling, `inverse` applies the
//! conjugate kernel and divides by `n`, so `inverse(forward(x)) == x`.
//!
//! [`Dct1Plan`] evaluates the unscaled DCT-I
//! `y[k] = a[0] + (−1)^k a[n] + 2·Σ_{j=1}^{n−1} a[j]·cos(πjk/n)`
//! on `n+1` points via an even extension to a length-`2n` FFT. Two real lines
//! can share one complex transform ([`Dct1Plan::execute_pair`]), which halves
//! the cost of the axis sweeps that dominate the dispersive-kernel engine.

use crate::err::{CoreError, CoreResult};
use crate::C64;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Returns true when `n ≥ 1` factors completely over {2, 3, 5}.
pub fn is_5_smooth(mut n: usize) -> bool {
    if n == 0 {
        return false;
    }
    for p in [2usize, 3, 5] {
        while n % p == 0 {
            n /= p;
        }
    }
    n == 1
}

/// Smallest 5-smooth even integer ≥ `n` (even so half-grids stay integral).
pub fn next_5_smooth_even(n: usize) -> usize {
    let mut m = n.max(2);
    if m % 2 == 1 {
        m += 1;
    }
    while !is_5_smooth(m) {
        m += 2;
    }
    m
}

/// Reusable FFT plan for one 5-smooth length.
///
/// Holds the twiddle table and a scratch buffer so repeated transforms of the
/// same length (the common case: line-by-line sweeps over a 3-D grid) do no
/// allocation.
pub struct FftPlan {
    n: usize,
    /// tw[i] = exp(−2πi·i/n), i ∈ [0, n)
    tw: Vec<C64>,
    scratch: Vec<C64>,
    /// Bit-reversal permutation (powers of two only; empty otherwise).
    bitrev: Vec<u32>,
}

impl FftPlan {
    /// Builds a plan for length `n`, which must be 5-smooth.
    pub fn new(n: usize) -> CoreResult<Self> {
        if !is_5_smooth(n) {
            return Err(CoreError::InvalidParameter(format!(
                "FFT length {n} is not a product of 2, 3 and 5"
            )));
        }
        let mut tw = Vec::with_capacity(n);
        for i in 0..n {
            // Computed per index (not by recurrence) to keep the table exact
            // to ~1 ulp; this runs once per plan.
            let ang = -2.0 * core::f64::consts::PI * (i as f64) / (n as f64);
            tw.push(C64::new(libm::cos(ang), libm::sin(ang)));
        }
        let bitrev = if n.is_power_of_two() && n >= 2 {
            let bits = n.trailing_zeros();
            (0..n as u32).map(|i| i.reverse_bits() >> (32 - bits)).collect()
        } else {
            Vec::new()
        };
        Ok(FftPlan {
            n,
            tw,
            scratch: vec![C64::new(0.0, 0.0); n],
            bitrev,
        })
    }

    /// Transform length.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the plan length is 1 (degenerate but allowed).
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unscaled forward transform, in place.
    pub fn forward(&mut self, data: &mut [C64]) {
        assert_eq!(data.len(), self.n, "FFT length mismatch");
        if self.n == 1 {
            return;
        }
        if !self.bitrev.is_empty() {
            self.forward_pow2(data);
            return;
        }
        self.scratch.copy_from_slice(data);
        // Split borrows: recursion reads `scratch`, writes `data`.
        let scratch = core::mem::take(&mut self.scratch);
        rec_fft(&scratch, 0, 1, data, 0, self.n, 1, &self.tw);
        self.scratch = scratch;
    }

    /// Iterative radix-2 path (hot loop of the split-step solver).
    fn forward_pow2(&mut self, data: &mut [C64]) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2usize;
        while len <= n {
            let half = len / 2;
            let tstep = n / len;
            let mut base = 0;
            while base < n {
                let mut tidx = 0usize;
                for k in 0..half {
                    let w = self.tw[tidx];
                    let lo = data[base + k];
                    let hi = data[base + k + half] * w;
                    data[base + k] = lo + hi;
                    data[base + k + half] = lo - hi;
                    tidx += tstep;
                }
                base += len;
            }
            len <<= 1;
        }
    }

    /// Inverse transform (conjugate kernel, scaled by 1/n), in place.
    pub fn inverse(&mut self, data: &mut [C64]) {
        for z in data.iter_mut() {
            *z = z.conj();
        }
        self.forward(data);
        let s = 1.0 / (self.n as f64);
        for z in data.iter_mut() {
            *z = C64::new(z.re * s, -z.im * s);
        }
    }
}

fn smallest_factor(n: usize) -> usize {
    for p in [2usize, 3, 5] {
        if n % p == 0 {
            return p;
        }
    }
    unreachable!("lengths are validated 5-smooth at plan construction")
}

/// Recursive decimation-in-time step.
///
/// Reads the length-`n` sequence `x[x0], x[x0+stride], …` and writes its DFT
/// into `y[y0 .. y0+n]`. `tmul = N/n` maps local twiddle exponents into the
/// root table `tw` (length N).
fn rec_fft(
    x: &[C64],
    x0: usize,
    stride: usize,
    y: &mut [C64],
    y0: usize,
    n: usize,
    tmul: usize,
    tw: &[C64],
) {
    if n == 1 {
        y[y0] = x[x0];
        return;
    }
    let r = smallest_factor(n);
    let m = n / r;
    for j in 0..r {
        rec_fft(x, x0 + j * stride, stride * r, y, y0 + j * m, m, tmul * r, tw);
    }
    // Combine: for each k, gather the r subtransform values, twiddle, and
    // apply an r-point DFT across blocks. The read and write index sets
    // {y0 + k + q·m : q} coincide, so this is safely in place per k.
    let nn = tw.len();
    let mut t = [C64::new(0.0, 0.0); 5];
    for k in 0..m {
        t[0] = y[y0 + k];
        for j in 1..r {
            t[j] = y[y0 + j * m + k] * tw[(j * k * tmul) % nn];
        }
        match r {
            2 => {
                y[y0 + k] = t[0] + t[1];
                y[y0 + m + k] = t[0] - t[1];
            }
            3 => {
                // ω3 = exp(−2πi/3): X1 = t0 + W3R·s + i·W3I·d, X2 the conjugate pairing,
                // with s = t1 + t2, d = t1 − t2.
                const W3R: f64 = -0.5;
                const W3I: f64 = -0.866_025_403_784_438_6;
                let s = t[1] + t[2];
                let d = t[1] - t[2];
                y[y0 + k] = t[0] + s;
                y[y0 + m + k] =
                    t[0] + C64::new(W3R * s.re - W3I * d.im, W3R * s.im + W3I * d.re);
                y[y0 + 2 * m + k] =
                    t[0] + C64::new(W3R * s.re + W3I * d.im, W3R * s.im - W3I * d.re);
            }
            5 => {
                // Generic 5-point DFT via the root table: ω5^(jq) = tw[jq·N/5].
                let step = nn / 5;
                for q in 0..5 {
                    let mut acc = t[0];
                    for j in 1..5 {
                        acc += t[j] * tw[((j * q) % 5) * step];
                    }
                    y[y0 + q * m + k] = acc;
                }
            }
            _ => unreachable!(),
        }
    }
}

/// Plan for the unscaled DCT-I on `n+1` points (`n ≥ 1`, `2n` 5-smooth).
pub struct Dct1Plan {
    n: usize,
    fft: FftPlan,
    buf: Vec<C64>,
}

impl Dct1Plan {
    /// `points` = n+1 is the line length; requires `2n` 5-smooth.
    pub fn new(points: usize) -> CoreResult<Self> {
        if points < 2 {
            return Err(CoreError::InvalidParameter(format!(
                "DCT-I needs at least 2 points, got {points}"
            )));
        }
        let n = points - 1;
        let fft = FftPlan::new(2 * n)?;
        Ok(Dct1Plan {
            n,
            fft,
            buf: vec![C64::new(0.0, 0.0); 2 * n],
        })
    }

    /// Line length n+1.
    pub fn points(&self) -> usize {
        self.n + 1
    }

    /// In-place DCT-I of one real line.
    pub fn execute(&mut self, a: &mut [f64]) {
        let n = self.n;
        assert_eq!(a.len(), n + 1, "DCT-I length mismatch");
        for j in 0..=n {
            self.buf[j] = C64::new(a[j], 0.0);
        }
        for j in 1..n {
            self.buf[2 * n - j] = C64::new(a[j], 0.0);
        }
        let mut buf = core::mem::take(&mut self.buf);
        self.fft.forward(&mut buf);
        for (k, ak) in a.iter_mut().enumerate() {
            *ak = buf[k].re;
        }
        self.buf = buf;
    }

    /// DCT-I of two real lines through one complex FFT (a + i·b packing).
    ///
    /// Exactly equivalent to calling [`Dct1Plan::execute`] on each line; the
    /// even symmetry of both extensions makes the spectra separable by a
    /// conjugate-symmetric split.
    pub fn execute_pair(&mut self, a: &mut [f64], b: &mut [f64]) {
        let n = self.n;
        assert_eq!(a.len(), n + 1, "DCT-I length mismatch");
        assert_eq!(b.len(), n + 1, "DCT-I length mismatch");
        for j in 0..=n {
            self.buf[j] = C64::new(a[j], b[j]);
        }
        for j in 1..n {
            self.buf[2 * n - j] = C64::new(a[j], b[j]);
        }
        let mut buf = core::mem::take(&mut self.buf);
        self.fft.forward(&mut buf);
        // Even real inputs give real spectra: F = A + iB with A, B real,
        // so A[k] = Re F[k] and B[k] = Im F[k].
        for k in 0..=n {
            a[k] = buf[k].re;
            b[k] = buf[k].im;
        }
        self.buf = buf;
    }
}
