//! Discrete affine Fourier transform (DAFT) and plain DFT kernels.
//!
//! The production DAFT path is the diag-phase / DFT / diag-phase
//! decomposition, O(N log N). A literal O(N^2) kernel summation
//! (`daft_direct`) is kept as an independent oracle for tests.
//!
//! All transforms use the symmetric 1/sqrt(N) normalization, so every
//! forward/inverse pair is unitary.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Zero;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::signal::{Domain, Signal};

/// DAFT sizing and refining coefficients.
///
/// `c1` and `c2` are kept as exact rationals so the `2*n*c1` integrality
/// condition can be checked without floating-point slop, and so quadratic
/// phases can be reduced mod 1 exactly even for large sample indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DaftParams {
    n: usize,
    c1: Ratio<i64>,
    c2: Ratio<i64>,
}

impl DaftParams {
    pub fn new(n: usize, c1: Ratio<i64>, c2: Ratio<i64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("transform size must be >= 1".into()));
        }
        if c1 < Ratio::zero() || c2 < Ratio::zero() {
            return Err(Error::Config("refining coefficients must be >= 0".into()));
        }
        let two_n_c1 = c1 * Ratio::from_integer(2 * n as i64);
        if !two_n_c1.is_integer() {
            return Err(Error::Config(format!(
                "2*n*c1 must be an integer, got {two_n_c1}"
            )));
        }
        Ok(Self { n, c1, c2 })
    }

    /// Plain DFT parameters: c1 = c2 = 0.
    pub fn dft(n: usize) -> Result<Self> {
        Self::new(n, Ratio::zero(), Ratio::zero())
    }

    /// The usual AFDM choice c1 = k/(2n), c2 = 1/n^2.
    pub fn afdm(n: usize, k: i64) -> Result<Self> {
        Self::new(
            n,
            Ratio::new(k, 2 * n as i64),
            Ratio::new(1, (n * n) as i64),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c1(&self) -> Ratio<i64> {
        self.c1
    }

    pub fn c2(&self) -> Ratio<i64> {
        self.c2
    }

    /// The integer 2*n*c1, the affine-domain shift per unit delay.
    pub fn coupled_shift_per_delay(&self) -> i64 {
        (self.c1 * Ratio::from_integer(2 * self.n as i64)).to_integer()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// exp(-j*2*pi * c * k^2), with the phase reduced mod 1 in exact rational
/// arithmetic before touching floating point.
fn quad_phase(c: Ratio<i64>, k: usize) -> Complex64 {
    if c.is_zero() {
        return Complex64::new(1.0, 0.0);
    }
    let p = *c.numer() as i128;
    let q = *c.denom() as i128;
    let k2 = (k as i128) * (k as i128) % q;
    let frac = ((p * k2) % q) as f64 / q as f64;
    Complex64::from_polar(1.0, -TAU * frac)
}

fn check_len(x: &Signal, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    Ok(())
}

/// Forward DAFT: diag(e^{-j2pi c2 m^2}) . F . diag(e^{-j2pi c1 n^2}),
/// with unit-normalized F. Matches the literal kernel
/// exp(-j2pi(c1 n^2 + nm/N + c2 m^2))/sqrt(N).
pub fn daft(x: &Signal, p: &DaftParams) -> Result<Signal> {
    check_len(x, p.n)?;
    let n = p.n;
    let mut buf: Vec<Complex64> = x
        .samples
        .iter()
        .enumerate()
        .map(|(i, &s)| s * quad_phase(p.c1, i))
        .collect();
    plan_forward(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= scale * quad_phase(p.c2, m);
    }
    let mut out = Signal::new(buf, Domain::Affine);
    out.meta = Some(*p);
    Ok(out)
}

/// Inverse DAFT: exact inverse of [`daft`] (conjugate phases, inverse DFT).
pub fn idaft(y: &Signal, p: &DaftParams) -> Result<Signal> {
    check_len(y, p.n)?;
    let n = p.n;
    let mut buf: Vec<Complex64> = y
        .samples
        .iter()
        .enumerate()
        .map(|(m, &s)| s * quad_phase(p.c2, m).conj())
        .collect();
    plan_inverse(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for (i, v) in buf.iter_mut().enumerate() {
        *v *= scale * quad_phase(p.c1, i).conj();
    }
    Ok(Signal::time(buf))
}

/// Literal O(N^2) evaluation of the DAFT kernel sum. Test oracle for
/// [`daft`]; not used on any production path.
pub fn daft_direct(x: &Signal, p: &DaftParams) -> Result<Signal> {
    check_len(x, p.n)?;
    let n = p.n;
    let nf = n as f64;
    let c1 = ratio_f64(p.c1);
    let c2 = ratio_f64(p.c2);
    let scale = 1.0 / nf.sqrt();
    let mut out = vec![Complex64::zero(); n];
    for (m, o) in out.iter_mut().enumerate() {
        let mf = m as f64;
        let mut acc = Complex64::zero();
        for (i, &s) in x.samples.iter().enumerate() {
            let t = i as f64;
            let phase = -TAU * (c1 * t * t + t * mf / nf + c2 * mf * mf);
            acc += s * Complex64::from_polar(1.0, phase);
        }
        *o = acc * scale;
    }
    let mut sig = Signal::new(out, Domain::Affine);
    sig.meta = Some(*p);
    Ok(sig)
}

pub fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Unit-normalized DFT.
pub fn dft(x: &Signal) -> Result<Signal> {
    if x.is_empty() {
        return Err(Error::Config("empty input".into()));
    }
    let n = x.len();
    let mut buf = x.samples.clone();
    plan_forward(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= scale;
    }
    Ok(Signal::new(buf, Domain::Frequency))
}

/// Unit-normalized inverse DFT.
pub fn idft(x: &Signal) -> Result<Signal> {
    if x.is_empty() {
        return Err(Error::Config("empty input".into()));
    }
    let n = x.len();
    let mut buf = x.samples.clone();
    plan_inverse(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= scale;
    }
    Ok(Signal::time(buf))
}
