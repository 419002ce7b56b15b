//! AFDM radar symbols, OFDM communication symbols, chirp special cases,
//! prefix handling and the pilot/guard grid of the radar frame.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::signal::{Domain, Signal};
use crate::transforms::{idaft, idft, DaftParams};

/// QAM constellation used on data carriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModAlphabet {
    /// Constellation size: 4, 16 or 64.
    pub order: u32,
    /// Normalize to unit average symbol energy.
    pub unit_power: bool,
}

impl ModAlphabet {
    pub fn qpsk() -> Self {
        Self {
            order: 4,
            unit_power: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.order {
            4 | 16 | 64 => Ok(()),
            o => Err(Error::Config(format!("unsupported QAM order {o}"))),
        }
    }

    /// Draw one symbol, uniformly over the constellation.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let side = (self.order as f64).sqrt() as i64; // 2, 4 or 8
        let i = rng.random_range(0..side) * 2 - (side - 1);
        let q = rng.random_range(0..side) * 2 - (side - 1);
        let mut s = Complex64::new(i as f64, q as f64);
        if self.unit_power {
            // E|s|^2 over the square grid is 2(M-1)/3
            s /= (2.0 * (self.order as f64 - 1.0) / 3.0).sqrt();
        }
        s
    }

    /// Average constellation energy.
    pub fn mean_energy(&self) -> f64 {
        if self.unit_power {
            1.0
        } else {
            2.0 * (self.order as f64 - 1.0) / 3.0
        }
    }
}

/// Pilot/guard layout of one AFDM radar symbol in the affine domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotLayout {
    /// Number of pilot carriers.
    pub n_pilots: usize,
    /// Linear power per pilot, |x_r^p|^2.
    pub pilot_power: f64,
    /// Guard carriers left empty on each side of every pilot.
    pub guard_size: usize,
    /// Fill remaining carriers with random data symbols.
    pub data_fill: bool,
}

impl PilotLayout {
    pub fn validate(&self, n_r: usize) -> Result<()> {
        if self.n_pilots == 0 || self.n_pilots > n_r {
            return Err(Error::Config(format!(
                "pilot count {} out of range for {n_r} carriers",
                self.n_pilots
            )));
        }
        if (1 + 2 * self.guard_size) * self.n_pilots > n_r {
            return Err(Error::Config(
                "pilot guards overlap adjacent pilots".into(),
            ));
        }
        if self.pilot_power <= 0.0 {
            return Err(Error::Config("pilot power must be positive".into()));
        }
        Ok(())
    }

    /// Equidistant pilot indices: spacing floor(n_r / n_pilots); when n_r is
    /// not divisible, the last gap absorbs the remainder.
    pub fn pilot_indices(&self, n_r: usize) -> Vec<usize> {
        let spacing = n_r / self.n_pilots;
        (0..self.n_pilots).map(|i| i * spacing).collect()
    }
}

/// AFDM radar-side dimensioning.
#[derive(Debug, Clone, PartialEq)]
pub struct AfdmConfig {
    /// Subcarrier count N_r.
    pub n_r: usize,
    /// AFDM symbols per PRI, M_r.
    pub m_r: usize,
    pub c1: Ratio<i64>,
    pub c2: Ratio<i64>,
    /// Chirp-periodic prefix length in samples.
    pub l_cpp: usize,
    pub pilot_layout: PilotLayout,
    pub alphabet: ModAlphabet,
}

impl AfdmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_r == 0 {
            return Err(Error::Config("m_r must be >= 1".into()));
        }
        if self.l_cpp >= self.n_r {
            return Err(Error::Config("l_cpp must be < n_r".into()));
        }
        self.pilot_layout.validate(self.n_r)?;
        self.alphabet.validate()?;
        self.daft_params().map(|_| ())
    }

    pub fn daft_params(&self) -> Result<DaftParams> {
        DaftParams::new(self.n_r, self.c1, self.c2)
    }
}

/// OFDM communication-side dimensioning.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmConfig {
    /// Subcarrier count N_c.
    pub n_c: usize,
    /// OFDM symbols per PRI, M_c.
    pub m_c: usize,
    /// Cyclic prefix length in samples.
    pub l_cp: usize,
    /// Pilot carriers per OFDM symbol (accounting only; pilots carry
    /// ordinary unit-power symbols here).
    pub n_c_pilots: usize,
    pub alphabet: ModAlphabet,
}

impl OfdmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_c == 0 || self.m_c == 0 {
            return Err(Error::Config("OFDM dimensions must be >= 1".into()));
        }
        if self.l_cp >= self.n_c {
            return Err(Error::Config("l_cp must be < n_c".into()));
        }
        if self.n_c_pilots > self.n_c {
            return Err(Error::Config("n_c_pilots must be <= n_c".into()));
        }
        self.alphabet.validate()
    }
}

/// IDAFT synthesis of one AFDM symbol from its affine-domain data vector.
pub fn gen_afdm_symbol(data: &[Complex64], cfg: &AfdmConfig) -> Result<Signal> {
    if data.len() != cfg.n_r {
        return Err(Error::Dimension {
            expected: cfg.n_r,
            got: data.len(),
        });
    }
    let p = cfg.daft_params()?;
    idaft(&Signal::new(data.to_vec(), Domain::Affine), &p)
}

/// Prepend the chirp-periodic prefix:
/// s[n] = s[N+n] * exp(-j*2*pi*c1*(N^2 + 2*N*n)) for n in [-L_cpp, 0).
/// Reduces to a plain cyclic prefix when N is even and 2*N*c1 is integer.
pub fn append_cpp(s: &Signal, cfg: &AfdmConfig) -> Result<Signal> {
    if s.len() != cfg.n_r {
        return Err(Error::Dimension {
            expected: cfg.n_r,
            got: s.len(),
        });
    }
    let n = cfg.n_r as i64;
    let mut out = Vec::with_capacity(cfg.n_r + cfg.l_cpp);
    for k in 0..cfg.l_cpp {
        let neg = k as i64 - cfg.l_cpp as i64; // n in [-L_cpp, 0)
        let src = (n + neg) as usize;
        out.push(s.samples[src] * cpp_phase(cfg.c1, n, neg));
    }
    out.extend_from_slice(&s.samples);
    Ok(Signal::time(out))
}

/// exp(-j*2*pi*c1*(N^2 + 2*N*n)), reduced mod 1 exactly.
fn cpp_phase(c1: Ratio<i64>, n: i64, neg: i64) -> Complex64 {
    if c1.is_zero() {
        return Complex64::new(1.0, 0.0);
    }
    let p = *c1.numer() as i128;
    let q = *c1.denom() as i128;
    let arg = (n as i128) * (n as i128) + 2 * (n as i128) * (neg as i128);
    let frac = ((p * arg.rem_euclid(q)).rem_euclid(q)) as f64 / q as f64;
    Complex64::from_polar(1.0, -TAU * frac)
}

/// IDFT synthesis of one OFDM symbol from its frequency-domain data vector.
pub fn gen_ofdm_symbol(data: &[Complex64], cfg: &OfdmConfig) -> Result<Signal> {
    if data.len() != cfg.n_c {
        return Err(Error::Dimension {
            expected: cfg.n_c,
            got: data.len(),
        });
    }
    idft(&Signal::new(data.to_vec(), Domain::Frequency))
}

/// Prepend the cyclic prefix: the last l_cp samples, verbatim.
pub fn append_cp(s: &Signal, cfg: &OfdmConfig) -> Result<Signal> {
    if s.len() != cfg.n_c {
        return Err(Error::Dimension {
            expected: cfg.n_c,
            got: s.len(),
        });
    }
    let mut out = Vec::with_capacity(cfg.n_c + cfg.l_cp);
    out.extend_from_slice(&s.samples[cfg.n_c - cfg.l_cp..]);
    out.extend_from_slice(&s.samples);
    Ok(Signal::time(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChirpKind {
    /// Single carrier activated at index 0.
    Lfm,
    /// Single carrier activated at the given affine index.
    LoRa(usize),
}

/// Single-carrier chirp: IDAFT of an impulse in the affine domain.
pub fn gen_chirp(kind: ChirpKind, cfg: &AfdmConfig) -> Result<Signal> {
    let m0 = match kind {
        ChirpKind::Lfm => 0,
        ChirpKind::LoRa(m0) => {
            if m0 >= cfg.n_r {
                return Err(Error::Config(format!(
                    "chirp carrier index {m0} out of range [0, {})",
                    cfg.n_r
                )));
            }
            m0
        }
    };
    let mut data = vec![Complex64::zero(); cfg.n_r];
    data[m0] = Complex64::new(1.0, 0.0);
    gen_afdm_symbol(&data, cfg)
}

/// Affine-domain data vector for one radar symbol: real positive pilots of
/// amplitude sqrt(pilot_power) at equidistant indices, zeros in the guards,
/// and (optionally) unit-power random data elsewhere.
pub fn build_pilot_grid<R: Rng + ?Sized>(
    layout: &PilotLayout,
    cfg: &AfdmConfig,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    layout.validate(cfg.n_r)?;
    let n_r = cfg.n_r;
    let mut grid = vec![Complex64::zero(); n_r];
    let mut reserved = vec![false; n_r];
    let amp = layout.pilot_power.sqrt();
    for &idx in &layout.pilot_indices(n_r) {
        grid[idx] = Complex64::new(amp, 0.0);
        reserved[idx] = true;
        for g in 1..=layout.guard_size {
            reserved[(idx + g) % n_r] = true;
            reserved[(idx + n_r - g) % n_r] = true;
        }
    }
    if layout.data_fill {
        for (i, r) in reserved.iter().enumerate() {
            if !r {
                grid[i] = cfg.alphabet.sample(rng);
            }
        }
    }
    Ok(grid)
}
