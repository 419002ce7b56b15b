//! Post-coded time domain processing: the SIC output is brought back to
//! the time domain, reshaped into a square matrix, zero-padded, and spread
//! by column-wise IDFTs so delay and Doppler decouple onto the two axes.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::frame::FrameConfig;
use crate::signal::{Domain, Signal};
use crate::sic::SicResult;
use crate::transforms::{dft, idaft, idft, DaftParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PctdConfig {
    /// Zero-padding factor: the square matrix grows from sqrt(N_s) to
    /// z_p * sqrt(N_s) per side.
    pub z_p: usize,
    pub detector_pfa: f64,
}

impl PctdConfig {
    pub fn new(z_p: usize, detector_pfa: f64) -> Result<Self> {
        if z_p < 1 {
            return Err(Error::Config("z_p must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&detector_pfa) || detector_pfa == 0.0 {
            return Err(Error::Config("detector_pfa must lie in (0, 1)".into()));
        }
        Ok(Self { z_p, detector_pfa })
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, -1.0);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let m = self.at(r, c).norm();
                if m > best.2 {
                    best = (r, c, m);
                }
            }
        }
        best
    }
}

/// Smallest even integer square >= n.
pub fn next_even_square(n: usize) -> usize {
    let mut root = (n as f64).sqrt().ceil() as usize;
    if root % 2 == 1 {
        root += 1;
    }
    while root * root < n {
        root += 2;
    }
    root * root
}

/// Inverse-transform the locked span back to the time domain. The span
/// length rarely satisfies the 2*N*c1 integrality the transform needs, so
/// c1 is snapped to the nearest valid rational for this length; when the
/// span is the whole observation window the snap is exact.
pub fn to_time(res: &SicResult, cfg: &FrameConfig) -> Result<Signal> {
    let n = res.cleaned.len();
    if n == 0 {
        return Ok(Signal::time(Vec::new()));
    }
    let p = span_params(n, cfg)?;
    idaft(&res.cleaned, &p)
}

/// DAFT parameters for an arbitrary span length: c1 rounded to the nearest
/// k / (2n), keeping the radar c2.
pub fn span_params(n: usize, cfg: &FrameConfig) -> Result<DaftParams> {
    let c1 = cfg.afdm.c1;
    let k = (2.0 * n as f64 * (*c1.numer() as f64) / (*c1.denom() as f64)).round() as i64;
    DaftParams::new(n, num_rational::Ratio::new(k, 2 * n as i64), cfg.afdm.c2)
}

/// Pad to the next even perfect square and fill the sqrt(N_s) x sqrt(N_s)
/// block of an N_zp x N_zp matrix row by row, zeros elsewhere. Consecutive
/// samples run across a row, so each column samples the input decimated by
/// sqrt(N_s); the column IDFTs then resolve shifts finer than one sample.
pub fn reshape_zero_pad(r: &[Complex64], cfg: &PctdConfig) -> Matrix {
    let n_s = next_even_square(r.len());
    let root = (n_s as f64).sqrt() as usize;
    let n_zp = cfg.z_p * root;
    let mut m = Matrix::zeros(n_zp, n_zp);
    for (i, &v) in r.iter().enumerate() {
        m.set(i / root, i % root, v);
    }
    m
}

fn idft_columns(m: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(m.rows, m.cols);
    for c in 0..m.cols {
        let col: Vec<Complex64> = (0..m.rows).map(|r| m.at(r, c)).collect();
        let t = idft(&Signal::new(col, Domain::Frequency)).unwrap();
        for (r, v) in t.samples.iter().enumerate() {
            out.set(r, c, *v);
        }
    }
    out
}

fn pad_square(r: &[Complex64]) -> Vec<Complex64> {
    let mut v = r.to_vec();
    v.resize(next_even_square(r.len()), Complex64::zero());
    v
}

/// Doppler map: reshape, zero-pad, IDFT down the columns.
pub fn doppler_pctd(r: &Signal, cfg: &PctdConfig) -> Matrix {
    idft_columns(&reshape_zero_pad(&r.samples, cfg))
}

/// Delay map: DFT the whole (square-padded) vector first so delay turns
/// into a linear phase, then the same reshape / zero-pad / column IDFT.
pub fn delay_pctd(r: &Signal, cfg: &PctdConfig) -> Result<Matrix> {
    let spec = dft(&Signal::time(pad_square(&r.samples)))?;
    Ok(idft_columns(&reshape_zero_pad(&spec.samples, cfg)))
}

#[derive(Debug, Clone)]
pub struct RangeDopplerMap {
    pub doppler: Matrix,
    pub delay: Matrix,
    /// sqrt of the padded span length.
    pub root: usize,
    pub z_p: usize,
}

pub fn build_map(r: &Signal, cfg: &PctdConfig) -> Result<RangeDopplerMap> {
    let root = (next_even_square(r.len()) as f64).sqrt() as usize;
    Ok(RangeDopplerMap {
        doppler: doppler_pctd(r, cfg),
        delay: delay_pctd(r, cfg)?,
        root,
        z_p: cfg.z_p,
    })
}

/// Maps of a zero-delay, zero-Doppler copy of the transmitted frame,
/// processed identically to the measurement. Shifts are read off relative
/// to these, which absorbs the structural row offset of the reshape.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub map: RangeDopplerMap,
}

pub fn calibrate(reference: &Signal, cfg: &PctdConfig) -> Result<Calibration> {
    Ok(Calibration {
        map: build_map(reference, cfg)?,
    })
}

/// Coherent circular cross-correlation along the row axis, magnitude taken
/// per column and summed. A target shifted by s rows relative to the
/// calibration shows up as a peak at lag s.
pub fn shift_spectrum(meas: &Matrix, cal: &Matrix) -> Vec<f64> {
    let n = meas.rows;
    let mut out = vec![0.0; n];
    for c in 0..meas.cols {
        let a: Vec<Complex64> = (0..n).map(|p| cal.at(p, c)).collect();
        let b: Vec<Complex64> = (0..n).map(|p| meas.at(p, c)).collect();
        let fa = dft(&Signal::time(a)).unwrap();
        let fb = dft(&Signal::time(b)).unwrap();
        let prod: Vec<Complex64> = fa
            .samples
            .iter()
            .zip(&fb.samples)
            .map(|(x, y)| x.conj() * y)
            .collect();
        let corr = idft(&Signal::new(prod, Domain::Frequency)).unwrap();
        for (o, v) in out.iter_mut().zip(&corr.samples) {
            *o += v.norm();
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub range_m: f64,
    pub velocity_mps: f64,
    pub magnitude: f64,
    pub delay_bins: f64,
    pub doppler_bins: f64,
}

#[derive(Debug, Clone)]
pub struct Estimate {
    /// Sorted by magnitude, strongest first.
    pub detections: Vec<Detection>,
    pub threshold: f64,
    pub noise_sigma: f64,
}

/// Local maxima of a map above the Rayleigh constant-false-alarm threshold.
/// Returns the peaks (row, col, magnitude) and the threshold used.
pub fn map_detections(m: &Matrix, pfa: f64) -> (Vec<(usize, usize, f64)>, f64) {
    let mut mags: Vec<f64> = m.data.iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = mags[mags.len() / 2];
    let sigma = median / (4f64.ln()).sqrt();
    let zeta = sigma * (-pfa.ln()).sqrt();
    let mut peaks = Vec::new();
    for r in 0..m.rows {
        for c in 0..m.cols {
            let v = m.at(r, c).norm();
            if v <= zeta {
                continue;
            }
            let mut is_max = true;
            'nb: for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let rr = (r as i64 + dr).rem_euclid(m.rows as i64) as usize;
                    let cc = (c as i64 + dc).rem_euclid(m.cols as i64) as usize;
                    if m.at(rr, cc).norm() > v {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                peaks.push((r, c, v));
            }
        }
    }
    peaks.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap());
    (peaks, zeta)
}

/// Peaks of a shift spectrum above the exponential-tail threshold, with
/// successive cancellation of the calibration autocorrelation so one target
/// cannot register twice through its own sidelobes.
fn spectrum_peaks(spec: &[f64], auto: &[f64], pfa: f64, max_peaks: usize) -> (Vec<(usize, f64)>, f64, f64) {
    let n = spec.len();
    let mut sorted: Vec<f64> = spec.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pedestal = sorted[n / 2];
    let mut devs: Vec<f64> = spec.iter().map(|v| (v - pedestal).abs()).collect();
    devs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sigma = devs[n / 2] / 0.6745;
    let zeta = sigma * (-pfa.ln()).sqrt();

    let mut residual: Vec<f64> = spec.iter().map(|v| v - pedestal).collect();
    let auto_mean = auto.iter().sum::<f64>() / n as f64;
    let auto_peak = (auto[0] - auto_mean).max(f64::MIN_POSITIVE);
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    for _ in 0..max_peaks {
        // shoulders within one lag of an accepted peak are subtraction
        // leftovers of a fractional-lag mainlobe, not new scatterers
        let shadowed = |lag: usize| {
            peaks.iter().any(|&(p, _)| {
                let d = (lag as i64 - p as i64).rem_euclid(n as i64);
                d <= 1 || d >= n as i64 - 1
            })
        };
        let (lag, &val) = match residual
            .iter()
            .enumerate()
            .filter(|(s, _)| !shadowed(*s))
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        {
            Some(m) => m,
            None => break,
        };
        // dynamic-range floor: stop cleaning once candidates fall to the
        // residual pedestal left by earlier subtractions
        let floor = peaks.first().map_or(0.0, |&(_, v)| 0.1 * v);
        if val <= zeta || val <= 0.0 || val < floor {
            break;
        }
        peaks.push((lag, val));
        for (s, r) in residual.iter_mut().enumerate() {
            let d = (s as i64 - lag as i64).rem_euclid(n as i64) as usize;
            *r -= val * (auto[d] - auto_mean).max(0.0) / auto_peak;
        }
    }
    (peaks, zeta, sigma)
}

/// Quadratic-interpolated peak position for lags just off the fine grid.
fn refine_lag(spec: &[f64], lag: usize) -> f64 {
    let n = spec.len();
    let ym = spec[(lag + n - 1) % n];
    let y0 = spec[lag];
    let yp = spec[(lag + 1) % n];
    let denom = ym - 2.0 * y0 + yp;
    if denom.abs() < 1e-300 {
        return lag as f64;
    }
    let frac = 0.5 * (ym - yp) / denom;
    lag as f64 + frac.clamp(-0.5, 0.5)
}

fn wrap_signed(lag: f64, n: usize) -> f64 {
    let n = n as f64;
    let mut v = lag % n;
    if v > n / 2.0 {
        v -= n;
    }
    if v < -n / 2.0 {
        v += n;
    }
    v
}

/// Read delay and Doppler off the maps by matched correlation against the
/// calibration. Multiple targets are paired by rank, strongest first.
pub fn estimate(
    map: &RangeDopplerMap,
    cal: &Calibration,
    cfg: &PctdConfig,
    frame: &FrameConfig,
) -> Estimate {
    let z_p = cfg.z_p as f64;
    let n_s = (map.root * map.root) as f64;
    let d = frame.dims();

    let delay_spec = shift_spectrum(&map.delay, &cal.map.delay);
    let delay_auto = shift_spectrum(&cal.map.delay, &cal.map.delay);
    let (dpeaks, zeta, sigma) = spectrum_peaks(&delay_spec, &delay_auto, cfg.detector_pfa, 16);

    let dop_spec = shift_spectrum(&map.doppler, &cal.map.doppler);
    let dop_auto = shift_spectrum(&cal.map.doppler, &cal.map.doppler);
    let (kpeaks, _, _) = spectrum_peaks(&dop_spec, &dop_auto, cfg.detector_pfa, 16);

    let mut detections = Vec::new();
    for (i, &(lag, mag)) in dpeaks.iter().enumerate() {
        let delay_bins = refine_lag(&delay_spec, lag) / z_p;
        let dop_lag = kpeaks.get(i).map(|&(s, _)| refine_lag(&dop_spec, s)).unwrap_or(0.0);
        // row shift per unit Doppler is z_p * n_s / n_tot
        let doppler_bins = wrap_signed(dop_lag, map.doppler.rows) / z_p * d.n_tot as f64 / n_s;
        detections.push(Detection {
            range_m: delay_bins * crate::channel::SPEED_OF_LIGHT / (2.0 * frame.bandwidth_hz),
            velocity_mps: doppler_bins * crate::channel::SPEED_OF_LIGHT
                / (2.0 * frame.carrier_hz * d.t_tot),
            magnitude: mag,
            delay_bins,
            doppler_bins,
        });
    }
    Estimate {
        detections,
        threshold: zeta,
        noise_sigma: sigma,
    }
}
