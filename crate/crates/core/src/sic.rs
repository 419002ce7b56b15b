//! Affine-domain self-interference cancellation: projection, replica
//! subtraction, and iterative Kaiser windowing around detected peaks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::FrameConfig;
use crate::signal::{Domain, Signal};
use crate::transforms::{daft, DaftParams};

/// Threshold sequence over windowing iterations.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdSchedule {
    /// zeta_{u+1} = factor * zeta_u.
    Geometric { zeta1: f64, factor: f64 },
    Explicit(Vec<f64>),
}

impl ThresholdSchedule {
    pub fn zeta(&self, u: usize) -> f64 {
        match self {
            ThresholdSchedule::Geometric { zeta1, factor } => zeta1 * factor.powi(u as i32),
            ThresholdSchedule::Explicit(v) => v[u.min(v.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ThresholdSchedule::Geometric { zeta1, factor } => {
                if *zeta1 <= 0.0 || *factor <= 0.0 || *factor >= 1.0 {
                    return Err(Error::Config(
                        "geometric schedule needs zeta1 > 0 and factor in (0, 1)".into(),
                    ));
                }
            }
            ThresholdSchedule::Explicit(v) => {
                if v.is_empty() || v.windows(2).any(|w| w[1] >= w[0]) || v[v.len() - 1] <= 0.0 {
                    return Err(Error::Config(
                        "explicit schedule must be strictly decreasing and positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SicConfig {
    /// Residual SI amplitude factor left by replica subtraction.
    pub epsilon: f64,
    /// When set, non-peak bins of the output are the pre-windowing bins
    /// scaled to this suppression level (dB, power). When `None` the
    /// suppression is whatever the Kaiser windows actually achieve.
    pub epsilon_rho_db: Option<f64>,
    pub schedule: ThresholdSchedule,
    /// First-iteration window span.
    pub n_w: usize,
    /// Window span for later iterations.
    pub n_w_iter: usize,
    pub rho_max: usize,
    pub kaiser_beta: f64,
}

impl SicConfig {
    /// Spans tied to the radar burst length: n_w = 2 n_r_tot, n_w_iter =
    /// n_r_tot.
    pub fn for_frame(cfg: &FrameConfig, zeta1: f64) -> Self {
        let n_r_tot = cfg.dims().n_r_tot;
        SicConfig {
            epsilon: 0.0,
            epsilon_rho_db: None,
            schedule: ThresholdSchedule::Geometric { zeta1, factor: 0.5 },
            n_w: 2 * n_r_tot,
            n_w_iter: n_r_tot,
            rho_max: 8,
            kaiser_beta: 8.6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config("epsilon must lie in [0, 1]".into()));
        }
        if self.n_w < 2 || self.n_w_iter < 2 {
            return Err(Error::Config("window spans must be >= 2".into()));
        }
        if self.rho_max < 1 {
            return Err(Error::Config("rho_max must be >= 1".into()));
        }
        if self.kaiser_beta < 0.0 {
            return Err(Error::Config("kaiser_beta must be >= 0".into()));
        }
        self.schedule.validate()
    }
}

#[derive(Debug, Clone)]
pub struct SicResult {
    /// Affine-domain samples restricted to the locked span.
    pub cleaned: Signal,
    /// Locked span in observation-window bin coordinates.
    pub span: std::ops::Range<usize>,
    /// Detected peak indices (absolute bins) per iteration.
    pub peak_history: Vec<Vec<usize>>,
    pub iterations_used: usize,
    pub converged: bool,
}

impl SicResult {
    pub fn n_s(&self) -> usize {
        self.span.len()
    }

    pub fn final_peaks(&self) -> &[usize] {
        self.peak_history.last().map(|v| v.as_slice()).unwrap_or(&[])
    }

    fn empty() -> Self {
        SicResult {
            cleaned: Signal::new(Vec::new(), Domain::Affine),
            span: 0..0,
            peak_history: Vec::new(),
            iterations_used: 0,
            converged: true,
        }
    }
}

/// DAFT parameters sized to the observation window, reusing the radar c1/c2.
pub fn window_params(cfg: &FrameConfig) -> Result<DaftParams> {
    DaftParams::new(cfg.dims().n_obs, cfg.afdm.c1, cfg.afdm.c2)
}

/// Project the observation window into the affine domain.
pub fn project_affine(r: &Signal, p: &DaftParams) -> Result<Signal> {
    daft(r, p)
}

/// Subtract the known comm replica: y - (1 - eps) * beta * daft(replica).
/// With eps > 0 an eps-scaled copy of the SI survives, modeling imperfect
/// channel knowledge.
pub fn subtract_si(
    y: &Signal,
    si_replica_time: &Signal,
    beta: Complex64,
    eps: f64,
    p: &DaftParams,
) -> Result<Signal> {
    if y.domain != Domain::Affine {
        return Err(Error::Config("subtract_si expects an affine-domain input".into()));
    }
    let replica = daft(si_replica_time, p)?;
    if replica.len() != y.len() {
        return Err(Error::Dimension {
            expected: y.len(),
            got: replica.len(),
        });
    }
    let g = beta * (1.0 - eps);
    let out = y
        .samples
        .iter()
        .zip(&replica.samples)
        .map(|(a, b)| a - g * b)
        .collect();
    Ok(Signal::new(out, Domain::Affine))
}

/// Zeroth-order modified Bessel function of the first kind, by power series.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

/// Kaiser taper of length `n`: value 1 at index floor(n/2), 1/I0(beta_bar)
/// at index 0.
pub fn kaiser_window(n: usize, beta_bar: f64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let half = (n / 2) as f64;
    let denom = bessel_i0(beta_bar);
    (0..n)
        .map(|m| {
            let t = (m as f64 - half) / half;
            let radicand = (1.0 - t * t).max(0.0);
            bessel_i0(beta_bar * radicand.sqrt()) / denom
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeakSelection {
    /// Absolute bin indices, ascending.
    pub peaks: Vec<usize>,
    /// [first - n_w/2, last + n_w/2] clamped to the signal.
    pub span: std::ops::Range<usize>,
}

/// Threshold scan that also fixes the locked span for all later iterations.
pub fn initial_peak_select(y_bar: &Signal, zeta1: f64, n_w: usize) -> Result<PeakSelection> {
    let peaks: Vec<usize> = y_bar
        .samples
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() >= zeta1)
        .map(|(i, _)| i)
        .collect();
    if peaks.is_empty() {
        return Err(Error::NoDetection);
    }
    let lo = peaks[0].saturating_sub(n_w / 2);
    let hi = (peaks[peaks.len() - 1] + n_w / 2 + 1).min(y_bar.len());
    Ok(PeakSelection {
        peaks,
        span: lo..hi,
    })
}

/// Union-of-windows weight mask: each peak contributes a Kaiser taper of
/// length `wlen` centered on it; overlaps take the larger weight so nearby
/// peaks are not double-attenuated; bins outside every window get zero.
fn window_mask(len: usize, peaks: &[usize], wlen: usize, beta_bar: f64) -> Vec<f64> {
    let w = kaiser_window(wlen, beta_bar);
    let mut mask = vec![0.0f64; len];
    for &p in peaks {
        for (i, &wi) in w.iter().enumerate() {
            let idx = p as i64 + i as i64 - (wlen / 2) as i64;
            if (0..len as i64).contains(&idx) {
                let idx = idx as usize;
                if wi > mask[idx] {
                    mask[idx] = wi;
                }
            }
        }
    }
    mask
}

fn scan(samples: &[Complex64], span: &std::ops::Range<usize>, zeta: f64) -> Vec<usize> {
    span.clone()
        .filter(|&i| samples[i].norm() >= zeta)
        .collect()
}

/// Iterative windowing: wide windows around the first peak set, then
/// narrower rescans at geometrically reduced thresholds until the peak
/// count holds across two consecutive iterations.
pub fn iterative_windowing(y_bar: &Signal, cfg: &SicConfig) -> Result<SicResult> {
    cfg.validate()?;
    let n = y_bar.len();
    let sel = match initial_peak_select(y_bar, cfg.schedule.zeta(0), cfg.n_w) {
        Ok(sel) => sel,
        Err(Error::NoDetection) => return Ok(SicResult::empty()),
        Err(e) => return Err(e),
    };
    let span = sel.span.clone();
    let mut peaks = sel.peaks;
    let mut work = y_bar.samples.clone();
    let mut history = vec![peaks.clone()];
    let mut converged = false;
    let mut used = 1;

    let mask = window_mask(n, &peaks, cfg.n_w, cfg.kaiser_beta);
    for (v, m) in work.iter_mut().zip(&mask) {
        *v *= m;
    }

    for u in 1..cfg.rho_max {
        let next = scan(&work, &span, cfg.schedule.zeta(u));
        if next.len() == peaks.len() {
            converged = true;
            break;
        }
        peaks = next;
        history.push(peaks.clone());
        used = u + 1;
        let mask = window_mask(n, &peaks, cfg.n_w_iter, cfg.kaiser_beta);
        for (v, m) in work.iter_mut().zip(&mask) {
            *v *= m;
        }
    }
    if cfg.rho_max == 1 {
        converged = true;
    }

    let mut cleaned: Vec<Complex64> = work[span.clone()].to_vec();
    if let Some(db) = cfg.epsilon_rho_db {
        // analytic mode: non-peak bins carry the raw residual scaled to the
        // requested suppression level instead of the measured taper output
        let amp = 10f64.powf(db / 20.0);
        let peak_set: std::collections::HashSet<usize> = peaks.iter().copied().collect();
        for (off, v) in cleaned.iter_mut().enumerate() {
            let abs = span.start + off;
            if peak_set.contains(&abs) {
                *v = y_bar.samples[abs];
            } else {
                *v = y_bar.samples[abs] * amp;
            }
        }
    }
    Ok(SicResult {
        cleaned: Signal::new(cleaned, Domain::Affine),
        span,
        peak_history: history,
        iterations_used: used,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{simulate_rx, ChannelConfig, Target};
    use crate::frame::{assemble_pri, FrameConfig};
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn echo_only_affine(cfg: &FrameConfig, seed: u64, target: Target) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prev = assemble_pri(cfg, &mut rng).unwrap();
        let cur = assemble_pri(cfg, &mut rng).unwrap();
        let ch = ChannelConfig {
            targets: vec![target],
            ..ChannelConfig::quiet()
        };
        let rx = simulate_rx(&cur, &prev, &ch, cfg, &mut rng).unwrap();
        project_affine(&rx, &window_params(cfg).unwrap()).unwrap()
    }

    #[test]
    fn bessel_i0_spot_values() {
        assert_eq!(bessel_i0(0.0), 1.0);
        // Abramowitz & Stegun table values
        assert!((bessel_i0(1.0) - 1.2660658).abs() < 1e-6);
        assert!((bessel_i0(2.0) - 2.2795853).abs() < 1e-6);
        assert!((bessel_i0(8.6) - 750.46116).abs() < 1e-4);
    }

    #[test]
    fn kaiser_beta_zero_is_all_ones() {
        assert!(kaiser_window(33, 0.0).iter().all(|&w| w == 1.0));
    }

    #[test]
    fn kaiser_center_is_one_endpoint_matches_series() {
        let w = kaiser_window(129, 8.6);
        assert_eq!(w[64], 1.0);
        assert!((w[0] - 1.3325e-3).abs() < 1e-7, "{}", w[0]);
        // symmetric about the center
        for i in 0..64 {
            assert!((w[i] - w[128 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn awgn_input_stays_flat_in_affine_domain() {
        let cfg = FrameConfig::desk();
        let p = window_params(&cfg).unwrap();
        let n = cfg.dims().n_obs;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut acc = vec![0.0f64; n];
        let trials = 200;
        for _ in 0..trials {
            let noise: Vec<Complex64> = (0..n)
                .map(|_| {
                    use rand_distr::{Distribution, StandardNormal};
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            let y = project_affine(&Signal::time(noise), &p).unwrap();
            for (a, v) in acc.iter_mut().zip(&y.samples) {
                *a += v.norm_sqr();
            }
        }
        let mean = acc.iter().sum::<f64>() / n as f64;
        let max = acc.iter().cloned().fold(0.0, f64::max);
        let min = acc.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / mean < 1.4 && min / mean > 0.6, "max {max} min {min} mean {mean}");
    }

    #[test]
    fn ofdm_input_spreads_uniformly() {
        let cfg = FrameConfig::desk();
        let p = window_params(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = assemble_pri(&cfg, &mut rng).unwrap();
        let si = Signal::time(f.si_reference_window(&cfg));
        let y = project_affine(&si, &p).unwrap();
        let n = y.len() as f64;
        let mean = y.energy() / n;
        let max = y.samples.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        // Gaussian-like spread: the largest of n bins stays near ln(n) * mean
        assert!(max / mean < 4.0 * n.ln(), "peak-to-mean {}", max / mean);
    }

    #[test]
    fn pilot_echo_concentrates_energy() {
        // comm muted so only the radar burst returns; each of the m_r pilot
        // blocks lands in one sinc cluster of width about n_obs / block
        let cfg = FrameConfig::desk();
        let d = cfg.dims();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let prev = assemble_pri(&cfg, &mut rng).unwrap();
        let mut cur = assemble_pri(&cfg, &mut rng).unwrap();
        for i in cur.index_map.comm.clone() {
            cur.samples.samples[i] = Complex64::zero();
        }
        let t = Target {
            amplitude_override: Some(Complex64::new(1.0, 0.0)),
            ..Target::new(30.0, 0.0, 1.0)
        };
        let ch = ChannelConfig {
            targets: vec![t],
            ..ChannelConfig::quiet()
        };
        let rx = simulate_rx(&cur, &prev, &ch, &cfg, &mut rng).unwrap();
        let y = project_affine(&rx, &window_params(&cfg).unwrap()).unwrap();
        let mut pow: Vec<f64> = y.samples.iter().map(|v| v.norm_sqr()).collect();
        let total: f64 = pow.iter().sum();
        pow.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let block = cfg.afdm.n_r + cfg.afdm.l_cpp;
        let k = cfg.afdm.pilot_layout.n_pilots * cfg.afdm.m_r * d.n_obs.div_ceil(block);
        let top: f64 = pow[..k].iter().sum();
        // a flat signal would put k/n_obs (about 5%) here
        assert!(top / total > 0.7, "top-{k} fraction {}", top / total);
    }

    #[test]
    fn subtraction_is_exact_at_eps_zero_and_inert_at_one() {
        let cfg = FrameConfig::desk();
        let p = window_params(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = assemble_pri(&cfg, &mut rng).unwrap();
        let si = Signal::time(f.si_reference_window(&cfg));
        let beta = Complex64::new(3.0, -1.0);
        let rx: Vec<Complex64> = si.samples.iter().map(|v| beta * v).collect();
        let y = project_affine(&Signal::time(rx), &p).unwrap();

        let gone = subtract_si(&y, &si, beta, 0.0, &p).unwrap();
        assert!(gone.energy() / y.energy() < 1e-20);

        let kept = subtract_si(&y, &si, beta, 1.0, &p).unwrap();
        for (a, b) in kept.samples.iter().zip(&y.samples) {
            assert!((a - b).norm() < 1e-12);
        }

        let part = subtract_si(&y, &si, beta, 0.01, &p).unwrap();
        assert!((part.energy() / y.energy() - 1e-4).abs() < 1e-9 * 1e-4 + 1e-13);
    }

    #[test]
    fn initial_select_trivial_cases() {
        let zeros = Signal::new(vec![Complex64::zero(); 64], Domain::Affine);
        assert!(matches!(
            initial_peak_select(&zeros, 0.1, 8),
            Err(Error::NoDetection)
        ));

        let mut one = vec![Complex64::zero(); 64];
        one[20] = Complex64::new(5.0, 0.0);
        let sel = initial_peak_select(&Signal::new(one, Domain::Affine), 1.0, 8).unwrap();
        assert_eq!(sel.peaks, vec![20]);
        assert_eq!(sel.span, 16..25);
    }

    #[test]
    fn two_separated_peaks_both_selected() {
        let mut v = vec![Complex64::new(0.05, 0.0); 256];
        v[60] = Complex64::new(2.0, 0.0);
        v[100] = Complex64::new(1.5, 0.0);
        let sel = initial_peak_select(&Signal::new(v, Domain::Affine), 1.0, 40).unwrap();
        assert_eq!(sel.peaks, vec![60, 100]);
        assert_eq!(sel.span, 40..121);
    }

    #[test]
    fn window_mask_union_takes_max_weight() {
        let mask = window_mask(64, &[30, 34], 16, 8.6);
        let w = kaiser_window(16, 8.6);
        let weight_at = |peak: i64, i: i64| -> f64 {
            let k = i - peak + 8;
            if (0..16).contains(&k) {
                w[k as usize]
            } else {
                0.0
            }
        };
        for i in 0..64i64 {
            let expect = weight_at(30, i).max(weight_at(34, i));
            assert!((mask[i as usize] - expect).abs() < 1e-15, "bin {i}");
        }
    }

    #[test]
    fn noise_free_single_target_converges_keeping_peak() {
        let cfg = FrameConfig::desk();
        let t = Target {
            amplitude_override: Some(Complex64::new(1.0, 0.0)),
            ..Target::new(30.0, 0.0, 1.0)
        };
        let y = echo_only_affine(&cfg, 11, t);
        let peak_mag = y.samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let sic = SicConfig {
            schedule: ThresholdSchedule::Explicit(vec![0.5 * peak_mag, 0.25 * peak_mag]),
            ..SicConfig::for_frame(&cfg, 1.0)
        };
        let res = iterative_windowing(&y, &sic).unwrap();
        assert!(res.converged);
        // the dominant bin is re-detected every iteration, so every mask
        // carries weight 1 there and its magnitude survives untouched
        let argmax = y
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap()
            .0;
        assert!(res.final_peaks().contains(&argmax));
        let kept = res.cleaned.samples[argmax - res.span.start].norm();
        assert!((kept - peak_mag).abs() < 1e-9 * peak_mag);
    }

    #[test]
    fn below_threshold_input_yields_empty_result() {
        let v = vec![Complex64::new(0.01, 0.0); 128];
        let cfg = SicConfig {
            schedule: ThresholdSchedule::Geometric { zeta1: 1.0, factor: 0.5 },
            epsilon: 0.0,
            epsilon_rho_db: None,
            n_w: 16,
            n_w_iter: 8,
            rho_max: 4,
            kaiser_beta: 8.6,
        };
        let res = iterative_windowing(&Signal::new(v, Domain::Affine), &cfg).unwrap();
        assert!(res.peak_history.is_empty());
        assert_eq!(res.iterations_used, 0);
        assert!(res.cleaned.is_empty());
    }

    #[test]
    fn out_of_window_energy_never_grows() {
        let cfg = FrameConfig::desk();
        let t = Target {
            amplitude_override: Some(Complex64::new(1.0, 0.0)),
            ..Target::new(30.0, 10.0, 1.0)
        };
        let y = echo_only_affine(&cfg, 13, t);
        let peak_mag = y.samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut prev_energy = f64::INFINITY;
        for rho in 1..=4 {
            let sic = SicConfig {
                rho_max: rho,
                ..SicConfig::for_frame(&cfg, 0.5 * peak_mag)
            };
            let res = iterative_windowing(&y, &sic).unwrap();
            let peaks: std::collections::HashSet<usize> =
                res.final_peaks().iter().copied().collect();
            let e: f64 = res
                .cleaned
                .samples
                .iter()
                .enumerate()
                .filter(|(off, _)| !peaks.contains(&(off + res.span.start)))
                .map(|(_, v)| v.norm_sqr())
                .sum();
            assert!(e <= prev_energy * (1.0 + 1e-12), "rho {rho}: {e} > {prev_energy}");
            prev_energy = e;
        }
    }

    #[test]
    fn windowing_drops_comm_sidelobe_floor() {
        // radar echo plus strong leaked comm: after windowing, the comm
        // sidelobe floor away from the locked carrier falls by >= 20 dB;
        // a single radar symbol keeps the echo in one affine cluster
        let mut cfg = FrameConfig::desk();
        cfg.afdm.m_r = 1;
        // strong pilot lifts the radar cluster well above the comm echo
        cfg.afdm.pilot_layout.pilot_power = 1000.0;
        let p = window_params(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let prev = assemble_pri(&cfg, &mut rng).unwrap();
        let cur = assemble_pri(&cfg, &mut rng).unwrap();
        let ch = ChannelConfig {
            targets: vec![Target {
                amplitude_override: Some(Complex64::new(1.0, 0.0)),
                ..Target::new(30.0, 0.0, 1.0)
            }],
            si: crate::channel::SiPath::direct(Complex64::new(0.05, 0.0)),
            ..ChannelConfig::quiet()
        };
        let rx = simulate_rx(&cur, &prev, &ch, &cfg, &mut rng).unwrap();
        let y = project_affine(&rx, &p).unwrap();
        let peak_mag = y.samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        // thresholds stay above the SI floor so the peak set locks onto the
        // radar bins instead of chasing the residual down
        let sic = SicConfig {
            schedule: ThresholdSchedule::Explicit(vec![0.5 * peak_mag, 0.45 * peak_mag]),
            ..SicConfig::for_frame(&cfg, 1.0)
        };
        let res = iterative_windowing(&y, &sic).unwrap();
        let peaks = res.final_peaks();
        // bins 40..50% of the window span away from every peak sit deep in
        // the Kaiser taper
        let annulus: Vec<usize> = res
            .span
            .clone()
            .filter(|&i| {
                let d = peaks
                    .iter()
                    .map(|&p| (p as i64 - i as i64).unsigned_abs() as usize)
                    .min()
                    .unwrap();
                d >= 4 * sic.n_w / 10 && d < sic.n_w / 2
            })
            .collect();
        assert!(!annulus.is_empty());
        let mean = |f: &dyn Fn(usize) -> f64| {
            annulus.iter().map(|&i| f(i)).sum::<f64>() / annulus.len() as f64
        };
        let before = mean(&|i| y.samples[i].norm_sqr());
        let after = mean(&|i| res.cleaned.samples[i - res.span.start].norm_sqr());
        let drop_db = 10.0 * (before / after).log10();
        assert!(drop_db >= 20.0, "floor drop {drop_db:.1} dB");
    }

    #[test]
    fn analytic_residual_mode_sets_exact_floor() {
        let cfg = FrameConfig::desk();
        let t = Target {
            amplitude_override: Some(Complex64::new(1.0, 0.0)),
            ..Target::new(30.0, 0.0, 1.0)
        };
        let y = echo_only_affine(&cfg, 19, t);
        let peak_mag = y.samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let sic = SicConfig {
            epsilon_rho_db: Some(-60.0),
            ..SicConfig::for_frame(&cfg, 0.5 * peak_mag)
        };
        let res = iterative_windowing(&y, &sic).unwrap();
        let peaks: std::collections::HashSet<usize> = res.final_peaks().iter().copied().collect();
        for (off, v) in res.cleaned.samples.iter().enumerate() {
            let abs = off + res.span.start;
            let expect = if peaks.contains(&abs) {
                y.samples[abs]
            } else {
                y.samples[abs] * 1e-3
            };
            assert!((v - expect).norm() < 1e-15);
        }
    }
}
