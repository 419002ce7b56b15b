//! Link-level performance figures: post-cancellation SINR, detection
//! probability, spectral efficiency, multiplication counts, and the
//! whiteness diagnostics used to sanity-check the affine-domain noise model.

use num_complex::Complex64;

/// Inputs to the post-SIC SINR. Powers are linear, `epsilon_rho` and
/// `epsilon` are the windowing and cancellation residual amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrInputs {
    pub epsilon_rho: f64,
    pub epsilon: f64,
    /// Sum of |alpha_hat|^2 over targets.
    pub alpha_sq_sum: f64,
    pub n_s: f64,
    pub n_r: f64,
    pub p_r: f64,
    pub n_c: f64,
    pub p_c: f64,
    /// N0 * B.
    pub noise_power: f64,
}

pub fn sinr(i: &SinrInputs) -> f64 {
    let signal = i.alpha_sq_sum * i.n_s * i.n_r * i.p_r;
    let interference = i.epsilon * i.epsilon * i.n_s * i.n_c * i.p_c + i.noise_power;
    signal / (i.epsilon_rho * i.epsilon_rho * interference)
}

/// Rayleigh threshold for a constant false-alarm rate.
pub fn pfa_threshold(sigma: f64, pfa: f64) -> f64 {
    sigma * (-pfa.ln()).sqrt()
}

/// First-order Marcum Q function via the Poisson-weighted chi-square tail
/// series, truncated once the remaining Poisson mass is below 1e-15.
pub fn marcum_q1(a: f64, b: f64) -> f64 {
    if b <= 0.0 {
        return 1.0;
    }
    let x = a * a / 2.0;
    let y = b * b / 2.0;
    if x == 0.0 {
        return (-y).exp();
    }
    // For large x the k=0 Poisson weight underflows; shift the series start
    // to the Poisson bulk and accumulate both gamma tails incrementally.
    let mut pois = (-x).exp();
    if pois > 0.0 {
        let mut term_y = (-y).exp();
        let mut inner = term_y; // P(chi^2_{2k+2} > b^2) at k = 0
        let mut cum = pois;
        let mut sum = pois * inner;
        let mut k: u64 = 0;
        while 1.0 - cum > 1e-15 && k < 1_000_000 {
            k += 1;
            pois *= x / k as f64;
            term_y *= y / k as f64;
            inner += term_y;
            cum += pois;
            sum += pois * inner.min(1.0);
        }
        sum.clamp(0.0, 1.0)
    } else {
        // x so large that exp(-x) underflows: the detection side saturates
        1.0
    }
}

/// Detection probability of the Rician threshold test.
pub fn pd_analytic(sinr: f64, pfa: f64) -> f64 {
    marcum_q1((2.0 * sinr).sqrt(), (-2.0 * pfa.ln()).sqrt())
}

/// Carrier bookkeeping for spectral efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePlan {
    pub n_r_tot: usize,
    pub n_c_tot: usize,
    pub n_tot: usize,
    pub m_r: usize,
    pub m_c: usize,
    pub n_r_p: usize,
    pub guard_r: usize,
    pub l_cpp: usize,
    pub n_c_p: usize,
    pub l_cp: usize,
}

impl FramePlan {
    pub fn effective_radar_carriers(&self) -> i64 {
        self.n_r_tot as i64
            - self.m_r as i64 * (self.n_r_p as i64 * (1 + self.guard_r as i64) + self.l_cpp as i64)
    }

    pub fn effective_comm_carriers(&self) -> i64 {
        self.n_c_tot as i64 - self.m_c as i64 * (self.n_c_p as i64 + self.l_cp as i64)
    }
}

/// Bits per carrier use of the dual-waveform frame.
pub fn spectral_efficiency(plan: &FramePlan, sinr: f64) -> f64 {
    let eff = (plan.effective_radar_carriers() + plan.effective_comm_carriers()) as f64;
    eff / plan.n_tot as f64 * (1.0 + sinr).log2()
}

/// Reference point: a frame that spends everything on communication and
/// keeps only the usual pilot and prefix overhead.
pub fn spectral_efficiency_conventional(plan: &FramePlan, sinr: f64) -> f64 {
    plan.effective_comm_carriers() as f64 / plan.n_c_tot as f64 * (1.0 + sinr).log2()
}

/// Per-iteration peak counts drive the windowing term.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityInputs {
    /// Samples entering the affine projection.
    pub n_cg: usize,
    /// First-pass window length.
    pub n_w: usize,
    pub n_r_tot: usize,
    /// Peak count per windowing iteration, first iteration first.
    pub peaks_per_iteration: Vec<usize>,
    pub n_s: usize,
    pub n_zp: usize,
}

/// Complex multiplication count of one processed PRI.
pub fn complexity_mults(c: &ComplexityInputs) -> f64 {
    let log2 = |n: usize| (n.max(1) as f64).log2();
    let q1 = c.peaks_per_iteration.first().copied().unwrap_or(0);
    let later: usize = c.peaks_per_iteration.iter().skip(1).sum();
    c.n_cg as f64 * log2(c.n_cg)
        + (c.n_w * q1) as f64
        + (c.n_r_tot * later) as f64
        + 2.0 * c.n_s as f64 * log2(c.n_s)
        + 2.0 * c.n_zp as f64 * log2(c.n_zp)
}

/// Mean Euclidean error over trials.
pub fn rmse_mean_abs(truth: &[f64], est: &[f64]) -> f64 {
    assert_eq!(truth.len(), est.len());
    if truth.is_empty() {
        return 0.0;
    }
    truth
        .iter()
        .zip(est)
        .map(|(t, e)| (t - e).abs())
        .sum::<f64>()
        / truth.len() as f64
}

/// Root of the mean squared error over trials.
pub fn rmse_root_mean_sq(truth: &[f64], est: &[f64]) -> f64 {
    assert_eq!(truth.len(), est.len());
    if truth.is_empty() {
        return 0.0;
    }
    (truth
        .iter()
        .zip(est)
        .map(|(t, e)| (t - e) * (t - e))
        .sum::<f64>()
        / truth.len() as f64)
        .sqrt()
}

/// Second-order diagnostics of a set of vector realizations: how uniform
/// the per-bin variance is and how much energy sits off the covariance
/// diagonal. White input gives ratios near 1 and 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitenessReport {
    pub variance_ratio: f64,
    pub offdiag_energy_ratio: f64,
    pub max_mean_abs: f64,
}

pub fn whiteness_report(trials: &[Vec<Complex64>]) -> WhitenessReport {
    let l = trials.len();
    assert!(l > 1, "need multiple realizations");
    let n = trials[0].len();
    let mut mean = vec![Complex64::new(0.0, 0.0); n];
    for t in trials {
        assert_eq!(t.len(), n);
        for (m, v) in mean.iter_mut().zip(t) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= l as f64;
    }

    let mut var = vec![0.0f64; n];
    for t in trials {
        for (v, (x, m)) in var.iter_mut().zip(t.iter().zip(&mean)) {
            *v += (x - m).norm_sqr();
        }
    }
    for v in var.iter_mut() {
        *v /= l as f64;
    }
    let vmax = var.iter().cloned().fold(f64::MIN, f64::max);
    let vmin = var.iter().cloned().fold(f64::MAX, f64::min);

    // off-diagonal energy against diagonal energy, subsampled covariance
    let step = (n / 32).max(1);
    let idx: Vec<usize> = (0..n).step_by(step).collect();
    let mut diag = 0.0;
    let mut off = 0.0;
    for (a, &i) in idx.iter().enumerate() {
        for &j in idx.iter().skip(a) {
            let mut c = Complex64::new(0.0, 0.0);
            for t in trials {
                c += (t[i] - mean[i]) * (t[j] - mean[j]).conj();
            }
            let e = (c / l as f64).norm_sqr();
            if i == j {
                diag += e;
            } else {
                off += 2.0 * e;
            }
        }
    }
    WhitenessReport {
        variance_ratio: vmax / vmin.max(f64::MIN_POSITIVE),
        offdiag_energy_ratio: off / diag.max(f64::MIN_POSITIVE),
        max_mean_abs: mean.iter().map(|m| m.norm()).fold(0.0, f64::max),
    }
}
