//! One PRI: radar burst, guard, communication burst, guard, plus all
//! derived frame dimensions.

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::waveform::{
    append_cp, append_cpp, build_pilot_grid, gen_afdm_symbol, gen_ofdm_symbol, AfdmConfig,
    ModAlphabet, OfdmConfig, PilotLayout,
};

#[derive(Debug, Clone, PartialEq)]
pub struct FrameConfig {
    pub afdm: AfdmConfig,
    pub ofdm: OfdmConfig,
    /// Guard length in samples between the radar and comm bursts.
    pub n_g: usize,
    /// Number of PRIs per coherent processing interval.
    pub j_pris: usize,
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
}

/// Derived per-PRI sizes and durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameDims {
    /// (N_r + L_cpp) * M_r
    pub n_r_tot: usize,
    /// (N_c + L_cp) * M_c
    pub n_c_tot: usize,
    /// n_r_tot + n_c_tot + 2 * n_g
    pub n_tot: usize,
    /// Observation window length, n_tot - n_r_tot.
    pub n_obs: usize,
    /// One AFDM symbol duration N_r / B, seconds.
    pub t_r: f64,
    /// One OFDM symbol duration N_c / B, seconds.
    pub t_c: f64,
    pub t_g: f64,
    pub t_r_tot: f64,
    pub t_c_tot: f64,
    pub t_tot: f64,
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        self.afdm.validate()?;
        self.ofdm.validate()?;
        if self.j_pris == 0 {
            return Err(Error::Config("j_pris must be >= 1".into()));
        }
        if self.bandwidth_hz <= 0.0 || self.carrier_hz <= 0.0 {
            return Err(Error::Config("bandwidth and carrier must be positive".into()));
        }
        Ok(())
    }

    pub fn dims(&self) -> FrameDims {
        let n_r_tot = (self.afdm.n_r + self.afdm.l_cpp) * self.afdm.m_r;
        let n_c_tot = (self.ofdm.n_c + self.ofdm.l_cp) * self.ofdm.m_c;
        let n_tot = n_r_tot + n_c_tot + 2 * self.n_g;
        let b = self.bandwidth_hz;
        FrameDims {
            n_r_tot,
            n_c_tot,
            n_tot,
            n_obs: n_tot - n_r_tot,
            t_r: self.afdm.n_r as f64 / b,
            t_c: self.ofdm.n_c as f64 / b,
            t_g: self.n_g as f64 / b,
            t_r_tot: n_r_tot as f64 / b,
            t_c_tot: n_c_tot as f64 / b,
            t_tot: n_tot as f64 / b,
        }
    }

    /// Baseline dimensioning used throughout the test suites: 128x32 AFDM
    /// radar burst, 512x128 OFDM comm burst, 120 MHz at 5.8 GHz.
    pub fn reference() -> Self {
        FrameConfig {
            afdm: AfdmConfig {
                n_r: 128,
                m_r: 32,
                c1: Ratio::new(3, 128),
                c2: Ratio::new(1, 128 * 128),
                l_cpp: 16,
                pilot_layout: PilotLayout {
                    n_pilots: 1,
                    pilot_power: 10.0,
                    guard_size: 0,
                    data_fill: false,
                },
                alphabet: ModAlphabet::qpsk(),
            },
            ofdm: OfdmConfig {
                n_c: 512,
                m_c: 128,
                l_cp: 32,
                n_c_pilots: 0,
                alphabet: ModAlphabet::qpsk(),
            },
            n_g: 32,
            j_pris: 1,
            bandwidth_hz: 120e6,
            carrier_hz: 5.8e9,
        }
    }

    /// Small dimensioning for fast Monte Carlo runs.
    pub fn desk() -> Self {
        FrameConfig {
            afdm: AfdmConfig {
                n_r: 64,
                m_r: 4,
                c1: Ratio::new(3, 128),
                c2: Ratio::new(1, 64 * 64),
                l_cpp: 8,
                pilot_layout: PilotLayout {
                    n_pilots: 1,
                    pilot_power: 10.0,
                    guard_size: 0,
                    data_fill: false,
                },
                alphabet: ModAlphabet::qpsk(),
            },
            ofdm: OfdmConfig {
                n_c: 128,
                m_c: 8,
                l_cp: 16,
                n_c_pilots: 0,
                alphabet: ModAlphabet::qpsk(),
            },
            n_g: 32,
            j_pris: 1,
            bandwidth_hz: 120e6,
            carrier_hz: 5.8e9,
        }
    }
}

/// Segment boundaries inside one PRI, as half-open sample ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentMap {
    pub radar: std::ops::Range<usize>,
    pub guard_head: std::ops::Range<usize>,
    pub comm: std::ops::Range<usize>,
    pub guard_tail: std::ops::Range<usize>,
}

/// One assembled PRI plus the payloads needed to rebuild exact replicas.
#[derive(Debug, Clone)]
pub struct PriFrame {
    pub samples: Signal,
    /// Affine-domain grid per radar symbol.
    pub radar_payload: Vec<Vec<Complex64>>,
    /// Frequency-domain data per OFDM symbol.
    pub comm_payload: Vec<Vec<Complex64>>,
    pub index_map: SegmentMap,
}

impl PriFrame {
    pub fn radar_segment(&self) -> &[Complex64] {
        &self.samples.samples[self.index_map.radar.clone()]
    }

    pub fn comm_segment(&self) -> &[Complex64] {
        &self.samples.samples[self.index_map.comm.clone()]
    }

    /// The self-interference reference over the observation window
    /// [0, n_obs): the transmitted comm burst at its in-window position
    /// (window time runs from the start of the PRI; the part of the comm
    /// burst past the window end is cut off).
    pub fn si_reference_window(&self, cfg: &FrameConfig) -> Vec<Complex64> {
        let d = cfg.dims();
        let mut out = vec![Complex64::zero(); d.n_obs];
        let comm = self.comm_segment();
        let start = self.index_map.comm.start; // n_r_tot + n_g, PRI coords == window coords
        let take = comm.len().min(d.n_obs.saturating_sub(start));
        out[start..start + take].copy_from_slice(&comm[..take]);
        out
    }
}

/// Assemble one PRI: [radar symbols + CPPs | n_g zeros | OFDM symbols + CPs
/// | n_g zeros]. Payloads are stored so replicas can be rebuilt bit-exactly.
pub fn assemble_pri<R: Rng + ?Sized>(cfg: &FrameConfig, rng: &mut R) -> Result<PriFrame> {
    cfg.validate()?;
    let d = cfg.dims();
    let mut samples = Vec::with_capacity(d.n_tot);
    let mut radar_payload = Vec::with_capacity(cfg.afdm.m_r);
    for _ in 0..cfg.afdm.m_r {
        let grid = build_pilot_grid(&cfg.afdm.pilot_layout, &cfg.afdm, rng)?;
        let sym = gen_afdm_symbol(&grid, &cfg.afdm)?;
        let sym = append_cpp(&sym, &cfg.afdm)?;
        samples.extend_from_slice(&sym.samples);
        radar_payload.push(grid);
    }
    let radar = 0..samples.len();
    let guard_head = radar.end..radar.end + cfg.n_g;
    samples.resize(guard_head.end, Complex64::zero());
    let mut comm_payload = Vec::with_capacity(cfg.ofdm.m_c);
    for _ in 0..cfg.ofdm.m_c {
        let data: Vec<Complex64> = (0..cfg.ofdm.n_c)
            .map(|_| cfg.ofdm.alphabet.sample(rng))
            .collect();
        let sym = gen_ofdm_symbol(&data, &cfg.ofdm)?;
        let sym = append_cp(&sym, &cfg.ofdm)?;
        samples.extend_from_slice(&sym.samples);
        comm_payload.push(data);
    }
    let comm = guard_head.end..samples.len();
    let guard_tail = comm.end..comm.end + cfg.n_g;
    samples.resize(guard_tail.end, Complex64::zero());
    debug_assert_eq!(samples.len(), d.n_tot);
    Ok(PriFrame {
        samples: Signal::time(samples),
        radar_payload,
        comm_payload,
        index_map: SegmentMap {
            radar,
            guard_head,
            comm,
            guard_tail,
        },
    })
}
