//! Scenario files: flat `key = value` text with dotted sections, parsed as
//! TOML. Every dB value in a scenario is a power ratio (10*log10);
//! amplitudes are derived internally.
//!
//! Recognized keys (all optional unless noted):
//!
//! ```text
//! frame.preset            "desk" (default) or "reference"
//! frame.pilots            pilot carriers per radar symbol
//! frame.pilot_power_db    per-pilot power, dB
//! frame.pilot_guard       empty guard carriers per pilot side
//! frame.pilot_data_fill   true to fill leftover radar carriers with data
//! targets                 array of [range_m, velocity_mps, rcs_m2]
//! target_amplitude_db     per-target echo power override, dB
//! channel.noise_psd_dbm_hz  noise density; omit for a noiseless run
//! channel.si_power_db     direct leak power, dB; omit for no leak
//! channel.antenna_gain_dbi  tx = rx gain, default 18
//! sic.epsilon_db          replica-subtraction residual power, dB
//! sic.epsilon_rho_db      windowing suppression floor, dB
//! sic.kaiser_beta         window shape parameter
//! sic.iterations          max windowing iterations
//! sic.zeta1_fraction      first threshold as a fraction of the peak bin
//! pctd.zero_pad           zero-padding factor z_p
//! pctd.pfa                detector false-alarm probability
//! sweep.variable          dotted key to sweep (see `apply_sweep`)
//! sweep.values            array of sweep values
//! trials                  Monte Carlo trials per sweep point (default 1)
//! seed                    base RNG seed (default 0)
//! out                     output directory (default "out")
//! ```

use std::path::{Path, PathBuf};

use isacsim_core::channel::{ChannelConfig, SiPath, Target};
use isacsim_core::frame::FrameConfig;
use isacsim_core::pctd::PctdConfig;
use isacsim_core::pipeline::PipelineConfig;
use num_complex::Complex64;
use toml::Value;

use crate::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct Scenario {
    pub pipeline: PipelineConfig,
    /// Dotted key swept across `sweep_values`; `None` runs a single point.
    pub sweep_variable: Option<String>,
    pub sweep_values: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

fn db_to_amplitude(power_db: f64) -> f64 {
    10f64.powf(power_db / 20.0)
}

fn db_to_power(power_db: f64) -> f64 {
    10f64.powf(power_db / 10.0)
}

fn lookup<'a>(root: &'a Value, path: &str) -> Option<&'a Value> {
    let mut v = root;
    for part in path.split('.') {
        v = v.as_table()?.get(part)?;
    }
    Some(v)
}

fn get_f64(root: &Value, path: &str) -> CliResult<Option<f64>> {
    match lookup(root, path) {
        None => Ok(None),
        Some(Value::Float(f)) => Ok(Some(*f)),
        Some(Value::Integer(i)) => Ok(Some(*i as f64)),
        Some(_) => Err(CliError::Config(format!("{path} must be a number"))),
    }
}

fn get_usize(root: &Value, path: &str) -> CliResult<Option<usize>> {
    match lookup(root, path) {
        None => Ok(None),
        Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
        Some(_) => Err(CliError::Config(format!(
            "{path} must be a non-negative integer"
        ))),
    }
}

fn get_bool(root: &Value, path: &str) -> CliResult<Option<bool>> {
    match lookup(root, path) {
        None => Ok(None),
        Some(Value::Boolean(b)) => Ok(Some(*b)),
        Some(_) => Err(CliError::Config(format!("{path} must be a boolean"))),
    }
}

fn get_str<'a>(root: &'a Value, path: &str) -> CliResult<Option<&'a str>> {
    match lookup(root, path) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.as_str())),
        Some(_) => Err(CliError::Config(format!("{path} must be a string"))),
    }
}

fn parse_targets(root: &Value, amplitude_db: Option<f64>) -> CliResult<Vec<Target>> {
    let raw = match lookup(root, "targets") {
        None => return Ok(Vec::new()),
        Some(Value::Array(a)) => a,
        Some(_) => {
            return Err(CliError::Config(
                "targets must be an array of [range_m, velocity_mps, rcs_m2]".into(),
            ))
        }
    };
    let mut out = Vec::new();
    for entry in raw {
        let row = entry.as_array().ok_or_else(|| {
            CliError::Config("each target must be [range_m, velocity_mps, rcs_m2]".into())
        })?;
        if row.len() != 3 {
            return Err(CliError::Config(
                "each target must have exactly range_m, velocity_mps, rcs_m2".into(),
            ));
        }
        let num = |v: &Value| -> CliResult<f64> {
            v.as_float()
                .or_else(|| v.as_integer().map(|i| i as f64))
                .ok_or_else(|| CliError::Config("target entries must be numbers".into()))
        };
        let mut t = Target::new(num(&row[0])?, num(&row[1])?, num(&row[2])?);
        if let Some(db) = amplitude_db {
            t.amplitude_override = Some(Complex64::new(db_to_amplitude(db), 0.0));
        }
        out.push(t);
    }
    Ok(out)
}

pub fn parse_scenario(text: &str, base_dir: &Path) -> CliResult<Scenario> {
    let root: Value = text
        .parse::<toml::Table>()
        .map_err(|e| CliError::Config(format!("scenario parse failed: {e}")))?
        .into();

    let mut frame = match get_str(&root, "frame.preset")?.unwrap_or("desk") {
        "desk" => FrameConfig::desk(),
        "reference" => FrameConfig::reference(),
        other => {
            return Err(CliError::Config(format!(
                "frame.preset must be \"desk\" or \"reference\", got \"{other}\""
            )))
        }
    };
    if let Some(n) = get_usize(&root, "frame.pilots")? {
        frame.afdm.pilot_layout.n_pilots = n;
    }
    if let Some(db) = get_f64(&root, "frame.pilot_power_db")? {
        frame.afdm.pilot_layout.pilot_power = db_to_power(db);
    }
    if let Some(g) = get_usize(&root, "frame.pilot_guard")? {
        frame.afdm.pilot_layout.guard_size = g;
    }
    if let Some(b) = get_bool(&root, "frame.pilot_data_fill")? {
        frame.afdm.pilot_layout.data_fill = b;
    }
    frame.validate()?;

    let gain = get_f64(&root, "channel.antenna_gain_dbi")?.unwrap_or(18.0);
    let amplitude_db = get_f64(&root, "target_amplitude_db")?;
    let si = match get_f64(&root, "channel.si_power_db")? {
        Some(db) => SiPath::direct(Complex64::new(db_to_amplitude(db), 0.0)),
        None => SiPath::off(),
    };
    let channel = ChannelConfig {
        targets: parse_targets(&root, amplitude_db)?,
        si,
        noise_psd_dbm_hz: get_f64(&root, "channel.noise_psd_dbm_hz")?,
        antenna_gains_dbi: (gain, gain),
        rng_seed: 0,
    };

    let mut pipeline = PipelineConfig::new(frame, channel);
    if let Some(db) = get_f64(&root, "sic.epsilon_db")? {
        pipeline.sic.epsilon = db_to_amplitude(db);
    }
    if let Some(db) = get_f64(&root, "sic.epsilon_rho_db")? {
        pipeline.sic.epsilon_rho_db = Some(db);
    }
    if let Some(b) = get_f64(&root, "sic.kaiser_beta")? {
        pipeline.sic.kaiser_beta = b;
    }
    if let Some(n) = get_usize(&root, "sic.iterations")? {
        pipeline.sic.rho_max = n;
    }
    if let Some(f) = get_f64(&root, "sic.zeta1_fraction")? {
        pipeline.auto_zeta_fraction = Some(f);
    }
    // the per-trial auto threshold replaces zeta1; keep a valid placeholder
    if let isacsim_core::sic::ThresholdSchedule::Geometric { zeta1, .. } =
        &mut pipeline.sic.schedule
    {
        if *zeta1 <= 0.0 {
            *zeta1 = 1.0;
        }
    }
    pipeline.sic.validate()?;

    let z_p = get_usize(&root, "pctd.zero_pad")?.unwrap_or(2);
    let pfa = get_f64(&root, "pctd.pfa")?.unwrap_or(1e-6);
    pipeline.pctd = PctdConfig::new(z_p, pfa)?;

    let sweep_variable = get_str(&root, "sweep.variable")?.map(str::to_owned);
    let sweep_values = match lookup(&root, "sweep.values") {
        None => Vec::new(),
        Some(Value::Array(a)) => a
            .iter()
            .map(|v| {
                v.as_float()
                    .or_else(|| v.as_integer().map(|i| i as f64))
                    .ok_or_else(|| CliError::Config("sweep.values must be numbers".into()))
            })
            .collect::<CliResult<Vec<f64>>>()?,
        Some(_) => return Err(CliError::Config("sweep.values must be an array".into())),
    };
    match (&sweep_variable, sweep_values.is_empty()) {
        (Some(_), true) => {
            return Err(CliError::Config(
                "sweep.variable given without sweep.values".into(),
            ))
        }
        (None, false) => {
            return Err(CliError::Config(
                "sweep.values given without sweep.variable".into(),
            ))
        }
        _ => {}
    }
    if let Some(var) = &sweep_variable {
        // fail fast on unknown sweep targets
        let mut probe = pipeline.clone();
        apply_sweep(&mut probe, var, sweep_values[0])?;
    }

    let trials = get_usize(&root, "trials")?.unwrap_or(1);
    if trials < 1 {
        return Err(CliError::Config("trials must be >= 1".into()));
    }
    let seed = get_usize(&root, "seed")?.unwrap_or(0) as u64;
    let out_dir = base_dir.join(get_str(&root, "out")?.unwrap_or("out"));

    Ok(Scenario {
        pipeline,
        sweep_variable,
        sweep_values,
        trials,
        seed,
        out_dir,
    })
}

pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, base)
}

/// Set one swept configuration field. dB values follow the power
/// convention of the scenario file.
pub fn apply_sweep(cfg: &mut PipelineConfig, variable: &str, value: f64) -> CliResult<()> {
    match variable {
        "sic.epsilon_rho_db" => cfg.sic.epsilon_rho_db = Some(value),
        "sic.epsilon_db" => cfg.sic.epsilon = db_to_amplitude(value),
        "channel.si_power_db" => {
            cfg.channel.si = SiPath::direct(Complex64::new(db_to_amplitude(value), 0.0))
        }
        "channel.noise_psd_dbm_hz" => cfg.channel.noise_psd_dbm_hz = Some(value),
        "frame.pilot_power_db" => cfg.frame.afdm.pilot_layout.pilot_power = db_to_power(value),
        "target.range_m" => {
            let t = cfg.channel.targets.first_mut().ok_or_else(|| {
                CliError::Config("target.range_m sweep needs at least one target".into())
            })?;
            t.range_m = value;
        }
        "pctd.zero_pad" => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(CliError::Config(
                    "pctd.zero_pad sweep values must be positive integers".into(),
                ));
            }
            cfg.pctd = PctdConfig::new(value as usize, cfg.pctd.detector_pfa)?;
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown sweep variable \"{other}\""
            )))
        }
    }
    Ok(())
}
