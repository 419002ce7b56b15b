//! Output artifacts: labeled CSV aggregates, range-Doppler map dumps, and
//! the run manifest. CSVs are the plotting contract; the binary map dump
//! round-trips bit-exactly through `load_rdm`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use isacsim_core::pctd::Matrix;
use num_complex::Complex64;

use crate::runner::PointSummary;
use crate::{CliError, CliResult};

/// Magnitudes at or below this power dB floor are written as the sentinel.
pub const DB_FLOOR: f64 = -300.0;

fn fmt_db(v: f64) -> String {
    if v <= DB_FLOOR {
        "-300.0".to_string()
    } else {
        format!("{v:.3}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => String::new(),
    }
}

pub fn write_pd_csv(path: &Path, rows: &[PointSummary]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "sweep_value,trials,detections,p_d,stderr")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{:.6},{:.6}",
            r.sweep_value, r.trials, r.detections, r.p_d, r.p_d_stderr
        )?;
    }
    Ok(())
}

pub fn write_rmse_csv(path: &Path, rows: &[PointSummary]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "sweep_value,range_rmse_m,velocity_rmse_mps,misses")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.sweep_value,
            fmt_opt(r.range_rmse_m),
            fmt_opt(r.velocity_rmse_mps),
            r.misses
        )?;
    }
    Ok(())
}

pub fn write_se_csv(path: &Path, rows: &[PointSummary]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "sweep_value,sinr_db,se_bits,se_conventional_bits")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.6},{:.6}",
            r.sweep_value,
            fmt_db(10.0 * r.sinr.max(1e-30).log10()),
            r.se_bits,
            r.se_conventional_bits
        )?;
    }
    Ok(())
}

pub fn write_complexity_csv(path: &Path, rows: &[PointSummary]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "sweep_value,cancel_samples,window_span,iterations,total_mults")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{:.1}",
            r.sweep_value, r.cancel_samples, r.window_span, r.window_iterations, r.total_mults
        )?;
    }
    Ok(())
}

/// Axis metadata carried in the sidecar header of a map dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdmMeta {
    pub z_p: usize,
    pub range_step_m: f64,
    pub velocity_step_mps: f64,
}

/// Write `base.csv` (magnitude in power dB, rows = Doppler bins, cols =
/// range bins), `base.bin` (row-major little-endian f64 re/im pairs) and
/// `base.hdr` (dims and axis steps).
pub fn emit_rdm(map: &Matrix, meta: &RdmMeta, base: &Path) -> CliResult<()> {
    let ctx = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", base.display()));

    let mut csv = BufWriter::new(File::create(base.with_extension("csv")).map_err(ctx)?);
    for r in 0..map.rows {
        let row: Vec<String> = (0..map.cols)
            .map(|c| {
                let p = map.at(r, c).norm_sqr();
                fmt_db(if p > 0.0 { 10.0 * p.log10() } else { DB_FLOOR })
            })
            .collect();
        writeln!(csv, "{}", row.join(",")).map_err(ctx)?;
    }

    let mut hdr = BufWriter::new(File::create(base.with_extension("hdr")).map_err(ctx)?);
    writeln!(hdr, "rows={}", map.rows).map_err(ctx)?;
    writeln!(hdr, "cols={}", map.cols).map_err(ctx)?;
    writeln!(hdr, "z_p={}", meta.z_p).map_err(ctx)?;
    writeln!(hdr, "range_step_m={:e}", meta.range_step_m).map_err(ctx)?;
    writeln!(hdr, "velocity_step_mps={:e}", meta.velocity_step_mps).map_err(ctx)?;

    let mut bin = BufWriter::new(File::create(base.with_extension("bin")).map_err(ctx)?);
    for v in &map.data {
        bin.write_all(&v.re.to_le_bytes()).map_err(ctx)?;
        bin.write_all(&v.im.to_le_bytes()).map_err(ctx)?;
    }
    Ok(())
}

/// Read back a map dump written by `emit_rdm`, bit-exactly.
pub fn load_rdm(base: &Path) -> CliResult<(Matrix, RdmMeta)> {
    let ctx = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", base.display()));
    let hdr = BufReader::new(File::open(base.with_extension("hdr")).map_err(ctx)?);
    let mut rows = 0usize;
    let mut cols = 0usize;
    let mut meta = RdmMeta {
        z_p: 1,
        range_step_m: 0.0,
        velocity_step_mps: 0.0,
    };
    for line in hdr.lines() {
        let line = line.map_err(ctx)?;
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| CliError::Runtime(format!("bad header line: {line}")))?;
        let bad = |_| CliError::Runtime(format!("bad header value for {key}"));
        match key {
            "rows" => rows = val.parse().map_err(|_: std::num::ParseIntError| bad(()))?,
            "cols" => cols = val.parse().map_err(|_: std::num::ParseIntError| bad(()))?,
            "z_p" => meta.z_p = val.parse().map_err(|_: std::num::ParseIntError| bad(()))?,
            "range_step_m" => {
                meta.range_step_m = val.parse().map_err(|_: std::num::ParseFloatError| bad(()))?
            }
            "velocity_step_mps" => {
                meta.velocity_step_mps =
                    val.parse().map_err(|_: std::num::ParseFloatError| bad(()))?
            }
            _ => return Err(CliError::Runtime(format!("unknown header key: {key}"))),
        }
    }
    let mut bytes = Vec::new();
    File::open(base.with_extension("bin"))
        .map_err(ctx)?
        .read_to_end(&mut bytes)
        .map_err(ctx)?;
    if bytes.len() != rows * cols * 16 {
        return Err(CliError::Runtime(format!(
            "map dump size mismatch: header says {rows}x{cols}, file has {} bytes",
            bytes.len()
        )));
    }
    let mut m = Matrix::zeros(rows, cols);
    for (i, chunk) in bytes.chunks_exact(16).enumerate() {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        m.data[i] = Complex64::new(re, im);
    }
    Ok((m, meta))
}
