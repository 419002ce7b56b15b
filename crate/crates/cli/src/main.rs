use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isacsim_cli::scenario::load_scenario;
use isacsim_cli::{runner, CliError, CliResult};

#[derive(Parser)]
#[command(name = "isacsim", about = "Full-duplex sensing/communication link simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a scenario file and write CSV/map artifacts.
    Run {
        scenario: PathBuf,
        /// Output directory (overrides the scenario's `out` key).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base RNG seed (overrides the scenario's `seed` key).
        #[arg(long)]
        seed: Option<u64>,
        /// Monte Carlo trials per sweep point (overrides `trials`).
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and check a scenario file without running it.
    Validate { scenario: PathBuf },
    /// Print a named reference value used to pin the test tables.
    Oracle { name: String },
}

fn run(cmd: Cmd) -> CliResult<()> {
    match cmd {
        Cmd::Run {
            scenario,
            out,
            seed,
            trials,
            threads,
        } => {
            let echo = std::fs::read_to_string(&scenario)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", scenario.display())))?;
            let mut s = load_scenario(&scenario)?;
            if let Some(dir) = out {
                s.out_dir = dir;
            }
            if let Some(v) = seed {
                s.seed = v;
            }
            if let Some(v) = trials {
                if v < 1 {
                    return Err(CliError::Config("trials must be >= 1".into()));
                }
                s.trials = v;
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            pool.install(|| runner::run_scenario(&s, &echo))?;
            println!("wrote artifacts to {}", s.out_dir.display());
            Ok(())
        }
        Cmd::Validate { scenario } => {
            let s = load_scenario(&scenario)?;
            println!(
                "ok: {} sweep point(s), {} trial(s), out {}",
                s.sweep_values.len().max(1),
                s.trials,
                s.out_dir.display()
            );
            Ok(())
        }
        Cmd::Oracle { name } => oracle(&name),
    }
}

fn oracle(name: &str) -> CliResult<()> {
    use isacsim_core::frame::FrameConfig;
    use isacsim_core::metrics::{marcum_q1, pd_analytic};
    match name {
        "marcum" => {
            for (a, b) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (3.0, 4.0), (0.5, 3.0), (5.0, 2.0)]
            {
                println!("Q1({a}, {b}) = {:.16}", marcum_q1(a, b));
            }
        }
        "pd-point" => {
            println!("P_D(sinr=10, pfa=1e-6) = {:.16}", pd_analytic(10.0, 1e-6));
        }
        "frame-dims" => {
            for (label, cfg) in [
                ("reference", FrameConfig::reference()),
                ("desk", FrameConfig::desk()),
            ] {
                let d = cfg.dims();
                println!(
                    "{label}: n_r_tot={} n_c_tot={} n_tot={} n_obs={} t_tot={:e}",
                    d.n_r_tot, d.n_c_tot, d.n_tot, d.n_obs, d.t_tot
                );
            }
        }
        "coupled-shift" => {
            // affine peak displacement for one delayed carrier, n=512,
            // 2*n*c1=6, l=10: down by 60 bins
            use isacsim_core::transforms::{daft, idaft, DaftParams};
            use isacsim_core::{Domain, Signal};
            use num_complex::Complex64;
            let n = 512usize;
            let p = DaftParams::new(
                n,
                num_rational::Ratio::new(6, 2 * n as i64),
                num_rational::Ratio::new(1, (n * n) as i64),
            )?;
            let mut grid = vec![Complex64::new(0.0, 0.0); n];
            grid[100] = Complex64::new(1.0, 0.0);
            let time = idaft(&Signal::new(grid, Domain::Affine), &p)?;
            let delayed: Vec<Complex64> = (0..n).map(|i| time.samples[(i + n - 10) % n]).collect();
            let back = daft(&Signal::time(delayed), &p)?;
            let peak = back
                .samples
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
                .unwrap()
                .0;
            println!("carrier 100, l=10 -> peak bin {peak}");
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown oracle \"{other}\"; available: marcum, pd-point, frame-dims, coupled-shift"
            )))
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
