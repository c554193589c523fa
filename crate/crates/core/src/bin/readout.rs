use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use readout_core::config::{parse_config, RunConfig};
use readout_core::output::write_table;
use readout_core::sweep;

#[derive(Parser)]
#[command(
    name = "readout",
    version,
    about = "Dispersive-readout sweeps for a multilevel qubit coupled to a linear resonator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// INI-style configuration file; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// csv writes .csv files; json additionally writes a .json mirror.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads for grid sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Accepted for interface stability; every run is fully deterministic,
    /// so the seed is unused.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep chi' and zeta' (analytic and numeric) over resonator frequency.
    Coeffs,
    /// Cavity pull and SNR curves for the three pull scenarios.
    Snr,
    /// Hysteresis power sweeps of the steady-state photon number.
    Response,
    /// 2D photon-number maps over measurement frequency and power.
    Map,
    /// Purcell, dressed-decay and dressed-dephasing rates vs power.
    Rates,
    /// Brute-force reference outputs (closed forms, block structure,
    /// fixed-point multiplicity).
    Oracle,
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, String> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli.config) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("config error: {message}");
            return ExitCode::from(1);
        }
    };

    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    let result = match cli.command {
        Command::Coeffs => sweep::cmd_coeffs(&cfg),
        Command::Snr => sweep::cmd_snr(&cfg),
        Command::Response => sweep::cmd_response(&cfg),
        Command::Map => sweep::cmd_map(&cfg),
        Command::Rates => sweep::cmd_rates(&cfg),
        Command::Oracle => sweep::cmd_oracle(&cfg),
    };
    let out = match result {
        Ok(out) => out,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };

    let echo = cfg.echo_lines();
    let json = matches!(cli.format, Format::Json);
    for table in &out.tables {
        match write_table(table, &cli.out, &echo, readout_core::VERSION, json) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {} ({} rows)", p.display(), table.rows.len());
                }
            }
            Err(e) => {
                eprintln!("write error: {e}");
                return ExitCode::from(1);
            }
        }
    }

    if !out.all_converged {
        eprintln!("warning: some solver points did not converge (flagged in output)");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
