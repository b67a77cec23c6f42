use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lattice_cavity::cavity_network::DeterminantMode;
use lattice_cavity::cli_io::{self, parse_config, RunConfig, Table};
use lattice_cavity::Error;

#[derive(Parser)]
#[command(
    name = "lattice-cavity",
    version,
    about = "Optics of a cavity loaded with an atomic Bragg lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stack reflection/transmission, closed form vs transfer-matrix product
    Coeffs(Common),
    /// Self-consistent lattice period
    Spacing(Common),
    /// log10(1/|D|^2) over frequency and atom position
    DetScan(Common),
    /// Linewidth against atom position, with and without atomic reflection
    LinewidthInset(Common),
    /// Field envelope on a resonant branch at a given detuning
    Envelope(Common),
    /// Complex determinant zeros in the frequency window
    Resonances(Common),
}

#[derive(Args)]
struct Common {
    /// key = value config file; the built-in worked example when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["full", "uniform-gas"])]
    mode: Option<String>,
    /// Detuning in free spectral ranges
    #[arg(long, allow_hyphen_values = true)]
    u: Option<f64>,
    #[arg(long)]
    branch: Option<usize>,
    #[arg(long)]
    n_u: Option<usize>,
    #[arg(long)]
    n_chi: Option<usize>,
    #[arg(long)]
    n_track: Option<usize>,
    #[arg(long)]
    samples_per_segment: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Config {
                    key: path.display().to_string(),
                    message: e.to_string(),
                })?;
                parse_config(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(m) = &self.mode {
            cfg.mode = m.parse::<DeterminantMode>()?;
        }
        if let Some(u) = self.u {
            cfg.u = u;
        }
        if let Some(b) = self.branch {
            cfg.branch = b;
        }
        for (flag, value, slot, min) in [
            ("n-u", self.n_u, &mut cfg.n_u, 2),
            ("n-chi", self.n_chi, &mut cfg.n_chi, 2),
            ("n-track", self.n_track, &mut cfg.n_track, 8),
            (
                "samples-per-segment",
                self.samples_per_segment,
                &mut cfg.samples_per_segment,
                1,
            ),
        ] {
            if let Some(v) = value {
                if v < min {
                    return Err(Error::Config {
                        key: flag.to_string(),
                        message: format!("must be at least {min}"),
                    });
                }
                *slot = v;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.display().to_string());
        }
        Ok(cfg)
    }
}

type Runner = fn(&RunConfig) -> Result<Table, Error>;

fn run(command: &Command) -> Result<(), Error> {
    let (common, runner): (&Common, Runner) = match command {
        Command::Coeffs(c) => (c, cli_io::cmd_coeffs),
        Command::Spacing(c) => (c, cli_io::cmd_spacing),
        Command::DetScan(c) => (c, cli_io::cmd_det_scan),
        Command::LinewidthInset(c) => (c, cli_io::cmd_linewidth_inset),
        Command::Envelope(c) => (c, cli_io::cmd_envelope),
        Command::Resonances(c) => (c, |cfg| {
            let (table, failed) = cli_io::cmd_resonances(cfg)?;
            for u in failed {
                eprintln!("warning: seed at u = {u} did not converge");
            }
            Ok(table)
        }),
    };
    let cfg = common.resolve()?;
    let text = runner(&cfg)?.render(cfg.format);
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Config {
            key: "out".to_string(),
            message: format!("{path}: {e}"),
        }),
        None => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = io::stdout().lock().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_config_error() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
