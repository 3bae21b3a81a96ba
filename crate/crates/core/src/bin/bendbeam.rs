use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bendbeam::array::write_codeword_csv;
use bendbeam::presets::{list_presets, preset};
use bendbeam::scenario::{self, Scenario};
use bendbeam::Error;

#[derive(Parser)]
#[command(name = "bendbeam", version, about = "Near-field bending-beam scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scenario and write its bundle.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Reduced resolution: λ/2 grid, few planes and realizations.
        #[arg(long)]
        ci: bool,
    },
    /// Run a built-in figure scenario.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        ci: bool,
        /// Print the scenario JSON instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// List built-in scenarios.
    ListPresets,
    /// Write the codeword CSV of the first array source.
    Codeword {
        config: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run only the frequency sweeps of a scenario.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn prepare(mut scn: Scenario, seed: Option<u64>, ci: bool) -> Scenario {
    if let Some(s) = seed {
        scn.seed = s;
    }
    if ci {
        scn = scn.reduced_for_ci();
    }
    scn
}

fn report(m: &scenario::Manifest, out: &std::path::Path) {
    println!("wrote {} files and manifest.json to {}", m.outputs.len(), out.display());
}

fn execute(cli: Cli) -> bendbeam::Result<()> {
    match cli.command {
        Command::Run { config, out, seed, ci } => {
            let scn = prepare(scenario::load(&config)?, seed, ci);
            let m = scenario::run(&scn, &out)?;
            report(&m, &out);
        }
        Command::Preset {
            name,
            out,
            seed,
            ci,
            print_config,
        } => {
            let scn = prepare(preset(&name)?, seed, ci);
            if print_config {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                let text = serde_json::to_string_pretty(&scn)?;
                writeln!(w, "{text}")?;
            } else {
                let out = out.unwrap_or_else(|| PathBuf::from("out").join(&name));
                let m = scenario::run(&scn, &out)?;
                report(&m, &out);
            }
        }
        Command::ListPresets => {
            let mut w = io::stdout().lock();
            for p in list_presets() {
                writeln!(w, "{:<8} {}", p.name, p.description)?;
            }
        }
        Command::Codeword { config, out } => {
            let code = scenario::codeword(&scenario::load(&config)?)?;
            match out {
                Some(p) => write_codeword_csv(&code, BufWriter::new(File::create(p)?))?,
                None => write_codeword_csv(&code, io::stdout().lock())?,
            }
        }
        Command::Sweep { config, out } => {
            let m = scenario::sweep(&scenario::load(&config)?, &out)?;
            report(&m, &out);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Validation { .. } => 2,
                Error::Resource { .. } => 3,
                _ => 1,
            })
        }
    }
}
