use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pseudoport::cli;
use pseudoport::engine::Fault;

#[derive(Parser)]
#[command(
    name = "pseudoport",
    version,
    about = "Pseudo-quad-port SRAM wrapper simulator"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a stimulus file and print access statistics.
    Run {
        /// Stimulus file (one line per external cycle).
        stimulus: PathBuf,
        /// Configuration file (`key = value` lines); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write a VCD waveform here.
        #[arg(long)]
        vcd: Option<PathBuf>,
        /// Also write the statistics to this file.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Check the engine against the reference model on seeded random stimulus.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        cycles: usize,
        #[arg(long, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// Generate seeded random stimulus.
    Gen {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cycles: usize,
        /// Output path (stdout when omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    ReverseOrder,
    CorruptRead,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Fault {
        match f {
            FaultArg::ReverseOrder => Fault::ReverseServiceOrder,
            FaultArg::CorruptRead => Fault::CorruptRead,
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Run {
            stimulus,
            config,
            vcd,
            stats,
        } => cli::cmd_run(
            config.as_deref(),
            &stimulus,
            vcd.as_deref(),
            stats.as_deref(),
        ),
        Command::Verify {
            config,
            seed,
            cycles,
            inject_fault,
        } => cli::cmd_verify(
            config.as_deref(),
            seed,
            cycles,
            inject_fault.map(Fault::from),
        ),
        Command::Gen {
            config,
            seed,
            cycles,
            out,
        } => cli::cmd_gen(config.as_deref(), seed, cycles, out.as_deref()),
    };
    match result {
        Ok(text) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
