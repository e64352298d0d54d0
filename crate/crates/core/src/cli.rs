//! Command implementations behind the `pseudoport` binary.
//!
//! Each command returns the text destined for stdout, or a [`CliError`]
//! carrying the process exit code: 1 for input/validation problems, 2 for
//! internal invariant failures, 3 for an equivalence divergence.

use std::fs;
use std::path::Path;

use crate::engine::{run_stimulus, Fault};
use crate::model::SimConfig;
use crate::rng::XorShift64Star;
use crate::stimulus::{parse_config, parse_stimulus, render_stimulus};
use crate::trace::{emit_vcd, render_stats};
use crate::verify::{check_equivalence, random_geometry, random_priority, random_stimulus};

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INTERNAL: u8 = 2;
pub const EXIT_DIVERGENCE: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn input(message: String) -> Self {
        CliError {
            code: EXIT_INPUT,
            message,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: cannot read: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::input(format!("{}: cannot write: {e}", path.display())))
}

pub fn load_config(path: Option<&Path>) -> Result<SimConfig, CliError> {
    let Some(path) = path else {
        return Ok(SimConfig::default());
    };
    parse_config(&read_text(path)?).map_err(|e| {
        let mut msg = match e.line() {
            Some(line) => format!("{}:{line}: {e}", path.display()),
            None => format!("{}: {e}", path.display()),
        };
        if let Some(src) = std::error::Error::source(&e) {
            msg.push_str(&format!(" ({src})"));
        }
        CliError::input(msg)
    })
}

pub fn cmd_run(
    config: Option<&Path>,
    stimulus: &Path,
    vcd_out: Option<&Path>,
    stats_out: Option<&Path>,
) -> Result<String, CliError> {
    let cfg = load_config(config)?;
    let text = read_text(stimulus)?;
    let cycles = parse_stimulus(&text, &cfg)
        .map_err(|e| CliError::input(format!("{}:{}: {e}", stimulus.display(), e.line())))?;
    let run = run_stimulus(&cfg, &cycles).map_err(|e| CliError {
        code: if e.is_internal() {
            EXIT_INTERNAL
        } else {
            EXIT_INPUT
        },
        message: format!("{}: {e}", stimulus.display()),
    })?;
    if let Some(path) = vcd_out {
        let vcd = emit_vcd(&run.trace).map_err(|e| CliError {
            code: EXIT_INTERNAL,
            message: format!("trace invariant violated: {e}"),
        })?;
        write_text(path, &vcd)?;
    }
    let stats = render_stats(&run.stats);
    if let Some(path) = stats_out {
        write_text(path, &stats)?;
    }
    Ok(stats)
}

/// Config for a verify run: geometry from `config` if given, otherwise drawn
/// from the seed; the priority order is always drawn from the seed.
pub fn verify_config(config: Option<SimConfig>, rng: &mut XorShift64Star) -> SimConfig {
    let mut cfg = match config {
        Some(cfg) => cfg,
        None => {
            let (word_width, array_words) = random_geometry(rng);
            SimConfig {
                word_width,
                array_words,
                ..SimConfig::default()
            }
        }
    };
    cfg.priority_order = random_priority(rng);
    cfg
}

pub fn cmd_verify(
    config: Option<&Path>,
    seed: u64,
    n_cycles: usize,
    fault: Option<Fault>,
) -> Result<String, CliError> {
    let base = config.map(|p| load_config(Some(p))).transpose()?;
    let mut rng = XorShift64Star::new(seed);
    let cfg = verify_config(base, &mut rng);
    let stimulus = random_stimulus(&mut rng, &cfg, n_cycles);
    let eq = check_equivalence(&cfg, &stimulus, fault).map_err(|e| CliError {
        code: if e.is_internal() {
            EXIT_INTERNAL
        } else {
            EXIT_INPUT
        },
        message: format!("seed {seed}: {e}"),
    })?;
    let prio: Vec<String> = cfg.priority_order.iter().map(|p| p.to_string()).collect();
    let header = format!(
        "seed {seed}: {n_cycles} cycles, {}-bit x {} words, priority {}",
        cfg.word_width,
        cfg.array_words,
        prio.join(">")
    );
    match eq.divergence {
        Some(d) => Err(CliError {
            code: EXIT_DIVERGENCE,
            message: format!("{header}\nDIVERGENCE {d}"),
        }),
        None if n_cycles == 0 => Ok(format!("{header}\nPASS (vacuous: no cycles)\n")),
        None => Ok(format!(
            "{header}\nPASS: engine matches oracle ({} reads checked, final memory equal)\n",
            eq.reads_checked
        )),
    }
}

pub fn cmd_gen(
    config: Option<&Path>,
    seed: u64,
    n_cycles: usize,
    out: Option<&Path>,
) -> Result<String, CliError> {
    let cfg = load_config(config)?;
    let mut rng = XorShift64Star::new(seed);
    let text = render_stimulus(&random_stimulus(&mut rng, &cfg, n_cycles));
    match out {
        Some(path) => {
            write_text(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}
