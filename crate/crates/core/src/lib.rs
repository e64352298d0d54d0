//! Cycle-accurate behavioral simulator of a pseudo-quad-port SRAM wrapper.
//!
//! A single-port SRAM macro is shared by up to four read/write ports. In each
//! external clock period the wrapper latches all port requests, then services
//! the enabled ports one after another in a configurable priority order,
//! one SRAM access per sub-cycle. Read data reaches the ports one external
//! cycle later.
//!
//! The [`oracle`] module holds an independent fold-based model of the same
//! semantics; [`verify`] checks the [`engine`] against it.

pub mod arbiter;
pub mod cli;
pub mod clockgen;
pub mod engine;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod sram;
pub mod stimulus;
pub mod trace;
pub mod vcd_read;
pub mod verify;

pub use engine::{run_stimulus, wrapper_cycle, Engine, EngineError, RunError, RunResult};
pub use model::{
    validate_config, ClockEvent, ClockEvents, CycleRequests, EngineState, PortId, PortOutput,
    PortRequest, SimConfig, Stats, Word,
};
pub use sram::SramMacro;
pub use trace::{emit_vcd, Trace};
