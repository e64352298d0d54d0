//! The wrapper orchestrator.
//!
//! One call to [`wrapper_cycle`] is one period of the external clock:
//!
//! 1. the output registers as they stood at entry are presented on the ports;
//! 2. CLKP latches the four requests and loads the FSM from the priority encoder;
//! 3. each BACK edge services the selected port (one SRAM access) and, for a
//!    read, captures the data into that port's output register;
//! 4. each CLK2 edge advances the FSM to the next enabled port.

use thiserror::Error;

use crate::arbiter::{fsm_reset, fsm_step, rank};
use crate::clockgen::{count_enabled, generate_clock_events};
use crate::model::{
    enable_mask, validate_config, Addr, ClockEvent, ClockEvents, ConfigError, CycleRequests,
    EngineState, PortId, PortOutput, PortRequest, SimConfig, Stats, Word, NUM_PORTS,
};
use crate::sram::SramError;
use crate::trace::{summarize, AccessCount, Trace, TraceRecorder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("port {port}: {source}")]
    Port {
        port: PortId,
        #[source]
        source: SramError,
    },
    #[error("internal sequencing error: {0}")]
    InternalSequencing(String),
}

impl EngineError {
    pub fn is_internal(&self) -> bool {
        matches!(self, EngineError::InternalSequencing(_))
    }
}

/// Deliberate engine defects used to check that the equivalence harness
/// notices divergence. Never enabled in normal runs.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// The FSM walks the priority order backwards.
    ReverseServiceOrder,
    /// Captured read data has its low bit flipped.
    CorruptRead,
}

/// One port serviced in one sub-cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Service {
    /// BACK pulse ordinal (1-based).
    pub slot: u8,
    pub port: PortId,
    pub write: bool,
    pub addr: Addr,
    /// Written data, or the data read.
    pub data: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleOutcome {
    pub cycle: u64,
    pub presented: [PortOutput; NUM_PORTS],
    pub latched: CycleRequests,
    pub clock: ClockEvents,
    /// FSM state after the CLKP load.
    pub reset_to: Option<PortId>,
    pub services: Vec<Service>,
}

impl CycleOutcome {
    pub fn access_count(&self) -> AccessCount {
        let writes = self.services.iter().filter(|s| s.write).count() as u32;
        AccessCount {
            reads: self.services.len() as u32 - writes,
            writes,
        }
    }
}

pub fn wrapper_cycle(
    state: &mut EngineState,
    requests: &CycleRequests,
    cfg: &SimConfig,
) -> Result<CycleOutcome, EngineError> {
    run_cycle(state, requests, cfg, None)
}

fn check_requests(state: &EngineState, requests: &CycleRequests) -> Result<(), EngineError> {
    for (port, req) in PortId::ALL.iter().zip(requests) {
        if !req.enabled {
            continue;
        }
        let wrap = |source| EngineError::Port {
            port: *port,
            source,
        };
        state.mem.check_addr(req.addr).map_err(wrap)?;
        if req.write_not_read {
            state.mem.check_data(req.wdata).map_err(wrap)?;
        }
    }
    Ok(())
}

fn run_cycle(
    state: &mut EngineState,
    requests: &CycleRequests,
    cfg: &SimConfig,
    fault: Option<Fault>,
) -> Result<CycleOutcome, EngineError> {
    // Reject bad requests before anything is latched so a failed cycle
    // leaves the state untouched.
    check_requests(state, requests)?;

    let presented = state.out_regs;
    for reg in &mut state.out_regs {
        reg.fresh = false;
    }

    state.latched = requests.map(|r| if r.enabled { r } else { PortRequest::IDLE });
    let mask = enable_mask(&state.latched);
    let n_active = count_enabled(&state.latched);
    let clock = generate_clock_events(n_active);

    let mut priority = cfg.priority_order;
    if fault == Some(Fault::ReverseServiceOrder) {
        priority.reverse();
    }

    let reset_to = fsm_reset(&mask, &priority);
    if reset_to.is_some() {
        state.selected = reset_to;
    }
    state.mem.begin_cycle();

    let mut services = Vec::with_capacity(n_active);
    for event in &clock.events {
        match *event {
            ClockEvent::ClkpSpike => {}
            ClockEvent::BackEdge(k) => {
                let port = state.selected.ok_or_else(|| {
                    EngineError::InternalSequencing(format!("BACK({k}) with no port selected"))
                })?;
                let req = state.latched[port.index()];
                let wrap = |source| EngineError::Port { port, source };
                let data = if req.write_not_read {
                    state.mem.write(req.addr, req.wdata).map_err(wrap)?;
                    req.wdata
                } else {
                    let mut rdata = state.mem.read(req.addr).map_err(wrap)?;
                    if fault == Some(Fault::CorruptRead) {
                        rdata ^= 1;
                    }
                    state.out_regs[port.index()] = PortOutput { rdata, fresh: true };
                    rdata
                };
                services.push(Service {
                    slot: k,
                    port,
                    write: req.write_not_read,
                    addr: req.addr,
                    data,
                });
            }
            ClockEvent::Clk2Edge(k) => {
                let current = state.selected.ok_or_else(|| {
                    EngineError::InternalSequencing(format!("CLK2({k}) with no port selected"))
                })?;
                let next = fsm_step(current, &mask, &priority)
                    .map_err(|e| EngineError::InternalSequencing(e.to_string()))?;
                if rank(next, &priority) <= rank(current, &priority) {
                    return Err(EngineError::InternalSequencing(format!(
                        "CLK2({k}) wrapped the FSM from {current} to {next}"
                    )));
                }
                state.selected = Some(next);
            }
        }
    }

    let logged = state.mem.access_log().last().copied().unwrap_or(0) as usize;
    if services.len() != n_active || logged != n_active {
        return Err(EngineError::InternalSequencing(format!(
            "{n_active} ports enabled but {} serviced ({logged} SRAM accesses)",
            services.len()
        )));
    }

    let outcome = CycleOutcome {
        cycle: state.cycle,
        presented,
        latched: state.latched,
        clock,
        reset_to,
        services,
    };
    state.presented = presented;
    state.cycle += 1;
    Ok(outcome)
}

/// A configured engine instance.
#[derive(Clone, Debug)]
pub struct Engine {
    cfg: SimConfig,
    state: EngineState,
    fault: Option<Fault>,
}

impl Engine {
    pub fn new(cfg: SimConfig) -> Result<Engine, ConfigError> {
        let cfg = validate_config(cfg)?;
        Ok(Engine {
            state: EngineState::new(&cfg),
            cfg,
            fault: None,
        })
    }

    #[doc(hidden)]
    pub fn with_fault(mut self, fault: Option<Fault>) -> Engine {
        self.fault = fault;
        self
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn state(&self) -> &EngineState {
        &self.state
    }

    pub fn into_state(self) -> EngineState {
        self.state
    }

    pub fn cycle(&mut self, requests: &CycleRequests) -> Result<CycleOutcome, EngineError> {
        run_cycle(&mut self.state, requests, &self.cfg, self.fault)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cycle {cycle}: {source}")]
    Cycle {
        cycle: usize,
        #[source]
        source: EngineError,
    },
}

impl RunError {
    pub fn is_internal(&self) -> bool {
        matches!(self, RunError::Cycle { source, .. } if source.is_internal())
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub state: EngineState,
    /// What each port presented during each cycle.
    pub outputs: Vec<[PortOutput; NUM_PORTS]>,
    pub trace: Trace,
    pub stats: Stats,
}

pub fn run_stimulus(cfg: &SimConfig, stimulus: &[CycleRequests]) -> Result<RunResult, RunError> {
    run_stimulus_with(cfg, stimulus, None)
}

#[doc(hidden)]
pub fn run_stimulus_with(
    cfg: &SimConfig,
    stimulus: &[CycleRequests],
    fault: Option<Fault>,
) -> Result<RunResult, RunError> {
    let mut engine = Engine::new(*cfg)?.with_fault(fault);
    let mut recorder = TraceRecorder::new(&engine.cfg);
    let mut outputs = Vec::with_capacity(stimulus.len());
    let mut counts = Vec::with_capacity(stimulus.len());
    for (cycle, requests) in stimulus.iter().enumerate() {
        let outcome = engine
            .cycle(requests)
            .map_err(|source| RunError::Cycle { cycle, source })?;
        recorder.record_cycle(&outcome);
        outputs.push(outcome.presented);
        counts.push(outcome.access_count());
    }
    let stats = summarize(&counts, &engine.cfg);
    Ok(RunResult {
        state: engine.into_state(),
        outputs,
        trace: recorder.finish(),
        stats,
    })
}

/// Memory access rate for an average of `n_active_avg` serviced ports per
/// external cycle.
pub fn effective_access_rate(n_active_avg: f64, clk_freq_hz: f64) -> f64 {
    n_active_avg * clk_freq_hz
}
