//! Reference semantics for priority-sequential multi-port memory.
//!
//! A cycle is a left fold over the enabled ports in priority order: writes
//! land immediately and reads observe everything serviced before them. There
//! are no clocks, latches or output registers here; this is the behaviour the
//! engine must reproduce, not a second simulator.

use crate::model::{word_mask, CycleRequests, PortId, SimConfig, Word, NUM_PORTS};
use crate::sram::SramError;

/// Read result per port; `None` for disabled or writing ports.
pub type ReadResults = [Option<Word>; NUM_PORTS];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleError {
    pub port: PortId,
    pub source: SramError,
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "port {}: {}", self.port, self.source)
    }
}

impl std::error::Error for OracleError {}

pub fn oracle_cycle(
    mem: &mut [Word],
    width: u32,
    requests: &CycleRequests,
    priority: &[PortId; NUM_PORTS],
) -> Result<ReadResults, OracleError> {
    // validate first so a rejected cycle has no effect
    for &port in priority {
        let req = &requests[port.index()];
        if !req.enabled {
            continue;
        }
        let fail = |source| OracleError { port, source };
        if req.addr >= mem.len() as u64 {
            return Err(fail(SramError::AddrOutOfRange {
                addr: req.addr,
                depth: mem.len(),
            }));
        }
        if req.write_not_read && req.wdata > word_mask(width) {
            return Err(fail(SramError::DataTooWide {
                data: req.wdata,
                width,
            }));
        }
    }

    let mut results = [None; NUM_PORTS];
    for &port in priority {
        let req = &requests[port.index()];
        if !req.enabled {
            continue;
        }
        let cell = &mut mem[req.addr as usize];
        if req.write_not_read {
            *cell = req.wdata;
        } else {
            results[port.index()] = Some(*cell);
        }
    }
    Ok(results)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRun {
    pub mem: Vec<Word>,
    pub results: Vec<ReadResults>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRunError {
    pub cycle: usize,
    pub error: OracleError,
}

impl std::fmt::Display for OracleRunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cycle {}: {}", self.cycle, self.error)
    }
}

impl std::error::Error for OracleRunError {}

pub fn oracle_run(
    cfg: &SimConfig,
    stimulus: &[CycleRequests],
) -> Result<OracleRun, OracleRunError> {
    let mut mem = vec![cfg.init_fill; cfg.array_words];
    let mut results = Vec::with_capacity(stimulus.len());
    for (cycle, requests) in stimulus.iter().enumerate() {
        let r = oracle_cycle(&mut mem, cfg.word_width, requests, &cfg.priority_order)
            .map_err(|error| OracleRunError { cycle, error })?;
        results.push(r);
    }
    Ok(OracleRun { mem, results })
}
