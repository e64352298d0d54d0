//! Random stimulus generation and engine-versus-oracle equivalence checking.

use std::fmt;

use crate::engine::{run_stimulus_with, Fault, RunError};
use crate::model::{
    word_mask, CycleRequests, PortId, PortOutput, PortRequest, SimConfig, Word, NUM_PORTS,
};
use crate::oracle::{oracle_run, ReadResults};
use crate::rng::XorShift64Star;

/// Addresses below this bound are drawn half the time so that same-cycle
/// conflicts between ports are common.
pub const HOT_ADDRESSES: u64 = 4;

/// Fisher-Yates shuffle of A..D.
pub fn random_priority(rng: &mut XorShift64Star) -> [PortId; NUM_PORTS] {
    let mut order = PortId::ALL;
    for i in (1..NUM_PORTS).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    order
}

/// Width in 1..=32 bits and depth in 16..=4096 words.
pub fn random_geometry(rng: &mut XorShift64Star) -> (u32, usize) {
    let width = 1 + rng.below(32) as u32;
    let depth = 16 + rng.below(4096 - 16 + 1) as usize;
    (width, depth)
}

pub fn random_request(rng: &mut XorShift64Star, cfg: &SimConfig) -> PortRequest {
    let r = rng.next_u64();
    if r & 0b11 == 0 {
        return PortRequest::IDLE;
    }
    let write = (r >> 2) & 1 == 1;
    let hot = (r >> 3) & 1 == 1;
    let depth = cfg.array_words as u64;
    let addr = if hot {
        rng.below(depth.min(HOT_ADDRESSES))
    } else {
        rng.below(depth)
    };
    if write {
        PortRequest::write(addr, rng.next_u64() & word_mask(cfg.word_width))
    } else {
        PortRequest::read(addr)
    }
}

pub fn random_stimulus(
    rng: &mut XorShift64Star,
    cfg: &SimConfig,
    n_cycles: usize,
) -> Vec<CycleRequests> {
    (0..n_cycles)
        .map(|_| std::array::from_fn(|_| random_request(rng, cfg)))
        .collect()
}

/// First point where the engine and the oracle disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Divergence {
    /// `cycle` is the cycle in which the read was issued; the engine shows
    /// it one cycle later.
    Output {
        cycle: usize,
        port: PortId,
        expected: Option<Word>,
        got: PortOutput,
    },
    Memory {
        addr: usize,
        expected: Word,
        got: Word,
    },
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<Word>| match v {
            Some(v) => format!("{v:#x}"),
            None => "no fresh read".to_string(),
        };
        match self {
            Divergence::Output {
                cycle,
                port,
                expected,
                got,
            } => write!(
                f,
                "cycle {cycle} port {port}: expected {}, got {}",
                show(*expected),
                show(got.fresh.then_some(got.rdata))
            ),
            Divergence::Memory {
                addr,
                expected,
                got,
            } => write!(
                f,
                "final memory at {addr:#x}: expected {expected:#x}, got {got:#x}"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub cycles: usize,
    pub reads_checked: usize,
    pub divergence: Option<Divergence>,
}

fn check_port(
    cycle: usize,
    port: PortId,
    expected: Option<Word>,
    got: PortOutput,
) -> Option<Divergence> {
    let ok = match expected {
        Some(v) => got.fresh && got.rdata == v,
        None => !got.fresh,
    };
    (!ok).then_some(Divergence::Output {
        cycle,
        port,
        expected,
        got,
    })
}

/// Runs the engine and the oracle on the same stimulus and compares them.
///
/// Engine output presented in cycle `t + 1` must equal the oracle's read
/// result for cycle `t`; reads of the last cycle are taken from the engine's
/// output registers. Presented values with `fresh = false` must correspond to
/// ports that did not read, and final memories must be equal.
pub fn check_equivalence(
    cfg: &SimConfig,
    stimulus: &[CycleRequests],
    fault: Option<Fault>,
) -> Result<Equivalence, RunError> {
    let engine = run_stimulus_with(cfg, stimulus, fault)?;
    let oracle = oracle_run(cfg, stimulus).expect("engine accepted a stimulus the oracle rejects");
    let mut reads_checked = 0;
    let mut divergence = None;

    if let Some(first) = engine.outputs.first() {
        for port in PortId::ALL {
            divergence = divergence.or_else(|| check_port(0, port, None, first[port.index()]));
        }
    }
    let shifted = engine
        .outputs
        .iter()
        .skip(1)
        .copied()
        .chain(std::iter::once(engine.state.out_regs));
    'cycles: for (cycle, (expected, got)) in oracle.results.iter().zip(shifted).enumerate() {
        let expected: &ReadResults = expected;
        for port in PortId::ALL {
            let e = expected[port.index()];
            reads_checked += e.is_some() as usize;
            if divergence.is_none() {
                divergence = check_port(cycle, port, e, got[port.index()]);
            }
            if divergence.is_some() {
                break 'cycles;
            }
        }
    }
    if divergence.is_none() {
        divergence = oracle
            .mem
            .iter()
            .zip(engine.state.mem.words())
            .position(|(a, b)| a != b)
            .map(|addr| Divergence::Memory {
                addr,
                expected: oracle.mem[addr],
                got: engine.state.mem.words()[addr],
            });
    }
    Ok(Equivalence {
        cycles: stimulus.len(),
        reads_checked,
        divergence,
    })
}
