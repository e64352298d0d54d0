//! Internal clock generation for one external period.
//!
//! The external clock is split into `N` service slots, one per enabled port.
//! `BACK` pulses once at the end of each slot to capture read data and `CLK2`
//! pulses between slots to advance the port FSM, so an `N`-port cycle carries
//! `N` BACK pulses and `N - 1` CLK2 pulses after the initial CLKP spike.

use thiserror::Error;

use crate::model::{ClockEvent, ClockEvents, CycleRequests, NUM_PORTS};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ClockError {
    #[error("enabled-port count {0} has no 2-bit encoding (valid range 1..=4)")]
    OutOfRange(usize),
}

pub fn count_enabled(requests: &CycleRequests) -> usize {
    requests.iter().filter(|r| r.enabled).count()
}

/// B1B0 encoding: 1 port -> 0b00 … 4 ports -> 0b11.
pub fn encode_port_count(n: usize) -> Result<u8, ClockError> {
    if (1..=NUM_PORTS).contains(&n) {
        Ok((n - 1) as u8)
    } else {
        Err(ClockError::OutOfRange(n))
    }
}

/// Inverse of [`encode_port_count`]; only the low two bits are read.
pub fn decode_port_count(b1b0: u8) -> usize {
    (b1b0 & 0b11) as usize + 1
}

/// Builds the event order CLKP, BACK(1), CLK2(1), BACK(2), …, BACK(n).
///
/// `n_active` above 4 is clamped; an idle cycle yields the CLKP spike only.
pub fn generate_clock_events(n_active: usize) -> ClockEvents {
    let n = n_active.min(NUM_PORTS) as u8;
    let mut events = Vec::with_capacity(2 * n as usize);
    events.push(ClockEvent::ClkpSpike);
    for k in 1..=n {
        events.push(ClockEvent::BackEdge(k));
        if k < n {
            events.push(ClockEvent::Clk2Edge(k));
        }
    }
    ClockEvents {
        n_active: n,
        events,
        b1b0: encode_port_count(n as usize).ok(),
    }
}
