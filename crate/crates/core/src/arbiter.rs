//! Priority encoder and the port-walking FSM.
//!
//! At every CLKP the FSM is loaded with the highest-priority enabled port.
//! Each CLK2 edge then moves it to the next enabled port in priority order,
//! skipping disabled ports.

use thiserror::Error;

use crate::model::{EnableMask, PortId, NUM_PORTS};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ArbiterError {
    #[error("FSM stepped from port {0}, which is not enabled")]
    CurrentDisabled(PortId),
}

pub fn highest_priority(mask: &EnableMask, priority: &[PortId; NUM_PORTS]) -> Option<PortId> {
    priority.iter().copied().find(|p| mask[p.index()])
}

/// Asynchronous load of the FSM from the priority encoder on CLKP.
pub fn fsm_reset(mask: &EnableMask, priority: &[PortId; NUM_PORTS]) -> Option<PortId> {
    highest_priority(mask, priority)
}

/// Next enabled port strictly after `current` in priority order, wrapping to
/// the first enabled port after the last one.
pub fn fsm_step(
    current: PortId,
    mask: &EnableMask,
    priority: &[PortId; NUM_PORTS],
) -> Result<PortId, ArbiterError> {
    if !mask[current.index()] {
        return Err(ArbiterError::CurrentDisabled(current));
    }
    let pos = priority
        .iter()
        .position(|&p| p == current)
        .ok_or(ArbiterError::CurrentDisabled(current))?;
    let next = (1..=NUM_PORTS)
        .map(|off| priority[(pos + off) % NUM_PORTS])
        .find(|p| mask[p.index()])
        .unwrap_or(current);
    Ok(next)
}

/// Rank of `port` in the priority order (0 = highest).
pub fn rank(port: PortId, priority: &[PortId; NUM_PORTS]) -> usize {
    priority
        .iter()
        .position(|&p| p == port)
        .unwrap_or(NUM_PORTS)
}
