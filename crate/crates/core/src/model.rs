//! Shared domain types and the run configuration.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::sram::SramMacro;

/// Unsigned storage for one memory word. Widths up to 64 bits are supported.
pub type Word = u64;

/// Word address into the SRAM macro.
pub type Addr = u64;

/// Number of ports on the wrapper.
pub const NUM_PORTS: usize = 4;

/// Identity of one of the four wrapper ports (0 = A … 3 = D).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortId(u8);

impl PortId {
    pub const A: PortId = PortId(0);
    pub const B: PortId = PortId(1);
    pub const C: PortId = PortId(2);
    pub const D: PortId = PortId(3);

    pub const ALL: [PortId; NUM_PORTS] = [PortId::A, PortId::B, PortId::C, PortId::D];

    pub fn new(index: usize) -> Option<PortId> {
        (index < NUM_PORTS).then_some(PortId(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn letter(self) -> char {
        (b'A' + self.0) as char
    }
}

impl fmt::Display for PortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown port `{0}` (expected one of A, B, C, D)")]
pub struct ParsePortIdError(pub String);

impl FromStr for PortId {
    type Err = ParsePortIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(PortId::A),
            "B" | "b" => Ok(PortId::B),
            "C" | "c" => Ok(PortId::C),
            "D" | "d" => Ok(PortId::D),
            other => Err(ParsePortIdError(other.to_string())),
        }
    }
}

/// One port's input bundle for a single external cycle.
///
/// `write_not_read` mirrors the `w/rb` pin: true selects a write of `wdata`
/// to `addr`, false selects a read of `addr`. When `enabled` is false the
/// other fields are don't-care.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PortRequest {
    pub enabled: bool,
    pub write_not_read: bool,
    pub addr: Addr,
    pub wdata: Word,
}

impl PortRequest {
    pub const IDLE: PortRequest = PortRequest {
        enabled: false,
        write_not_read: false,
        addr: 0,
        wdata: 0,
    };

    pub fn read(addr: Addr) -> Self {
        PortRequest {
            enabled: true,
            write_not_read: false,
            addr,
            wdata: 0,
        }
    }

    pub fn write(addr: Addr, wdata: Word) -> Self {
        PortRequest {
            enabled: true,
            write_not_read: true,
            addr,
            wdata,
        }
    }

    pub fn is_read(&self) -> bool {
        self.enabled && !self.write_not_read
    }

    pub fn is_write(&self) -> bool {
        self.enabled && self.write_not_read
    }
}

/// The four requests presented to the wrapper in one external cycle.
pub type CycleRequests = [PortRequest; NUM_PORTS];

/// Value visible on a port's read-data pins.
///
/// `fresh` is set only when `rdata` was captured from a read serviced in the
/// immediately preceding external cycle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PortOutput {
    pub rdata: Word,
    pub fresh: bool,
}

/// Enable bits in port order A..D.
pub type EnableMask = [bool; NUM_PORTS];

pub fn enable_mask(requests: &CycleRequests) -> EnableMask {
    requests.map(|r| r.enabled)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("priority_order must list each of A, B, C, D exactly once (got {0})")]
    NonPermutationPriority(String),
    #[error("word_width must be at least 1")]
    ZeroWidth,
    #[error("word_width {0} exceeds the 64-bit word storage")]
    WidthTooLarge(u32),
    #[error("array_words must be at least 1")]
    ZeroDepth,
    #[error("clk_freq_hz must be non-zero")]
    ZeroFrequency,
    #[error("clk_freq_hz {0} leaves fewer than {MIN_PERIOD_PS} ps per external cycle")]
    ClockTooFast(u64),
    #[error("init_fill {fill:#x} does not fit in word_width {width}")]
    FillTooWide { fill: Word, width: u32 },
}

/// Shortest external period, in picoseconds, that still gives every
/// sub-cycle pulse a distinct rising and falling tick.
pub const MIN_PERIOD_PS: u64 = 16;

pub const PS_PER_SECOND: u64 = 1_000_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SimConfig {
    pub word_width: u32,
    pub array_words: usize,
    /// Highest priority first.
    pub priority_order: [PortId; NUM_PORTS],
    /// Only used for reporting and for trace timing.
    pub clk_freq_hz: u64,
    pub init_fill: Word,
}

impl Default for SimConfig {
    /// 8-bit x 2048 words (a 16 Kb macro), A > B > C > D, 250 MHz.
    fn default() -> Self {
        SimConfig {
            word_width: 8,
            array_words: 2048,
            priority_order: PortId::ALL,
            clk_freq_hz: 250_000_000,
            init_fill: 0,
        }
    }
}

impl SimConfig {
    pub fn capacity_bits(&self) -> u64 {
        self.word_width as u64 * self.array_words as u64
    }

    pub fn word_mask(&self) -> Word {
        word_mask(self.word_width)
    }

    pub fn fits_word(&self, value: Word) -> bool {
        value & !self.word_mask() == 0
    }

    /// External clock period in picoseconds.
    pub fn period_ps(&self) -> u64 {
        PS_PER_SECOND / self.clk_freq_hz.max(1)
    }

    /// Bits needed for an address bus spanning the array (at least 1).
    pub fn addr_width(&self) -> u32 {
        let max_addr = self.array_words.saturating_sub(1) as u64;
        (u64::BITS - max_addr.leading_zeros()).max(1)
    }
}

pub fn word_mask(width: u32) -> Word {
    if width >= Word::BITS {
        Word::MAX
    } else {
        (1 << width) - 1
    }
}

pub fn is_permutation(order: &[PortId; NUM_PORTS]) -> bool {
    let mut seen = [false; NUM_PORTS];
    for p in order {
        if std::mem::replace(&mut seen[p.index()], true) {
            return false;
        }
    }
    true
}

/// Checks every configuration invariant, returning the config unchanged.
pub fn validate_config(cfg: SimConfig) -> Result<SimConfig, ConfigError> {
    if cfg.word_width == 0 {
        return Err(ConfigError::ZeroWidth);
    }
    if cfg.word_width > Word::BITS {
        return Err(ConfigError::WidthTooLarge(cfg.word_width));
    }
    if cfg.array_words == 0 {
        return Err(ConfigError::ZeroDepth);
    }
    if !is_permutation(&cfg.priority_order) {
        let listed: Vec<String> = cfg.priority_order.iter().map(|p| p.to_string()).collect();
        return Err(ConfigError::NonPermutationPriority(listed.join(",")));
    }
    if cfg.clk_freq_hz == 0 {
        return Err(ConfigError::ZeroFrequency);
    }
    if cfg.period_ps() < MIN_PERIOD_PS {
        return Err(ConfigError::ClockTooFast(cfg.clk_freq_hz));
    }
    if !cfg.fits_word(cfg.init_fill) {
        return Err(ConfigError::FillTooWide {
            fill: cfg.init_fill,
            width: cfg.word_width,
        });
    }
    Ok(cfg)
}

/// One tagged event inside an external clock period. Pulse ordinals start at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClockEvent {
    ClkpSpike,
    BackEdge(u8),
    Clk2Edge(u8),
}

impl ClockEvent {
    /// Tick slot within the period: CLKP in slot 0, BACK(k) in 2k-1, CLK2(k) in 2k.
    pub fn slot(self) -> u32 {
        match self {
            ClockEvent::ClkpSpike => 0,
            ClockEvent::BackEdge(k) => 2 * k as u32 - 1,
            ClockEvent::Clk2Edge(k) => 2 * k as u32,
        }
    }
}

/// The ordered sub-cycle event sequence for one external clock.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockEvents {
    pub n_active: u8,
    pub events: Vec<ClockEvent>,
    /// Enabled-port count encoding (`n_active - 1`); `None` for an idle cycle.
    pub b1b0: Option<u8>,
}

impl ClockEvents {
    pub fn back_edges(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, ClockEvent::BackEdge(_)))
            .count()
    }

    pub fn clk2_edges(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, ClockEvent::Clk2Edge(_)))
            .count()
    }

    /// Number of equal tick slots the period is divided into.
    pub fn slots(&self) -> u32 {
        2 * (self.n_active.max(1) as u32)
    }
}

/// Complete wrapper state between external clock cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineState {
    pub cycle: u64,
    /// Requests captured at the last CLKP; disabled ports are stored idle.
    pub latched: CycleRequests,
    /// Mux select / FSM state. `None` until some cycle has enabled ports.
    pub selected: Option<PortId>,
    pub out_regs: [PortOutput; NUM_PORTS],
    /// What the ports showed during the last executed cycle.
    pub presented: [PortOutput; NUM_PORTS],
    pub mem: SramMacro,
}

impl EngineState {
    pub fn new(cfg: &SimConfig) -> Self {
        EngineState {
            cycle: 0,
            latched: [PortRequest::IDLE; NUM_PORTS],
            selected: None,
            out_regs: [PortOutput::default(); NUM_PORTS],
            presented: [PortOutput::default(); NUM_PORTS],
            mem: SramMacro::new(cfg),
        }
    }
}

/// Access counts and derived throughput figures for a run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Stats {
    pub cycles_run: u64,
    pub sram_accesses: u64,
    pub reads: u64,
    pub writes: u64,
    pub effective_rate_hz: f64,
    pub bandwidth_bits_per_s: f64,
}
