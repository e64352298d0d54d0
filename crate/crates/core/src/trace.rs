//! Signal-change recording, VCD emission and run statistics.

use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::CycleOutcome;
use crate::model::{ClockEvent, PortId, SimConfig, Stats};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("change for `{signal}` at tick {tick} precedes tick {last}")]
    NonMonotonicTime {
        signal: String,
        tick: u64,
        last: u64,
    },
    #[error("`{signal}` changes twice at tick {tick}")]
    DuplicateTick { signal: String, tick: u64 },
    #[error("signal index {0} is not declared")]
    UnknownSignal(usize),
    #[error("value {value:#x} does not fit `{signal}` ({width} bits)")]
    ValueTooWide {
        signal: String,
        value: u64,
        width: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignalDecl {
    pub name: String,
    pub width: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Change {
    pub tick: u64,
    pub signal: usize,
    pub value: u64,
}

/// Time-stamped value changes for a fixed set of declared signals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub timescale_ps: u64,
    pub signals: Vec<SignalDecl>,
    /// Values dumped under `$dumpvars`, one per signal.
    pub initial: Vec<u64>,
    pub changes: Vec<Change>,
}

impl Trace {
    pub fn new(timescale_ps: u64, signals: Vec<SignalDecl>) -> Trace {
        Trace {
            timescale_ps,
            initial: vec![0; signals.len()],
            signals,
            changes: Vec::new(),
        }
    }

    /// Appends a change, rejecting anything that would break time ordering.
    pub fn push(&mut self, change: Change) -> Result<(), TraceError> {
        let decl = self
            .signals
            .get(change.signal)
            .ok_or(TraceError::UnknownSignal(change.signal))?;
        if change.value & !crate::model::word_mask(decl.width) != 0 {
            return Err(TraceError::ValueTooWide {
                signal: decl.name.clone(),
                value: change.value,
                width: decl.width,
            });
        }
        if let Some(last) = self.changes.last() {
            if change.tick < last.tick {
                return Err(TraceError::NonMonotonicTime {
                    signal: decl.name.clone(),
                    tick: change.tick,
                    last: last.tick,
                });
            }
            let same_tick = self
                .changes
                .iter()
                .rev()
                .take_while(|c| c.tick == change.tick)
                .any(|c| c.signal == change.signal);
            if same_tick {
                return Err(TraceError::DuplicateTick {
                    signal: decl.name.clone(),
                    tick: change.tick,
                });
            }
        }
        self.changes.push(change);
        Ok(())
    }

    pub fn signal_index(&self, name: &str) -> Option<usize> {
        self.signals.iter().position(|s| s.name == name)
    }

    /// Checks the ordering invariants over the whole change list.
    pub fn validate(&self) -> Result<(), TraceError> {
        let mut check = Trace::new(self.timescale_ps, self.signals.clone());
        for c in &self.changes {
            check.push(*c)?;
        }
        Ok(())
    }
}

pub const CLK: usize = 0;
pub const CLKP: usize = 1;
pub const BACK: usize = 2;
pub const CLK2: usize = 3;
pub const SEL: usize = 4;
pub const B1B0: usize = 5;
pub const MEM_ACC: usize = 6;
const PORT_BASE: usize = 7;
const PORT_SIGNALS: usize = 5;

/// Per-port signal kinds, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PortSignal {
    PortEn,
    WRb,
    Addr,
    WData,
    RData,
}

pub fn port_signal(port: PortId, which: PortSignal) -> usize {
    PORT_BASE + port.index() * PORT_SIGNALS + which as usize
}

/// Signal set for the wrapper, in VCD declaration order.
pub fn wrapper_signals(cfg: &SimConfig) -> Vec<SignalDecl> {
    let decl = |name: String, width| SignalDecl { name, width };
    let mut v = vec![
        decl("CLK".into(), 1),
        decl("CLKP".into(), 1),
        decl("BACK".into(), 1),
        decl("CLK2".into(), 1),
        decl("SEL".into(), 2),
        decl("B1B0".into(), 2),
        decl("MEM_ACC".into(), 1),
    ];
    for p in PortId::ALL {
        let l = p.letter();
        v.push(decl(format!("port_en_{l}"), 1));
        v.push(decl(format!("w_rb_{l}"), 1));
        v.push(decl(format!("addr_{l}"), cfg.addr_width()));
        v.push(decl(format!("w_data_{l}"), cfg.word_width));
        v.push(decl(format!("r_data_{l}"), cfg.word_width));
    }
    v
}

/// Turns engine cycle outcomes into a [`Trace`] on a 1 ps time base.
///
/// Each external period of `P` ps is cut into `S = 2 * max(n, 1)` slots; slot
/// `s` starts at `floor(s * P / S)` and every pulse stays high for
/// `floor(P / (2 * S))` ps.
#[derive(Clone, Debug)]
pub struct TraceRecorder {
    trace: Trace,
    period: u64,
    current: Vec<u64>,
    pending: Vec<Change>,
}

impl TraceRecorder {
    pub fn new(cfg: &SimConfig) -> TraceRecorder {
        let signals = wrapper_signals(cfg);
        TraceRecorder {
            current: vec![0; signals.len()],
            trace: Trace::new(1, signals),
            period: cfg.period_ps(),
            pending: Vec::new(),
        }
    }

    fn set(&mut self, tick: u64, signal: usize, value: u64) {
        self.pending.push(Change {
            tick,
            signal,
            value,
        });
    }

    fn pulse(&mut self, tick: u64, width: u64, signal: usize) {
        self.set(tick, signal, 1);
        self.set(tick + width, signal, 0);
    }

    pub fn record_cycle(&mut self, outcome: &CycleOutcome) {
        let period = self.period;
        let t0 = outcome.cycle * period;
        let slots = outcome.clock.slots() as u64;
        let slot_tick = |s: u64| t0 + s * period / slots;
        let half = (period / (2 * slots)).max(1);

        self.set(t0, CLK, 1);
        self.set(t0 + period / 2, CLK, 0);
        if let Some(code) = outcome.clock.b1b0 {
            self.set(t0, B1B0, code as u64);
        }
        if let Some(port) = outcome.reset_to {
            self.set(t0, SEL, port.index() as u64);
        }
        for port in PortId::ALL {
            let req = outcome.latched[port.index()];
            self.set(
                t0,
                port_signal(port, PortSignal::PortEn),
                req.enabled as u64,
            );
            self.set(
                t0,
                port_signal(port, PortSignal::WRb),
                req.write_not_read as u64,
            );
            self.set(t0, port_signal(port, PortSignal::Addr), req.addr);
            self.set(t0, port_signal(port, PortSignal::WData), req.wdata);
            self.set(
                t0,
                port_signal(port, PortSignal::RData),
                outcome.presented[port.index()].rdata,
            );
        }

        for event in &outcome.clock.events {
            let tick = slot_tick(event.slot() as u64);
            match *event {
                ClockEvent::ClkpSpike => self.pulse(tick, half, CLKP),
                ClockEvent::BackEdge(k) => {
                    self.pulse(tick, half, BACK);
                    // access window: from mid-way through the select slot to BACK
                    let start = slot_tick(2 * (k as u64 - 1)) + half;
                    self.set(start, MEM_ACC, 1);
                    self.set(tick, MEM_ACC, 0);
                }
                ClockEvent::Clk2Edge(k) => {
                    self.pulse(tick, half, CLK2);
                    if let Some(next) = outcome.services.get(k as usize) {
                        self.set(tick, SEL, next.port.index() as u64);
                    }
                }
            }
        }
        self.flush();
    }

    fn flush(&mut self) {
        let mut pending = std::mem::take(&mut self.pending);
        pending.sort_by_key(|c| c.tick);
        for c in pending {
            if self.current[c.signal] != c.value {
                self.current[c.signal] = c.value;
                self.trace
                    .push(c)
                    .expect("recorder produced an out-of-order change");
            }
        }
    }

    pub fn finish(self) -> Trace {
        self.trace
    }
}

/// VCD identifier for the `index`-th declared signal: base-94 over `!`..`~`.
pub fn vcd_identifier(mut index: usize) -> String {
    let mut id = String::new();
    loop {
        id.push((b'!' + (index % 94) as u8) as char);
        index /= 94;
        if index == 0 {
            break;
        }
        index -= 1;
    }
    id
}

fn write_value(out: &mut String, width: u32, value: u64, id: &str) {
    if width == 1 {
        let _ = writeln!(out, "{value}{id}");
    } else {
        let _ = writeln!(out, "b{value:0w$b} {id}", w = width as usize);
    }
}

/// Serializes a trace as a textual VCD document under scope `wrapper`.
///
/// The output depends only on the trace, so the same run always produces
/// the same bytes.
pub fn emit_vcd(trace: &Trace) -> Result<String, TraceError> {
    trace.validate()?;
    let ids: Vec<String> = (0..trace.signals.len()).map(vcd_identifier).collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "$version pseudoport {} $end",
        env!("CARGO_PKG_VERSION")
    );
    let _ = writeln!(out, "$timescale {}ps $end", trace.timescale_ps);
    out.push_str("$scope module wrapper $end\n");
    for (decl, id) in trace.signals.iter().zip(&ids) {
        if decl.width == 1 {
            let _ = writeln!(out, "$var wire 1 {id} {} $end", decl.name);
        } else {
            let _ = writeln!(
                out,
                "$var wire {w} {id} {} [{}:0] $end",
                decl.name,
                decl.width - 1,
                w = decl.width
            );
        }
    }
    out.push_str("$upscope $end\n$enddefinitions $end\n");
    out.push_str("$dumpvars\n");
    for ((decl, id), value) in trace.signals.iter().zip(&ids).zip(&trace.initial) {
        write_value(&mut out, decl.width, *value, id);
    }
    out.push_str("$end\n");

    let mut last_tick = None;
    for c in &trace.changes {
        if last_tick != Some(c.tick) {
            let _ = writeln!(out, "#{}", c.tick);
            last_tick = Some(c.tick);
        }
        write_value(
            &mut out,
            trace.signals[c.signal].width,
            c.value,
            &ids[c.signal],
        );
    }
    Ok(out)
}

/// SRAM accesses made in one external cycle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AccessCount {
    pub reads: u32,
    pub writes: u32,
}

impl AccessCount {
    pub fn total(&self) -> u32 {
        self.reads + self.writes
    }
}

pub fn summarize(per_cycle: &[AccessCount], cfg: &SimConfig) -> Stats {
    let cycles_run = per_cycle.len() as u64;
    let reads: u64 = per_cycle.iter().map(|c| c.reads as u64).sum();
    let writes: u64 = per_cycle.iter().map(|c| c.writes as u64).sum();
    let sram_accesses = reads + writes;
    let effective_rate_hz = if cycles_run == 0 {
        0.0
    } else {
        let num = sram_accesses as u128 * cfg.clk_freq_hz as u128;
        if num.is_multiple_of(cycles_run as u128) {
            (num / cycles_run as u128) as f64
        } else {
            num as f64 / cycles_run as f64
        }
    };
    Stats {
        cycles_run,
        sram_accesses,
        reads,
        writes,
        effective_rate_hz,
        bandwidth_bits_per_s: effective_rate_hz * cfg.word_width as f64,
    }
}

/// `key: value` lines for the stats report.
pub fn render_stats(stats: &Stats) -> String {
    format!(
        "cycles: {}\naccesses: {}\nreads: {}\nwrites: {}\neffective_rate_hz: {}\nbandwidth_bits_per_s: {}\n",
        stats.cycles_run,
        stats.sram_accesses,
        stats.reads,
        stats.writes,
        stats.effective_rate_hz,
        stats.bandwidth_bits_per_s
    )
}
