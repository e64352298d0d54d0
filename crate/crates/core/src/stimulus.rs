//! Text formats for run configuration and per-cycle port stimulus.
//!
//! Configuration is `key = value` per line. Stimulus is one line per
//! external cycle with four `;`-separated fields (ports A..D), each `-`,
//! `R:<addr>` or `W:<addr>:<data>` in hexadecimal. `#` starts a comment in
//! both formats. See `docs/formats.md` for the grammar.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    validate_config, ConfigError, CycleRequests, PortId, PortRequest, SimConfig, NUM_PORTS,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigParseError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    BadValue {
        key: String,
        line: usize,
        reason: String,
        #[source]
        source: Option<ConfigError>,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error(transparent)]
    Invalid(#[from] ConfigError),
}

impl ConfigParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigParseError::UnknownKey { line, .. }
            | ConfigParseError::BadValue { line, .. }
            | ConfigParseError::Syntax { line } => Some(*line),
            ConfigParseError::Invalid(_) => None,
        }
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_unsigned(text: &str) -> Option<u64> {
    let t = text.trim().replace('_', "");
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        return u64::from_str_radix(hex, 16).ok();
    }
    if let Ok(v) = t.parse::<u64>() {
        return Some(v);
    }
    // allow "250e6"-style frequencies as long as the value is integral
    let f: f64 = t.parse().ok()?;
    (f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64).then_some(f as u64)
}

fn parse_priority(text: &str) -> Result<[PortId; NUM_PORTS], String> {
    let ports: Vec<PortId> = text
        .split(|c: char| c == ',' || c == '>' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<PortId>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    <[PortId; NUM_PORTS]>::try_from(ports).map_err(|v| format!("expected 4 ports, got {}", v.len()))
}

pub fn parse_config(text: &str) -> Result<SimConfig, ConfigParseError> {
    let mut cfg = SimConfig::default();
    let mut priority_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or(ConfigParseError::Syntax { line })?;
        let bad = |reason: &str| ConfigParseError::BadValue {
            key: key.to_string(),
            line,
            reason: reason.to_string(),
            source: None,
        };
        match key {
            "word_width" => {
                cfg.word_width = parse_unsigned(value)
                    .and_then(|v| u32::try_from(v).ok())
                    .ok_or_else(|| bad("expected an integer"))?
            }
            "array_words" => {
                cfg.array_words = parse_unsigned(value)
                    .and_then(|v| usize::try_from(v).ok())
                    .ok_or_else(|| bad("expected an integer"))?
            }
            "clk_freq_hz" => {
                cfg.clk_freq_hz =
                    parse_unsigned(value).ok_or_else(|| bad("expected an integer frequency"))?
            }
            "init_fill" => {
                cfg.init_fill = parse_unsigned(value).ok_or_else(|| bad("expected an integer"))?
            }
            "priority" => {
                cfg.priority_order = parse_priority(value).map_err(|r| bad(&r))?;
                priority_line = Some(line);
            }
            _ => {
                return Err(ConfigParseError::UnknownKey {
                    key: key.to_string(),
                    line,
                })
            }
        }
    }
    validate_config(cfg).map_err(|e| match (&e, priority_line) {
        (ConfigError::NonPermutationPriority(_), Some(line)) => ConfigParseError::BadValue {
            key: "priority".into(),
            line,
            reason: "not a permutation of A, B, C, D".into(),
            source: Some(e),
        },
        _ => ConfigParseError::Invalid(e),
    })
}

/// Renders a config in the form accepted by [`parse_config`].
pub fn render_config(cfg: &SimConfig) -> String {
    let prio: Vec<String> = cfg.priority_order.iter().map(|p| p.to_string()).collect();
    format!(
        "word_width = {}\narray_words = {}\npriority = {}\nclk_freq_hz = {}\ninit_fill = 0x{:X}\n",
        cfg.word_width,
        cfg.array_words,
        prio.join(","),
        cfg.clk_freq_hz,
        cfg.init_fill
    )
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StimulusError {
    #[error("line {line} (cycle {cycle}): expected 4 `;`-separated port fields, found {found}")]
    FieldCount {
        cycle: usize,
        line: usize,
        found: usize,
    },
    #[error("line {line} (cycle {cycle}), port {port}: cannot parse `{text}`")]
    BadField {
        cycle: usize,
        line: usize,
        port: PortId,
        text: String,
    },
    #[error("line {line} (cycle {cycle}), port {port}: address {addr:#x} out of range")]
    AddrOutOfRange {
        cycle: usize,
        line: usize,
        port: PortId,
        addr: u64,
    },
    #[error("line {line} (cycle {cycle}), port {port}: data {data:#x} wider than word")]
    DataTooWide {
        cycle: usize,
        line: usize,
        port: PortId,
        data: u64,
    },
}

impl StimulusError {
    pub fn line(&self) -> usize {
        match self {
            StimulusError::FieldCount { line, .. }
            | StimulusError::BadField { line, .. }
            | StimulusError::AddrOutOfRange { line, .. }
            | StimulusError::DataTooWide { line, .. } => *line,
        }
    }

    pub fn cycle(&self) -> usize {
        match self {
            StimulusError::FieldCount { cycle, .. }
            | StimulusError::BadField { cycle, .. }
            | StimulusError::AddrOutOfRange { cycle, .. }
            | StimulusError::DataTooWide { cycle, .. } => *cycle,
        }
    }
}

fn hex(text: &str) -> Option<u64> {
    let t = text.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    u64::from_str_radix(t, 16).ok()
}

fn parse_field(field: &str) -> Option<PortRequest> {
    let field = field.trim();
    if field == "-" {
        return Some(PortRequest::IDLE);
    }
    let mut parts = field.split(':');
    let mode = parts.next()?.trim();
    match mode {
        "R" | "r" => {
            let addr = hex(parts.next()?)?;
            parts.next().is_none().then(|| PortRequest::read(addr))
        }
        "W" | "w" => {
            let addr = hex(parts.next()?)?;
            let data = hex(parts.next()?)?;
            parts
                .next()
                .is_none()
                .then(|| PortRequest::write(addr, data))
        }
        _ => None,
    }
}

pub fn parse_stimulus(text: &str, cfg: &SimConfig) -> Result<Vec<CycleRequests>, StimulusError> {
    let mut cycles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let cycle = cycles.len();
        let fields: Vec<&str> = body.split(';').collect();
        if fields.len() != NUM_PORTS {
            return Err(StimulusError::FieldCount {
                cycle,
                line,
                found: fields.len(),
            });
        }
        let mut reqs = [PortRequest::IDLE; NUM_PORTS];
        for (port, field) in PortId::ALL.into_iter().zip(fields) {
            let req = parse_field(field).ok_or_else(|| StimulusError::BadField {
                cycle,
                line,
                port,
                text: field.trim().to_string(),
            })?;
            if req.enabled && req.addr >= cfg.array_words as u64 {
                return Err(StimulusError::AddrOutOfRange {
                    cycle,
                    line,
                    port,
                    addr: req.addr,
                });
            }
            if req.is_write() && !cfg.fits_word(req.wdata) {
                return Err(StimulusError::DataTooWide {
                    cycle,
                    line,
                    port,
                    data: req.wdata,
                });
            }
            reqs[port.index()] = req;
        }
        cycles.push(reqs);
    }
    Ok(cycles)
}

/// Renders stimulus in canonical form: uppercase hex, `; ` separators.
pub fn render_stimulus(cycles: &[CycleRequests]) -> String {
    let mut out = String::new();
    for reqs in cycles {
        for (i, r) in reqs.iter().enumerate() {
            if i > 0 {
                out.push_str("; ");
            }
            match (r.enabled, r.write_not_read) {
                (false, _) => out.push('-'),
                (true, false) => {
                    let _ = write!(out, "R:{:X}", r.addr);
                }
                (true, true) => {
                    let _ = write!(out, "W:{:X}:{:X}", r.addr, r.wdata);
                }
            }
        }
        out.push('\n');
    }
    out
}
