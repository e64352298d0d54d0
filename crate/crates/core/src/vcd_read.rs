//! Minimal reader for the textual VCD subset this crate writes.
//!
//! Handles `$timescale`, nested `$scope`/`$upscope`, `$var` (with an optional
//! bit-range token), `$dumpvars` blocks, `#time` stamps and two-state scalar
//! and vector changes. Other header sections are skipped.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VcdReadError {
    #[error("unterminated `{0}` section")]
    Unterminated(String),
    #[error("malformed $var declaration: {0}")]
    BadVar(String),
    #[error("unknown identifier `{0}`")]
    UnknownId(String),
    #[error("bad value `{0}`")]
    BadValue(String),
    #[error("bad timestamp `{0}`")]
    BadTime(String),
    #[error("time goes backwards: #{0} after #{1}")]
    Backwards(u64, u64),
    #[error("value change before $enddefinitions: `{0}`")]
    EarlyChange(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcdVar {
    /// Dotted scope path plus the reference name.
    pub path: String,
    pub name: String,
    pub width: u32,
    pub id: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VcdDocument {
    pub timescale: String,
    pub vars: Vec<VcdVar>,
    /// `(var index, value)` pairs from `$dumpvars`.
    pub initial: Vec<(usize, u64)>,
    /// `(time, var index, value)` in file order, excluding `$dumpvars`.
    pub changes: Vec<(u64, usize, u64)>,
}

impl VcdDocument {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Number of 0 -> 1 transitions of `var` with `from <= time < to`.
    pub fn rising_edges(&self, var: usize, from: u64, to: u64) -> usize {
        let mut level = self
            .initial
            .iter()
            .rev()
            .find(|(i, _)| *i == var)
            .map(|(_, v)| *v)
            .unwrap_or(0);
        let mut count = 0;
        for &(t, i, v) in &self.changes {
            if i != var {
                continue;
            }
            if v == 1 && level == 0 && t >= from && t < to {
                count += 1;
            }
            level = v;
        }
        count
    }
}

fn parse_value(text: &str) -> Result<u64, VcdReadError> {
    let bad = || VcdReadError::BadValue(text.to_string());
    if text.is_empty() || text.len() > 64 {
        return Err(bad());
    }
    u64::from_str_radix(text, 2).map_err(|_| bad())
}

type Tokens<'a> = std::iter::Peekable<std::str::SplitWhitespace<'a>>;

/// Collects tokens up to the closing `$end` of a section.
fn section(tokens: &mut Tokens<'_>, name: &str) -> Result<Vec<String>, VcdReadError> {
    let mut body = Vec::new();
    for t in tokens.by_ref() {
        if t == "$end" {
            return Ok(body);
        }
        body.push(t.to_string());
    }
    Err(VcdReadError::Unterminated(name.to_string()))
}

pub fn read_vcd(text: &str) -> Result<VcdDocument, VcdReadError> {
    let mut doc = VcdDocument::default();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    let mut scopes: Vec<String> = Vec::new();
    let mut tokens = text.split_whitespace().peekable();
    let mut in_defs = true;
    let mut in_dump = false;
    let mut time: Option<u64> = None;

    while let Some(tok) = tokens.next() {
        match tok {
            "$timescale" => doc.timescale = section(&mut tokens, tok)?.join(""),
            "$scope" => {
                let body = section(&mut tokens, tok)?;
                scopes.push(body.get(1).cloned().unwrap_or_default());
            }
            "$upscope" => {
                section(&mut tokens, tok)?;
                scopes.pop();
            }
            "$var" => {
                let body = section(&mut tokens, tok)?;
                if body.len() < 4 {
                    return Err(VcdReadError::BadVar(body.join(" ")));
                }
                let width: u32 = body[1]
                    .parse()
                    .map_err(|_| VcdReadError::BadVar(body.join(" ")))?;
                let name = body[3].clone();
                let mut path = scopes.clone();
                path.push(name.clone());
                by_id.insert(body[2].clone(), doc.vars.len());
                doc.vars.push(VcdVar {
                    path: path.join("."),
                    name,
                    width,
                    id: body[2].clone(),
                });
            }
            "$enddefinitions" => {
                section(&mut tokens, tok)?;
                in_defs = false;
            }
            "$dumpvars" => in_dump = true,
            "$end" if in_dump => in_dump = false,
            t if t.starts_with('$') => {
                section(&mut tokens, t)?;
            }
            t if t.starts_with('#') => {
                let now: u64 = t[1..]
                    .parse()
                    .map_err(|_| VcdReadError::BadTime(t.to_string()))?;
                if let Some(prev) = time {
                    if now < prev {
                        return Err(VcdReadError::Backwards(now, prev));
                    }
                }
                time = Some(now);
            }
            t => {
                if in_defs {
                    return Err(VcdReadError::EarlyChange(t.to_string()));
                }
                let (value, id) = if let Some(bits) = t.strip_prefix(['b', 'B']) {
                    let id = tokens
                        .next()
                        .ok_or_else(|| VcdReadError::BadValue(t.to_string()))?;
                    (parse_value(bits)?, id.to_string())
                } else {
                    let (v, id) = t.split_at(1);
                    (parse_value(v)?, id.to_string())
                };
                let var = *by_id.get(&id).ok_or(VcdReadError::UnknownId(id))?;
                if in_dump {
                    doc.initial.push((var, value));
                } else {
                    doc.changes.push((time.unwrap_or(0), var, value));
                }
            }
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "$date today $end
$timescale 1 ps $end
$scope module top $end
$scope module sub $end
$var wire 1 ! clk $end
$var wire 4 \" bus [3:0] $end
$upscope $end
$upscope $end
$enddefinitions $end
$dumpvars
0!
b0000 \"
$end
#0
1!
#5
0!
b1010 \"
#10
1!
";

    #[test]
    fn reads_sample() {
        let doc = read_vcd(SAMPLE).unwrap();
        assert_eq!(doc.timescale, "1ps");
        assert_eq!(doc.vars.len(), 2);
        assert_eq!(doc.vars[1].path, "top.sub.bus");
        assert_eq!(doc.vars[1].width, 4);
        assert_eq!(doc.initial, vec![(0, 0), (1, 0)]);
        assert_eq!(
            doc.changes,
            vec![(0, 0, 1), (5, 0, 0), (5, 1, 0b1010), (10, 0, 1)]
        );
        assert_eq!(doc.rising_edges(0, 0, 20), 2);
        assert_eq!(doc.rising_edges(0, 1, 20), 1);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            read_vcd("$enddefinitions $end\n1?\n"),
            Err(VcdReadError::UnknownId(_))
        ));
        assert!(matches!(
            read_vcd("$scope module x"),
            Err(VcdReadError::Unterminated(_))
        ));
        assert!(matches!(read_vcd("1!"), Err(VcdReadError::EarlyChange(_))));
        let back = "$var wire 1 ! a $end $enddefinitions $end #5 1! #3 0!";
        assert!(matches!(read_vcd(back), Err(VcdReadError::Backwards(3, 5))));
        let x = "$var wire 1 ! a $end $enddefinitions $end #5 x!";
        assert!(matches!(read_vcd(x), Err(VcdReadError::BadValue(_))));
    }
}
