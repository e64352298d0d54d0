#![allow(dead_code)]

use pseudoport::PortId;

/// All 24 orderings of A..D, by plain recursion.
pub fn all_priorities() -> Vec<[PortId; 4]> {
    fn go(prefix: &mut Vec<PortId>, out: &mut Vec<[PortId; 4]>) {
        if prefix.len() == 4 {
            out.push([prefix[0], prefix[1], prefix[2], prefix[3]]);
            return;
        }
        for p in PortId::ALL {
            if !prefix.contains(&p) {
                prefix.push(p);
                go(prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut out);
    out
}

/// All 16 enable masks.
pub fn all_masks() -> Vec<[bool; 4]> {
    (0u8..16)
        .map(|bits| std::array::from_fn(|i| bits >> i & 1 == 1))
        .collect()
}

/// Enabled ports in service order, computed by filtering the priority list.
pub fn enabled_in_order(mask: &[bool; 4], priority: &[PortId; 4]) -> Vec<PortId> {
    priority
        .iter()
        .copied()
        .filter(|p| mask[p.index()])
        .collect()
}

pub fn scenario(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

/// Change list as `(tick, signal, value)` as read back by the third-party
/// `vcd` crate.
pub fn read_with_vcd_crate(text: &str) -> (Vec<String>, Vec<(u64, usize, u64)>) {
    let mut parser = vcd::Parser::new(std::io::BufReader::new(text.as_bytes()));
    let header = parser.parse_header().expect("vcd crate rejected header");
    let scope = header.find_scope(&["wrapper"]).expect("wrapper scope");
    let mut ids = Vec::new();
    let mut names = Vec::new();
    for item in &scope.items {
        if let vcd::ScopeItem::Var(v) = item {
            ids.push(v.code);
            names.push(v.reference.clone());
        }
    }
    let index = |code: vcd::IdCode| ids.iter().position(|c| *c == code).unwrap();
    let to_u64 = |bits: &mut dyn Iterator<Item = vcd::Value>| {
        bits.fold(0u64, |acc, b| {
            (acc << 1)
                | match b {
                    vcd::Value::V0 => 0,
                    vcd::Value::V1 => 1,
                    other => panic!("unexpected {other:?}"),
                }
        })
    };
    let mut now = None;
    let mut changes = Vec::new();
    for cmd in parser {
        match cmd.expect("vcd crate rejected body") {
            vcd::Command::Timestamp(t) => now = Some(t),
            vcd::Command::ChangeScalar(id, v) => {
                if let Some(t) = now {
                    changes.push((t, index(id), to_u64(&mut std::iter::once(v))));
                }
            }
            vcd::Command::ChangeVector(id, v) => {
                if let Some(t) = now {
                    changes.push((t, index(id), to_u64(&mut v.iter())));
                }
            }
            _ => {}
        }
    }
    (names, changes)
}
