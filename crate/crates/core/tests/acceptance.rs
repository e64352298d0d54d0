//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs under `cargo test` (custom harness).

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{all_masks, all_priorities, enabled_in_order, read_with_vcd_crate, scenario};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use pseudoport::arbiter::{fsm_reset, fsm_step};
use pseudoport::cli::cmd_verify;
use pseudoport::clockgen::generate_clock_events;
use pseudoport::engine::effective_access_rate;
use pseudoport::model::{word_mask, CycleRequests};
use pseudoport::oracle::oracle_run;
use pseudoport::rng::XorShift64Star;
use pseudoport::stimulus::{parse_config, parse_stimulus};
use pseudoport::trace::{emit_vcd, BACK, CLK2};
use pseudoport::vcd_read::read_vcd;
use pseudoport::verify::{random_priority, random_stimulus};
use pseudoport::{run_stimulus, PortId, PortRequest, SimConfig, SramMacro};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn full_rate_stimulus(ports: usize, cycles: usize) -> Vec<CycleRequests> {
    (0..cycles)
        .map(|t| {
            std::array::from_fn(|p| {
                if p >= ports {
                    PortRequest::IDLE
                } else if (t + p) % 2 == 0 {
                    PortRequest::write((t * 4 + p) as u64 % 2048, (t + p) as u64 & 0xFF)
                } else {
                    PortRequest::read((t * 3 + p) as u64 % 2048)
                }
            })
        })
        .collect()
}

/// 1. 4x bandwidth: 1000 all-port cycles at 250 MHz give exactly 1 GHz.
fn bandwidth() -> Outcome {
    let start = Instant::now();
    let cfg = SimConfig::default();
    let quad = run_stimulus(&cfg, &full_rate_stimulus(4, 1000)).map_err(|e| e.to_string())?;
    let single = run_stimulus(&cfg, &full_rate_stimulus(1, 1000)).map_err(|e| e.to_string())?;
    let q = quad.stats;
    let s = single.stats;

    // integer route, independent of the f64 in Stats
    let exact_rate = q.sram_accesses as u128 * cfg.clk_freq_hz as u128 / q.cycles_run as u128;
    ensure(exact_rate == 1_000_000_000, || {
        format!("integer rate {exact_rate}")
    })?;
    ensure(q.effective_rate_hz == 1.0e9, || {
        format!("rate {}", q.effective_rate_hz)
    })?;
    ensure(q.sram_accesses == 4000, || {
        format!("accesses {}", q.sram_accesses)
    })?;
    ensure(q.sram_accesses == 4 * s.sram_accesses, || {
        format!("{} vs 4 x {}", q.sram_accesses, s.sram_accesses)
    })?;
    ensure(
        q.bandwidth_bits_per_s == 4.0 * s.bandwidth_bits_per_s,
        || {
            format!(
                "bandwidth {} vs {}",
                q.bandwidth_bits_per_s, s.bandwidth_bits_per_s
            )
        },
    )?;
    ensure(effective_access_rate(4.0, 250e6) == 1e9, || {
        "formula".into()
    })?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "{} accesses / {} cycles -> {} Hz, {} b/s ({}x single-port)",
        q.sram_accesses,
        q.cycles_run,
        q.effective_rate_hz,
        q.bandwidth_bits_per_s,
        q.sram_accesses / s.sram_accesses
    ))
}

/// 2. N BACK pulses and N-1 CLK2 pulses per external cycle.
fn clock_rule() -> Outcome {
    let start = Instant::now();
    for n in 0..=4 {
        let ev = generate_clock_events(n);
        ensure(
            ev.back_edges() == n && ev.clk2_edges() == n.saturating_sub(1),
            || format!("n={n}: {} BACK, {} CLK2", ev.back_edges(), ev.clk2_edges()),
        )?;
    }
    let cfg =
        parse_config(&std::fs::read_to_string(scenario("default.cfg")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(scenario("port_sweep.stim")).map_err(|e| e.to_string())?;
    let stim = parse_stimulus(&text, &cfg).map_err(|e| e.to_string())?;
    let run = run_stimulus(&cfg, &stim).map_err(|e| e.to_string())?;
    let vcd = emit_vcd(&run.trace).map_err(|e| e.to_string())?;
    let doc = read_vcd(&vcd).map_err(|e| e.to_string())?;
    let p = cfg.period_ps();
    let back: Vec<usize> = (0..4)
        .map(|c| doc.rising_edges(BACK, c * p, (c + 1) * p))
        .collect();
    let clk2: Vec<usize> = (0..4)
        .map(|c| doc.rising_edges(CLK2, c * p, (c + 1) * p))
        .collect();
    ensure(back == [4, 3, 2, 1], || format!("BACK per cycle {back:?}"))?;
    ensure(clk2 == [3, 2, 1, 0], || format!("CLK2 per cycle {clk2:?}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("BACK {back:?}, CLK2 {clk2:?} in VCD"))
}

/// 3. Reset + (n-1) steps visits every enabled port once, in priority order.
fn arbitration_walk() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for priority in all_priorities() {
        for mask in all_masks() {
            let expected = enabled_in_order(&mask, &priority);
            let mut walk = Vec::new();
            if let Some(mut cur) = fsm_reset(&mask, &priority) {
                walk.push(cur);
                for _ in 1..expected.len() {
                    cur = fsm_step(cur, &mask, &priority).map_err(|e| e.to_string())?;
                    walk.push(cur);
                }
            }
            ensure(walk == expected, || {
                format!("mask {mask:?} prio {priority:?}: {walk:?}")
            })?;
            checked += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{checked} mask/priority combinations"))
}

/// 4. Engine/oracle equivalence over 10 seeds x 10^4 cycles, random configs.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut lines = 0;
    for seed in 1..=10u64 {
        let report = cmd_verify(None, seed, 10_000, None).map_err(|e| e.message)?;
        ensure(report.contains("PASS"), || report.clone())?;
        lines += 1;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "{lines} seeds x 10000 cycles, 0 divergences, {:?}",
        start.elapsed()
    ))
}

/// 5. One enabled port behaves like the bare macro, shifted by one cycle.
fn single_port_degeneration() -> Outcome {
    let mut rng = XorShift64Star::new(0x5EED);
    for port in PortId::ALL {
        let cfg = SimConfig {
            word_width: 12,
            array_words: 64,
            priority_order: random_priority(&mut rng),
            ..SimConfig::default()
        };
        let ops: Vec<PortRequest> = (0..1000)
            .map(|_| {
                let addr = rng.below(64);
                if rng.below(2) == 0 {
                    PortRequest::read(addr)
                } else {
                    PortRequest::write(addr, rng.next_u64() & word_mask(12))
                }
            })
            .collect();
        let stim: Vec<CycleRequests> = ops
            .iter()
            .map(|op| {
                let mut c = [PortRequest::IDLE; 4];
                c[port.index()] = *op;
                c
            })
            .collect();
        let run = run_stimulus(&cfg, &stim).map_err(|e| e.to_string())?;

        let mut bare = SramMacro::new(&cfg);
        for (t, op) in ops.iter().enumerate() {
            let shown = if t + 1 < run.outputs.len() {
                run.outputs[t + 1]
            } else {
                run.state.out_regs
            };
            let got = shown[port.index()];
            if op.write_not_read {
                bare.write(op.addr, op.wdata).map_err(|e| e.to_string())?;
                ensure(!got.fresh, || {
                    format!("port {port} op {t}: write flagged a read")
                })?;
            } else {
                let v = bare.read(op.addr).map_err(|e| e.to_string())?;
                ensure(got.fresh && got.rdata == v, || {
                    format!("port {port} op {t}: bare {v:#x}, engine {got:?}")
                })?;
            }
        }
        ensure(run.state.mem.words() == bare.words(), || {
            format!("port {port}: final memory")
        })?;
        ensure(
            run.state.mem.total_accesses() == bare.total_accesses(),
            || "access count".into(),
        )?;
    }
    Ok("1000 ops on each of A, B, C, D match a bare macro replay".into())
}

/// 6. Every fresh value appears exactly one cycle after its read.
fn latency_contract() -> Outcome {
    let strategy = (1u32..=16, 1usize..=32).prop_flat_map(|(w, d)| {
        let req = prop_oneof![
            Just(PortRequest::IDLE),
            (0..d as u64).prop_map(PortRequest::read),
            (0..d as u64, any::<u64>())
                .prop_map(move |(a, v)| PortRequest::write(a, v & word_mask(w))),
        ];
        (
            Just(SimConfig {
                word_width: w,
                array_words: d,
                ..SimConfig::default()
            }),
            0usize..24,
            prop::collection::vec(prop::array::uniform4(req), 1..60),
        )
    });
    let mut runner = TestRunner::new(PropConfig {
        cases: 256,
        failure_persistence: None,
        ..PropConfig::default()
    });
    runner
        .run(&strategy, |(cfg, prio, stim)| {
            let cfg = SimConfig {
                priority_order: all_priorities()[prio],
                ..cfg
            };
            let run = run_stimulus(&cfg, &stim).unwrap();
            let oracle = oracle_run(&cfg, &stim).unwrap();
            let mut shown = run.outputs.clone();
            shown.push(run.state.out_regs);
            for (t, out) in shown.iter().enumerate() {
                for p in 0..4 {
                    let read_at_prev = t > 0 && stim[t - 1][p].is_read();
                    prop_assert_eq!(out[p].fresh, read_at_prev, "cycle {} port {}", t, p);
                    if read_at_prev {
                        prop_assert_eq!(Some(out[p].rdata), oracle.results[t - 1][p]);
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("256 random runs: fresh data only at t+1, never earlier or later".into())
}

fn pseudoport(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_pseudoport"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

/// 7. Identical inputs give byte-identical VCD, stats and verify output.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let stim = dir.path().join("gen.stim");
    let gen = pseudoport(&[
        "gen",
        "--seed",
        "77",
        "--cycles",
        "300",
        "-o",
        stim.to_str().unwrap(),
    ])?;
    ensure(gen.status.success(), || "gen failed".into())?;
    let mut files = Vec::new();
    for i in 0..2 {
        let vcd = dir.path().join(format!("run{i}.vcd"));
        let stats = dir.path().join(format!("run{i}.stats"));
        let out = pseudoport(&[
            "run",
            stim.to_str().unwrap(),
            "--vcd",
            vcd.to_str().unwrap(),
            "--stats",
            stats.to_str().unwrap(),
        ])?;
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        files.push((
            std::fs::read(&vcd).map_err(|e| e.to_string())?,
            std::fs::read(&stats).map_err(|e| e.to_string())?,
            out.stdout,
        ));
    }
    ensure(files[0] == files[1], || "cmd_run outputs differ".into())?;
    let v1 = pseudoport(&["verify", "--seed", "5", "--cycles", "3000"])?;
    let v2 = pseudoport(&["verify", "--seed", "5", "--cycles", "3000"])?;
    ensure(v1.status.code() == Some(0), || "verify failed".into())?;
    ensure(v1.stdout == v2.stdout && v1.stderr == v2.stderr, || {
        "cmd_verify outputs differ".into()
    })?;
    Ok(format!(
        "run: {} byte VCD identical; verify output identical",
        files[0].0.len()
    ))
}

/// 8. VCD round-trips through the repo reader and loads in the `vcd` crate.
fn vcd_validity() -> Outcome {
    let mut files = 0;
    for seed in 0..4u64 {
        let mut rng = XorShift64Star::new(seed);
        let cfg = SimConfig {
            word_width: 1 + rng.below(32) as u32,
            array_words: 16 + rng.below(200) as usize,
            priority_order: random_priority(&mut rng),
            ..SimConfig::default()
        };
        let stim = random_stimulus(&mut rng, &cfg, 400);
        let trace = run_stimulus(&cfg, &stim).map_err(|e| e.to_string())?.trace;
        let text = emit_vcd(&trace).map_err(|e| e.to_string())?;
        let want: Vec<(u64, usize, u64)> = trace
            .changes
            .iter()
            .map(|c| (c.tick, c.signal, c.value))
            .collect();
        let own = read_vcd(&text).map_err(|e| e.to_string())?;
        ensure(own.changes == want, || {
            format!("seed {seed}: repo reader mismatch")
        })?;
        let (names, third_party) = read_with_vcd_crate(&text);
        ensure(names.len() == trace.signals.len(), || {
            "vcd crate var count".into()
        })?;
        ensure(third_party == want, || {
            format!("seed {seed}: vcd crate mismatch")
        })?;
        files += 1;
    }
    Ok(format!(
        "{files} random traces identical through both readers"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 bandwidth 4x / 1 GHz", bandwidth),
        ("2 clock rule N / N-1", clock_rule),
        ("3 arbitration walk", arbitration_walk),
        ("4 oracle equivalence", oracle_equivalence),
        ("5 single-port degeneration", single_port_degeneration),
        ("6 one-cycle read latency", latency_contract),
        ("7 determinism", determinism),
        ("8 VCD validity", vcd_validity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
