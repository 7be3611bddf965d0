//! Replays a connectivity trace against the dynamic structure and against a
//! breadth-first search baseline, then reports timings and disagreements.
//!
//! Trace lines are `i u v`, `d u v` or `q u v` with integer node ids.

use std::collections::{HashSet, VecDeque};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use stream_scc::dynconn::DynConn;
use stream_scc::stream::NodeId;
use stream_scc::synth::{self, TraceOp};

#[derive(Debug, Parser)]
#[command(name = "dynconn-replay", about = "Replay a dynamic connectivity trace")]
struct Args {
    /// Trace file; when absent a random trace is generated.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    nodes: u32,
    #[arg(long, default_value_t = 10_000)]
    ops: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the generated trace here.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Skip the search baseline.
    #[arg(long)]
    no_baseline: bool,
}

fn parse_trace(path: &PathBuf) -> Result<(u32, Vec<TraceOp>), String> {
    let file = std::fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut ops = Vec::new();
    let mut max_id = 0;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() || fields[0].starts_with('#') {
            continue;
        }
        let bad = || format!("line {}: expected `i|d|q u v`", i + 1);
        let [op, u, v] = fields.as_slice() else { return Err(bad()) };
        let (u, v): (u32, u32) = (u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?);
        max_id = max_id.max(u).max(v);
        ops.push(match *op {
            "i" => TraceOp::Insert(u, v),
            "d" => TraceOp::Delete(u, v),
            "q" => TraceOp::Query(u, v),
            _ => return Err(bad()),
        });
    }
    Ok((max_id + 1, ops))
}

fn emit(path: &PathBuf, ops: &[TraceOp]) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for op in ops {
        match *op {
            TraceOp::Insert(u, v) => writeln!(w, "i {u} {v}")?,
            TraceOp::Delete(u, v) => writeln!(w, "d {u} {v}")?,
            TraceOp::Query(u, v) => writeln!(w, "q {u} {v}")?,
        }
    }
    w.flush()
}

fn replay_dynconn(n: u32, ops: &[TraceOp]) -> Result<Vec<bool>, String> {
    let mut dc = DynConn::with_capacity(n as usize);
    for u in 0..n {
        dc.insert_node(NodeId(u)).map_err(|e| e.to_string())?;
    }
    let mut answers = Vec::new();
    for (i, op) in ops.iter().enumerate() {
        let at = |e: stream_scc::dynconn::DynConnError| format!("operation {}: {e}", i + 1);
        match *op {
            TraceOp::Insert(u, v) => drop(dc.insert_edge(NodeId(u), NodeId(v)).map_err(at)?),
            TraceOp::Delete(u, v) => drop(dc.delete_edge(NodeId(u), NodeId(v)).map_err(at)?),
            TraceOp::Query(u, v) => answers.push(dc.connected(NodeId(u), NodeId(v)).map_err(at)?),
        }
    }
    Ok(answers)
}

fn replay_search(n: u32, ops: &[TraceOp]) -> Vec<bool> {
    let mut adj: Vec<HashSet<u32>> = vec![HashSet::new(); n as usize];
    let mut seen = vec![0u32; n as usize];
    let mut round = 0;
    let mut answers = Vec::new();
    for op in ops {
        match *op {
            TraceOp::Insert(u, v) => {
                adj[u as usize].insert(v);
                adj[v as usize].insert(u);
            }
            TraceOp::Delete(u, v) => {
                adj[u as usize].remove(&v);
                adj[v as usize].remove(&u);
            }
            TraceOp::Query(u, v) => {
                round += 1;
                let mut queue = VecDeque::from([u]);
                seen[u as usize] = round;
                let mut found = u == v;
                while let Some(x) = queue.pop_front() {
                    if found {
                        break;
                    }
                    for &y in &adj[x as usize] {
                        if seen[y as usize] != round {
                            seen[y as usize] = round;
                            found |= y == v;
                            queue.push_back(y);
                        }
                    }
                }
                answers.push(found);
            }
        }
    }
    answers
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (n, ops) = match &args.trace {
        Some(path) => match parse_trace(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => {
            let ops = synth::connectivity_trace(&mut synth::rng(args.seed), args.nodes, args.ops, args.nodes as usize);
            (args.nodes, ops)
        }
    };
    if let Some(path) = &args.emit {
        if let Err(e) = emit(path, &ops) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }

    let started = Instant::now();
    let answers = match replay_dynconn(n, &ops) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let dynconn_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut report = serde_json::json!({
        "nodes": n,
        "ops": ops.len(),
        "queries": answers.len(),
        "dynconn_ms": (dynconn_ms * 1e3).round() / 1e3,
    });
    let mut mismatches = 0;
    if !args.no_baseline {
        let started = Instant::now();
        let expected = replay_search(n, &ops);
        report["baseline_ms"] = ((started.elapsed().as_secs_f64() * 1e6).round() / 1e3).into();
        mismatches = answers.iter().zip(&expected).filter(|(a, b)| a != b).count();
        report["mismatches"] = mismatches.into();
    }
    println!("{report}");
    if mismatches > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
