//! Seeded synthetic inputs: random streams, interaction logs, connectivity
//! traces, and two structured streams used for scaling experiments.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::stream::{build_stream, Interval, LinkSegment, NodeId, NodeSegment, Pair, StreamGraph, Tick};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of [`random_stream`] output.
#[derive(Clone, Copy, Debug)]
pub struct RandomStreamParams {
    pub max_nodes: usize,
    /// Bound on node plus link segments before merging.
    pub max_segments: usize,
    /// Times are drawn from `0..=horizon`; a small horizon forces collisions.
    pub horizon: Tick,
    /// Probability that a segment is a single instant.
    pub instant_prob: f64,
}

impl Default for RandomStreamParams {
    fn default() -> Self {
        RandomStreamParams { max_nodes: 30, max_segments: 500, horizon: 60, instant_prob: 0.2 }
    }
}

fn merge(mut ivs: Vec<Interval>) -> Vec<Interval> {
    ivs.sort_unstable();
    let mut out: Vec<Interval> = Vec::new();
    for iv in ivs {
        match out.last_mut() {
            Some(last) if iv.b <= last.e => last.e = last.e.max(iv.e),
            _ => out.push(iv),
        }
    }
    out
}

fn random_interval(rng: &mut impl Rng, lo: Tick, hi: Tick, instant_prob: f64) -> Interval {
    let b = rng.gen_range(lo..=hi);
    if rng.gen_bool(instant_prob) {
        return Interval { b, e: b };
    }
    let e = rng.gen_range(lo..=hi);
    Interval { b: b.min(e), e: b.max(e) }
}

/// A random valid stream: node segments first, then link segments inside
/// the common presence of their endpoints.
pub fn random_stream(rng: &mut impl Rng, p: RandomStreamParams) -> StreamGraph {
    let n = rng.gen_range(1..=p.max_nodes);
    let budget = rng.gen_range(n..=p.max_segments.max(n));
    let node_budget = rng.gen_range(n..=budget.min(3 * n).max(n));

    let mut presence: Vec<Vec<Interval>> = vec![Vec::new(); n];
    for i in 0..node_budget {
        let u = if i < n { i } else { rng.gen_range(0..n) };
        presence[u].push(random_interval(rng, 0, p.horizon, p.instant_prob));
    }
    let presence: Vec<Vec<Interval>> = presence.into_iter().map(merge).collect();

    let mut links = Vec::new();
    if n >= 2 {
        for _ in 0..budget - node_budget {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n - 1);
            let v = if v >= u { v + 1 } else { v };
            let common: Vec<Interval> = presence[u]
                .iter()
                .flat_map(|a| {
                    presence[v].iter().filter_map(move |b| {
                        let (lo, hi) = (a.b.max(b.b), a.e.min(b.e));
                        (lo <= hi).then_some(Interval { b: lo, e: hi })
                    })
                })
                .collect();
            if let Some(&iv) = common.choose(rng) {
                let pair = Pair::new(NodeId(u as u32), NodeId(v as u32)).unwrap();
                links.push(LinkSegment { interval: random_interval(rng, iv.b, iv.e, p.instant_prob), pair });
            }
        }
    }
    let nodes = presence
        .into_iter()
        .enumerate()
        .flat_map(|(u, ivs)| ivs.into_iter().map(move |interval| NodeSegment { interval, node: NodeId(u as u32) }))
        .collect();
    build_stream(nodes, links, None).expect("generated segments are consistent")
}

/// `count` interactions `u v t` among `n` labelled nodes, times in `0..=horizon`.
pub fn random_interactions(rng: &mut impl Rng, n: usize, count: usize, horizon: Tick) -> String {
    assert!(n >= 2);
    let mut out = String::new();
    for _ in 0..count {
        let u = rng.gen_range(0..n);
        let v = (u + rng.gen_range(1..n)) % n;
        writeln!(out, "n{u} n{v} {}", rng.gen_range(0..=horizon)).unwrap();
    }
    out
}

/// Parameters of [`frontier_stream`].
#[derive(Clone, Copy, Debug)]
pub struct FrontierParams {
    pub clusters: usize,
    pub cluster_size: usize,
    /// Link starts lie in `]start - jitter, start]`, ends in `[end, end + jitter[`.
    pub jitter: Tick,
    pub start: Tick,
    pub end: Tick,
}

impl Default for FrontierParams {
    fn default() -> Self {
        FrontierParams { clusters: 1000, cluster_size: 10, jitter: 10, start: 1024, end: 4096 }
    }
}

/// Clusters of nodes joined in a cycle whose links all start and end at
/// nearly the same times. Node presence is the union of its link presences.
pub fn frontier_stream(rng: &mut impl Rng, p: FrontierParams) -> StreamGraph {
    assert!(p.cluster_size >= 3 && p.jitter >= 1 && p.start < p.end);
    let mut links = Vec::with_capacity(p.clusters * p.cluster_size);
    for c in 0..p.clusters {
        let base = (c * p.cluster_size) as u32;
        for i in 0..p.cluster_size as u32 {
            let (u, v) = (NodeId(base + i), NodeId(base + (i + 1) % p.cluster_size as u32));
            let b = p.start - rng.gen_range(0..p.jitter);
            let e = p.end + rng.gen_range(0..p.jitter);
            links.push(LinkSegment { interval: Interval { b, e }, pair: Pair::new(u, v).unwrap() });
        }
    }
    with_implied_nodes(p.clusters * p.cluster_size, links)
}

/// A sparse stream with `links` distinct pairs among `nodes` nodes, one
/// segment per pair of length at most `max_len`, starts in `0..horizon`.
pub fn throughput_stream(rng: &mut impl Rng, nodes: usize, links: usize, horizon: Tick, max_len: Tick) -> StreamGraph {
    assert!(nodes >= 2 && (links as u128) <= (nodes as u128 * (nodes as u128 - 1) / 2));
    let mut seen: HashSet<Pair> = HashSet::with_capacity(links);
    let mut out = Vec::with_capacity(links);
    while out.len() < links {
        let u = NodeId(rng.gen_range(0..nodes as u32));
        let v = NodeId(rng.gen_range(0..nodes as u32));
        let Some(pair) = Pair::new(u, v) else { continue };
        if seen.insert(pair) {
            let b = rng.gen_range(0..horizon);
            let e = b + rng.gen_range(0..=max_len);
            out.push(LinkSegment { interval: Interval { b, e }, pair });
        }
    }
    with_implied_nodes(nodes, out)
}

fn with_implied_nodes(n: usize, links: Vec<LinkSegment>) -> StreamGraph {
    let mut presence: Vec<Vec<Interval>> = vec![Vec::new(); n];
    for l in &links {
        presence[l.u().index()].push(l.interval);
        presence[l.v().index()].push(l.interval);
    }
    let nodes = presence
        .into_iter()
        .enumerate()
        .flat_map(|(u, ivs)| {
            merge(ivs).into_iter().map(move |interval| NodeSegment { interval, node: NodeId(u as u32) })
        })
        .collect();
    build_stream(nodes, links, None).expect("implied presence covers every link")
}

/// One operation of a connectivity trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceOp {
    Insert(u32, u32),
    Delete(u32, u32),
    Query(u32, u32),
}

/// Random valid operations on `n` nodes: only absent edges are inserted and
/// only present ones deleted. The edge count hovers around `target_edges`.
pub fn connectivity_trace(rng: &mut impl Rng, n: u32, ops: usize, target_edges: usize) -> Vec<TraceOp> {
    assert!(n >= 2);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut present: HashSet<(u32, u32)> = HashSet::new();
    let mut out = Vec::with_capacity(ops);
    let pair = |rng: &mut dyn rand::RngCore| loop {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            break (u.min(v), u.max(v));
        }
    };
    while out.len() < ops {
        let roll: f64 = rng.gen();
        let insert_bias = if edges.len() < target_edges { 0.45 } else { 0.25 };
        if roll < 0.3 {
            let (u, v) = pair(rng);
            out.push(TraceOp::Query(u, v));
        } else if roll < 0.3 + insert_bias || edges.is_empty() {
            let (u, v) = pair(rng);
            if present.insert((u, v)) {
                edges.push((u, v));
                out.push(TraceOp::Insert(u, v));
            }
        } else {
            let i = rng.gen_range(0..edges.len());
            let (u, v) = edges.swap_remove(i);
            present.remove(&(u, v));
            out.push(TraceOp::Delete(u, v));
        }
    }
    out
}
