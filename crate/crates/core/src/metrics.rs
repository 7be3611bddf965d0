//! Component statistics, pairwise latencies and approximation error metrics.
//!
//! Latency follows time-respecting paths: a link is crossed instantly at any
//! instant it is present, several links may be chained at one instant, and a
//! path may wait at a node only while that node is present. `ℓ(u, v)` is the
//! smallest `a - s` over paths leaving `u` at `s` and reaching `v` at `a`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::scc::{Component, ComponentSink};
use crate::stream::{BoundedInterval, EventKind, EventSequence, Interval, NodeId, Pair, StreamGraph, Subject, Tick};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error(
        "latency computation needs n × event_times = {required} steps, above the budget of {budget}; \
         raise --latency-budget or use a smaller input"
    )]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("streams have different node sets")]
    MismatchedNodeSets,
}

/// Rounds to 9 significant digits, the precision used for reported reals.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Nearest-rank percentile of a sorted, nonempty slice.
pub fn nearest_rank(sorted: &[u64], p: u32) -> u64 {
    assert!(!sorted.is_empty() && (1..=100).contains(&p));
    let rank = (p as usize * sorted.len()).div_ceil(100);
    sorted[rank.max(1) - 1]
}

/// One histogram bin: values in `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bin {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
}

/// Bins `0`, `1`, `[2,3]`, `[4,7]`, `[8,15]`, … with empty bins omitted.
pub fn log2_histogram(values: &[u64]) -> Vec<Bin> {
    let mut counts = [0u64; 65];
    for &x in values {
        let k = if x == 0 { 0 } else { 64 - x.leading_zeros() as usize };
        counts[k] += 1;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &count)| match k {
            0 => Bin { lo: 0, hi: 0, count },
            _ => Bin { lo: 1 << (k - 1), hi: ((1u128 << k) - 1) as u64, count },
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentRecord {
    pub size: u64,
    pub duration: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Percentiles {
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

impl Percentiles {
    fn of(mut values: Vec<u64>) -> Option<Percentiles> {
        if values.is_empty() {
            return None;
        }
        values.sort_unstable();
        Some(Percentiles {
            p50: nearest_rank(&values, 50),
            p90: nearest_rank(&values, 90),
            p99: nearest_rank(&values, 99),
            max: *values.last().unwrap(),
        })
    }
}

/// Size and duration of every component, with summaries. Duration is `e - b`
/// regardless of bound openness.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentStats {
    pub records: Vec<ComponentRecord>,
    pub size: Option<Percentiles>,
    pub duration: Option<Percentiles>,
    pub size_histogram: Vec<Bin>,
    pub duration_histogram: Vec<Bin>,
}

impl ComponentStats {
    pub fn from_records(records: Vec<ComponentRecord>) -> ComponentStats {
        let sizes: Vec<u64> = records.iter().map(|r| r.size).collect();
        let durations: Vec<u64> = records.iter().map(|r| r.duration).collect();
        ComponentStats {
            size_histogram: log2_histogram(&sizes),
            duration_histogram: log2_histogram(&durations),
            size: Percentiles::of(sizes),
            duration: Percentiles::of(durations),
            records,
        }
    }

    pub fn count(&self) -> usize {
        self.records.len()
    }

    /// Flat summary in the reported JSON shape.
    pub fn summary(&self) -> serde_json::Value {
        let pick = |p: Option<Percentiles>, f: fn(Percentiles) -> u64| p.map(f);
        serde_json::json!({
            "count": self.count(),
            "size_p50": pick(self.size, |p| p.p50),
            "size_p90": pick(self.size, |p| p.p90),
            "size_p99": pick(self.size, |p| p.p99),
            "size_max": pick(self.size, |p| p.max),
            "duration_p50": pick(self.duration, |p| p.p50),
            "duration_p90": pick(self.duration, |p| p.p90),
            "duration_p99": pick(self.duration, |p| p.p99),
            "duration_max": pick(self.duration, |p| p.max),
            "size_histogram": self.size_histogram,
            "duration_histogram": self.duration_histogram,
        })
    }
}

fn record(interval: &BoundedInterval, size: usize) -> ComponentRecord {
    ComponentRecord { size: size as u64, duration: interval.duration() as u64 }
}

pub fn component_stats(components: &[Component]) -> ComponentStats {
    ComponentStats::from_records(components.iter().map(|c| record(&c.interval, c.size())).collect())
}

/// Keeps only size and duration of emitted components.
#[derive(Clone, Debug, Default)]
pub struct StatsSink {
    pub records: Vec<ComponentRecord>,
}

impl StatsSink {
    pub fn finish(self) -> ComponentStats {
        ComponentStats::from_records(self.records)
    }
}

impl ComponentSink for StatsSink {
    fn emit(&mut self, interval: BoundedInterval, nodes: &[NodeId]) {
        self.records.push(record(&interval, nodes.len()));
    }
}

/// `ℓ(u, v)` for every ordered pair of distinct nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatencyMatrix {
    n: usize,
    cells: Vec<Option<Tick>>,
}

impl LatencyMatrix {
    pub fn unreachable(n: usize) -> LatencyMatrix {
        LatencyMatrix { n, cells: vec![None; n * n] }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// `None` when `v` cannot be reached from `u`, and on the diagonal.
    pub fn get(&self, u: NodeId, v: NodeId) -> Option<Tick> {
        self.cells[u.index() * self.n + v.index()]
    }

    pub fn set(&mut self, u: NodeId, v: NodeId, latency: Option<Tick>) {
        assert_ne!(u, v, "the diagonal is excluded");
        self.cells[u.index() * self.n + v.index()] = latency;
    }

    pub fn reachable_pairs(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }
}

/// Components of `G_t` with at least two nodes, and the nodes whose presence
/// ends, at every event time.
struct Instants {
    times: Vec<Tick>,
    comp_offsets: Vec<Vec<u32>>,
    members: Vec<Vec<NodeId>>,
    departures: Vec<Vec<NodeId>>,
}

impl Instants {
    fn new(stream: &StreamGraph) -> Instants {
        let n = stream.node_count();
        let seq = EventSequence::new(stream);
        let mut live: Vec<Pair> = Vec::new();
        let mut live_pos = std::collections::HashMap::new();
        let mut uf = SparseUnionFind::new(n);
        let mut out =
            Instants { times: Vec::new(), comp_offsets: Vec::new(), members: Vec::new(), departures: Vec::new() };

        for (t, group) in seq.groups() {
            for ev in group {
                if let (EventKind::LinkArrival, Subject::Link(p)) = (ev.kind, ev.subject) {
                    live_pos.insert(p, live.len());
                    live.push(p);
                }
            }
            uf.reset();
            for p in &live {
                uf.union(p.u(), p.v());
            }
            let (offsets, members) = uf.groups();
            out.times.push(t);
            out.comp_offsets.push(offsets);
            out.members.push(members);

            let mut departing = Vec::new();
            for ev in group {
                match (ev.kind, ev.subject) {
                    (EventKind::LinkDeparture, Subject::Link(p)) => {
                        let i = live_pos.remove(&p).expect("departure of absent link");
                        live.swap_remove(i);
                        if let Some(&moved) = live.get(i) {
                            live_pos.insert(moved, i);
                        }
                    }
                    (EventKind::NodeDeparture, Subject::Node(u)) => departing.push(u),
                    _ => {}
                }
            }
            out.departures.push(departing);
        }
        out
    }

    fn components(&self, i: usize) -> impl Iterator<Item = &[NodeId]> {
        let (offsets, members) = (&self.comp_offsets[i], &self.members[i]);
        offsets.windows(2).map(move |w| &members[w[0] as usize..w[1] as usize])
    }
}

/// Union-find whose reset costs only the nodes touched since the last reset.
struct SparseUnionFind {
    parent: Vec<u32>,
    touched: Vec<NodeId>,
}

impl SparseUnionFind {
    const UNSET: u32 = u32::MAX;

    fn new(n: usize) -> SparseUnionFind {
        SparseUnionFind { parent: vec![Self::UNSET; n], touched: Vec::new() }
    }

    fn reset(&mut self) {
        for u in self.touched.drain(..) {
            self.parent[u.index()] = Self::UNSET;
        }
    }

    fn find(&mut self, u: NodeId) -> u32 {
        let mut x = u.0;
        if self.parent[x as usize] == Self::UNSET {
            self.parent[x as usize] = x;
            self.touched.push(u);
            return x;
        }
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    fn union(&mut self, a: NodeId, b: NodeId) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }

    /// Touched nodes grouped by root, as offsets into a member list.
    fn groups(&mut self) -> (Vec<u32>, Vec<NodeId>) {
        let touched = std::mem::take(&mut self.touched);
        let mut keyed: Vec<(u32, NodeId)> = touched.iter().map(|&u| (self.find(u), u)).collect();
        self.touched = touched;
        keyed.sort_unstable();
        let mut offsets = vec![0u32];
        let members = keyed.iter().map(|&(_, u)| u).collect();
        for i in 1..=keyed.len() {
            if i == keyed.len() || keyed[i].0 != keyed[i - 1].0 {
                offsets.push(i as u32);
            }
        }
        if keyed.is_empty() {
            offsets.clear();
        }
        (offsets, members)
    }
}

/// Latencies from one source. `best[x]` is the latest departure from `src`
/// after which `x` has been reached and is still held; it only grows, so the
/// first time it takes a value gives that departure's fastest arrival.
fn sweep_from(src: NodeId, inst: &Instants, presence: &[Interval], n: usize) -> Vec<Option<Tick>> {
    let mut best: Vec<Option<Tick>> = vec![None; n];
    let mut latency: Vec<Option<Tick>> = vec![None; n];
    let mut seg = 0;
    for (i, &t) in inst.times.iter().enumerate() {
        while seg < presence.len() && presence[seg].e < t {
            seg += 1;
        }
        if presence.get(seg).is_some_and(|iv| iv.b <= t) {
            best[src.index()] = Some(t);
        }
        for comp in inst.components(i) {
            let Some(m) = comp.iter().filter_map(|x| best[x.index()]).max() else {
                continue;
            };
            for &x in comp {
                if best[x.index()] < Some(m) {
                    best[x.index()] = Some(m);
                    let l = t - m;
                    if latency[x.index()].is_none_or(|old| l < old) {
                        latency[x.index()] = Some(l);
                    }
                }
            }
        }
        for &x in &inst.departures[i] {
            best[x.index()] = None;
        }
    }
    latency[src.index()] = None;
    latency
}

/// Default bound on `n × event_times`.
pub const DEFAULT_LATENCY_BUDGET: u128 = 50_000_000;

/// Exact latencies for every ordered pair, one independent sweep per source.
pub fn latencies(stream: &StreamGraph, budget: u128) -> Result<LatencyMatrix, MetricsError> {
    let n = stream.node_count();
    let required = n as u128 * stream.event_times().len() as u128;
    if required > budget {
        return Err(MetricsError::BudgetExceeded { required, budget });
    }
    let inst = Instants::new(stream);
    let presence = stream.presence_by_node();
    let rows: Vec<Vec<Option<Tick>>> =
        (0..n).into_par_iter().map(|u| sweep_from(NodeId(u as u32), &inst, &presence[u], n)).collect();
    Ok(LatencyMatrix { n, cells: rows.concat() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxReport {
    pub lrmse: f64,
    pub avg_difference: f64,
    pub avg_stretch: f64,
    pub missing_paths: u64,
    pub pair_count_used: u64,
}

/// Error metrics between exact latencies `exact` and approximated ones.
///
/// Sums run over the `P` pairs reachable in both; pairs reachable only in
/// `exact` are counted in `missing_paths`. With `P = 0` the report is
/// `lrmse = 0`, `avg_difference = 0`, `avg_stretch = 1`.
pub fn compare_matrices(exact: &LatencyMatrix, approx: &LatencyMatrix) -> Result<ApproxReport, MetricsError> {
    if exact.n != approx.n {
        return Err(MetricsError::MismatchedNodeSets);
    }
    let (mut sq, mut diff, mut pairs, mut missing) = (0i128, 0i128, 0u64, 0u64);
    let mut stretch = 0.0f64;
    for (a, b) in exact.cells.iter().zip(&approx.cells) {
        match (a, b) {
            (Some(l), Some(ld)) => {
                let d = (*ld - *l) as i128;
                sq += d * d;
                diff += d;
                stretch += (*ld as f64 + 1.0) / (*l as f64 + 1.0);
                pairs += 1;
            }
            (Some(_), None) => missing += 1,
            _ => {}
        }
    }
    if pairs == 0 {
        return Ok(ApproxReport {
            lrmse: 0.0,
            avg_difference: 0.0,
            avg_stretch: 1.0,
            missing_paths: missing,
            pair_count_used: 0,
        });
    }
    let p = pairs as f64;
    Ok(ApproxReport {
        lrmse: (sq as f64 / p).sqrt(),
        avg_difference: diff as f64 / p,
        avg_stretch: stretch / p,
        missing_paths: missing,
        pair_count_used: pairs,
    })
}

/// Latencies of both streams, then [`compare_matrices`].
pub fn compare(stream: &StreamGraph, approx: &StreamGraph, budget: u128) -> Result<ApproxReport, MetricsError> {
    if stream.labels() != approx.labels() {
        return Err(MetricsError::MismatchedNodeSets);
    }
    compare_matrices(&latencies(stream, budget)?, &latencies(approx, budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scc::{components, Algorithm};
    use crate::stream::{build_stream, LinkSegment, NodeSegment};

    fn stream(nodes: &[(u32, Tick, Tick)], links: &[(u32, u32, Tick, Tick)]) -> StreamGraph {
        let ns = nodes.iter().map(|&(u, b, e)| NodeSegment { interval: Interval { b, e }, node: NodeId(u) }).collect();
        let ls = links
            .iter()
            .map(|&(u, v, b, e)| LinkSegment {
                interval: Interval { b, e },
                pair: Pair::new(NodeId(u), NodeId(v)).unwrap(),
            })
            .collect();
        build_stream(ns, ls, None).unwrap()
    }

    fn lat(m: &LatencyMatrix, u: u32, v: u32) -> Option<Tick> {
        m.get(NodeId(u), NodeId(v))
    }

    #[test]
    fn shared_presence_gives_zero() {
        let m = latencies(&stream(&[(0, 0, 10), (1, 0, 10)], &[(0, 1, 2, 5)]), u128::MAX).unwrap();
        assert_eq!((lat(&m, 0, 1), lat(&m, 1, 0)), (Some(0), Some(0)));
    }

    #[test]
    fn waiting_at_an_intermediate_node() {
        // u=0 leaves at 1 through w=2, which waits for the link to v=1 at 4
        let s = stream(&[(0, 0, 1), (1, 0, 10), (2, 0, 10)], &[(0, 2, 0, 1), (2, 1, 4, 4)]);
        let m = latencies(&s, u128::MAX).unwrap();
        assert_eq!(lat(&m, 0, 1), Some(3));
        assert_eq!(lat(&m, 0, 2), Some(0));
        assert_eq!(lat(&m, 1, 0), None);
        assert_eq!(lat(&m, 2, 0), Some(0));
        assert_eq!(lat(&m, 0, 0), None);
    }

    #[test]
    fn node_absence_breaks_waiting() {
        // w=2 is absent on ]2,3[ so it cannot hold the message until 4
        let s = stream(&[(0, 0, 10), (1, 0, 10), (2, 0, 2), (2, 3, 10)], &[(0, 2, 1, 1), (2, 1, 4, 4)]);
        let m = latencies(&s, u128::MAX).unwrap();
        assert_eq!(lat(&m, 0, 1), None);
        assert_eq!(lat(&m, 1, 0), None);
    }

    #[test]
    fn chaining_at_one_instant() {
        let s = stream(&[(0, 0, 9), (1, 0, 9), (2, 0, 9)], &[(0, 1, 3, 3), (1, 2, 3, 6)]);
        let m = latencies(&s, u128::MAX).unwrap();
        assert_eq!(lat(&m, 0, 2), Some(0));
        assert_eq!(m.reachable_pairs(), 6);
    }

    #[test]
    fn budget_guard() {
        let s = stream(&[(0, 0, 10), (1, 0, 10)], &[(0, 1, 2, 5)]);
        assert_eq!(latencies(&s, 7), Err(MetricsError::BudgetExceeded { required: 8, budget: 7 }));
        assert!(latencies(&s, 8).is_ok());
    }

    #[test]
    fn report_formulas() {
        let mut a = LatencyMatrix::unreachable(2);
        let mut b = LatencyMatrix::unreachable(2);
        for (u, v) in [(0, 1), (1, 0)] {
            a.set(NodeId(u), NodeId(v), Some(2));
            b.set(NodeId(u), NodeId(v), Some(4));
        }
        let r = compare_matrices(&a, &b).unwrap();
        assert_eq!((r.lrmse, r.avg_difference, r.pair_count_used), (2.0, 2.0, 2));
        assert!((r.avg_stretch - 5.0 / 3.0).abs() < 1e-12);

        b.set(NodeId(1), NodeId(0), None);
        let r = compare_matrices(&a, &b).unwrap();
        assert_eq!((r.missing_paths, r.pair_count_used), (1, 1));

        let r = compare_matrices(&a, &LatencyMatrix::unreachable(2)).unwrap();
        assert_eq!((r.lrmse, r.avg_difference, r.avg_stretch, r.missing_paths), (0.0, 0.0, 1.0, 2));
        assert_eq!(compare_matrices(&a, &LatencyMatrix::unreachable(3)), Err(MetricsError::MismatchedNodeSets));
    }

    #[test]
    fn identity_report() {
        let s = stream(&[(0, 0, 1), (1, 0, 10), (2, 0, 10)], &[(0, 2, 0, 1), (2, 1, 4, 4)]);
        let r = compare(&s, &s, u128::MAX).unwrap();
        assert_eq!((r.lrmse, r.avg_difference, r.avg_stretch, r.missing_paths), (0.0, 0.0, 1.0, 0));
    }

    #[test]
    fn stats_of_two_node_example() {
        let s = stream(&[(0, 0, 9), (1, 0, 9)], &[(0, 1, 2, 5)]);
        let st = component_stats(&components(Algorithm::Direct, &s));
        let mut sizes: Vec<u64> = st.records.iter().map(|r| r.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 1, 1, 2]);
        assert_eq!(st.size_histogram, vec![Bin { lo: 1, hi: 1, count: 4 }, Bin { lo: 2, hi: 3, count: 1 }]);
        let mut sink = StatsSink::default();
        crate::scc::scc_direct(&s, &mut sink);
        let mut streamed = sink.finish();
        streamed.records.sort_by_key(|r| (r.size, r.duration));
        let mut batch = st.clone();
        batch.records.sort_by_key(|r| (r.size, r.duration));
        assert_eq!(streamed, batch);
    }

    #[test]
    fn durations() {
        let inst = BoundedInterval::closed(4, 4);
        let half_open = BoundedInterval::new(0, true, 2, false).unwrap();
        let st = component_stats(&[
            Component::new(inst, vec![NodeId(0), NodeId(1), NodeId(2)]),
            Component::new(half_open, vec![NodeId(0)]),
        ]);
        assert_eq!(
            st.records,
            vec![ComponentRecord { size: 3, duration: 0 }, ComponentRecord { size: 1, duration: 2 }]
        );
        assert_eq!(component_stats(&[]), ComponentStats::default());
        assert_eq!(component_stats(&[]).summary()["size_p50"], serde_json::Value::Null);
    }

    #[test]
    fn percentiles_and_bins() {
        let v: Vec<u64> = (1..=100).collect();
        assert_eq!((nearest_rank(&v, 50), nearest_rank(&v, 90), nearest_rank(&v, 99)), (50, 90, 99));
        assert_eq!(nearest_rank(&[7], 99), 7);
        assert_eq!(nearest_rank(&[1, 2, 3], 50), 2);
        let bins = log2_histogram(&[0, 1, 2, 3, 4, 7, 8, u64::MAX]);
        assert_eq!(
            bins.iter().map(|b| (b.lo, b.count)).collect::<Vec<_>>(),
            vec![(0, 1), (1, 1), (2, 2), (4, 2), (8, 1), (1 << 63, 1)]
        );
        assert_eq!(bins.last().unwrap().hi, u64::MAX);
    }

    #[test]
    fn nine_digits() {
        assert_eq!(sig9(1.0 / 3.0), 0.333333333);
        assert_eq!(sig9(1.05), 1.05);
        assert_eq!(sig9(0.0), 0.0);
        assert_eq!(sig9(123456789012.0), 123456789000.0);
    }
}
