//! Brute-force oracles shared by the integration and acceptance tests. They
//! work from raw segments only and share no code with the library algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use stream_scc::ingest::{parse_segments, TimeScale};
use stream_scc::scc::Component;
use stream_scc::stream::{StreamGraph, Tick};

pub fn segments(text: &str) -> StreamGraph {
    parse_segments(text.as_bytes(), TimeScale::UNIT).expect("valid test stream")
}

/// One line per component, in canonical order, with node labels.
pub fn render(stream: &StreamGraph, comps: &[Component]) -> String {
    let mut lines: Vec<(_, Vec<u32>, String)> = comps
        .iter()
        .map(|c| {
            let labels: Vec<&str> = c.nodes.iter().map(|&u| stream.label(u)).collect();
            let ids = c.nodes.iter().map(|u| u.0).collect();
            (c.interval.sort_key(), ids, format!("{} {} {}", c.interval, c.size(), labels.join(" ")))
        })
        .collect();
    lines.sort();
    lines.into_iter().map(|(_, _, l)| l + "\n").collect()
}

fn all_times(s: &StreamGraph) -> Vec<Tick> {
    let mut t: BTreeSet<Tick> = BTreeSet::new();
    for seg in s.node_segments() {
        t.insert(seg.interval.b);
        t.insert(seg.interval.e);
    }
    for seg in s.link_segments() {
        t.insert(seg.interval.b);
        t.insert(seg.interval.e);
    }
    t.into_iter().collect()
}

/// Components of the graph at doubled time `x` (`2t`, or `t1 + t2` strictly
/// between two times), by breadth-first search.
fn components_at(s: &StreamGraph, x: i128) -> BTreeSet<Vec<u32>> {
    let within = |b: Tick, e: Tick| 2 * b as i128 <= x && x <= 2 * e as i128;
    let nodes: BTreeSet<u32> =
        s.node_segments().iter().filter(|g| within(g.interval.b, g.interval.e)).map(|g| g.node.0).collect();
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for l in s.link_segments().iter().filter(|l| within(l.interval.b, l.interval.e)) {
        adj.entry(l.u().0).or_default().push(l.v().0);
        adj.entry(l.v().0).or_default().push(l.u().0);
    }
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    for &u in &nodes {
        if !seen.insert(u) {
            continue;
        }
        let mut comp = vec![u];
        let mut queue = VecDeque::from([u]);
        while let Some(a) = queue.pop_front() {
            for &b in adj.get(&a).into_iter().flatten() {
                if seen.insert(b) {
                    comp.push(b);
                    queue.push_back(b);
                }
            }
        }
        comp.sort();
        out.insert(comp);
    }
    out
}

/// `(b, b_closed, e, e_closed, nodes)`: every maximal run of consecutive
/// samples over which one node set stays a component.
pub type RawComponent = (Tick, bool, Tick, bool, Vec<u32>);

pub fn brute_components(s: &StreamGraph) -> Vec<RawComponent> {
    let times = all_times(s);
    let mut samples: Vec<i128> = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        samples.push(2 * t as i128);
        if let Some(&next) = times.get(i + 1) {
            samples.push(t as i128 + next as i128);
        }
    }
    // sample index -> (b, closed) and (e, closed)
    let start = |i: usize| if i.is_multiple_of(2) { (times[i / 2], true) } else { (times[i / 2], false) };
    let end = |i: usize| if i.is_multiple_of(2) { (times[i / 2], true) } else { (times[i / 2 + 1], false) };

    let mut open: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for (i, &x) in samples.iter().enumerate() {
        let now = components_at(s, x);
        let closing: Vec<Vec<u32>> = open.keys().filter(|k| !now.contains(*k)).cloned().collect();
        for k in closing {
            let first = open.remove(&k).unwrap();
            let ((b, bc), (e, ec)) = (start(first), end(i - 1));
            out.push((b, bc, e, ec, k));
        }
        for k in now {
            open.entry(k).or_insert(i);
        }
    }
    for (k, first) in open {
        let ((b, bc), (e, ec)) = (start(first), end(samples.len() - 1));
        out.push((b, bc, e, ec, k));
    }
    out.sort();
    out
}

pub fn raw(comps: &[Component]) -> Vec<RawComponent> {
    let mut v: Vec<RawComponent> = comps
        .iter()
        .map(|c| {
            let i = c.interval;
            (i.b, i.b_closed, i.e, i.e_closed, c.nodes.iter().map(|u| u.0).collect())
        })
        .collect();
    v.sort();
    v
}

/// Exact latencies by breadth-first search over the time-expanded graph:
/// states are (node, time) at segment endpoints; moves cross a link present
/// at that time, or wait until the next time if one node segment covers both.
/// `out[u][v]` is `None` when unreachable and on the diagonal.
pub fn brute_latencies(s: &StreamGraph) -> Vec<Vec<Option<Tick>>> {
    let n = s.node_count();
    let times = all_times(s);
    let present = |u: usize, t: Tick| {
        s.node_segments().iter().any(|g| g.node.0 as usize == u && g.interval.b <= t && t <= g.interval.e)
    };
    let holds = |u: usize, t1: Tick, t2: Tick| {
        s.node_segments().iter().any(|g| g.node.0 as usize == u && g.interval.b <= t1 && t2 <= g.interval.e)
    };
    let neighbours = |u: usize, t: Tick| -> Vec<usize> {
        s.link_segments()
            .iter()
            .filter(|l| l.interval.b <= t && t <= l.interval.e)
            .filter_map(|l| {
                let (a, b) = (l.u().0 as usize, l.v().0 as usize);
                if a == u {
                    Some(b)
                } else if b == u {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    };

    let mut out = vec![vec![None; n]; n];
    #[allow(clippy::needless_range_loop)]
    for src in 0..n {
        for (i0, &s0) in times.iter().enumerate() {
            if !present(src, s0) {
                continue;
            }
            let mut seen = HashSet::from([(src, i0)]);
            let mut queue = VecDeque::from([(src, i0)]);
            while let Some((x, i)) = queue.pop_front() {
                let t = times[i];
                if x != src {
                    let l = t - s0;
                    if out[src][x].is_none_or(|old| l < old) {
                        out[src][x] = Some(l);
                    }
                }
                let mut next: Vec<(usize, usize)> = neighbours(x, t).into_iter().map(|y| (y, i)).collect();
                if i + 1 < times.len() && holds(x, t, times[i + 1]) {
                    next.push((x, i + 1));
                }
                for st in next {
                    if seen.insert(st) {
                        queue.push_back(st);
                    }
                }
            }
        }
    }
    out
}

/// Connectivity by breadth-first search over an explicit edge set.
pub struct SearchGraph {
    adj: Vec<BTreeSet<u32>>,
}

impl SearchGraph {
    pub fn new(n: usize) -> SearchGraph {
        SearchGraph { adj: vec![BTreeSet::new(); n] }
    }

    pub fn insert(&mut self, u: u32, v: u32) {
        self.adj[u as usize].insert(v);
        self.adj[v as usize].insert(u);
    }

    pub fn remove(&mut self, u: u32, v: u32) {
        self.adj[u as usize].remove(&v);
        self.adj[v as usize].remove(&u);
    }

    pub fn connected(&self, u: u32, v: u32) -> bool {
        let mut seen = HashSet::from([u]);
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x == v {
                return true;
            }
            for &y in &self.adj[x as usize] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        false
    }
}

/// Hand-built streams exercising simultaneous and instantaneous events.
pub const ADVERSARIAL: [&str; 20] = [
    // instantaneous link
    "n a 0 10\nn b 0 10\nl a b 5 5",
    // merge and split at one instant
    "n a 0 10\nn b 0 10\nn c 0 10\nl a b 0 10\nl b c 4 4",
    // star losing every link at once
    "n h 0 9\nn a 0 9\nn b 0 9\nn c 0 9\nl h a 0 5\nl h b 1 5\nl h c 2 5",
    // triangle ending at once
    "n a 0 9\nn b 0 9\nn c 0 9\nl a b 1 5\nl b c 2 5\nl a c 3 5",
    // chain of instantaneous links at one instant
    "n a 0 6\nn b 0 6\nn c 0 6\nn d 0 6\nl a b 3 3\nl b c 3 3\nl c d 3 3",
    // instantaneous node carrying a link at its instant
    "n a 2 2\nn b 0 4\nl a b 2 2",
    // node leaving and coming back
    "n a 0 2\nn a 4 6\nn b 0 6\nl a b 1 2\nl a b 4 5",
    // cycle losing one link: no split
    "n a 0 10\nn b 0 10\nn c 0 10\nl a b 0 5\nl b c 0 10\nl a c 0 10",
    // cycle losing two links at once
    "n a 0 10\nn b 0 10\nn c 0 10\nl a b 0 5\nl b c 0 5\nl a c 0 10",
    // one link leaves as another arrives
    "n a 0 9\nn b 0 9\nn c 0 9\nl a b 0 5\nl b c 5 9",
    // bridge replaced at the same instant
    "n a 0 9\nn b 0 9\nn c 0 9\nl a b 0 5\nl a c 5 9\nl b c 0 9",
    // two components joined for one instant by a third link
    "n a 0 9\nn b 0 9\nn c 0 9\nn d 0 9\nl a b 0 4\nl c d 0 9\nl b c 4 4",
    // everything instantaneous
    "n a 3 3\nn b 3 3\nn c 3 3\nl a b 3 3",
    // isolated nodes with coinciding bounds
    "n a 0 3\nn b 0 3\nn c 3 5\nn d 3 3",
    // long path cut in the middle
    "n a 0 9\nn b 0 9\nn c 0 9\nn d 0 9\nn e 0 9\nl a b 0 9\nl b c 0 9\nl c d 0 5\nl d e 0 9",
    // path cut at both ends at once
    "n a 0 9\nn b 0 9\nn c 0 9\nn d 0 9\nl a b 0 5\nl b c 0 9\nl c d 0 5",
    // clique losing every link at once
    "n a 0 9\nn b 0 9\nn c 0 9\nn d 0 9\nl a b 1 6\nl a c 1 6\nl a d 1 6\nl b c 1 6\nl b d 1 6\nl c d 1 6",
    // repeated instantaneous contacts on one pair
    "n a 0 6\nn b 0 6\nl a b 2 2\nl a b 4 4",
    // node leaving together with its link
    "n a 0 5\nn b 0 9\nl a b 3 5",
    // two merges and a bridge at one instant
    "n a 0 9\nn b 0 9\nn c 0 9\nn d 0 9\nl a b 3 6\nl c d 3 6\nl b c 3 3",
];
