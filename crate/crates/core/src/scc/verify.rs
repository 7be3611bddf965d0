use std::collections::HashMap;

use super::Component;
use crate::stream::{NodeId, StreamGraph};

/// Checks a candidate component list against the stream by sampling every
/// event time, every gap between consecutive event times, and one instant
/// on each side of the stream.
///
/// At every sample each present node must lie in exactly one component whose
/// interval contains the sample, and that component's node set must be a
/// connected component of the graph at that instant. Component bounds must
/// be event times, so each gap between event times is either wholly inside
/// an interval or wholly outside it and one sample per gap suffices.
pub fn verify_partition(stream: &StreamGraph, components: &[Component]) -> bool {
    let times = stream.event_times();
    if times.is_empty() {
        return components.is_empty();
    }
    // doubled coordinates: 2t for an event time, t1 + t2 strictly between
    let mut samples: Vec<i128> = Vec::with_capacity(2 * times.len() + 1);
    samples.push(2 * times[0] as i128 - 1);
    for (i, &t) in times.iter().enumerate() {
        samples.push(2 * t as i128);
        if let Some(&next) = times.get(i + 1) {
            samples.push(t as i128 + next as i128);
        }
    }
    samples.push(2 * *times.last().unwrap() as i128 + 1);

    let n = stream.node_count();
    let mut per_sample: Vec<Vec<usize>> = vec![Vec::new(); samples.len()];
    for (ci, c) in components.iter().enumerate() {
        if !c.interval.is_well_formed() || c.nodes.is_empty() || c.nodes.iter().any(|x| x.index() >= n) {
            return false;
        }
        if c.nodes.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        if times.binary_search(&c.interval.b).is_err() || times.binary_search(&c.interval.e).is_err() {
            return false;
        }
        // membership is contiguous in sample order
        let lo = samples.partition_point(|&s| s < 2 * c.interval.b as i128);
        let mut hit = false;
        for (si, &s) in samples.iter().enumerate().skip(lo) {
            if s > 2 * c.interval.e as i128 {
                break;
            }
            if c.interval.contains_doubled(s) {
                per_sample[si].push(ci);
                hit = true;
            }
        }
        if !hit {
            return false;
        }
    }

    let mut owner = vec![usize::MAX; n];
    let mut label = vec![usize::MAX; n];
    for (si, &s) in samples.iter().enumerate() {
        let present = |b: i64, e: i64| 2 * b as i128 <= s && s <= 2 * e as i128;
        let nodes: Vec<NodeId> = stream
            .node_segments()
            .iter()
            .filter(|seg| present(seg.interval.b, seg.interval.e))
            .map(|seg| seg.node)
            .collect();
        let mut uf = UnionFind::new(&nodes);
        for seg in stream.link_segments() {
            if present(seg.interval.b, seg.interval.e) {
                uf.union(seg.u(), seg.v());
            }
        }
        let mut sizes: HashMap<NodeId, usize> = HashMap::new();
        for &u in &nodes {
            let r = uf.find(u);
            label[u.index()] = r.index();
            *sizes.entry(r).or_default() += 1;
        }

        let mut covered = 0usize;
        for &ci in &per_sample[si] {
            let c = &components[ci];
            let first = c.nodes[0];
            if label[first.index()] == usize::MAX {
                return false;
            }
            let root = label[first.index()];
            if sizes.get(&NodeId(root as u32)) != Some(&c.nodes.len()) {
                return false;
            }
            for &x in &c.nodes {
                if label[x.index()] != root || owner[x.index()] == si {
                    return false;
                }
                owner[x.index()] = si;
            }
            covered += c.nodes.len();
        }
        if covered != nodes.len() {
            return false;
        }
        for &u in &nodes {
            label[u.index()] = usize::MAX;
        }
    }
    true
}

/// No two components with the same node set may sit back to back in time,
/// since their union would then be a larger component.
pub fn verify_maximality(components: &[Component]) -> bool {
    let mut by_nodes: HashMap<&[NodeId], Vec<&Component>> = HashMap::new();
    for c in components {
        by_nodes.entry(&c.nodes).or_default().push(c);
    }
    by_nodes.values_mut().all(|group| {
        group.sort_by_key(|c| c.interval.sort_key());
        group.windows(2).all(|w| {
            let (a, b) = (&w[0].interval, &w[1].interval);
            !(a.e == b.b && a.e_closed != b.b_closed)
        })
    })
}

struct UnionFind {
    parent: HashMap<NodeId, NodeId>,
}

impl UnionFind {
    fn new(nodes: &[NodeId]) -> UnionFind {
        UnionFind { parent: nodes.iter().map(|&u| (u, u)).collect() }
    }

    fn find(&mut self, u: NodeId) -> NodeId {
        let p = self.parent[&u];
        if p == u {
            return u;
        }
        let r = self.find(p);
        self.parent.insert(u, r);
        r
    }

    fn union(&mut self, a: NodeId, b: NodeId) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent.insert(ra.max(rb), ra.min(rb));
        }
    }
}
