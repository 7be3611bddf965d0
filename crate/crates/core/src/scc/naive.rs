use std::collections::{BTreeMap, HashMap};

use super::{Begin, ComponentSink, RunSummary, Tally};
use crate::stream::{BoundedInterval, EventKind, EventSequence, NodeId, Pair, StreamGraph, Subject, Tick};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NaiveOptions {
    /// Skip event times whose only events are link arrivals inside an
    /// existing component. Never changes the output.
    pub skip_intra_arrivals: bool,
}

impl Default for NaiveOptions {
    fn default() -> Self {
        NaiveOptions { skip_intra_arrivals: true }
    }
}

/// Per-event-time recomputation: diffs the open components against the
/// connected components of `G_t^-` and then of `G_t` at every event time.
pub fn scc_naive(stream: &StreamGraph, sink: &mut dyn ComponentSink) -> RunSummary {
    scc_naive_with(stream, sink, NaiveOptions::default())
}

pub fn scc_naive_with(stream: &StreamGraph, sink: &mut dyn ComponentSink, opts: NaiveOptions) -> RunSummary {
    let seq = EventSequence::new(stream);
    let mut tally = Tally::new(sink);
    let mut graph = LiveGraph::new(stream.node_count());
    let mut open: BTreeMap<Vec<NodeId>, Begin> = BTreeMap::new();
    // components of the graph between the previous event time and the next
    let mut between = Partition::default();
    let mut prev: Option<Tick> = None;

    for (t, events) in seq.groups() {
        if let Some(tp) = prev {
            if opts.skip_intra_arrivals
                && events.iter().all(|ev| match (ev.kind, ev.subject) {
                    (EventKind::LinkArrival, Subject::Link(p)) => between.same(p.u(), p.v()),
                    _ => false,
                })
            {
                for ev in events {
                    graph.apply(ev.kind, ev.subject);
                }
                continue;
            }
            diff(&mut open, &between.components, Begin::after(tp), |b| b.until(tp), &mut tally);
        }

        for ev in events.iter().filter(|ev| matches!(ev.kind, EventKind::NodeArrival | EventKind::LinkArrival)) {
            graph.apply(ev.kind, ev.subject);
        }
        let at_t = graph.components();
        diff(&mut open, &at_t.components, Begin::at(t), |b| b.until_before(t), &mut tally);

        for ev in events.iter().filter(|ev| matches!(ev.kind, EventKind::LinkDeparture | EventKind::NodeDeparture)) {
            graph.apply(ev.kind, ev.subject);
        }
        between = graph.components();
        prev = Some(t);
    }

    if let Some(omega) = prev {
        for (nodes, begin) in std::mem::take(&mut open) {
            if let Some(iv) = begin.until(omega) {
                tally.emit(iv, &nodes);
            }
        }
    }
    tally.finish()
}

/// Opens `start` for components not yet open; closes open entries that are
/// no longer components.
fn diff<S: ComponentSink + ?Sized>(
    open: &mut BTreeMap<Vec<NodeId>, Begin>,
    components: &[Vec<NodeId>],
    start: Begin,
    close: impl Fn(Begin) -> Option<BoundedInterval>,
    tally: &mut Tally<'_, S>,
) {
    let mut next: BTreeMap<Vec<NodeId>, Begin> = BTreeMap::new();
    for c in components {
        let begin = open.remove(c).unwrap_or(start);
        next.insert(c.clone(), begin);
    }
    for (nodes, begin) in std::mem::replace(open, next) {
        if let Some(iv) = close(begin) {
            tally.emit(iv, &nodes);
        }
    }
}

#[derive(Default)]
struct Partition {
    components: Vec<Vec<NodeId>>,
    label: HashMap<NodeId, usize>,
}

impl Partition {
    fn same(&self, u: NodeId, v: NodeId) -> bool {
        matches!((self.label.get(&u), self.label.get(&v)), (Some(a), Some(b)) if a == b)
    }
}

/// Nodes and links present over the current instant or open interval.
struct LiveGraph {
    nodes: Vec<NodeId>,
    node_pos: Vec<usize>,
    edges: Vec<Pair>,
    edge_pos: HashMap<Pair, usize>,
    parent: Vec<u32>,
}

const ABSENT: usize = usize::MAX;

impl LiveGraph {
    fn new(n: usize) -> LiveGraph {
        LiveGraph {
            nodes: Vec::new(),
            node_pos: vec![ABSENT; n],
            edges: Vec::new(),
            edge_pos: HashMap::new(),
            parent: (0..n as u32).collect(),
        }
    }

    fn apply(&mut self, kind: EventKind, subject: Subject) {
        match (kind, subject) {
            (EventKind::NodeArrival, Subject::Node(u)) => {
                self.node_pos[u.index()] = self.nodes.len();
                self.nodes.push(u);
            }
            (EventKind::NodeDeparture, Subject::Node(u)) => {
                let i = std::mem::replace(&mut self.node_pos[u.index()], ABSENT);
                self.nodes.swap_remove(i);
                if let Some(&moved) = self.nodes.get(i) {
                    self.node_pos[moved.index()] = i;
                }
            }
            (EventKind::LinkArrival, Subject::Link(p)) => {
                self.edge_pos.insert(p, self.edges.len());
                self.edges.push(p);
            }
            (EventKind::LinkDeparture, Subject::Link(p)) => {
                let i = self.edge_pos.remove(&p).expect("departure of absent link");
                self.edges.swap_remove(i);
                if let Some(&moved) = self.edges.get(i) {
                    self.edge_pos.insert(moved, i);
                }
            }
            _ => unreachable!("event kind and subject disagree"),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = x;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    fn components(&mut self) -> Partition {
        for &u in &self.nodes {
            self.parent[u.index()] = u.0;
        }
        for i in 0..self.edges.len() {
            let p = self.edges[i];
            let (a, b) = (self.find(p.u().0), self.find(p.v().0));
            if a != b {
                self.parent[a.max(b) as usize] = a.min(b);
            }
        }
        let mut by_root: HashMap<u32, usize> = HashMap::new();
        let mut components: Vec<Vec<NodeId>> = Vec::new();
        let mut label = HashMap::with_capacity(self.nodes.len());
        for i in 0..self.nodes.len() {
            let u = self.nodes[i];
            let r = self.find(u.0);
            let idx = *by_root.entry(r).or_insert_with(|| {
                components.push(Vec::new());
                components.len() - 1
            });
            components[idx].push(u);
            label.insert(u, idx);
        }
        for c in &mut components {
            c.sort_unstable();
        }
        Partition { components, label }
    }
}
