//! Strongly connected components of stream graphs.
//!
//! A component `(⟨b,e⟩, X)` is a maximal time interval and node set such that
//! `X` is a connected component of `G_t` for every `t` in the interval. The
//! components partition the temporal nodes of the stream. Three algorithms
//! compute them and report each component to a [`ComponentSink`] as soon as it
//! closes:
//!
//! * [`scc_naive`] recomputes the components of `G_t^-` and `G_t` at every event time,
//! * [`scc_direct`] processes events one by one and searches for a path on link departures,
//! * [`scc_fd`] delegates merges and splits to a [`DynConn`](crate::dynconn::DynConn).

mod direct;
mod fd;
mod naive;
mod verify;

use std::time::{Duration, Instant};

use crate::stream::{BoundedInterval, NodeId, StreamGraph, Tick};

pub use direct::scc_direct;
pub use fd::scc_fd;
pub use naive::{scc_naive, scc_naive_with, NaiveOptions};
pub use verify::{verify_maximality, verify_partition};

/// A strongly connected component; `nodes` is sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    pub interval: BoundedInterval,
    pub nodes: Vec<NodeId>,
}

impl Component {
    pub fn new(interval: BoundedInterval, mut nodes: Vec<NodeId>) -> Component {
        nodes.sort_unstable();
        Component { interval, nodes }
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn duration(&self) -> Tick {
        self.interval.duration()
    }
}

impl PartialOrd for Component {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Component {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.interval.sort_key(), &self.nodes).cmp(&(other.interval.sort_key(), &other.nodes))
    }
}

/// Receives components as they close. `nodes` is not necessarily sorted.
pub trait ComponentSink {
    fn emit(&mut self, interval: BoundedInterval, nodes: &[NodeId]);
}

impl<F: FnMut(BoundedInterval, &[NodeId])> ComponentSink for F {
    fn emit(&mut self, interval: BoundedInterval, nodes: &[NodeId]) {
        self(interval, nodes)
    }
}

/// Collects every component.
#[derive(Clone, Debug, Default)]
pub struct CollectSink {
    pub components: Vec<Component>,
}

impl CollectSink {
    /// Components in canonical order.
    pub fn into_sorted(mut self) -> Vec<Component> {
        self.components.sort_unstable();
        self.components
    }
}

impl ComponentSink for CollectSink {
    fn emit(&mut self, interval: BoundedInterval, nodes: &[NodeId]) {
        self.components.push(Component::new(interval, nodes.to_vec()));
    }
}

/// Counts components without materializing them.
#[derive(Clone, Copy, Debug, Default)]
pub struct CountSink {
    pub count: usize,
}

impl ComponentSink for CountSink {
    fn emit(&mut self, _: BoundedInterval, _: &[NodeId]) {
        self.count += 1;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub component_count: usize,
    pub max_component_size: usize,
    pub wall: Duration,
}

/// Wraps a sink to tally the summary.
pub(crate) struct Tally<'a, S: ComponentSink + ?Sized> {
    inner: &'a mut S,
    count: usize,
    max_size: usize,
    started: Instant,
}

impl<'a, S: ComponentSink + ?Sized> Tally<'a, S> {
    pub fn new(inner: &'a mut S) -> Self {
        Tally { inner, count: 0, max_size: 0, started: Instant::now() }
    }

    #[inline]
    pub fn emit(&mut self, interval: BoundedInterval, nodes: &[NodeId]) {
        debug_assert!(interval.is_well_formed(), "{interval:?}");
        debug_assert!(!nodes.is_empty());
        self.count += 1;
        self.max_size = self.max_size.max(nodes.len());
        self.inner.emit(interval, nodes);
    }

    pub fn finish(self) -> RunSummary {
        RunSummary { component_count: self.count, max_component_size: self.max_size, wall: self.started.elapsed() }
    }
}

/// Start of an open component: `[t` when closed, `]t` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Begin {
    pub t: Tick,
    pub closed: bool,
}

impl Begin {
    pub fn at(t: Tick) -> Begin {
        Begin { t, closed: true }
    }

    pub fn after(t: Tick) -> Begin {
        Begin { t, closed: false }
    }

    /// `⟨b, t[`, or `None` when it would be empty.
    pub fn until_before(self, t: Tick) -> Option<BoundedInterval> {
        if self == Begin::at(t) {
            None
        } else {
            Some(BoundedInterval { b: self.t, b_closed: self.closed, e: t, e_closed: false })
        }
    }

    /// `⟨b, t]`, or `None` when it would be empty.
    pub fn until(self, t: Tick) -> Option<BoundedInterval> {
        if self == Begin::after(t) {
            None
        } else {
            Some(BoundedInterval { b: self.t, b_closed: self.closed, e: t, e_closed: true })
        }
    }

    /// Totally ordered encoding: `[t < ]t < [t+1`.
    pub fn encode(self) -> i128 {
        2 * self.t as i128 + i128::from(!self.closed)
    }

    pub fn decode(k: i128) -> Begin {
        let t = k.div_euclid(2) as Tick;
        Begin { t, closed: k.rem_euclid(2) == 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    Direct,
    Fd,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Direct => "direct",
            Algorithm::Fd => "fd",
        }
    }
}

/// Runs the chosen algorithm.
pub fn run(algorithm: Algorithm, stream: &StreamGraph, sink: &mut dyn ComponentSink) -> RunSummary {
    match algorithm {
        Algorithm::Naive => scc_naive(stream, sink),
        Algorithm::Direct => scc_direct(stream, sink),
        Algorithm::Fd => scc_fd(stream, sink),
    }
}

/// Runs the chosen algorithm and returns its components in canonical order.
pub fn components(algorithm: Algorithm, stream: &StreamGraph) -> Vec<Component> {
    let mut sink = CollectSink::default();
    run(algorithm, stream, &mut sink);
    sink.into_sorted()
}
