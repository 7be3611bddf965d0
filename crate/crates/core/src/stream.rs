//! Stream graph data model: node and link segments over integer time.
//!
//! A stream is stored as maximal presence segments. Times are integer ticks so
//! that "just before" and "just after" an instant compare exactly.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Integer time coordinate. One stream uses one unit throughout.
pub type Tick = i64;

/// Dense node identifier, an index into the stream's label table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Unordered node pair stored with the smaller id first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair(NodeId, NodeId);

impl Pair {
    /// Returns `None` for a self loop.
    pub fn new(u: NodeId, v: NodeId) -> Option<Pair> {
        match u.cmp(&v) {
            std::cmp::Ordering::Less => Some(Pair(u, v)),
            std::cmp::Ordering::Greater => Some(Pair(v, u)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn u(self) -> NodeId {
        self.0
    }

    pub fn v(self) -> NodeId {
        self.1
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StreamError {
    #[error("interval [{b},{e}] has its start after its end")]
    InvalidInterval { b: Tick, e: Tick },
    #[error("link {u}-{v} is a self loop")]
    SelfLoop { u: NodeId, v: NodeId },
    #[error("node {node} is not in the node table ({count} nodes)")]
    UnknownNode { node: NodeId, count: usize },
    #[error("link segment ([{b},{e}], {u}{v}) is not covered by the presence of both endpoints")]
    LinkOutsideNodePresence { u: NodeId, v: NodeId, b: Tick, e: Tick },
    #[error("segment [{b},{e}] lies outside the horizon [{alpha},{omega}]")]
    SegmentOutsideHorizon { b: Tick, e: Tick, alpha: Tick, omega: Tick },
    #[error("time {t} lies outside the horizon [{alpha},{omega}]")]
    TimeOutsideHorizon { t: Tick, alpha: Tick, omega: Tick },
    #[error("time {t} is not an event time")]
    NotAnEventTime { t: Tick },
    #[error("event time {t} has no predecessor event time")]
    NoPredecessorEventTime { t: Tick },
}

/// Closed interval `[b, e]`; `b == e` is a single instant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub b: Tick,
    pub e: Tick,
}

impl Interval {
    pub fn new(b: Tick, e: Tick) -> Result<Interval, StreamError> {
        if b > e {
            return Err(StreamError::InvalidInterval { b, e });
        }
        Ok(Interval { b, e })
    }

    #[inline]
    pub fn contains(&self, t: Tick) -> bool {
        self.b <= t && t <= self.e
    }

    #[inline]
    pub fn covers(&self, other: &Interval) -> bool {
        self.b <= other.b && other.e <= self.e
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Tick {
        self.e - self.b
    }

    pub fn is_instant(&self) -> bool {
        self.b == self.e
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.b, self.e)
    }
}

/// Interval whose endpoints are each open or closed, written `⟨b, e⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundedInterval {
    pub b: Tick,
    pub b_closed: bool,
    pub e: Tick,
    pub e_closed: bool,
}

impl BoundedInterval {
    /// Checked constructor: rejects `b > e` and half-open or open instants.
    pub fn new(b: Tick, b_closed: bool, e: Tick, e_closed: bool) -> Option<BoundedInterval> {
        if b > e || (b == e && !(b_closed && e_closed)) {
            return None;
        }
        Some(BoundedInterval { b, b_closed, e, e_closed })
    }

    pub fn closed(b: Tick, e: Tick) -> BoundedInterval {
        BoundedInterval { b, b_closed: true, e, e_closed: true }
    }

    pub fn is_well_formed(&self) -> bool {
        self.b < self.e || (self.b == self.e && self.b_closed && self.e_closed)
    }

    pub fn contains(&self, t: Tick) -> bool {
        (self.b < t && t < self.e) || (t == self.b && self.b_closed) || (t == self.e && self.e_closed)
    }

    /// Membership for a point given in doubled coordinates (`2t`, or `t1 + t2`
    /// for the midpoint of two ticks).
    pub fn contains_doubled(&self, x: i128) -> bool {
        let b = 2 * self.b as i128;
        let e = 2 * self.e as i128;
        (b < x && x < e) || (x == b && self.b_closed) || (x == e && self.e_closed)
    }

    /// Length `e - b`; openness is ignored.
    pub fn duration(&self) -> Tick {
        self.e - self.b
    }

    /// Sort key: by start (closed before open), then by end (open before closed).
    pub fn sort_key(&self) -> (Tick, bool, Tick, bool) {
        (self.b, !self.b_closed, self.e, self.e_closed)
    }
}

impl fmt::Display for BoundedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.b_closed { '[' } else { ']' };
        let r = if self.e_closed { ']' } else { '[' };
        write!(f, "{}{} {}{}", l, self.b, self.e, r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeSegment {
    pub interval: Interval,
    pub node: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkSegment {
    pub interval: Interval,
    pub pair: Pair,
}

impl LinkSegment {
    pub fn u(&self) -> NodeId {
        self.pair.u()
    }

    pub fn v(&self) -> NodeId {
        self.pair.v()
    }
}

/// Static snapshot of the nodes and links present at an instant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StaticGraph {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<Pair>,
}

/// A normalized stream graph: maximal segments sorted by start time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamGraph {
    horizon: Interval,
    labels: Vec<String>,
    node_segments: Vec<NodeSegment>,
    link_segments: Vec<LinkSegment>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct StreamStats {
    /// Nodes present at least once.
    pub n: usize,
    /// Distinct pairs linked at least once.
    pub m: usize,
    /// Node segment count.
    #[serde(rename = "N")]
    pub node_segments: usize,
    /// Link segment count.
    #[serde(rename = "M")]
    pub link_segments: usize,
    pub event_time_count: usize,
}

/// Builds a stream whose node labels are the decimal ids `0..node_count`.
pub fn build_stream(
    node_segments: Vec<NodeSegment>,
    link_segments: Vec<LinkSegment>,
    horizon: Option<Interval>,
) -> Result<StreamGraph, StreamError> {
    let max_id = node_segments.iter().map(|s| s.node.0).chain(link_segments.iter().map(|s| s.pair.v().0)).max();
    let count = max_id.map_or(0, |m| m as usize + 1);
    let labels = (0..count).map(|i| i.to_string()).collect();
    build_stream_labeled(labels, node_segments, link_segments, horizon)
}

/// Normalizes raw segments into a [`StreamGraph`].
///
/// Same-key segments that overlap or touch are merged into maximal segments,
/// and every link segment must lie within one node segment of each endpoint.
/// When `horizon` is `None` it is the span of all segments (`[0,0]` if empty).
pub fn build_stream_labeled(
    labels: Vec<String>,
    node_segments: Vec<NodeSegment>,
    link_segments: Vec<LinkSegment>,
    horizon: Option<Interval>,
) -> Result<StreamGraph, StreamError> {
    let count = labels.len();
    for s in &node_segments {
        Interval::new(s.interval.b, s.interval.e)?;
        if s.node.index() >= count {
            return Err(StreamError::UnknownNode { node: s.node, count });
        }
    }
    for s in &link_segments {
        Interval::new(s.interval.b, s.interval.e)?;
        if s.pair.u() == s.pair.v() {
            return Err(StreamError::SelfLoop { u: s.pair.u(), v: s.pair.v() });
        }
        if s.pair.v().index() >= count {
            return Err(StreamError::UnknownNode { node: s.pair.v(), count });
        }
    }

    let node_segments = merge_segments(node_segments, |s| s.node, |interval, node| NodeSegment { interval, node });
    let link_segments = merge_segments(link_segments, |s| s.pair, |interval, pair| LinkSegment { interval, pair });

    let horizon = match horizon {
        Some(h) => {
            let h = Interval::new(h.b, h.e)?;
            let all = node_segments.iter().map(|s| s.interval).chain(link_segments.iter().map(|s| s.interval));
            for i in all {
                if !h.covers(&i) {
                    return Err(StreamError::SegmentOutsideHorizon { b: i.b, e: i.e, alpha: h.b, omega: h.e });
                }
            }
            h
        }
        None => {
            let b = node_segments.iter().map(|s| s.interval.b).min();
            let e = node_segments.iter().map(|s| s.interval.e).max();
            match (b, e) {
                (Some(b), Some(e)) => Interval { b, e },
                _ => Interval { b: 0, e: 0 },
            }
        }
    };

    let stream = StreamGraph { horizon, labels, node_segments, link_segments };
    stream.check_link_containment()?;
    Ok(stream)
}

/// Sorts by key then start, merges overlapping or touching intervals, and
/// returns the result sorted by `(b, e, key)`.
fn merge_segments<S, K: Ord + Copy>(mut segs: Vec<S>, key: impl Fn(&S) -> K, make: impl Fn(Interval, K) -> S) -> Vec<S>
where
    S: Copy,
    Interval: From<S>,
{
    segs.sort_by_key(|s| (key(s), Interval::from(*s)));
    let mut out: Vec<(Interval, K)> = Vec::with_capacity(segs.len());
    for s in segs {
        let k = key(&s);
        let iv = Interval::from(s);
        match out.last_mut() {
            Some((last, lk)) if *lk == k && iv.b <= last.e => last.e = last.e.max(iv.e),
            _ => out.push((iv, k)),
        }
    }
    out.sort_by_key(|(iv, k)| (iv.b, iv.e, *k));
    out.into_iter().map(|(iv, k)| make(iv, k)).collect()
}

impl From<NodeSegment> for Interval {
    fn from(s: NodeSegment) -> Interval {
        s.interval
    }
}

impl From<LinkSegment> for Interval {
    fn from(s: LinkSegment) -> Interval {
        s.interval
    }
}

impl StreamGraph {
    pub fn horizon(&self) -> Interval {
        self.horizon
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node.index()]
    }

    /// Size of the node table (`|V|`), including nodes that are never present.
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn node_segments(&self) -> &[NodeSegment] {
        &self.node_segments
    }

    pub fn link_segments(&self) -> &[LinkSegment] {
        &self.link_segments
    }

    pub fn is_empty(&self) -> bool {
        self.node_segments.is_empty()
    }

    /// Node presence intervals grouped by node, each list sorted by start.
    pub fn presence_by_node(&self) -> Vec<Vec<Interval>> {
        let mut by_node = vec![Vec::new(); self.node_count()];
        for s in &self.node_segments {
            by_node[s.node.index()].push(s.interval);
        }
        by_node
    }

    /// Link presence intervals grouped by pair, each list sorted by start.
    pub fn presence_by_pair(&self) -> HashMap<Pair, Vec<Interval>> {
        let mut by_pair: HashMap<Pair, Vec<Interval>> = HashMap::new();
        for s in &self.link_segments {
            by_pair.entry(s.pair).or_default().push(s.interval);
        }
        by_pair
    }

    fn check_link_containment(&self) -> Result<(), StreamError> {
        let presence = self.presence_by_node();
        for s in &self.link_segments {
            for x in [s.u(), s.v()] {
                if !covered_by(&presence[x.index()], &s.interval) {
                    return Err(StreamError::LinkOutsideNodePresence {
                        u: s.u(),
                        v: s.v(),
                        b: s.interval.b,
                        e: s.interval.e,
                    });
                }
            }
        }
        Ok(())
    }

    /// Distinct event times in increasing order.
    pub fn event_times(&self) -> Vec<Tick> {
        let mut times: Vec<Tick> = self
            .node_segments
            .iter()
            .flat_map(|s| [s.interval.b, s.interval.e])
            .chain(self.link_segments.iter().flat_map(|s| [s.interval.b, s.interval.e]))
            .collect();
        times.sort_unstable();
        times.dedup();
        times
    }

    /// The graph `G_t` of nodes and links present at instant `t`.
    pub fn graph_at(&self, t: Tick) -> Result<StaticGraph, StreamError> {
        if !self.horizon.contains(t) {
            return Err(StreamError::TimeOutsideHorizon { t, alpha: self.horizon.b, omega: self.horizon.e });
        }
        Ok(self.graph_where(|iv| iv.contains(t)))
    }

    /// The graph `G_t^-` of nodes and links present throughout `[t', t]`,
    /// `t'` being the event time preceding `t`.
    pub fn graph_just_before(&self, t: Tick) -> Result<StaticGraph, StreamError> {
        let times = self.event_times();
        let idx = times.binary_search(&t).map_err(|_| StreamError::NotAnEventTime { t })?;
        if idx == 0 {
            return Err(StreamError::NoPredecessorEventTime { t });
        }
        let span = Interval { b: times[idx - 1], e: t };
        Ok(self.graph_where(|iv| iv.covers(&span)))
    }

    fn graph_where(&self, present: impl Fn(&Interval) -> bool) -> StaticGraph {
        let nodes: BTreeSet<NodeId> =
            self.node_segments.iter().filter(|s| present(&s.interval)).map(|s| s.node).collect();
        let edges: BTreeSet<Pair> =
            self.link_segments.iter().filter(|s| present(&s.interval)).map(|s| s.pair).collect();
        StaticGraph { nodes: nodes.into_iter().collect(), edges: edges.into_iter().collect() }
    }

    pub fn stats(&self) -> StreamStats {
        let n = self.node_segments.iter().map(|s| s.node).collect::<BTreeSet<_>>().len();
        let m = self.link_segments.iter().map(|s| s.pair).collect::<BTreeSet<_>>().len();
        StreamStats {
            n,
            m,
            node_segments: self.node_segments.len(),
            link_segments: self.link_segments.len(),
            event_time_count: self.event_times().len(),
        }
    }

    /// Re-labels the node table; the label count must not change.
    pub fn with_labels(mut self, labels: Vec<String>) -> StreamGraph {
        assert_eq!(labels.len(), self.labels.len(), "label table size must be preserved");
        self.labels = labels;
        self
    }
}

/// Whether one of the sorted disjoint `intervals` covers `iv`.
pub(crate) fn covered_by(intervals: &[Interval], iv: &Interval) -> bool {
    let idx = intervals.partition_point(|x| x.b <= iv.b);
    idx > 0 && intervals[idx - 1].covers(iv)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    NodeArrival,
    LinkArrival,
    LinkDeparture,
    NodeDeparture,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subject {
    Node(NodeId),
    Link(Pair),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub time: Tick,
    pub kind: EventKind,
    pub subject: Subject,
    /// The other endpoint of the segment that produced this event.
    pub segment_end: Tick,
}

/// Events sorted by time, then `NodeArrival < LinkArrival < LinkDeparture <
/// NodeDeparture`, then segment order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventSequence {
    events: Vec<Event>,
}

impl EventSequence {
    pub fn new(stream: &StreamGraph) -> EventSequence {
        let mut events = Vec::with_capacity(2 * (stream.node_segments.len() + stream.link_segments.len()));
        for s in &stream.node_segments {
            let Interval { b, e } = s.interval;
            events.push(Event {
                time: b,
                kind: EventKind::NodeArrival,
                subject: Subject::Node(s.node),
                segment_end: e,
            });
            events.push(Event {
                time: e,
                kind: EventKind::NodeDeparture,
                subject: Subject::Node(s.node),
                segment_end: b,
            });
        }
        for s in &stream.link_segments {
            let Interval { b, e } = s.interval;
            events.push(Event {
                time: b,
                kind: EventKind::LinkArrival,
                subject: Subject::Link(s.pair),
                segment_end: e,
            });
            events.push(Event {
                time: e,
                kind: EventKind::LinkDeparture,
                subject: Subject::Link(s.pair),
                segment_end: b,
            });
        }
        // stable: ties keep segment order
        events.sort_by_key(|ev| (ev.time, ev.kind));
        EventSequence { events }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn distinct_times(&self) -> usize {
        self.groups().count()
    }

    /// Iterates over `(t, events at t)` in time order.
    pub fn groups(&self) -> impl Iterator<Item = (Tick, &[Event])> + '_ {
        self.events.chunk_by(|a, b| a.time == b.time).map(|g| (g[0].time, g))
    }
}

/// The time-ordered event sequence of a stream.
pub fn event_sequence(stream: &StreamGraph) -> EventSequence {
    EventSequence::new(stream)
}
