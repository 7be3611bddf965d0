//! Text dataset parsing, δ-analysis and Δ-approximation.
//!
//! Two plain-text formats are read, one record per line, whitespace separated,
//! `#` lines and blank lines ignored:
//!
//! * interactions: `u v t`, an instantaneous contact between `u` and `v`;
//! * segments: `n u b e` for a node segment and `l u v b e` for a link segment.
//!
//! Node labels are arbitrary tokens, mapped to dense ids in order of first
//! appearance.

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

use crate::stream::{
    build_stream_labeled, Interval, LinkSegment, NodeId, NodeSegment, Pair, StreamError, StreamGraph, Tick,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: self loop on node {label}")]
    SelfLoop { line: usize, label: String },
    #[error("δ must be non-negative, got {0}")]
    NegativeDelta(Tick),
    #[error("Δ must be positive, got {0}")]
    NonPositiveDelta(Tick),
    #[error("time scale must be positive, got {0}")]
    NonPositiveScale(i64),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

/// δ: duration given to each instantaneous interaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaConfig {
    pub delta: Tick,
}

/// Δ: rounding step of the approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApproxConfig {
    pub delta: Tick,
}

/// Number of ticks per input time unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeScale(i64);

impl TimeScale {
    pub const UNIT: TimeScale = TimeScale(1);

    pub fn new(ticks_per_unit: i64) -> Result<TimeScale, IngestError> {
        if ticks_per_unit <= 0 {
            return Err(IngestError::NonPositiveScale(ticks_per_unit));
        }
        Ok(TimeScale(ticks_per_unit))
    }

    pub fn ticks_per_unit(self) -> i64 {
        self.0
    }

    /// Converts a decimal token such as `12`, `-3` or `0.25` to ticks,
    /// rounding half away from zero. Exact decimal arithmetic, no floats.
    pub fn parse(self, token: &str) -> Result<Tick, String> {
        let bad = || format!("invalid time value {token:?}");
        let (neg, body) = match token.as_bytes().first() {
            Some(b'-') => (true, &token[1..]),
            Some(b'+') => (false, &token[1..]),
            _ => (false, token),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) || frac_part.len() > 30 {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mantissa: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
        let denom = 10i128.pow(frac_part.len() as u32);
        let num = mantissa.checked_mul(self.0 as i128).ok_or_else(bad)?;
        let mut q = num / denom;
        if 2 * (num % denom) >= denom {
            q += 1;
        }
        let q = if neg { -q } else { q };
        Tick::try_from(q).map_err(|_| format!("time value {token:?} overflows"))
    }
}

impl Default for TimeScale {
    fn default() -> Self {
        TimeScale::UNIT
    }
}

#[derive(Default)]
struct Labels {
    ids: HashMap<String, NodeId>,
    names: Vec<String>,
}

impl Labels {
    fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = NodeId(self.names.len() as u32);
        self.ids.insert(label.to_owned(), id);
        self.names.push(label.to_owned());
        id
    }
}

fn records(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String), IngestError>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(IngestError::Io(e))),
        Ok(l) => {
            let trimmed = l.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, trimmed.to_owned())))
            }
        }
    })
}

fn malformed(line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::MalformedLine { line, reason: reason.into() }
}

/// Merges intervals that overlap or touch; input order is irrelevant.
fn union_intervals(mut ivs: Vec<Interval>) -> Vec<Interval> {
    ivs.sort_unstable();
    let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
    for iv in ivs {
        match out.last_mut() {
            Some(last) if iv.b <= last.e => last.e = last.e.max(iv.e),
            _ => out.push(iv),
        }
    }
    out
}

/// Builds a stream from instantaneous interactions `u v t`: each contact
/// covers `[t, t + δ]`, overlapping or touching contacts of one pair merge,
/// and a node is present exactly when it has at least one link.
pub fn parse_interactions(
    reader: impl BufRead,
    config: DeltaConfig,
    scale: TimeScale,
) -> Result<StreamGraph, IngestError> {
    if config.delta < 0 {
        return Err(IngestError::NegativeDelta(config.delta));
    }
    let mut labels = Labels::default();
    let mut contacts: HashMap<Pair, Vec<Interval>> = HashMap::new();
    for rec in records(reader) {
        let (line, text) = rec?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(malformed(line, format!("expected `u v t`, found {} fields", fields.len())));
        }
        let t = scale.parse(fields[2]).map_err(|r| malformed(line, r))?;
        let end = t.checked_add(config.delta).ok_or_else(|| malformed(line, "time overflows with δ"))?;
        let (u, v) = (labels.intern(fields[0]), labels.intern(fields[1]));
        let pair = Pair::new(u, v).ok_or_else(|| IngestError::SelfLoop { line, label: fields[0].to_owned() })?;
        contacts.entry(pair).or_default().push(Interval { b: t, e: end });
    }

    let mut node_presence: Vec<Vec<Interval>> = vec![Vec::new(); labels.names.len()];
    let mut link_segments = Vec::new();
    for (pair, ivs) in contacts {
        for iv in union_intervals(ivs) {
            node_presence[pair.u().index()].push(iv);
            node_presence[pair.v().index()].push(iv);
            link_segments.push(LinkSegment { interval: iv, pair });
        }
    }
    let node_segments = node_presence
        .into_iter()
        .enumerate()
        .flat_map(|(u, ivs)| {
            union_intervals(ivs).into_iter().map(move |interval| NodeSegment { interval, node: NodeId(u as u32) })
        })
        .collect();
    Ok(build_stream_labeled(labels.names, node_segments, link_segments, None)?)
}

/// Builds a stream from explicit segments. A node without any `n` line is
/// present exactly during the union of its link segments.
pub fn parse_segments(reader: impl BufRead, scale: TimeScale) -> Result<StreamGraph, IngestError> {
    let mut labels = Labels::default();
    let mut node_segments = Vec::new();
    let mut link_segments = Vec::new();
    let mut explicit: Vec<bool> = Vec::new();
    let mut implied: Vec<Vec<Interval>> = Vec::new();
    let grow = |labels: &Labels, explicit: &mut Vec<bool>, implied: &mut Vec<Vec<Interval>>| {
        explicit.resize(labels.names.len(), false);
        implied.resize(labels.names.len(), Vec::new());
    };

    for rec in records(reader) {
        let (line, text) = rec?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        let time = |tok: &str| scale.parse(tok).map_err(|r| malformed(line, r));
        let interval = |b: &str, e: &str| -> Result<Interval, IngestError> {
            let (b, e) = (time(b)?, time(e)?);
            Interval::new(b, e).map_err(|_| malformed(line, format!("segment start {b} after end {e}")))
        };
        match fields.as_slice() {
            ["n", u, b, e] => {
                let iv = interval(b, e)?;
                let u = labels.intern(u);
                grow(&labels, &mut explicit, &mut implied);
                explicit[u.index()] = true;
                node_segments.push(NodeSegment { interval: iv, node: u });
            }
            ["l", u, v, b, e] => {
                let iv = interval(b, e)?;
                let (uid, vid) = (labels.intern(u), labels.intern(v));
                grow(&labels, &mut explicit, &mut implied);
                let pair = Pair::new(uid, vid).ok_or_else(|| IngestError::SelfLoop { line, label: u.to_string() })?;
                implied[uid.index()].push(iv);
                implied[vid.index()].push(iv);
                link_segments.push(LinkSegment { interval: iv, pair });
            }
            _ => return Err(malformed(line, "expected `n u b e` or `l u v b e`")),
        }
    }

    for (u, ivs) in implied.into_iter().enumerate() {
        if !explicit[u] {
            node_segments.extend(ivs.into_iter().map(|interval| NodeSegment { interval, node: NodeId(u as u32) }));
        }
    }
    Ok(build_stream_labeled(labels.names, node_segments, link_segments, None)?)
}

/// `Δ·⌊t/Δ⌋`
pub fn floor_to(t: Tick, step: Tick) -> Tick {
    t.div_euclid(step) * step
}

/// `Δ·⌈t/Δ⌉`
pub fn ceil_to(t: Tick, step: Tick) -> Tick {
    -((-t).div_euclid(step) * step)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximation {
    pub stream: StreamGraph,
    /// Node segments shorter than a rounding step that vanished.
    pub dropped_node_segments: usize,
    pub dropped_link_segments: usize,
}

/// Shrinks every segment `[b, e]` to `[⌈b⌉_Δ, ⌊e⌋_Δ]`. Segments left empty
/// are dropped and counted. The horizon is kept.
pub fn approximate(stream: &StreamGraph, config: ApproxConfig) -> Result<Approximation, IngestError> {
    let step = config.delta;
    if step <= 0 {
        return Err(IngestError::NonPositiveDelta(step));
    }
    let round = |iv: Interval| {
        let (b, e) = (ceil_to(iv.b, step), floor_to(iv.e, step));
        (b <= e).then_some(Interval { b, e })
    };
    let mut dropped_node_segments = 0;
    let mut dropped_link_segments = 0;
    let node_segments = stream
        .node_segments()
        .iter()
        .filter_map(|s| {
            let r = round(s.interval).map(|interval| NodeSegment { interval, node: s.node });
            dropped_node_segments += usize::from(r.is_none());
            r
        })
        .collect();
    let link_segments = stream
        .link_segments()
        .iter()
        .filter_map(|s| {
            let r = round(s.interval).map(|interval| LinkSegment { interval, pair: s.pair });
            dropped_link_segments += usize::from(r.is_none());
            r
        })
        .collect();
    let stream = build_stream_labeled(stream.labels().to_vec(), node_segments, link_segments, Some(stream.horizon()))?;
    Ok(Approximation { stream, dropped_node_segments, dropped_link_segments })
}
