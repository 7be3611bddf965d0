use super::{Begin, ComponentSink, RunSummary, Tally};
use crate::dynconn::DynConn;
use crate::stream::{EventKind, EventSequence, StreamGraph, Subject};

/// Event sweep backed by a fully dynamic connectivity structure.
///
/// The begin bound of a component is the largest key of its nodes: every
/// time a component starts, one of its nodes is keyed with the start, which
/// is never smaller than any key already present.
pub fn scc_fd(stream: &StreamGraph, sink: &mut dyn ComponentSink) -> RunSummary {
    let seq = EventSequence::new(stream);
    let mut tally = Tally::new(sink);
    let mut dc = DynConn::with_capacity(stream.node_count());
    let mut buf = Vec::new();

    // stream normalization rules out every error DynConn can report
    let ok = "normalized stream violates a connectivity precondition";
    for ev in seq.events() {
        let t = ev.time;
        match (ev.kind, ev.subject) {
            (EventKind::NodeArrival, Subject::Node(u)) => {
                dc.insert_node(u).expect(ok);
                dc.set_key(u, Begin::at(t).encode()).expect(ok);
            }
            (EventKind::LinkArrival, Subject::Link(p)) => {
                let (u, v) = (p.u(), p.v());
                if dc.connected(u, v).expect(ok) {
                    dc.insert_edge(u, v).expect(ok);
                    continue;
                }
                for x in [u, v] {
                    let begin = Begin::decode(dc.component_max_key(x).expect(ok));
                    if let Some(iv) = begin.until_before(t) {
                        let nodes = dc.component_nodes(x).expect(ok);
                        tally.emit(iv, &nodes);
                    }
                }
                dc.insert_edge(u, v).expect(ok);
                dc.set_key(u, Begin::at(t).encode()).expect(ok);
            }
            (EventKind::LinkDeparture, Subject::Link(p)) => {
                let (u, v) = (p.u(), p.v());
                let out = dc.delete_edge(u, v).expect(ok);
                if !out.split {
                    continue;
                }
                let key = dc.component_max_key(u).expect(ok).max(dc.component_max_key(v).expect(ok));
                if let Some(iv) = Begin::decode(key).until(t) {
                    buf.clear();
                    buf.extend_from_slice(&out.side_a);
                    buf.extend_from_slice(&out.side_b);
                    tally.emit(iv, &buf);
                }
                dc.set_key(u, Begin::after(t).encode()).expect(ok);
                dc.set_key(v, Begin::after(t).encode()).expect(ok);
            }
            (EventKind::NodeDeparture, Subject::Node(u)) => {
                let begin = Begin::decode(dc.component_max_key(u).expect(ok));
                if let Some(iv) = begin.until(t) {
                    tally.emit(iv, &[u]);
                }
                dc.remove_node(u).expect(ok);
            }
            _ => unreachable!("event kind and subject disagree"),
        }
    }
    tally.finish()
}
