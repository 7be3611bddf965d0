use super::{Begin, ComponentSink, RunSummary, Tally};
use crate::stream::{EventKind, EventSequence, NodeId, StreamGraph, Subject, Tick};

/// Event-by-event sweep. Link arrivals merge components; a link departure
/// runs a two-sided search for another path and splits when none exists.
pub fn scc_direct(stream: &StreamGraph, sink: &mut dyn ComponentSink) -> RunSummary {
    let seq = EventSequence::new(stream);
    let mut tally = Tally::new(sink);
    let mut st = State::new(stream.node_count());

    for ev in seq.events() {
        let t = ev.time;
        match (ev.kind, ev.subject) {
            (EventKind::NodeArrival, Subject::Node(u)) => st.open_singleton(u, t),
            (EventKind::LinkArrival, Subject::Link(p)) => st.link_arrival(p.u(), p.v(), t, &mut tally),
            (EventKind::LinkDeparture, Subject::Link(p)) => st.link_departure(p.u(), p.v(), t, &mut tally),
            (EventKind::NodeDeparture, Subject::Node(u)) => st.node_departure(u, t, &mut tally),
            _ => unreachable!("event kind and subject disagree"),
        }
    }
    tally.finish()
}

struct Slot {
    begin: Begin,
    nodes: Vec<NodeId>,
}

const NONE: u32 = u32::MAX;

struct State {
    slots: Vec<Slot>,
    free: Vec<u32>,
    slot_of: Vec<u32>,
    /// Position of each node inside its slot's node list.
    pos: Vec<u32>,
    adj: Vec<Vec<NodeId>>,
    search: Search,
}

impl State {
    fn new(n: usize) -> State {
        State {
            slots: Vec::new(),
            free: Vec::new(),
            slot_of: vec![NONE; n],
            pos: vec![0; n],
            adj: vec![Vec::new(); n],
            search: Search::new(n),
        }
    }

    fn new_slot(&mut self, begin: Begin) -> u32 {
        match self.free.pop() {
            Some(s) => {
                self.slots[s as usize].begin = begin;
                s
            }
            None => {
                self.slots.push(Slot { begin, nodes: Vec::new() });
                (self.slots.len() - 1) as u32
            }
        }
    }

    fn put(&mut self, u: NodeId, s: u32) {
        let nodes = &mut self.slots[s as usize].nodes;
        self.pos[u.index()] = nodes.len() as u32;
        nodes.push(u);
        self.slot_of[u.index()] = s;
    }

    fn take(&mut self, u: NodeId) {
        let s = self.slot_of[u.index()];
        let nodes = &mut self.slots[s as usize].nodes;
        let i = self.pos[u.index()] as usize;
        nodes.swap_remove(i);
        if let Some(&moved) = nodes.get(i) {
            self.pos[moved.index()] = i as u32;
        }
        self.slot_of[u.index()] = NONE;
    }

    fn open_singleton(&mut self, u: NodeId, t: Tick) {
        let s = self.new_slot(Begin::at(t));
        self.put(u, s);
    }

    fn link_arrival<S: ComponentSink + ?Sized>(&mut self, u: NodeId, v: NodeId, t: Tick, tally: &mut Tally<'_, S>) {
        self.adj[u.index()].push(v);
        self.adj[v.index()].push(u);
        let (su, sv) = (self.slot_of[u.index()], self.slot_of[v.index()]);
        if su == sv {
            return;
        }
        for s in [su, sv] {
            let slot = &self.slots[s as usize];
            if let Some(iv) = slot.begin.until_before(t) {
                tally.emit(iv, &slot.nodes);
            }
        }
        let (big, small) = if self.slots[su as usize].nodes.len() >= self.slots[sv as usize].nodes.len() {
            (su, sv)
        } else {
            (sv, su)
        };
        let moved = std::mem::take(&mut self.slots[small as usize].nodes);
        for &x in &moved {
            self.put(x, big);
        }
        self.slots[small as usize].nodes = moved;
        self.slots[small as usize].nodes.clear();
        self.free.push(small);
        self.slots[big as usize].begin = Begin::at(t);
    }

    fn link_departure<S: ComponentSink + ?Sized>(&mut self, u: NodeId, v: NodeId, t: Tick, tally: &mut Tally<'_, S>) {
        remove_neighbour(&mut self.adj[u.index()], v);
        remove_neighbour(&mut self.adj[v.index()], u);
        let Some(side_idx) = self.search.separated(&self.adj, u, v) else {
            return;
        };
        let side = std::mem::take(&mut self.search.visited[side_idx]);
        let old = self.slot_of[u.index()];
        debug_assert_eq!(old, self.slot_of[v.index()]);
        {
            let slot = &self.slots[old as usize];
            if let Some(iv) = slot.begin.until(t) {
                tally.emit(iv, &slot.nodes);
            }
        }
        let fresh = self.new_slot(Begin::after(t));
        for &x in &side {
            self.take(x);
            self.put(x, fresh);
        }
        self.search.visited[side_idx] = side;
        self.slots[old as usize].begin = Begin::after(t);
    }

    fn node_departure<S: ComponentSink + ?Sized>(&mut self, u: NodeId, t: Tick, tally: &mut Tally<'_, S>) {
        let s = self.slot_of[u.index()];
        debug_assert_eq!(self.slots[s as usize].nodes, vec![u], "departing node must be isolated");
        if let Some(iv) = self.slots[s as usize].begin.until(t) {
            tally.emit(iv, &[u]);
        }
        self.take(u);
        self.free.push(s);
    }
}

fn remove_neighbour(list: &mut Vec<NodeId>, x: NodeId) {
    let i = list.iter().position(|&y| y == x).expect("departure of absent link");
    list.swap_remove(i);
}

/// Two breadth-first searches from both endpoints, advanced alternately.
/// They stop when they meet or when one side runs out; in the latter case
/// that side is a whole component and the smaller one of the split.
struct Search {
    stamp: Vec<u32>,
    side: Vec<u8>,
    round: u32,
    visited: [Vec<NodeId>; 2],
}

impl Search {
    fn new(n: usize) -> Search {
        Search { stamp: vec![0; n], side: vec![0; n], round: 0, visited: [Vec::new(), Vec::new()] }
    }

    /// Returns the exhausted side, whose nodes are left in `visited[side]`.
    #[allow(clippy::needless_range_loop)]
    fn separated(&mut self, adj: &[Vec<NodeId>], u: NodeId, v: NodeId) -> Option<usize> {
        self.round = self.round.wrapping_add(1);
        if self.round == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.round = 1;
        }
        let mut heads = [0usize; 2];
        for (s, x) in [u, v].into_iter().enumerate() {
            self.visited[s].clear();
            self.visited[s].push(x);
            self.stamp[x.index()] = self.round;
            self.side[x.index()] = s as u8;
        }
        loop {
            for s in 0..2 {
                if heads[s] == self.visited[s].len() {
                    return Some(s);
                }
                let x = self.visited[s][heads[s]];
                heads[s] += 1;
                for &y in &adj[x.index()] {
                    if self.stamp[y.index()] == self.round {
                        if self.side[y.index()] != s as u8 {
                            return None;
                        }
                    } else {
                        self.stamp[y.index()] = self.round;
                        self.side[y.index()] = s as u8;
                        self.visited[s].push(y);
                    }
                }
            }
        }
    }
}
