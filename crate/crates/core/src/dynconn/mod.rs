//! Fully dynamic connectivity over an undirected graph.
//!
//! Holm, de Lichtenberg and Thorup's level structure: every edge has a level,
//! forest `F_i` spans the edges of level `>= i`, and a deleted tree edge is
//! replaced by searching the smaller side level by level, promoting the edges
//! it inspects. Each forest is an Euler tour forest over splay trees.
//!
//! Every vertex additionally carries an integer key, and the maximum key of a
//! component can be read in amortized logarithmic time. Callers use it to
//! attach per-component metadata that survives merges and splits.

mod ett;

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::stream::NodeId;
use ett::{EulerForest, Flag, NIL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynConnError {
    #[error("node {0} is not present")]
    UnknownNode(NodeId),
    #[error("node {0} is already present")]
    DuplicateNode(NodeId),
    #[error("node {0} still has incident edges")]
    RemoveNonIsolated(NodeId),
    #[error("edge {0}-{1} is already present")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge {0}-{1} is not present")]
    UnknownEdge(NodeId, NodeId),
    #[error("self loop on node {0}")]
    SelfLoop(NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeOutcome {
    pub merged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitOutcome {
    pub split: bool,
    /// Component of the first endpoint after the split (empty if no split).
    pub side_a: Vec<NodeId>,
    /// Component of the second endpoint after the split (empty if no split).
    pub side_b: Vec<NodeId>,
}

#[derive(Clone, Debug)]
struct EdgeRec {
    level: usize,
    /// Arc pairs in `F_0..=F_level` for a tree edge; empty for a non-tree edge.
    arcs: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, Default)]
struct Vertex {
    present: bool,
    degree: u32,
    /// Occurrence node per level, `NIL` where not yet materialized.
    occ: Vec<u32>,
    /// Non-tree neighbours per level.
    nontree: Vec<HashSet<u32>>,
}

/// Dynamic connectivity structure over dense node ids.
#[derive(Clone, Debug, Default)]
pub struct DynConn {
    forest: EulerForest,
    vertices: Vec<Vertex>,
    edges: HashMap<(u32, u32), EdgeRec>,
    present: usize,
    tree_edges: usize,
}

fn key(u: u32, v: u32) -> (u32, u32) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl DynConn {
    pub fn new() -> DynConn {
        DynConn::default()
    }

    pub fn with_capacity(nodes: usize) -> DynConn {
        let mut d = DynConn::default();
        d.vertices.resize_with(nodes, Vertex::default);
        d
    }

    pub fn contains_node(&self, u: NodeId) -> bool {
        self.vertices.get(u.index()).is_some_and(|x| x.present)
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains_key(&key(u.0, v.0))
    }

    pub fn node_count(&self) -> usize {
        self.present
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of connected components among present nodes.
    pub fn component_count(&self) -> usize {
        self.present - self.tree_edges
    }

    fn check(&self, u: NodeId) -> Result<(), DynConnError> {
        if self.contains_node(u) {
            Ok(())
        } else {
            Err(DynConnError::UnknownNode(u))
        }
    }

    fn occ(&mut self, v: u32, level: usize) -> u32 {
        let vx = &mut self.vertices[v as usize];
        if vx.occ.len() <= level {
            vx.occ.resize(level + 1, NIL);
        }
        if vx.occ[level] == NIL {
            let x = self.forest.make_vertex(v);
            self.vertices[v as usize].occ[level] = x;
        }
        self.vertices[v as usize].occ[level]
    }

    fn nontree_mut(&mut self, v: u32, level: usize) -> &mut HashSet<u32> {
        let vx = &mut self.vertices[v as usize];
        if vx.nontree.len() <= level {
            vx.nontree.resize_with(level + 1, HashSet::new);
        }
        &mut vx.nontree[level]
    }

    fn refresh_nontree_flag(&mut self, v: u32, level: usize) {
        let on = self.vertices[v as usize].nontree.get(level).is_some_and(|s| !s.is_empty());
        let x = self.occ(v, level);
        self.forest.set_flag(x, Flag::NonTree, on);
    }

    fn add_nontree(&mut self, u: u32, v: u32, level: usize) {
        self.nontree_mut(u, level).insert(v);
        self.nontree_mut(v, level).insert(u);
        self.refresh_nontree_flag(u, level);
        self.refresh_nontree_flag(v, level);
    }

    fn remove_nontree(&mut self, u: u32, v: u32, level: usize) {
        self.nontree_mut(u, level).remove(&v);
        self.nontree_mut(v, level).remove(&u);
        self.refresh_nontree_flag(u, level);
        self.refresh_nontree_flag(v, level);
    }

    /// Adds `(u, v)` as a tree edge of level `level` to `F_0..=F_level`.
    fn link_tree_edge(&mut self, u: u32, v: u32, level: usize) -> Vec<(u32, u32)> {
        let mut arcs = Vec::with_capacity(level + 1);
        for i in 0..=level {
            let (xu, xv) = (self.occ(u, i), self.occ(v, i));
            let pair = self.forest.link(xu, xv);
            if i == level {
                self.forest.set_flag(pair.0, Flag::Tree, true);
            }
            arcs.push(pair);
        }
        arcs
    }

    pub fn insert_node(&mut self, u: NodeId) -> Result<(), DynConnError> {
        if self.contains_node(u) {
            return Err(DynConnError::DuplicateNode(u));
        }
        if self.vertices.len() <= u.index() {
            self.vertices.resize_with(u.index() + 1, Vertex::default);
        }
        self.vertices[u.index()].present = true;
        self.present += 1;
        self.occ(u.0, 0);
        Ok(())
    }

    pub fn remove_node(&mut self, u: NodeId) -> Result<(), DynConnError> {
        self.check(u)?;
        let vx = &mut self.vertices[u.index()];
        if vx.degree > 0 {
            return Err(DynConnError::RemoveNonIsolated(u));
        }
        vx.present = false;
        vx.nontree.clear();
        let occ = std::mem::take(&mut vx.occ);
        for x in occ.into_iter().filter(|&x| x != NIL) {
            self.forest.set_key(x, i128::MIN);
            self.forest.set_flag(x, Flag::NonTree, false);
            self.forest.release(x);
        }
        self.present -= 1;
        Ok(())
    }

    pub fn connected(&mut self, u: NodeId, v: NodeId) -> Result<bool, DynConnError> {
        self.check(u)?;
        self.check(v)?;
        let (xu, xv) = (self.occ(u.0, 0), self.occ(v.0, 0));
        Ok(self.forest.same_tree(xu, xv))
    }

    /// Nodes of the component containing `u`, in no particular order.
    /// Costs O(component size).
    pub fn component_nodes(&mut self, u: NodeId) -> Result<Vec<NodeId>, DynConnError> {
        self.check(u)?;
        let x = self.occ(u.0, 0);
        let mut ids = Vec::new();
        self.forest.tree_vertex_ids(x, &mut ids);
        Ok(ids.into_iter().map(NodeId).collect())
    }

    pub fn component_size(&mut self, u: NodeId) -> Result<usize, DynConnError> {
        self.check(u)?;
        let x = self.occ(u.0, 0);
        Ok(self.forest.tree_vertices(x) as usize)
    }

    /// Sets the key of node `u`; keys start at `i128::MIN`.
    pub fn set_key(&mut self, u: NodeId, k: i128) -> Result<(), DynConnError> {
        self.check(u)?;
        let x = self.occ(u.0, 0);
        self.forest.set_key(x, k);
        Ok(())
    }

    /// Largest key over the component containing `u`.
    pub fn component_max_key(&mut self, u: NodeId) -> Result<i128, DynConnError> {
        self.check(u)?;
        let x = self.occ(u.0, 0);
        Ok(self.forest.tree_max_key(x))
    }

    pub fn insert_edge(&mut self, u: NodeId, v: NodeId) -> Result<MergeOutcome, DynConnError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(DynConnError::SelfLoop(u));
        }
        let k = key(u.0, v.0);
        if self.edges.contains_key(&k) {
            return Err(DynConnError::DuplicateEdge(u, v));
        }
        let merged = !self.connected(u, v)?;
        let rec = if merged {
            self.tree_edges += 1;
            EdgeRec { level: 0, arcs: self.link_tree_edge(u.0, v.0, 0) }
        } else {
            self.add_nontree(u.0, v.0, 0);
            EdgeRec { level: 0, arcs: Vec::new() }
        };
        self.edges.insert(k, rec);
        self.vertices[u.index()].degree += 1;
        self.vertices[v.index()].degree += 1;
        Ok(MergeOutcome { merged })
    }

    pub fn delete_edge(&mut self, u: NodeId, v: NodeId) -> Result<SplitOutcome, DynConnError> {
        let k = key(u.0, v.0);
        let rec = self.edges.remove(&k).ok_or(DynConnError::UnknownEdge(u, v))?;
        self.vertices[u.index()].degree -= 1;
        self.vertices[v.index()].degree -= 1;
        let no_split = SplitOutcome { split: false, side_a: Vec::new(), side_b: Vec::new() };

        if rec.arcs.is_empty() {
            self.remove_nontree(u.0, v.0, rec.level);
            return Ok(no_split);
        }

        for (a1, a2) in rec.arcs {
            self.forest.cut(a1, a2);
        }
        self.tree_edges -= 1;
        for level in (0..=rec.level).rev() {
            if let Some((x, y)) = self.find_replacement(u.0, v.0, level) {
                let arcs = self.link_tree_edge(x, y, level);
                self.tree_edges += 1;
                self.edges.insert(key(x, y), EdgeRec { level, arcs });
                return Ok(no_split);
            }
        }
        Ok(SplitOutcome { split: true, side_a: self.component_nodes(u)?, side_b: self.component_nodes(v)? })
    }

    /// Searches the smaller of the two level-`level` trees of `u` and `v` for
    /// a non-tree edge reconnecting them, promoting inspected edges.
    fn find_replacement(&mut self, u: u32, v: u32, level: usize) -> Option<(u32, u32)> {
        let (xu, xv) = (self.occ(u, level), self.occ(v, level));
        let small = if self.forest.tree_vertices(xu) <= self.forest.tree_vertices(xv) { xu } else { xv };

        // level-`level` tree edges of the small side move up one level
        while let Some(arc) = self.forest.find_flagged(small, Flag::Tree) {
            self.forest.set_flag(arc, Flag::Tree, false);
            let (a, b) = self.forest.endpoints(arc);
            let (oa, ob) = (self.occ(a, level + 1), self.occ(b, level + 1));
            let pair = self.forest.link(oa, ob);
            self.forest.set_flag(pair.0, Flag::Tree, true);
            let rec = self.edges.get_mut(&key(a, b)).expect("tree arc without edge record");
            rec.level = level + 1;
            rec.arcs.push(pair);
        }

        while let Some(occ) = self.forest.find_flagged(small, Flag::NonTree) {
            let (w, _) = self.forest.endpoints(occ);
            let neighbours: Vec<u32> = std::mem::take(self.nontree_mut(w, level)).into_iter().collect();
            for (i, &y) in neighbours.iter().enumerate() {
                let oy = self.occ(y, level);
                let ow = self.occ(w, level);
                self.nontree_mut(y, level).remove(&w);
                if !self.forest.same_tree(ow, oy) {
                    // replacement found; restore the unvisited rest
                    self.nontree_mut(w, level).extend(neighbours[i + 1..].iter().copied());
                    self.refresh_nontree_flag(w, level);
                    self.refresh_nontree_flag(y, level);
                    return Some((w, y));
                }
                self.refresh_nontree_flag(y, level);
                self.add_nontree(w, y, level + 1);
                self.edges.get_mut(&key(w, y)).expect("non-tree edge without record").level = level + 1;
            }
            self.refresh_nontree_flag(w, level);
        }
        None
    }
}
