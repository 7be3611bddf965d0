//! Euler tour forest over splay trees.
//!
//! Each tree of the represented forest is stored as its Euler tour: one
//! occurrence node per vertex plus two arc nodes per tree edge. Tours live in
//! splay trees keyed by tour position. All trees share one arena.

pub(crate) const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    left: u32,
    right: u32,
    parent: u32,
    /// Vertex id for an occurrence node, tail of the arc otherwise.
    a: u32,
    /// `NIL` for an occurrence node, head of the arc otherwise.
    b: u32,
    /// Arc marks a tree edge whose level equals this forest's level.
    tree_flag: bool,
    /// Occurrence has non-tree edges at this forest's level.
    nontree_flag: bool,
    key: i128,

    size: u32,
    verts: u32,
    any_tree: bool,
    any_nontree: bool,
    max_key: i128,
}

impl Node {
    fn new(a: u32, b: u32) -> Node {
        let verts = u32::from(b == NIL);
        Node {
            left: NIL,
            right: NIL,
            parent: NIL,
            a,
            b,
            tree_flag: false,
            nontree_flag: false,
            key: i128::MIN,
            size: 1,
            verts,
            any_tree: false,
            any_nontree: false,
            max_key: i128::MIN,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Flag {
    Tree,
    NonTree,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct EulerForest {
    nodes: Vec<Node>,
    free: Vec<u32>,
}

impl EulerForest {
    #[cfg(test)]
    pub fn new() -> EulerForest {
        EulerForest::default()
    }

    #[cfg(test)]
    pub fn live_nodes(&self) -> usize {
        self.nodes.len() - self.free.len()
    }

    fn alloc(&mut self, a: u32, b: u32) -> u32 {
        let node = Node::new(a, b);
        if let Some(i) = self.free.pop() {
            self.nodes[i as usize] = node;
            i
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    /// A singleton tour for vertex `v`.
    pub fn make_vertex(&mut self, v: u32) -> u32 {
        self.alloc(v, NIL)
    }

    /// Releases a node that is alone in its tree.
    pub fn release(&mut self, x: u32) {
        let n = &self.nodes[x as usize];
        debug_assert!(n.left == NIL && n.right == NIL && n.parent == NIL);
        self.free.push(x);
    }

    pub fn endpoints(&self, x: u32) -> (u32, u32) {
        let n = &self.nodes[x as usize];
        (n.a, n.b)
    }

    #[inline]
    fn n(&self, x: u32) -> &Node {
        &self.nodes[x as usize]
    }

    #[inline]
    fn nm(&mut self, x: u32) -> &mut Node {
        &mut self.nodes[x as usize]
    }

    fn update(&mut self, x: u32) {
        let (l, r) = (self.n(x).left, self.n(x).right);
        let me = self.n(x);
        let mut size = 1;
        let mut verts = u32::from(me.b == NIL);
        let mut any_tree = me.tree_flag;
        let mut any_nontree = me.nontree_flag;
        let mut max_key = me.key;
        for c in [l, r] {
            if c != NIL {
                let cn = self.n(c);
                size += cn.size;
                verts += cn.verts;
                any_tree |= cn.any_tree;
                any_nontree |= cn.any_nontree;
                max_key = max_key.max(cn.max_key);
            }
        }
        let me = self.nm(x);
        me.size = size;
        me.verts = verts;
        me.any_tree = any_tree;
        me.any_nontree = any_nontree;
        me.max_key = max_key;
    }

    fn rotate(&mut self, x: u32) {
        let p = self.n(x).parent;
        let g = self.n(p).parent;
        if self.n(p).left == x {
            let b = self.n(x).right;
            self.nm(p).left = b;
            if b != NIL {
                self.nm(b).parent = p;
            }
            self.nm(x).right = p;
        } else {
            let b = self.n(x).left;
            self.nm(p).right = b;
            if b != NIL {
                self.nm(b).parent = p;
            }
            self.nm(x).left = p;
        }
        self.nm(p).parent = x;
        self.nm(x).parent = g;
        if g != NIL {
            if self.n(g).left == p {
                self.nm(g).left = x;
            } else {
                self.nm(g).right = x;
            }
        }
        self.update(p);
        self.update(x);
    }

    /// Brings `x` to the root of its splay tree.
    pub fn splay(&mut self, x: u32) {
        loop {
            let p = self.n(x).parent;
            if p == NIL {
                break;
            }
            let g = self.n(p).parent;
            if g != NIL {
                let zigzig = (self.n(g).left == p) == (self.n(p).left == x);
                if zigzig {
                    self.rotate(p);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    pub fn same_tree(&mut self, x: u32, y: u32) -> bool {
        if x == y {
            return true;
        }
        self.splay(x);
        self.splay(y);
        self.n(x).parent != NIL
    }

    /// Number of vertices in the tree of `x`.
    pub fn tree_vertices(&mut self, x: u32) -> u32 {
        self.splay(x);
        self.n(x).verts
    }

    pub fn tree_max_key(&mut self, x: u32) -> i128 {
        self.splay(x);
        self.n(x).max_key
    }

    pub fn set_key(&mut self, x: u32, key: i128) {
        self.splay(x);
        self.nm(x).key = key;
        self.update(x);
    }

    pub fn set_flag(&mut self, x: u32, flag: Flag, on: bool) {
        self.splay(x);
        match flag {
            Flag::Tree => self.nm(x).tree_flag = on,
            Flag::NonTree => self.nm(x).nontree_flag = on,
        }
        self.update(x);
    }

    /// Any node in the tree of `x` carrying `flag`, splayed to the root.
    pub fn find_flagged(&mut self, x: u32, flag: Flag) -> Option<u32> {
        self.splay(x);
        let agg = |n: &Node| match flag {
            Flag::Tree => n.any_tree,
            Flag::NonTree => n.any_nontree,
        };
        let own = |n: &Node| match flag {
            Flag::Tree => n.tree_flag,
            Flag::NonTree => n.nontree_flag,
        };
        if !agg(self.n(x)) {
            return None;
        }
        let mut cur = x;
        loop {
            let node = self.n(cur);
            if own(node) {
                break;
            }
            if node.left != NIL && agg(self.n(node.left)) {
                cur = node.left;
            } else {
                debug_assert!(node.right != NIL && agg(self.n(node.right)));
                cur = node.right;
            }
        }
        self.splay(cur);
        Some(cur)
    }

    /// Vertex ids of every occurrence node in the tree of `x`.
    pub fn tree_vertex_ids(&mut self, x: u32, out: &mut Vec<u32>) {
        self.splay(x);
        let mut stack = vec![x];
        while let Some(c) = stack.pop() {
            let node = self.n(c);
            if node.b == NIL {
                out.push(node.a);
            }
            for ch in [node.left, node.right] {
                if ch != NIL && self.n(ch).verts > 0 {
                    stack.push(ch);
                }
            }
        }
    }

    /// Position of `x` in its tour.
    fn index(&mut self, x: u32) -> u32 {
        self.splay(x);
        let l = self.n(x).left;
        if l == NIL {
            0
        } else {
            self.n(l).size
        }
    }

    fn detach_left(&mut self, x: u32) -> u32 {
        let l = self.n(x).left;
        if l != NIL {
            self.nm(x).left = NIL;
            self.nm(l).parent = NIL;
            self.update(x);
        }
        l
    }

    fn detach_right(&mut self, x: u32) -> u32 {
        let r = self.n(x).right;
        if r != NIL {
            self.nm(x).right = NIL;
            self.nm(r).parent = NIL;
            self.update(x);
        }
        r
    }

    /// Concatenates two tours given by splay roots; returns the new root.
    fn join(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        let mut last = a;
        while self.n(last).right != NIL {
            last = self.n(last).right;
        }
        self.splay(last);
        self.nm(last).right = b;
        self.nm(b).parent = last;
        self.update(last);
        last
    }

    /// Rotates the tour containing `x` so that it starts at `x`.
    fn reroot(&mut self, x: u32) -> u32 {
        self.splay(x);
        let l = self.detach_left(x);
        self.join(x, l)
    }

    /// Links the trees of occurrence nodes `xu` and `xv` with a new edge.
    /// Returns the two fresh arc nodes `(u->v, v->u)`.
    pub fn link(&mut self, xu: u32, xv: u32) -> (u32, u32) {
        debug_assert!(!self.same_tree(xu, xv));
        let (u, v) = (self.n(xu).a, self.n(xv).a);
        let uv = self.alloc(u, v);
        let vu = self.alloc(v, u);
        let a = self.reroot(xu);
        let b = self.reroot(xv);
        let r = self.join(a, uv);
        let r = self.join(r, b);
        self.join(r, vu);
        (uv, vu)
    }

    /// Removes the tree edge represented by arcs `a1`, `a2` and frees them.
    pub fn cut(&mut self, a1: u32, a2: u32) {
        let (first, second) = if self.index(a1) < self.index(a2) { (a1, a2) } else { (a2, a1) };
        // tour = P first M second Q  ->  M and P Q
        self.splay(first);
        let p = self.detach_left(first);
        self.splay(second);
        let q = self.detach_right(second);
        self.splay(first);
        let m_and_second = self.detach_right(first);
        self.splay(second);
        debug_assert!(m_and_second != NIL);
        self.detach_left(second);
        self.join(p, q);
        self.release(first);
        self.release(second);
    }

    #[cfg(test)]
    fn tour(&mut self, x: u32) -> Vec<(u32, u32)> {
        self.splay(x);
        let mut out = Vec::new();
        let mut stack = Vec::new();
        let mut cur = x;
        loop {
            while cur != NIL {
                stack.push(cur);
                cur = self.n(cur).left;
            }
            match stack.pop() {
                None => break,
                Some(c) => {
                    out.push((self.n(c).a, self.n(c).b));
                    cur = self.n(c).right;
                }
            }
        }
        out
    }
}
