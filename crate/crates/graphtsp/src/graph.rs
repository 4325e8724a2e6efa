//! Simple undirected graphs, multigraphs, traversals, and block decomposition.
//!
//! Vertices are `0..n`. Simple graphs reject self-loops and duplicate edges;
//! multigraphs carry explicit edge multiplicities and support Euler walks.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::lp::Rational;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("bad header line: {0:?}")]
    BadHeader(String),
    #[error("bad edge line: {0:?}")]
    BadEdgeLine(String),
    #[error("vertex {v} out of range (n = {n})")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge count mismatch: header says {expected}, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {0} has odd degree where an even degree is required")]
    OddDegree(usize),
    #[error("walk endpoints {s}, {t} do not match the odd-degree vertices {odd:?}")]
    EndpointParity { s: usize, t: usize, odd: Vec<usize> },
    #[error("edge multiset does not span all vertices")]
    NotSpanning,
    #[error("x-value vector has length {got}, expected one entry per edge ({want})")]
    BadXLength { got: usize, want: usize },
}

/// Simple undirected graph with stable edge ids in insertion order.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    edge_set: HashSet<(VertexId, VertexId)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            edge_set: HashSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange { v: u, n: self.n });
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { v, n: self.n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let key = (u.min(v), u.max(v));
        if !self.edge_set.insert(key) {
            return Err(GraphError::DuplicateEdge(key.0, key.1));
        }
        let id = self.edges.len();
        self.edges.push(key);
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn adj(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_set.contains(&(u.min(v), u.max(v)))
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.adj[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
    }

    /// Parse the text format: header `n m`, then `m` lines `u v`.
    /// Lines starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| GraphError::BadHeader(String::new()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::BadHeader(header.to_string()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::BadHeader(header.to_string()))?;
        if it.next().is_some() {
            return Err(GraphError::BadHeader(header.to_string()));
        }
        let mut g = Graph::new(n);
        let mut found = 0usize;
        for line in lines {
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| GraphError::BadEdgeLine(line.to_string()))?;
            let v: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| GraphError::BadEdgeLine(line.to_string()))?;
            if it.next().is_some() {
                return Err(GraphError::BadEdgeLine(line.to_string()));
            }
            g.add_edge(u, v)?;
            found += 1;
        }
        if found != m {
            return Err(GraphError::EdgeCountMismatch { expected: m, found });
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", u, v);
        }
        out
    }

    /// BFS distances and parent edges from `src`; unreachable vertices stay `None`.
    pub fn bfs(&self, src: VertexId) -> BfsTree {
        let mut dist = vec![None; self.n];
        let mut parent = vec![None; self.n];
        let mut parent_edge = vec![None; self.n];
        let mut q = VecDeque::new();
        dist[src] = Some(0);
        q.push_back(src);
        while let Some(u) = q.pop_front() {
            let du = dist[u].unwrap();
            for &(w, e) in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    parent[w] = Some(u);
                    parent_edge[w] = Some(e);
                    q.push_back(w);
                }
            }
        }
        BfsTree {
            src,
            dist,
            parent,
            parent_edge,
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs(0).dist.iter().all(|d| d.is_some())
    }

    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = Vec::new();
            let mut q = VecDeque::new();
            seen[s] = true;
            q.push_back(s);
            while let Some(u) = q.pop_front() {
                comp.push(u);
                for &(w, _) in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        q.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Subgraph on the same vertex set keeping only `keep` (edge ids).
    /// Returns the subgraph and a map from new edge id to old edge id.
    pub fn edge_subgraph(&self, keep: &[EdgeId]) -> (Graph, Vec<EdgeId>) {
        let mut g = Graph::new(self.n);
        let mut map = Vec::with_capacity(keep.len());
        for &e in keep {
            let (u, v) = self.edges[e];
            g.add_edge(u, v).expect("subset of a simple graph stays simple");
            map.push(e);
        }
        (g, map)
    }

    /// Induced relabeled subgraph on `verts` (must be sorted, distinct).
    /// Returns the subgraph, new->old vertex map, new->old edge map.
    pub fn induced(&self, verts: &[VertexId]) -> (Graph, Vec<VertexId>, Vec<EdgeId>) {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = Graph::new(verts.len());
        let mut emap = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if pos[u] != usize::MAX && pos[v] != usize::MAX {
                g.add_edge(pos[u], pos[v]).expect("induced subgraph stays simple");
                emap.push(e);
            }
        }
        (g, verts.to_vec(), emap)
    }
}

#[derive(Debug, Clone)]
pub struct BfsTree {
    pub src: VertexId,
    pub dist: Vec<Option<usize>>,
    pub parent: Vec<Option<VertexId>>,
    pub parent_edge: Vec<Option<EdgeId>>,
}

impl BfsTree {
    /// Edge ids of the tree path src -> v (in order from src).
    pub fn path_to(&self, v: VertexId) -> Option<Vec<EdgeId>> {
        self.dist[v]?;
        let mut path = Vec::new();
        let mut cur = v;
        while cur != self.src {
            let e = self.parent_edge[cur].expect("non-src reachable vertex has a parent");
            path.push(e);
            cur = self.parent[cur].expect("non-src reachable vertex has a parent");
        }
        path.reverse();
        Some(path)
    }
}

/// DFS tree that always descends along the incident edge of maximum x-value,
/// breaking ties toward the smallest neighbor id.
#[derive(Debug, Clone)]
pub struct DfsTree {
    pub root: VertexId,
    pub parent: Vec<Option<VertexId>>,
    pub parent_edge: Vec<Option<EdgeId>>,
    pub children: Vec<Vec<VertexId>>,
    /// Discovery index per vertex.
    pub disc: Vec<usize>,
    /// Subtree interval end: disc[u] <= disc[v] <= fin[u] iff v is in u's subtree.
    pub fin: Vec<usize>,
    /// Vertices in discovery order.
    pub order: Vec<VertexId>,
    /// Tree edge ids in the order their child end was discovered.
    pub tree_edges: Vec<EdgeId>,
    /// Non-tree edges oriented descendant -> ancestor.
    pub back_edges: Vec<BackEdge>,
    pub is_tree_edge: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackEdge {
    pub from: VertexId,
    pub to: VertexId,
    pub edge: EdgeId,
}

impl DfsTree {
    pub fn in_subtree(&self, anc: VertexId, v: VertexId) -> bool {
        self.disc[anc] <= self.disc[v] && self.disc[v] <= self.fin[anc]
    }

    /// The child of `anc` whose subtree contains `v` (v must be a proper descendant).
    pub fn child_toward(&self, anc: VertexId, v: VertexId) -> VertexId {
        *self.children[anc]
            .iter()
            .find(|&&c| self.in_subtree(c, v))
            .expect("v is a proper descendant of anc")
    }
}

pub fn dfs_tree_max_x(g: &Graph, root: VertexId, x: &[Rational]) -> Result<DfsTree, GraphError> {
    if x.len() != g.edge_count() {
        return Err(GraphError::BadXLength {
            got: x.len(),
            want: g.edge_count(),
        });
    }
    if root >= g.vertex_count() {
        return Err(GraphError::VertexOutOfRange {
            v: root,
            n: g.vertex_count(),
        });
    }
    let n = g.vertex_count();
    // Pre-sort each adjacency by descending x, then by neighbor id. Skipping
    // visited entries in this order picks the max-x unvisited neighbor at
    // every step.
    let mut sorted_adj: Vec<Vec<(VertexId, EdgeId)>> = (0..n).map(|v| g.adj(v).to_vec()).collect();
    for lst in &mut sorted_adj {
        lst.sort_by(|a, b| x[b.1].cmp(&x[a.1]).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    }

    let mut parent = vec![None; n];
    let mut parent_edge = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut disc = vec![usize::MAX; n];
    let mut fin = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let mut tree_edges = Vec::with_capacity(n.saturating_sub(1));
    let mut back_edges = Vec::new();
    let mut is_tree_edge = vec![false; g.edge_count()];
    let mut cursor = vec![0usize; n];
    let mut timer = 0usize;

    disc[root] = timer;
    timer += 1;
    order.push(root);
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if cursor[u] < sorted_adj[u].len() {
            let (w, e) = sorted_adj[u][cursor[u]];
            cursor[u] += 1;
            if disc[w] == usize::MAX {
                disc[w] = timer;
                timer += 1;
                order.push(w);
                parent[w] = Some(u);
                parent_edge[w] = Some(e);
                children[u].push(w);
                tree_edges.push(e);
                is_tree_edge[e] = true;
                stack.push(w);
            } else if parent_edge[u] != Some(e) && disc[w] < disc[u] {
                back_edges.push(BackEdge { from: u, to: w, edge: e });
            }
        } else {
            fin[u] = timer - 1;
            stack.pop();
        }
    }
    if order.len() != n {
        return Err(GraphError::Disconnected);
    }
    Ok(DfsTree {
        root,
        parent,
        parent_edge,
        children,
        disc,
        fin,
        order,
        tree_edges,
        back_edges,
        is_tree_edge,
    })
}

/// Biconnected component: maximal subgraph without a cut vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// Biconnected components, sorted by their sorted vertex lists.
pub fn blocks(g: &Graph) -> Vec<Block> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut cursor = vec![0usize; n];
    let mut timer = 0usize;
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut out = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut stack = vec![root];
        while let Some(&u) = stack.last() {
            if cursor[u] < g.adj(u).len() {
                let (w, e) = g.adj(u)[cursor[u]];
                cursor[u] += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    parent_edge[w] = e;
                    stack.push(w);
                } else if e != parent_edge[u] && disc[w] < disc[u] {
                    edge_stack.push(e);
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&p) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        // p separates u's subtree: pop one block.
                        let pe = parent_edge[u];
                        let mut es = Vec::new();
                        loop {
                            let e = edge_stack.pop().expect("block edge on stack");
                            es.push(e);
                            if e == pe {
                                break;
                            }
                        }
                        out.push(make_block(g, es));
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    out
}

fn make_block(g: &Graph, mut es: Vec<EdgeId>) -> Block {
    es.sort_unstable();
    let mut vs: Vec<VertexId> = es
        .iter()
        .flat_map(|&e| {
            let (u, v) = g.endpoints(e);
            [u, v]
        })
        .collect();
    vs.sort_unstable();
    vs.dedup();
    Block { vertices: vs, edges: es }
}

pub fn cut_vertices(g: &Graph) -> Vec<VertexId> {
    // A vertex is a cut vertex iff it lies in more than one block.
    let mut count = vec![0usize; g.vertex_count()];
    for b in blocks(g) {
        for v in b.vertices {
            count[v] += 1;
        }
    }
    (0..g.vertex_count()).filter(|&v| count[v] > 1).collect()
}

pub fn is_two_vertex_connected(g: &Graph) -> bool {
    g.vertex_count() >= 3 && g.is_connected() && cut_vertices(g).is_empty()
}

pub fn bridges(g: &Graph) -> Vec<EdgeId> {
    blocks(g)
        .into_iter()
        .filter(|b| b.edges.len() == 1)
        .map(|b| b.edges[0])
        .collect()
}

pub fn is_two_edge_connected(g: &Graph) -> bool {
    g.vertex_count() >= 1 && g.is_connected() && bridges(g).is_empty()
}

/// Undirected multigraph: explicit multiplicity per vertex pair.
#[derive(Debug, Clone, Default)]
pub struct Multigraph {
    n: usize,
    mult: BTreeMap<(VertexId, VertexId), u32>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph {
            n,
            mult: BTreeMap::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, u: VertexId, v: VertexId, k: u32) {
        assert!(u < self.n && v < self.n && u != v, "bad multigraph edge");
        if k == 0 {
            return;
        }
        *self.mult.entry((u.min(v), u.max(v))).or_insert(0) += k;
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u32 {
        *self.mult.get(&(u.min(v), u.max(v))).unwrap_or(&0)
    }

    pub fn set(&mut self, u: VertexId, v: VertexId, k: u32) {
        assert!(u < self.n && v < self.n && u != v, "bad multigraph edge");
        if k == 0 {
            self.mult.remove(&(u.min(v), u.max(v)));
        } else {
            self.mult.insert((u.min(v), u.max(v)), k);
        }
    }

    pub fn edge_count(&self) -> usize {
        self.mult.values().map(|&c| c as usize).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(VertexId, VertexId), &u32)> {
        self.mult.iter()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for (&(u, v), &c) in &self.mult {
            deg[u] += c as usize;
            deg[v] += c as usize;
        }
        deg
    }

    pub fn odd_vertices(&self) -> Vec<VertexId> {
        self.degrees()
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| d % 2 == 1)
            .map(|(v, _)| v)
            .collect()
    }

    /// Add all of `other`, relabeling its vertex v to `map[v]`.
    pub fn absorb(&mut self, other: &Multigraph, map: &[VertexId]) {
        for (&(u, v), &c) in &other.mult {
            self.add(map[u], map[v], c);
        }
    }

    /// Connected when every vertex is an endpoint of some edge and the edge
    /// multiset forms one component (single isolated vertex counts as spanning
    /// only for n = 1).
    pub fn is_spanning_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        if self.mult.is_empty() {
            return self.n == 1;
        }
        let deg = self.degrees();
        if deg.iter().any(|&d| d == 0) {
            return false;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in self.mult.keys() {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.n];
        let mut q = VecDeque::new();
        seen[0] = true;
        q.push_back(0);
        let mut cnt = 1;
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    cnt += 1;
                    q.push_back(w);
                }
            }
        }
        cnt == self.n
    }
}

/// Euler walk from s to t (closed circuit when s == t), as directed vertex
/// pairs in traversal order. Errors on parity, spanning, or connectivity
/// violations.
pub fn euler_traversal(
    mg: &Multigraph,
    s: VertexId,
    t: VertexId,
) -> Result<Vec<(VertexId, VertexId)>, GraphError> {
    let n = mg.vertex_count();
    if s >= n {
        return Err(GraphError::VertexOutOfRange { v: s, n });
    }
    if t >= n {
        return Err(GraphError::VertexOutOfRange { v: t, n });
    }
    if mg.edge_count() == 0 {
        if s == t && n == 1 {
            return Ok(Vec::new());
        }
        return Err(GraphError::NotSpanning);
    }
    if !mg.is_spanning_connected() {
        return Err(GraphError::NotSpanning);
    }
    let odd = mg.odd_vertices();
    if s == t {
        if let Some(&v) = odd.first() {
            return Err(GraphError::OddDegree(v));
        }
    } else if odd != {
        let mut e = vec![s.min(t), s.max(t)];
        e.dedup();
        e
    } {
        return Err(GraphError::EndpointParity { s, t, odd });
    }

    // Expand multiplicities into edge instances for Hierholzer.
    let mut adj: Vec<Vec<(VertexId, usize)>> = vec![Vec::new(); n];
    let mut ends = Vec::new();
    for (&(u, v), &c) in mg.pairs() {
        for _ in 0..c {
            let id = ends.len();
            ends.push((u, v));
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
    }
    let mut used = vec![false; ends.len()];
    let mut cursor = vec![0usize; n];
    let mut stack = vec![s];
    let mut seq = Vec::with_capacity(ends.len() + 1);
    while let Some(&u) = stack.last() {
        let mut advanced = false;
        while cursor[u] < adj[u].len() {
            let (w, id) = adj[u][cursor[u]];
            if used[id] {
                cursor[u] += 1;
                continue;
            }
            used[id] = true;
            cursor[u] += 1;
            stack.push(w);
            advanced = true;
            break;
        }
        if !advanced {
            seq.push(u);
            stack.pop();
        }
    }
    seq.reverse();
    assert_eq!(seq.len(), ends.len() + 1, "euler walk uses every edge");
    assert_eq!(seq[0], s, "euler walk starts at s");
    assert_eq!(*seq.last().unwrap(), t, "euler walk ends at t");
    Ok(seq.windows(2).map(|w| (w[0], w[1])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    fn cycle(n: usize) -> Graph {
        let es: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &es).unwrap()
    }

    #[test]
    fn parse_roundtrip() {
        let text = "# comment\n4 5\n0 1\n1 2\n2 3\n3 0\n0 2\n";
        let g = Graph::parse(text).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 5);
        let again = Graph::parse(&g.to_text()).unwrap();
        assert_eq!(again.edges(), g.edges());
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(Graph::parse(""), Err(GraphError::BadHeader(_))));
        assert!(matches!(
            Graph::parse("2 1\n0 0\n"),
            Err(GraphError::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::parse("2 2\n0 1\n1 0\n"),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::parse("2 2\n0 1\n"),
            Err(GraphError::EdgeCountMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(
            Graph::parse("2 1\n0 3\n"),
            Err(GraphError::VertexOutOfRange { v: 3, n: 2 })
        ));
    }

    #[test]
    fn bfs_distances_on_cycle() {
        let g = cycle(6);
        let b = g.bfs(0);
        assert_eq!(b.dist[3], Some(3));
        assert_eq!(b.dist[5], Some(1));
        assert_eq!(b.path_to(2).unwrap().len(), 2);
    }

    #[test]
    fn blocks_of_barbell() {
        // Two triangles joined by a bridge 2-3.
        let g = Graph::from_edges(
            6,
            &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)],
        )
        .unwrap();
        let bs = blocks(&g);
        assert_eq!(bs.len(), 3);
        assert_eq!(bs[0].vertices, vec![0, 1, 2]);
        assert_eq!(bs[1].vertices, vec![2, 3]);
        assert_eq!(bs[2].vertices, vec![3, 4, 5]);
        assert_eq!(cut_vertices(&g), vec![2, 3]);
        assert_eq!(bridges(&g).len(), 1);
        assert!(!is_two_vertex_connected(&g));
    }

    #[test]
    fn cycle_is_two_connected() {
        let g = cycle(5);
        assert!(is_two_vertex_connected(&g));
        assert!(is_two_edge_connected(&g));
        assert_eq!(blocks(&g).len(), 1);
    }

    #[test]
    fn dfs_follows_max_x() {
        // Diamond: 4-cycle 0-1-2-3 plus chord 0-2. Give the chord the
        // largest x so the DFS leaves 0 through it.
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let mut x: Vec<Rational> = vec![Rational::one(); 5];
        x[4] = Rational::new(3.into(), 1.into());
        let t = dfs_tree_max_x(&g, 0, &x).unwrap();
        assert_eq!(t.children[0], vec![2]);
        assert_eq!(t.order[0], 0);
        assert_eq!(t.order[1], 2);
        // Equal x on the rest descends toward smaller neighbor ids, so 2
        // explores 1 first; 3 is found after backtracking.
        assert_eq!(t.children[2], vec![1, 3]);
        // Tree edges in discovery order: 0-2 (chord), 2-1, 2-3.
        assert_eq!(t.tree_edges, vec![4, 1, 2]);
        assert_eq!(t.back_edges.len(), 2);
        for be in &t.back_edges {
            assert!(t.disc[be.to] < t.disc[be.from]);
        }
    }

    #[test]
    fn dfs_subtree_queries() {
        let g = cycle(5);
        let x: Vec<Rational> = vec![Rational::one(); 5];
        let t = dfs_tree_max_x(&g, 0, &x).unwrap();
        // Path 0-1-2-3-4 with one back edge 4 -> 0.
        assert_eq!(t.children[0].len(), 1);
        assert_eq!(t.back_edges.len(), 1);
        let c = t.children[0][0];
        assert!(t.in_subtree(c, 4) || t.in_subtree(c, 1));
        assert_eq!(t.child_toward(0, 3), c);
    }

    #[test]
    fn euler_circuit_on_doubled_path() {
        let mut mg = Multigraph::new(3);
        mg.add(0, 1, 2);
        mg.add(1, 2, 2);
        let walk = euler_traversal(&mg, 0, 0).unwrap();
        assert_eq!(walk.len(), 4);
        assert_eq!(walk[0].0, 0);
        assert_eq!(walk[3].1, 0);
        for w in walk.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }

    #[test]
    fn euler_open_walk() {
        // Degrees 1, 4, 1, 2: odd exactly at the endpoints 0 and 2.
        let mut mg = Multigraph::new(4);
        mg.add(0, 1, 1);
        mg.add(1, 2, 1);
        mg.add(1, 3, 2);
        let walk = euler_traversal(&mg, 0, 2).unwrap();
        assert_eq!(walk.len(), 4);
        assert_eq!(walk[0].0, 0);
        assert_eq!(walk[3].1, 2);
        for w in walk.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }

    #[test]
    fn euler_rejects_bad_parity() {
        let mut mg = Multigraph::new(3);
        mg.add(0, 1, 1);
        mg.add(1, 2, 1);
        assert!(matches!(
            euler_traversal(&mg, 0, 0),
            Err(GraphError::OddDegree(_))
        ));
        assert!(euler_traversal(&mg, 0, 2).is_ok());
        assert!(matches!(
            euler_traversal(&mg, 0, 1),
            Err(GraphError::EndpointParity { .. })
        ));
    }

    #[test]
    fn euler_rejects_non_spanning() {
        let mut mg = Multigraph::new(4);
        mg.add(0, 1, 2);
        assert!(matches!(
            euler_traversal(&mg, 0, 0),
            Err(GraphError::NotSpanning)
        ));
    }

    #[test]
    fn multigraph_bookkeeping() {
        let mut mg = Multigraph::new(4);
        mg.add(2, 0, 1);
        mg.add(0, 2, 2);
        assert_eq!(mg.multiplicity(0, 2), 3);
        assert_eq!(mg.edge_count(), 3);
        assert_eq!(mg.degrees(), vec![3, 0, 3, 0]);
        assert_eq!(mg.odd_vertices(), vec![0, 2]);
    }
}
