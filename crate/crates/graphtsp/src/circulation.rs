//! Circulation network built from a DFS tree, and its min-cost solver.
//!
//! Tree arcs point away from the root and each gets a demand of 1. Every
//! tree arc below the root is split in two by a new in-vertex, and back
//! arcs are redirected into the in-vertex just below their original head.
//! A two-arc aggregator gadget in front of each in-vertex (one free unit,
//! the rest at cost 1 each) makes the objective "number of back-arc units
//! beyond the first, summed over in-vertices" a plain linear arc cost.

use crate::graph::{DfsTree, EdgeId, Graph, VertexId};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircError {
    #[error("invalid circulation input: {0}")]
    InvalidInput(String),
    #[error("circulation network is infeasible (input graph is not 2-vertex-connected)")]
    Infeasible,
}

/// Where an arc comes from in the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    /// First half of a split tree arc: parent into the in-vertex.
    TreeArcUpper,
    /// Second half: in-vertex into the child. The root's unsplit arc also
    /// carries this tag since it plays the same role (it enters the child).
    TreeArcLower,
    /// Redirected back edge, ending at an aggregator.
    BackArc,
    /// Aggregator arc with capacity 1 and cost 0.
    AggregatorFree,
    /// Aggregator arc with unbounded capacity and cost 1 per unit.
    AggregatorPaid,
}

impl ArcKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcKind::TreeArcUpper => "tree-arc-upper",
            ArcKind::TreeArcLower => "tree-arc-lower",
            ArcKind::BackArc => "back-arc",
            ArcKind::AggregatorFree => "aggregator-free",
            ArcKind::AggregatorPaid => "aggregator-paid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircArc {
    pub tail: usize,
    pub head: usize,
    pub lower: i64,
    pub upper: i64,
    pub cost: i64,
    pub kind: ArcKind,
    /// Original graph edge for tree and back arcs, None for aggregator arcs.
    pub edge: Option<EdgeId>,
    /// The in-vertex an arc serves: the split node for tree-arc halves (None
    /// for the root's unsplit arc), the landing in-vertex for back arcs, and
    /// the owner for aggregator arcs.
    pub in_vertex: Option<usize>,
    /// True when `upper` is the "no real cap" sentinel rather than a bound
    /// that is part of the model.
    pub unbounded: bool,
}

/// Node ids: 0..n are the original vertices, then one split node per
/// non-root tree edge in discovery order, then one aggregator per in-vertex
/// in the order of `in_vertices`.
#[derive(Debug, Clone)]
pub struct CirculationNetwork {
    pub node_count: usize,
    pub arcs: Vec<CircArc>,
    pub n: usize,
    pub root: VertexId,
    /// Root first, then split nodes in creation order.
    pub in_vertices: Vec<usize>,
    /// In-vertex node -> its aggregator node.
    pub agg_of: BTreeMap<usize, usize>,
    /// Non-root tree edge id -> split node sitting on it.
    pub split_of: BTreeMap<EdgeId, usize>,
    /// In-vertex node -> the tree edge leaving it (the root's single child
    /// edge, or the edge a split node sits on). This is the edge a pairing
    /// will couple with back edges landing there.
    pub partner_edge: BTreeMap<usize, EdgeId>,
}

impl CirculationNetwork {
    /// One arc per line: "tail head lower upper cost provenance".
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for a in &self.arcs {
            writeln!(
                out,
                "{} {} {} {} {} {}",
                a.tail,
                a.head,
                a.lower,
                a.upper,
                a.cost,
                a.kind.as_str()
            )
            .unwrap();
        }
        out
    }

    /// Indices of back arcs landing at each in-vertex, in arc order.
    pub fn back_arcs_by_in_vertex(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut m: BTreeMap<usize, Vec<usize>> =
            self.in_vertices.iter().map(|&iv| (iv, Vec::new())).collect();
        for (i, a) in self.arcs.iter().enumerate() {
            if a.kind == ArcKind::BackArc {
                m.get_mut(&a.in_vertex.unwrap()).unwrap().push(i);
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circulation {
    /// Flow per arc, parallel to `CirculationNetwork::arcs`.
    pub flow: Vec<i64>,
    pub cost: i64,
}

/// Build the network for graph `g` and DFS tree `t`.
///
/// The root of a DFS tree of a 2-vertex-connected graph has exactly one
/// child, so the root's arc never needs splitting; this is checked rather
/// than assumed. Structural mismatches between `g` and `t` are rejected.
pub fn build_network(g: &Graph, t: &DfsTree) -> Result<CirculationNetwork, CircError> {
    let n = g.vertex_count();
    if n < 3 {
        return Err(CircError::InvalidInput(format!(
            "need at least 3 vertices, got {n}"
        )));
    }
    if t.parent.len() != n || t.order.len() != n {
        return Err(CircError::InvalidInput(
            "DFS tree does not match graph size".into(),
        ));
    }
    if t.children[t.root].len() != 1 {
        return Err(CircError::InvalidInput(format!(
            "DFS root has {} children; a DFS of a 2-vertex-connected graph has exactly 1",
            t.children[t.root].len()
        )));
    }
    if t.back_edges.len() != g.edge_count() - (n - 1) {
        return Err(CircError::InvalidInput(
            "non-tree edges of the DFS are not all back edges".into(),
        ));
    }

    // Tree arcs carry demand 1 each; their count is the total demand, which
    // also serves as the "unbounded" capacity (no optimal circulation needs
    // more; checked after solving).
    let tree_arc_count = (2 * n - 3) as i64;

    let mut split_of = BTreeMap::new();
    let mut next = n;
    for &w in &t.order {
        if w == t.root {
            continue;
        }
        let u = t.parent[w].unwrap();
        if u != t.root {
            split_of.insert(t.parent_edge[w].unwrap(), next);
            next += 1;
        }
    }
    let mut in_vertices = vec![t.root];
    // Splits in creation order, i.e. ascending node id.
    let mut splits: Vec<(usize, EdgeId)> = split_of.iter().map(|(&e, &s)| (s, e)).collect();
    splits.sort();
    in_vertices.extend(splits.iter().map(|&(s, _)| s));

    let mut agg_of = BTreeMap::new();
    for &iv in &in_vertices {
        agg_of.insert(iv, next);
        next += 1;
    }

    let mut partner_edge = BTreeMap::new();
    partner_edge.insert(t.root, t.tree_edges[0]);
    for &(s, e) in &splits {
        partner_edge.insert(s, e);
    }

    let mut arcs = Vec::new();
    for &w in &t.order {
        if w == t.root {
            continue;
        }
        let u = t.parent[w].unwrap();
        let e = t.parent_edge[w].unwrap();
        if u == t.root {
            arcs.push(CircArc {
                tail: u,
                head: w,
                lower: 1,
                upper: tree_arc_count,
                cost: 0,
                kind: ArcKind::TreeArcLower,
                edge: Some(e),
                in_vertex: None,
                unbounded: true,
            });
        } else {
            let s = split_of[&e];
            arcs.push(CircArc {
                tail: u,
                head: s,
                lower: 1,
                upper: tree_arc_count,
                cost: 0,
                kind: ArcKind::TreeArcUpper,
                edge: Some(e),
                in_vertex: Some(s),
                unbounded: true,
            });
            arcs.push(CircArc {
                tail: s,
                head: w,
                lower: 1,
                upper: tree_arc_count,
                cost: 0,
                kind: ArcKind::TreeArcLower,
                edge: Some(e),
                in_vertex: Some(s),
                unbounded: true,
            });
        }
    }
    for be in &t.back_edges {
        let iv = if be.to == t.root {
            t.root
        } else {
            let c = t.child_toward(be.to, be.from);
            split_of[&t.parent_edge[c].unwrap()]
        };
        arcs.push(CircArc {
            tail: be.from,
            head: agg_of[&iv],
            lower: 0,
            upper: tree_arc_count,
            cost: 0,
            kind: ArcKind::BackArc,
            edge: Some(be.edge),
            in_vertex: Some(iv),
            unbounded: true,
        });
    }
    for &iv in &in_vertices {
        let agg = agg_of[&iv];
        arcs.push(CircArc {
            tail: agg,
            head: iv,
            lower: 0,
            upper: 1,
            cost: 0,
            kind: ArcKind::AggregatorFree,
            edge: None,
            in_vertex: Some(iv),
            unbounded: false,
        });
        arcs.push(CircArc {
            tail: agg,
            head: iv,
            lower: 0,
            upper: tree_arc_count,
            cost: 1,
            kind: ArcKind::AggregatorPaid,
            edge: None,
            in_vertex: Some(iv),
            unbounded: true,
        });
    }

    Ok(CirculationNetwork {
        node_count: next,
        arcs,
        n,
        root: t.root,
        in_vertices,
        agg_of,
        split_of,
        partner_edge,
    })
}

// Residual graph for min-cost flow: arcs stored in pairs, arc i ^ 1 is the
// reverse of arc i.
struct Residual {
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(nodes: usize) -> Self {
        Residual {
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: i64, cost: i64) -> usize {
        let id = self.to.len();
        self.adj[u].push(id);
        self.to.push(v);
        self.cap.push(cap);
        self.cost.push(cost);
        self.adj[v].push(id + 1);
        self.to.push(u);
        self.cap.push(0);
        self.cost.push(-cost);
        id
    }

    // Send as much supply as possible from s to t along successive shortest
    // paths, using potentials so reduced costs stay nonnegative (all
    // original costs are nonnegative, so potentials start at zero).
    fn ssp(&mut self, s: usize, t: usize, supply: i64) -> i64 {
        const UNREACHED: i64 = i64::MAX / 4;
        let nn = self.adj.len();
        let mut pi = vec![0i64; nn];
        let mut sent = 0i64;
        while sent < supply {
            let mut dist = vec![UNREACHED; nn];
            let mut done = vec![false; nn];
            let mut pre = vec![usize::MAX; nn];
            dist[s] = 0;
            loop {
                let mut u = usize::MAX;
                for v in 0..nn {
                    if !done[v] && dist[v] < UNREACHED && (u == usize::MAX || dist[v] < dist[u]) {
                        u = v;
                    }
                }
                if u == usize::MAX {
                    break;
                }
                done[u] = true;
                for &a in &self.adj[u] {
                    if self.cap[a] <= 0 {
                        continue;
                    }
                    let v = self.to[a];
                    let nd = dist[u] + self.cost[a] + pi[u] - pi[v];
                    debug_assert!(self.cost[a] + pi[u] - pi[v] >= 0);
                    if nd < dist[v] {
                        dist[v] = nd;
                        pre[v] = a;
                    }
                }
            }
            if dist[t] >= UNREACHED {
                break;
            }
            for v in 0..nn {
                if dist[v] < UNREACHED {
                    pi[v] += dist[v];
                }
            }
            let mut push = supply - sent;
            let mut v = t;
            while v != s {
                let a = pre[v];
                push = push.min(self.cap[a]);
                v = self.to[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = pre[v];
                self.cap[a] -= push;
                self.cap[a ^ 1] += push;
                v = self.to[a ^ 1];
            }
            sent += push;
        }
        sent
    }

    // True when the residual graph (positive-capacity arcs, real costs)
    // contains a negative cycle. Bellman-Ford with a virtual source.
    fn has_negative_cycle(&self) -> bool {
        let nn = self.adj.len();
        let mut dist = vec![0i64; nn];
        for round in 0..nn {
            let mut changed = false;
            for a in 0..self.to.len() {
                if self.cap[a] <= 0 {
                    continue;
                }
                let u = self.to[a ^ 1];
                let v = self.to[a];
                if dist[u] + self.cost[a] < dist[v] {
                    dist[v] = dist[u] + self.cost[a];
                    changed = true;
                }
            }
            if !changed {
                return false;
            }
            if round == nn - 1 {
                return true;
            }
        }
        false
    }
}

fn solve_scaled(net: &CirculationNetwork, cap_scale: i64) -> Result<Circulation, CircError> {
    let nn = net.node_count + 2;
    let (s, t) = (net.node_count, net.node_count + 1);
    let mut res = Residual::new(nn);
    let mut fwd = Vec::with_capacity(net.arcs.len());
    let mut excess = vec![0i64; net.node_count];
    let mut caps = Vec::with_capacity(net.arcs.len());
    for a in &net.arcs {
        let upper = if a.unbounded { a.upper * cap_scale } else { a.upper };
        caps.push(upper);
        fwd.push(res.add(a.tail, a.head, upper - a.lower, a.cost));
        excess[a.head] += a.lower;
        excess[a.tail] -= a.lower;
    }
    let mut supply = 0i64;
    for (v, &e) in excess.iter().enumerate() {
        if e > 0 {
            res.add(s, v, e, 0);
            supply += e;
        } else if e < 0 {
            res.add(v, t, -e, 0);
        }
    }
    if res.ssp(s, t, supply) < supply {
        return Err(CircError::Infeasible);
    }
    assert!(
        !res.has_negative_cycle(),
        "residual graph of the computed circulation has a negative cycle"
    );
    let mut flow = Vec::with_capacity(net.arcs.len());
    let mut cost = 0i64;
    for (i, a) in net.arcs.iter().enumerate() {
        let f = a.lower + (caps[i] - a.lower - res.cap[fwd[i]]);
        assert!(f >= a.lower && f <= caps[i]);
        flow.push(f);
        cost += f * a.cost;
    }
    // Conservation at every node of the original network.
    let mut bal = vec![0i64; net.node_count];
    for (i, a) in net.arcs.iter().enumerate() {
        bal[a.tail] -= flow[i];
        bal[a.head] += flow[i];
    }
    assert!(bal.iter().all(|&b| b == 0), "flow conservation violated");
    Ok(Circulation { flow, cost })
}

/// Minimum-cost integral circulation on `net`.
///
/// Demands become excesses by the usual transformation, the resulting
/// min-cost flow is solved exactly, and optimality is certified by the
/// absence of negative-cost residual cycles. If any sentinel-capacity arc
/// ends up at its cap the solve is repeated once with doubled sentinels;
/// that this never recurs is an invariant of the construction.
pub fn min_cost_circulation(net: &CirculationNetwork) -> Result<Circulation, CircError> {
    let mut c = solve_scaled(net, 1)?;
    let at_sentinel = |c: &Circulation, scale: i64| {
        net.arcs
            .iter()
            .enumerate()
            .any(|(i, a)| a.unbounded && c.flow[i] >= a.upper * scale)
    };
    if at_sentinel(&c, 1) {
        c = solve_scaled(net, 2)?;
        assert!(
            !at_sentinel(&c, 2),
            "circulation wants flow above twice the total demand"
        );
    }
    Ok(c)
}

/// Recompute the cost from back-arc flows alone: each in-vertex pays for
/// every unit beyond its first. Checks the result against the arc-cost
/// total carried by `c`; a mismatch means the gadget is wired wrong.
pub fn circulation_cost_audit(net: &CirculationNetwork, c: &Circulation) -> i64 {
    assert_eq!(c.flow.len(), net.arcs.len());
    let mut back_in: BTreeMap<usize, i64> =
        net.in_vertices.iter().map(|&iv| (iv, 0)).collect();
    let mut arc_total = 0i64;
    for (i, a) in net.arcs.iter().enumerate() {
        arc_total += c.flow[i] * a.cost;
        if a.kind == ArcKind::BackArc {
            *back_in.get_mut(&a.in_vertex.unwrap()).unwrap() += c.flow[i];
        }
    }
    let recomputed: i64 = back_in.values().map(|&f| (f - 1).max(0)).sum();
    assert_eq!(
        recomputed, arc_total,
        "piecewise cost from back-arc flows disagrees with arc-cost total"
    );
    assert_eq!(arc_total, c.cost);
    recomputed
}
