//! Exact rational cut relaxation for tour and s-t walk lower bounds.
//!
//! Minimizes sum(x_e) subject to x(delta(S)) >= 2 on proper vertex subsets
//! (walk mode relaxes subsets separating s from t down to 1), solved by a
//! cutting-plane loop: a packing-form simplex over the current cut pool plus
//! exact global/s-t min-cut separation. All arithmetic is BigRational, so
//! results are exact and the returned x is a basic (extreme-point) solution.

use num::{BigInt, Zero};
use thiserror::Error;

use crate::graph::{EdgeId, Graph, VertexId};

pub type Rational = num::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from(BigInt::from(v))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpMode {
    Tour,
    Path { s: VertexId, t: VertexId },
}

/// One pooled cut constraint: x(delta(side)) >= rhs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutRecord {
    pub side: Vec<VertexId>,
    pub rhs: u32,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub mode: LpMode,
    pub x: Vec<Rational>,
    pub value: Rational,
    /// Always true here: the simplex basis pins m linearly independent tight
    /// constraints, so x is an extreme point of the relaxation.
    pub is_vertex: bool,
    /// Cut pool at termination, insertion order (singletons first).
    pub cuts: Vec<CutRecord>,
}

/// Edge ids with exactly one endpoint in `side`.
pub fn cut_edges(g: &Graph, side: &[VertexId]) -> Vec<EdgeId> {
    let mut inside = vec![false; g.vertex_count()];
    for &v in side {
        inside[v] = true;
    }
    (0..g.edge_count())
        .filter(|&e| {
            let (u, v) = g.endpoints(e);
            inside[u] != inside[v]
        })
        .collect()
}

pub fn cut_x_value(g: &Graph, x: &[Rational], side: &[VertexId]) -> Rational {
    cut_edges(g, side).into_iter().map(|e| x[e].clone()).sum()
}

// ---------------------------------------------------------------------------
// Simplex over the packing dual: maximize sum(rhs_S * y_S) subject to, per
// edge e, sum of y_S over cuts with e crossing plus slack_e equals 1. Columns
// 0..m are the slacks (initial basis, identity tableau), cut columns append
// after. The slack block of the tableau stays equal to the basis inverse, so
// a new cut column is just the sum of its crossing edges' slack columns, and
// the minimizing x is read off the slack entries of the objective row.
// ---------------------------------------------------------------------------

struct PackingSimplex {
    m: usize,
    tab: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    zrow: Vec<Rational>,
    zval: Rational,
    basis: Vec<usize>,
}

impl PackingSimplex {
    fn new(m: usize) -> Self {
        let mut tab = vec![vec![Rational::zero(); m]; m];
        for (r, row) in tab.iter_mut().enumerate() {
            row[r] = rat_int(1);
        }
        PackingSimplex {
            m,
            tab,
            rhs: vec![rat_int(1); m],
            zrow: vec![Rational::zero(); m],
            zval: Rational::zero(),
            basis: (0..m).collect(),
        }
    }

    fn ncols(&self) -> usize {
        self.zrow.len()
    }

    fn add_cut_column(&mut self, crossing: &[EdgeId], rhs: u32) {
        let mut z = Rational::zero();
        for &e in crossing {
            z += &self.zrow[e];
        }
        z -= rat_int(rhs as i64);
        for r in 0..self.m {
            let mut acc = Rational::zero();
            for &e in crossing {
                acc += &self.tab[r][e];
            }
            self.tab[r].push(acc);
        }
        self.zrow.push(z);
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.tab[row][col].clone();
        for v in self.tab[row].iter_mut() {
            *v /= &piv;
        }
        self.rhs[row] /= &piv;
        for r in 0..self.m {
            if r == row || self.tab[r][col].is_zero() {
                continue;
            }
            let f = self.tab[r][col].clone();
            for c in 0..self.ncols() {
                let d = &self.tab[row][c] * &f;
                self.tab[r][c] -= d;
            }
            let d = &self.rhs[row] * &f;
            self.rhs[r] -= d;
        }
        if !self.zrow[col].is_zero() {
            let f = self.zrow[col].clone();
            for c in 0..self.ncols() {
                let d = &self.tab[row][c] * &f;
                self.zrow[c] -= d;
            }
            let d = &self.rhs[row] * &f;
            self.zval -= d;
        }
        self.basis[row] = col;
    }

    /// Primal simplex with Bland's rule; the all-slack start is feasible and
    /// every column has a positive entry in some row (cuts of a connected
    /// graph cross at least one edge), so this terminates at an optimum.
    fn optimize(&mut self) {
        let zero = Rational::zero();
        let mut guard = 0usize;
        loop {
            guard += 1;
            assert!(guard < 1_000_000, "simplex failed to terminate");
            let Some(col) = (0..self.ncols()).find(|&c| self.zrow[c] < zero) else {
                return;
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for r in 0..self.m {
                if self.tab[r][col] <= zero {
                    continue;
                }
                let theta = &self.rhs[r] / &self.tab[r][col];
                let better = match &best {
                    None => true,
                    Some((bt, bb, _)) => theta < *bt || (theta == *bt && self.basis[r] < *bb),
                };
                if better {
                    best = Some((theta, self.basis[r], r));
                }
            }
            let (_, _, row) = best.expect("packing objective is bounded");
            self.pivot(row, col);
        }
    }

    /// Optimal x for the minimization side: objective-row entries over slacks.
    fn primal_x(&self) -> Vec<Rational> {
        self.zrow[..self.m].to_vec()
    }
}

// ---------------------------------------------------------------------------
// Separation: exact global min cut (repeated maximum-adjacency phases with
// contraction) and exact s-t min cut (shortest augmenting paths).
// ---------------------------------------------------------------------------

/// Global min cut of the weighted graph given as an n-by-n symmetric matrix,
/// restricted to `active` super-vertices whose original members are `groups`.
/// Ties in the maximum-adjacency scan and for the phase start go to the
/// smallest vertex id, so the result is deterministic.
fn stoer_wagner(
    n: usize,
    mut active: Vec<usize>,
    mut w: Vec<Vec<Rational>>,
    mut groups: Vec<Vec<usize>>,
) -> (Rational, Vec<VertexId>) {
    assert!(active.len() >= 2, "min cut needs two super-vertices");
    let mut best: Option<(Rational, Vec<usize>)> = None;
    while active.len() >= 2 {
        let start = *active.iter().min().unwrap();
        let mut in_a = vec![false; n];
        let mut wsum = vec![Rational::zero(); n];
        let mut added = Vec::with_capacity(active.len());
        in_a[start] = true;
        added.push(start);
        for &v in &active {
            if v != start {
                wsum[v] = w[start][v].clone();
            }
        }
        while added.len() < active.len() {
            let mut pick = usize::MAX;
            for &v in &active {
                if in_a[v] {
                    continue;
                }
                if pick == usize::MAX || wsum[v] > wsum[pick] {
                    pick = v;
                }
            }
            in_a[pick] = true;
            added.push(pick);
            for &v in &active {
                if !in_a[v] {
                    wsum[v] += &w[pick][v];
                }
            }
        }
        let t = *added.last().unwrap();
        let s = added[added.len() - 2];
        let phase_cut = wsum[t].clone();
        let improves = match &best {
            None => true,
            Some((bv, _)) => phase_cut < *bv,
        };
        if improves {
            best = Some((phase_cut, groups[t].clone()));
        }
        // Contract t into s.
        for &v in &active {
            if v != s && v != t {
                let add = w[t][v].clone();
                w[s][v] += &add;
                w[v][s] += add;
            }
        }
        let moved = std::mem::take(&mut groups[t]);
        groups[s].extend(moved);
        active.retain(|&v| v != t);
    }
    let (val, mut side) = best.unwrap();
    side.sort_unstable();
    (val, side)
}

fn x_weight_matrix(g: &Graph, x: &[Rational]) -> Vec<Vec<Rational>> {
    let n = g.vertex_count();
    let mut w = vec![vec![Rational::zero(); n]; n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        w[u][v] += &x[e];
        w[v][u] += &x[e];
    }
    w
}

fn global_min_cut(g: &Graph, x: &[Rational]) -> (Rational, Vec<VertexId>) {
    let n = g.vertex_count();
    let w = x_weight_matrix(g, x);
    let groups = (0..n).map(|v| vec![v]).collect();
    stoer_wagner(n, (0..n).collect(), w, groups)
}

/// Min cut among subsets containing both of s,t or neither (walk mode):
/// contract t into s, then global min cut. Returned side excludes s and t.
fn contracted_min_cut(g: &Graph, x: &[Rational], s: VertexId, t: VertexId) -> (Rational, Vec<VertexId>) {
    let n = g.vertex_count();
    let mut w = x_weight_matrix(g, x);
    for v in 0..n {
        if v != s && v != t {
            let add = w[t][v].clone();
            w[s][v] += &add;
            w[v][s] += add;
        }
    }
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    groups[s] = vec![s, t];
    groups[t].clear();
    let active: Vec<usize> = (0..n).filter(|&v| v != t).collect();
    let (val, side) = stoer_wagner(n, active, w, groups);
    if side.contains(&s) {
        let mut inside = vec![false; n];
        for &v in &side {
            inside[v] = true;
        }
        let comp: Vec<usize> = (0..n).filter(|&v| !inside[v]).collect();
        (val, comp)
    } else {
        (val, side)
    }
}

/// Exact s-t min cut by shortest augmenting paths. Returns the cut value and
/// the s side (residual-reachable set).
fn min_st_cut(g: &Graph, x: &[Rational], s: VertexId, t: VertexId) -> (Rational, Vec<VertexId>) {
    let n = g.vertex_count();
    let m = g.edge_count();
    // Arcs 2e and 2e+1 are the two directions of edge e.
    let mut head = vec![0usize; 2 * m];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        head[2 * e] = v;
        head[2 * e + 1] = u;
        adj[u].push(2 * e);
        adj[v].push(2 * e + 1);
    }
    let cap = |a: usize| &x[a / 2];
    let mut flow = vec![Rational::zero(); 2 * m];
    let mut total = Rational::zero();
    loop {
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut q = std::collections::VecDeque::new();
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for &a in &adj[u] {
                let v = head[a];
                if !seen[v] && &flow[a] < cap(a) {
                    seen[v] = true;
                    pred[v] = Some(a);
                    q.push_back(v);
                }
            }
        }
        if !seen[t] {
            let side: Vec<usize> = (0..n).filter(|&v| seen[v]).collect();
            return (total, side);
        }
        let tail = |a: usize| {
            let (u, v) = g.endpoints(a / 2);
            u + v - head[a]
        };
        let mut bottleneck: Option<Rational> = None;
        let mut v = t;
        while v != s {
            let a = pred[v].unwrap();
            let room = cap(a) - &flow[a];
            bottleneck = Some(match bottleneck {
                None => room,
                Some(b) => b.min(room),
            });
            v = tail(a);
        }
        let d = bottleneck.unwrap();
        let mut v = t;
        while v != s {
            let a = pred[v].unwrap();
            flow[a] += &d;
            flow[a ^ 1] -= &d;
            v = tail(a);
        }
        total += d;
    }
}

struct CutCandidate {
    side: Vec<VertexId>,
    rhs: u32,
    violation: Rational,
}

/// A violated cut found by separation: the smaller side, the right-hand side
/// of its constraint, and the amount by which x falls short.
#[derive(Debug, Clone)]
pub struct CutViolation {
    pub side: Vec<VertexId>,
    pub rhs: u32,
    pub violation: Rational,
}

/// Most-violated tour cut under weights x, or None when every cut carries
/// at least 2. The reported side realizes the global minimum cut.
pub fn separate_tour(g: &Graph, x: &[Rational]) -> Option<CutViolation> {
    separate(g, x, LpMode::Tour).map(|c| CutViolation {
        side: c.side,
        rhs: c.rhs,
        violation: c.violation,
    })
}

/// Walk-mode separation: checks both-or-neither cuts against 2 and
/// endpoint-separating cuts against 1, returning the larger violation.
pub fn separate_path(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    x: &[Rational],
) -> Option<CutViolation> {
    separate(g, x, LpMode::Path { s, t }).map(|c| CutViolation {
        side: c.side,
        rhs: c.rhs,
        violation: c.violation,
    })
}

fn separate(g: &Graph, x: &[Rational], mode: LpMode) -> Option<CutCandidate> {
    match mode {
        LpMode::Tour => {
            let (val, side) = global_min_cut(g, x);
            let two = rat_int(2);
            (val < two).then(|| CutCandidate {
                side,
                rhs: 2,
                violation: two - val,
            })
        }
        LpMode::Path { s, t } => {
            let mut best: Option<CutCandidate> = None;
            if g.vertex_count() >= 3 {
                let (val, side) = contracted_min_cut(g, x, s, t);
                let two = rat_int(2);
                if val < two {
                    best = Some(CutCandidate {
                        side,
                        rhs: 2,
                        violation: two - val,
                    });
                }
            }
            let (val, side) = min_st_cut(g, x, s, t);
            let one = rat_int(1);
            if val < one {
                let cand = CutCandidate {
                    side,
                    rhs: 1,
                    violation: one - val,
                };
                // Equal violations keep the both-or-neither cut found above.
                let replace = match &best {
                    None => true,
                    Some(b) => cand.violation > b.violation,
                };
                if replace {
                    best = Some(cand);
                }
            }
            best
        }
    }
}

pub fn solve_lp(g: &Graph, mode: LpMode) -> Result<LpSolution, LpError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(LpError::InvalidInput(format!(
            "need at least 2 vertices, got {}",
            n
        )));
    }
    if let LpMode::Path { s, t } = mode {
        if s >= n || t >= n {
            return Err(LpError::InvalidInput(format!(
                "endpoint out of range: s={} t={} n={}",
                s, t, n
            )));
        }
        if s == t {
            return Err(LpError::InvalidInput("walk endpoints coincide".into()));
        }
    }
    if !g.is_connected() {
        return Err(LpError::Disconnected);
    }
    let m = g.edge_count();
    let mut sx = PackingSimplex::new(m);
    let mut cuts = Vec::new();
    for v in 0..n {
        let rhs = match mode {
            LpMode::Tour => 2,
            LpMode::Path { s, t } => {
                if v == s || v == t {
                    1
                } else {
                    2
                }
            }
        };
        let crossing: Vec<EdgeId> = g.adj(v).iter().map(|&(_, e)| e).collect();
        sx.add_cut_column(&crossing, rhs);
        cuts.push(CutRecord { side: vec![v], rhs });
    }
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        assert!(rounds < 100_000, "cutting-plane loop failed to terminate");
        sx.optimize();
        let x = sx.primal_x();
        match separate(g, &x, mode) {
            None => {
                let value = sx.zval.clone();
                let check: Rational = x.iter().cloned().sum();
                assert_eq!(check, value, "duality gap at termination");
                return Ok(LpSolution {
                    mode,
                    x,
                    value,
                    is_vertex: true,
                    cuts,
                });
            }
            Some(c) => {
                let crossing = cut_edges(g, &c.side);
                assert!(!crossing.is_empty(), "cut of a connected graph crosses an edge");
                sx.add_cut_column(&crossing, c.rhs);
                cuts.push(CutRecord {
                    side: c.side,
                    rhs: c.rhs,
                });
            }
        }
    }
}

/// Subgraph of the positive-x edges, with a new-to-old edge id map.
/// Re-solves on the support and checks the optimum is unchanged; tour mode
/// also checks the extreme-point support bound 2n - 1.
pub fn support_graph(g: &Graph, sol: &LpSolution) -> Result<(Graph, Vec<EdgeId>), LpError> {
    let keep: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| !sol.x[e].is_zero()).collect();
    let (sub, map) = g.edge_subgraph(&keep);
    if sol.mode == LpMode::Tour {
        assert!(
            sub.edge_count() <= 2 * g.vertex_count() - 1,
            "extreme-point support has at most 2n-1 edges"
        );
    }
    let re = solve_lp(&sub, sol.mode)?;
    assert_eq!(re.value, sol.value, "support subgraph must preserve the optimum");
    Ok((sub, map))
}
