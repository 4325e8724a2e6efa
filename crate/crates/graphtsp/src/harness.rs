//! Instance generators, brute-force oracles, and the benchmark driver.

use crate::graph::{is_two_vertex_connected, Graph, GraphError, Multigraph, VertexId};
use crate::lp::{rat_int, Rational};
use crate::pipeline::{tsp_path, tsp_tour, AlgTag};
use num::{BigInt, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// The oracle never runs above this many vertices, whatever cutoff the
/// caller asks for.
pub const ORACLE_HARD_CAP: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Invalid(String),
    #[error("oracle limited to {cap} vertices, got {n}")]
    OracleTooLarge { n: usize, cap: usize },
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Three parallel paths of k edges whose left ends form a triangle and
/// whose right ends form another: 3k + 3 vertices, 3k + 6 edges, cubic at
/// the corners, and the walk ratio against the relaxation grows toward 4/3
/// with k. Vertex j of path i is i * (k + 1) + j.
pub fn gen_gap_tour(k: usize) -> Graph {
    assert!(k >= 1, "the family starts at k = 1");
    let n = 3 * (k + 1);
    let id = |i: usize, j: usize| i * (k + 1) + j;
    let mut es = Vec::with_capacity(3 * k + 6);
    for i in 0..3 {
        for j in 0..k {
            es.push((id(i, j), id(i, j + 1)));
        }
    }
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        es.push((id(a, 0), id(b, 0)));
        es.push((id(a, k), id(b, k)));
    }
    let g = Graph::from_edges(n, &es).expect("family edges are simple");
    debug_assert_eq!(g.edge_count(), 3 * k + 6);
    debug_assert!(g.max_degree() <= 3);
    debug_assert!(is_two_vertex_connected(&g));
    g
}

/// The same graph with walk endpoints at the midpoints of two different
/// paths, which puts them near the far ends of the structure and forces
/// extra doubling.
pub fn gen_gap_path(k: usize) -> (Graph, VertexId, VertexId) {
    let g = gen_gap_tour(k);
    let s = k / 2;
    let t = (k + 1) + k / 2;
    (g, s, t)
}

/// Random 2-vertex-connected graph with exactly n vertices and m edges:
/// a cycle, open ears until every vertex is placed, then chords. Requires
/// n <= m <= n(n-1)/2.
pub fn gen_random_2vc(n: usize, m: usize, seed: u64) -> Result<Graph, HarnessError> {
    if n < 3 {
        return Err(HarnessError::Invalid(format!("need n >= 3, got {}", n)));
    }
    if m < n || m > n * (n - 1) / 2 {
        return Err(HarnessError::Invalid(format!(
            "edge budget {} outside [{}, {}]",
            m,
            n,
            n * (n - 1) / 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // every ear consumes one edge beyond its new vertices, so the number
    // of ears is capped by the slack m - n
    let max_ears = m - n;
    let c = if max_ears == 0 { n } else { rng.gen_range(3..=n) };
    let mut es: Vec<(VertexId, VertexId)> = (0..c).map(|i| (i, (i + 1) % c)).collect();
    let mut placed = c;
    let mut ears = 0usize;
    while placed < n {
        let ears_left = max_ears - ears;
        let remaining = n - placed;
        let cnt = if ears_left == 1 {
            remaining
        } else {
            rng.gen_range(1..=remaining.min(3))
        };
        let u = rng.gen_range(0..placed);
        let v = loop {
            let v = rng.gen_range(0..placed);
            if v != u {
                break v;
            }
        };
        let mut prev = u;
        for w in placed..placed + cnt {
            es.push((prev, w));
            prev = w;
        }
        es.push((prev, v));
        placed += cnt;
        ears += 1;
    }
    let mut g = Graph::from_edges(n, &es)?;
    let mut misses = 0usize;
    'chords: while g.edge_count() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || g.has_edge(u, v) {
            misses += 1;
            if misses > 10_000 {
                // dense graphs: stop sampling and take missing pairs in order
                for a in 0..n {
                    for b in a + 1..n {
                        if !g.has_edge(a, b) {
                            g.add_edge(a, b)?;
                            if g.edge_count() == m {
                                break 'chords;
                            }
                        }
                    }
                }
                break 'chords;
            }
            continue;
        }
        g.add_edge(u, v)?;
    }
    assert_eq!(g.edge_count(), m);
    assert!(is_two_vertex_connected(&g), "ear construction is 2-connected");
    Ok(g)
}

/// Random simple 2-connected cubic graph on even n >= 4 vertices: pair up
/// three stubs per vertex and resample until the result is simple and
/// 2-connected.
pub fn gen_random_cubic(n: usize, seed: u64) -> Result<Graph, HarnessError> {
    if n < 4 || n % 2 != 0 {
        return Err(HarnessError::Invalid(format!("cubic graphs need even n >= 4, got {}", n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..100_000 {
        let mut stubs: Vec<VertexId> = (0..n).flat_map(|v| [v, v, v]).collect();
        for i in (1..stubs.len()).rev() {
            let j = rng.gen_range(0..=i);
            stubs.swap(i, j);
        }
        let mut have = vec![false; n * n];
        let mut es = Vec::with_capacity(3 * n / 2);
        for p in stubs.chunks(2) {
            let (a, b) = (p[0], p[1]);
            if a == b || have[a * n + b] {
                continue 'attempt;
            }
            have[a * n + b] = true;
            have[b * n + a] = true;
            es.push((a, b));
        }
        let g = Graph::from_edges(n, &es)?;
        if is_two_vertex_connected(&g) {
            return Ok(g);
        }
    }
    Err(HarnessError::Invalid("no simple 2-connected pairing found".into()))
}

/// a x b grid, vertex (r, c) at r * b + c.
pub fn gen_grid(a: usize, b: usize) -> Result<Graph, HarnessError> {
    if a == 0 || b == 0 {
        return Err(HarnessError::Invalid("grid sides must be positive".into()));
    }
    let mut g = Graph::new(a * b);
    for r in 0..a {
        for c in 0..b {
            if c + 1 < b {
                g.add_edge(r * b + c, r * b + c + 1)?;
            }
            if r + 1 < a {
                g.add_edge(r * b + c, (r + 1) * b + c)?;
            }
        }
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

fn oracle_guard(g: &Graph, cutoff: usize) -> Result<usize, HarnessError> {
    let n = g.vertex_count();
    let cap = cutoff.min(ORACLE_HARD_CAP);
    if n > cap {
        return Err(HarnessError::OracleTooLarge { n, cap });
    }
    if n == 0 {
        return Err(HarnessError::Invalid("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(HarnessError::Invalid("disconnected input".into()));
    }
    Ok(n)
}

fn metric_closure(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    (0..n)
        .map(|v| {
            g.bfs(v)
                .dist
                .iter()
                .map(|d| d.expect("connected"))
                .collect()
        })
        .collect()
}

/// Subset DP over visit orders: dp[mask][v] is the cheapest hop count of a
/// walk that starts at `start`, has visited `mask`, and sits at v. Returns
/// the table and predecessor choices.
fn order_dp(d: &[Vec<usize>], start: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = d.len();
    let full = 1usize << n;
    let mut dp = vec![vec![usize::MAX; n]; full];
    let mut pre = vec![vec![usize::MAX; n]; full];
    dp[1 << start][start] = 0;
    for mask in 1..full {
        if mask & (1 << start) == 0 {
            continue;
        }
        for v in 0..n {
            let cur = dp[mask][v];
            if cur == usize::MAX {
                continue;
            }
            for w in 0..n {
                if mask & (1 << w) != 0 {
                    continue;
                }
                let nm = mask | (1 << w);
                let nd = cur + d[v][w];
                if nd < dp[nm][w] {
                    dp[nm][w] = nd;
                    pre[nm][w] = v;
                }
            }
        }
    }
    (dp, pre)
}

fn rebuild_order(pre: &[Vec<usize>], start: usize, end: usize, n: usize) -> Vec<VertexId> {
    let mut order = vec![end];
    let mut mask = (1usize << n) - 1;
    let mut v = end;
    while v != start || mask != (1 << start) {
        let p = pre[mask][v];
        mask &= !(1 << v);
        v = p;
        order.push(v);
    }
    order.reverse();
    order
}

/// Optimal closed-walk edge count: vertex orders under the hop metric are
/// exactly the closed spanning walks.
pub fn oracle_opt_tour(g: &Graph, cutoff: usize) -> Result<usize, HarnessError> {
    let n = oracle_guard(g, cutoff)?;
    if n == 1 {
        return Ok(0);
    }
    let d = metric_closure(g);
    let (dp, _) = order_dp(&d, 0);
    let full = (1usize << n) - 1;
    Ok((1..n).map(|v| dp[full][v] + d[v][0]).min().expect("n >= 2"))
}

/// Optimal s-t walk edge count; coinciding endpoints give the tour value.
pub fn oracle_opt_path(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    cutoff: usize,
) -> Result<usize, HarnessError> {
    let n = oracle_guard(g, cutoff)?;
    if s >= n || t >= n {
        return Err(HarnessError::Invalid("endpoints out of range".into()));
    }
    if s == t {
        return oracle_opt_tour(g, cutoff);
    }
    let d = metric_closure(g);
    let (dp, _) = order_dp(&d, s);
    Ok(dp[(1usize << n) - 1][t])
}

fn realize_order(g: &Graph, order: &[VertexId], close: bool) -> Multigraph {
    let mut mg = Multigraph::new(g.vertex_count());
    let mut hops: Vec<(VertexId, VertexId)> =
        order.windows(2).map(|w| (w[0], w[1])).collect();
    if close {
        hops.push((order[order.len() - 1], order[0]));
    }
    for (u, v) in hops {
        let bt = g.bfs(u);
        for e in bt.path_to(v).expect("connected") {
            let (a, b) = g.endpoints(e);
            mg.add(a, b, 1);
        }
    }
    mg
}

/// Oracle walk realized as an edge multiset: successive order vertices are
/// joined by shortest paths, so the count matches the DP value and the odd
/// degrees sit exactly at the endpoints.
pub fn oracle_path_multigraph(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    cutoff: usize,
) -> Result<(usize, Multigraph), HarnessError> {
    let n = oracle_guard(g, cutoff)?;
    if s >= n || t >= n {
        return Err(HarnessError::Invalid("endpoints out of range".into()));
    }
    if n == 1 {
        return Ok((0, Multigraph::new(1)));
    }
    let d = metric_closure(g);
    let (dp, pre) = order_dp(&d, s);
    let full = (1usize << n) - 1;
    let (count, end) = if s == t {
        (0..n)
            .filter(|&v| v != s)
            .map(|v| (dp[full][v] + d[v][s], v))
            .min()
            .expect("n >= 2")
    } else {
        (dp[full][t], t)
    };
    let order = rebuild_order(&pre, s, end, n);
    let mg = realize_order(g, &order, s == t);
    assert_eq!(mg.edge_count(), count, "realized walk matches the DP value");
    assert!(mg.is_spanning_connected());
    if s == t {
        assert!(mg.odd_vertices().is_empty());
    } else {
        let mut st = vec![s, t];
        st.sort_unstable();
        assert_eq!(mg.odd_vertices(), st);
    }
    Ok((count, mg))
}

// ---------------------------------------------------------------------------
// Benchmark corpus
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum Family {
    GapTour { k: usize },
    GapPath { k: usize },
    RandomCubic { n: usize, seed: u64 },
    Random2vc { n: usize, m: usize, seed: u64 },
    Grid { a: usize, b: usize },
    File { path: String },
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::GapTour { .. } => "gap_tour",
            Family::GapPath { .. } => "gap_path",
            Family::RandomCubic { .. } => "random_cubic",
            Family::Random2vc { .. } => "random_2vc",
            Family::Grid { .. } => "grid",
            Family::File { .. } => "file",
        }
    }

    pub fn instance_id(&self) -> String {
        match self {
            Family::GapTour { k } => format!("gap_tour_k{}", k),
            Family::GapPath { k } => format!("gap_path_k{}", k),
            Family::RandomCubic { n, seed } => format!("random_cubic_n{}_s{}", n, seed),
            Family::Random2vc { n, m, seed } => format!("random_2vc_n{}_m{}_s{}", n, m, seed),
            Family::Grid { a, b } => format!("grid_{}x{}", a, b),
            Family::File { path } => path.replace([',', '\n', '\r'], ";"),
        }
    }

    /// The graph and, for walk families, its endpoints.
    pub fn build(&self) -> Result<(Graph, Option<(VertexId, VertexId)>), HarnessError> {
        match self {
            Family::GapTour { k } => {
                if *k == 0 {
                    return Err(HarnessError::Invalid("gap families start at k = 1".into()));
                }
                Ok((gen_gap_tour(*k), None))
            }
            Family::GapPath { k } => {
                if *k == 0 {
                    return Err(HarnessError::Invalid("gap families start at k = 1".into()));
                }
                let (g, s, t) = gen_gap_path(*k);
                Ok((g, Some((s, t))))
            }
            Family::RandomCubic { n, seed } => Ok((gen_random_cubic(*n, *seed)?, None)),
            Family::Random2vc { n, m, seed } => Ok((gen_random_2vc(*n, *m, *seed)?, None)),
            Family::Grid { a, b } => Ok((gen_grid(*a, *b)?, None)),
            Family::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| HarnessError::Invalid(format!("{}: {}", path, e)))?;
                Ok((Graph::parse(&text)?, None))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub family: Family,
}

impl InstanceSpec {
    /// One spec per line, `#` starts a comment: `gap-tour K`, `gap-path K`,
    /// `random-cubic N SEED`, `random-2vc N M SEED`, `grid A B`, `file PATH`.
    pub fn parse(line: &str) -> Result<Option<InstanceSpec>, HarnessError> {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            return Ok(None);
        }
        let w: Vec<&str> = line.split_whitespace().collect();
        let arg = |i: usize| -> Result<usize, HarnessError> {
            w.get(i)
                .ok_or_else(|| HarnessError::Invalid(format!("missing argument in {:?}", line)))?
                .parse()
                .map_err(|_| HarnessError::Invalid(format!("bad number in {:?}", line)))
        };
        let seed = |i: usize| -> Result<u64, HarnessError> {
            w.get(i)
                .ok_or_else(|| HarnessError::Invalid(format!("missing seed in {:?}", line)))?
                .parse()
                .map_err(|_| HarnessError::Invalid(format!("bad seed in {:?}", line)))
        };
        let family = match w[0] {
            "gap-tour" => Family::GapTour { k: arg(1)? },
            "gap-path" => Family::GapPath { k: arg(1)? },
            "random-cubic" => Family::RandomCubic { n: arg(1)?, seed: seed(2)? },
            "random-2vc" => Family::Random2vc { n: arg(1)?, m: arg(2)?, seed: seed(3)? },
            "grid" => Family::Grid { a: arg(1)?, b: arg(2)? },
            "file" => Family::File {
                path: w
                    .get(1)
                    .ok_or_else(|| HarnessError::Invalid("file spec needs a path".into()))?
                    .to_string(),
            },
            other => {
                return Err(HarnessError::Invalid(format!("unknown family {:?}", other)));
            }
        };
        Ok(Some(InstanceSpec { family }))
    }

    pub fn parse_corpus(text: &str) -> Result<Vec<InstanceSpec>, HarnessError> {
        let mut specs = Vec::new();
        for line in text.lines() {
            if let Some(s) = InstanceSpec::parse(line)? {
                specs.push(s);
            }
        }
        Ok(specs)
    }
}

pub const BENCH_HEADER: &str = "instance,family,n,m,maxdeg,olp_num,olp_den,opt,ms_edges,christofides_edges,best_edges,circ_cost,ratio_best_over_olp,chosen,err,runtime_ms";

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub instance: String,
    pub family: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub maxdeg: Option<usize>,
    pub olp: Option<Rational>,
    pub opt: Option<usize>,
    pub ms_edges: Option<usize>,
    pub christofides_edges: Option<usize>,
    pub best_edges: Option<usize>,
    pub circ_cost: Option<i64>,
    pub ratio_best_over_olp: Option<Rational>,
    pub chosen: Option<AlgTag>,
    pub err: Option<String>,
    pub runtime_ms: u128,
}

/// Exact decimal rendering of a nonnegative rational, truncated after six
/// fractional digits.
fn decimal6(r: &Rational) -> String {
    assert!(r >= &Rational::zero(), "ratios are nonnegative");
    let scaled: BigInt = r.numer() * BigInt::from(1_000_000u32) / r.denom();
    let s = scaled.to_string();
    if s.len() <= 6 {
        format!("0.{:0>6}", s)
    } else {
        format!("{}.{}", &s[..s.len() - 6], &s[s.len() - 6..])
    }
}

impl BenchRow {
    fn optional<T: std::fmt::Display>(v: &Option<T>) -> String {
        v.as_ref().map_or_else(String::new, T::to_string)
    }

    pub fn to_csv(&self) -> String {
        let (olp_num, olp_den) = match &self.olp {
            Some(o) => (o.numer().to_string(), o.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let err = self
            .err
            .as_ref()
            .map_or_else(String::new, |e| e.replace([',', '\n', '\r'], ";"));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.instance,
            self.family,
            Self::optional(&self.n),
            Self::optional(&self.m),
            Self::optional(&self.maxdeg),
            olp_num,
            olp_den,
            Self::optional(&self.opt),
            Self::optional(&self.ms_edges),
            Self::optional(&self.christofides_edges),
            Self::optional(&self.best_edges),
            Self::optional(&self.circ_cost),
            self.ratio_best_over_olp
                .as_ref()
                .map_or_else(String::new, decimal6),
            self.chosen.map_or_else(String::new, |c| c.as_str().to_string()),
            err,
            self.runtime_ms
        )
    }
}

fn solve_one(family: &Family, oracle_cutoff: usize) -> BenchRow {
    let mut row = BenchRow {
        instance: family.instance_id(),
        family: family.label().to_string(),
        n: None,
        m: None,
        maxdeg: None,
        olp: None,
        opt: None,
        ms_edges: None,
        christofides_edges: None,
        best_edges: None,
        circ_cost: None,
        ratio_best_over_olp: None,
        chosen: None,
        err: None,
        runtime_ms: 0,
    };
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<BenchRow, String> {
        let mut row = row.clone();
        let (g, st) = family.build().map_err(|e| e.to_string())?;
        let n = g.vertex_count();
        row.n = Some(n);
        row.m = Some(g.edge_count());
        row.maxdeg = Some(g.max_degree());
        let oracle_ok = n <= oracle_cutoff.min(ORACLE_HARD_CAP);
        let (olp, best, chosen) = match st {
            None => {
                let sol = tsp_tour(&g).map_err(|e| e.to_string())?;
                row.ms_edges = sol.certificate.main_edges;
                row.christofides_edges = sol.certificate.christofides_edges;
                row.circ_cost = sol.certificate.circulation_cost;
                if oracle_ok {
                    row.opt = Some(oracle_opt_tour(&g, ORACLE_HARD_CAP).map_err(|e| e.to_string())?);
                }
                (sol.certificate.olp.clone(), sol.edge_count, sol.certificate.chosen)
            }
            Some((s, t)) => {
                let sol = tsp_path(&g, s, t, oracle_cutoff).map_err(|e| e.to_string())?;
                row.ms_edges = sol.certificate.main_edges;
                row.circ_cost = sol.certificate.circulation_cost;
                if oracle_ok {
                    row.opt =
                        Some(oracle_opt_path(&g, s, t, ORACLE_HARD_CAP).map_err(|e| e.to_string())?);
                }
                (sol.certificate.olp.clone(), sol.edge_count, sol.certificate.chosen)
            }
        };
        row.best_edges = Some(best);
        row.chosen = Some(chosen);
        if olp > Rational::zero() {
            row.ratio_best_over_olp = Some(rat_int(best as i64) / &olp);
        }
        if let Some(opt) = row.opt {
            if olp > rat_int(opt as i64) {
                return Err(format!("lower bound {} above the optimum {}", olp, opt));
            }
            if best < opt {
                return Err(format!("result {} below the optimum {}", best, opt));
            }
        }
        row.olp = Some(olp);
        Ok(row)
    }));
    match outcome {
        Ok(Ok(filled)) => row = filled,
        Ok(Err(msg)) => row.err = Some(msg),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            row.err = Some(format!("panic: {}", msg));
        }
    }
    row.runtime_ms = started.elapsed().as_millis();
    row
}

/// Solve every spec (a small thread pool works through them), then write
/// the CSV in spec order. Failures land in the err column; the run always
/// completes.
pub fn bench(
    specs: &[InstanceSpec],
    out: &mut dyn Write,
    oracle_cutoff: usize,
    workers: usize,
) -> std::io::Result<Vec<BenchRow>> {
    let slots: Mutex<Vec<Option<BenchRow>>> = Mutex::new(specs.iter().map(|_| None).collect());
    let next = AtomicUsize::new(0);
    // solver assertions abort only their own row, so silence the default
    // panic printer for the duration
    let prev_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    std::thread::scope(|sc| {
        for _ in 0..workers.clamp(1, specs.len().max(1)) {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= specs.len() {
                    break;
                }
                let row = solve_one(&specs[i].family, oracle_cutoff);
                slots.lock().expect("no poisoned rows")[i] = Some(row);
            });
        }
    });
    std::panic::set_hook(prev_hook);
    let rows: Vec<BenchRow> = slots
        .into_inner()
        .expect("no poisoned rows")
        .into_iter()
        .map(|r| r.expect("every spec solved"))
        .collect();
    writeln!(out, "{}", BENCH_HEADER)?;
    for r in &rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    out.flush()?;
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Self test
// ---------------------------------------------------------------------------

fn fixed_graph(name: &str) -> (Graph, usize) {
    // (graph, known optimal closed walk count)
    match name {
        "cycle5" => (
            Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap(),
            5,
        ),
        "diamond" => (
            Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap(),
            4,
        ),
        "bowtie" => (
            Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]).unwrap(),
            6,
        ),
        "k4" => (Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap(), 4),
        _ => unreachable!("unknown fixture"),
    }
}

/// Invariant sweep over a small fixed corpus; writes one line per check
/// and stops at the first violation.
pub fn selftest(out: &mut dyn Write) -> Result<(), String> {
    let mut say = |line: &str| -> Result<(), String> {
        writeln!(out, "{}", line).map_err(|e| e.to_string())
    };
    for name in ["cycle5", "diamond", "bowtie", "k4"] {
        let (g, opt) = fixed_graph(name);
        let sol = tsp_tour(&g).map_err(|e| format!("{}: {}", name, e))?;
        if sol.edge_count != opt {
            return Err(format!("{}: expected {} edges, got {}", name, opt, sol.edge_count));
        }
        let oc = oracle_opt_tour(&g, ORACLE_HARD_CAP).map_err(|e| e.to_string())?;
        if oc != opt {
            return Err(format!("{}: oracle disagrees ({} vs {})", name, oc, opt));
        }
        say(&format!("ok tour {} = {}", name, opt))?;
    }
    for k in 1..=3usize {
        let g = gen_gap_tour(k);
        let sol = tsp_tour(&g).map_err(|e| format!("gap_tour {}: {}", k, e))?;
        let n = g.vertex_count() as i64;
        if 3 * sol.edge_count as i64 > 4 * n - 2 {
            return Err(format!("gap_tour {}: above the subcubic ceiling", k));
        }
        if g.vertex_count() <= ORACLE_HARD_CAP {
            let oc = oracle_opt_tour(&g, ORACLE_HARD_CAP).map_err(|e| e.to_string())?;
            if sol.edge_count < oc {
                return Err(format!("gap_tour {}: below the optimum", k));
            }
        }
        say(&format!("ok gap_tour k={} edges={}", k, sol.edge_count))?;
    }
    for seed in 0..4u64 {
        let g = gen_random_2vc(9, 13, seed).map_err(|e| e.to_string())?;
        let sol = tsp_tour(&g).map_err(|e| format!("random seed {}: {}", seed, e))?;
        let oc = oracle_opt_tour(&g, ORACLE_HARD_CAP).map_err(|e| e.to_string())?;
        if sol.edge_count < oc {
            return Err(format!("random seed {}: result below the optimum", seed));
        }
        say(&format!("ok random_2vc seed={} edges={} opt={}", seed, sol.edge_count, oc))?;
    }
    let g = gen_random_cubic(10, 1).map_err(|e| e.to_string())?;
    let sol = tsp_tour(&g).map_err(|e| e.to_string())?;
    say(&format!("ok random_cubic n=10 edges={}", sol.edge_count))?;
    let (g, s, t) = gen_gap_path(2);
    let sol = tsp_path(&g, s, t, 0).map_err(|e| e.to_string())?;
    let oc = oracle_opt_path(&g, s, t, ORACLE_HARD_CAP).map_err(|e| e.to_string())?;
    if sol.edge_count < oc {
        return Err("gap_path 2: result below the optimum".into());
    }
    say(&format!("ok gap_path k=2 edges={} opt={}", sol.edge_count, oc))?;
    // the two route ceilings stay within 2% of each other near the ratio
    // where they cross
    let n = 1000usize;
    for num in 10_250..=10_550usize {
        let olp = crate::lp::rat(num as i64, 10_000) * rat_int(n as i64);
        let a = crate::pipeline::machinery_route_bound(n, &olp);
        let b = crate::pipeline::tree_route_bound(n, &olp);
        let hi = if a >= b { a.clone() } else { b.clone() };
        let diff = if a >= b { &a - &b } else { &b - &a };
        if diff * rat_int(50) > hi {
            return Err(format!("route bounds drift apart at olp/n = {}/10000", num));
        }
    }
    say("ok crossover window")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn petersen() -> Graph {
        let mut es = Vec::new();
        for i in 0..5 {
            es.push((i, (i + 1) % 5));
            es.push((i, i + 5));
            es.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &es).unwrap()
    }

    /// Reference brute force over visit orders (permutations).
    fn perm_opt(g: &Graph, endpoints: Option<(usize, usize)>) -> usize {
        let n = g.vertex_count();
        let d = metric_closure(g);
        let mut verts: Vec<usize> = (0..n).collect();
        let mut best = usize::MAX;
        permute(&mut verts, 0, &mut |p| {
            let cost: usize = match endpoints {
                None => {
                    if p[0] != 0 {
                        return;
                    }
                    p.windows(2).map(|w| d[w[0]][w[1]]).sum::<usize>() + d[p[n - 1]][p[0]]
                }
                Some((s, t)) => {
                    if p[0] != s || p[n - 1] != t {
                        return;
                    }
                    p.windows(2).map(|w| d[w[0]][w[1]]).sum::<usize>()
                }
            };
            best = best.min(cost);
        });
        best
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    /// Minimum over all sub-multisets with multiplicities 0..2 per edge
    /// that span, connect, and have the required parity.
    fn enumerate_min(g: &Graph, endpoints: Option<(usize, usize)>) -> usize {
        let m = g.edge_count();
        let mut best = usize::MAX;
        for code in 0..3usize.pow(m as u32) {
            let mut c = code;
            let mut mg = Multigraph::new(g.vertex_count());
            let mut total = 0;
            for e in 0..m {
                let mult = (c % 3) as u32;
                c /= 3;
                if mult > 0 {
                    let (u, v) = g.endpoints(e);
                    mg.add(u, v, mult);
                    total += mult as usize;
                }
            }
            if total >= best {
                continue;
            }
            let odd = mg.odd_vertices();
            let parity_ok = match endpoints {
                None => odd.is_empty(),
                Some((s, t)) => {
                    let mut st = vec![s, t];
                    st.sort_unstable();
                    odd == st
                }
            };
            if parity_ok && mg.is_spanning_connected() {
                best = total;
            }
        }
        best
    }

    #[test]
    fn gap_family_shape() {
        for k in 1..=6 {
            let g = gen_gap_tour(k);
            assert_eq!(g.vertex_count(), 3 * k + 3);
            assert_eq!(g.edge_count(), 3 * k + 6);
            assert_eq!(g.max_degree(), 3);
            assert!(is_two_vertex_connected(&g));
        }
        let (g, s, t) = gen_gap_path(3);
        assert!(s < g.vertex_count() && t < g.vertex_count() && s != t);
        // endpoints sit on different paths
        assert_eq!(s / 4, 0);
        assert_eq!(t / 4, 1);
    }

    #[test]
    fn gap_tour_known_optima() {
        // k = 1 is the triangular prism, Hamiltonian. Beyond that the best
        // closed walk traverses two paths and one triangle edge on each
        // side as a cycle, then covers the third path by doubling its
        // interior and rounding its far end through two triangle edges:
        // 2k + 2 + 2 + 2(k - 1) = 4k + 2 edges.
        assert_eq!(oracle_opt_tour(&gen_gap_tour(1), 16).unwrap(), 6);
        assert_eq!(oracle_opt_tour(&gen_gap_tour(2), 16).unwrap(), 10);
        assert_eq!(oracle_opt_tour(&gen_gap_tour(3), 16).unwrap(), 14);
    }

    #[test]
    fn random_2vc_shape_and_determinism() {
        for (n, m, seed) in [(6, 8, 0u64), (9, 9, 3), (9, 18, 5), (12, 20, 9), (5, 10, 2)] {
            let g = gen_random_2vc(n, m, seed).unwrap();
            assert_eq!(g.vertex_count(), n);
            assert_eq!(g.edge_count(), m);
            assert!(is_two_vertex_connected(&g));
            let h = gen_random_2vc(n, m, seed).unwrap();
            assert_eq!(g.edges(), h.edges(), "same seed, same graph");
        }
        assert!(gen_random_2vc(6, 5, 0).is_err());
        assert!(gen_random_2vc(6, 16, 0).is_err());
        assert!(gen_random_2vc(2, 2, 0).is_err());
    }

    #[test]
    fn random_cubic_shape() {
        for (n, seed) in [(4usize, 0u64), (6, 1), (10, 7), (14, 3)] {
            let g = gen_random_cubic(n, seed).unwrap();
            assert_eq!(g.vertex_count(), n);
            assert_eq!(g.edge_count(), 3 * n / 2);
            assert_eq!(g.max_degree(), 3);
            assert!((0..n).all(|v| g.degree(v) == 3));
            assert!(is_two_vertex_connected(&g));
            let h = gen_random_cubic(n, seed).unwrap();
            assert_eq!(g.edges(), h.edges());
        }
        assert!(gen_random_cubic(5, 0).is_err());
        assert!(gen_random_cubic(2, 0).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = gen_grid(3, 3).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 12);
        assert!(is_two_vertex_connected(&g));
    }

    #[test]
    fn oracle_agrees_with_permutation_search() {
        let fixtures: Vec<(Graph, &str)> = vec![
            (fixed_graph("cycle5").0, "cycle5"),
            (fixed_graph("diamond").0, "diamond"),
            (fixed_graph("bowtie").0, "bowtie"),
            (fixed_graph("k4").0, "k4"),
            (gen_random_2vc(7, 10, 11).unwrap(), "random7"),
            (gen_random_2vc(8, 11, 4).unwrap(), "random8"),
        ];
        for (g, name) in &fixtures {
            assert_eq!(
                oracle_opt_tour(g, 16).unwrap(),
                perm_opt(g, None),
                "tour oracle mismatch on {}",
                name
            );
            let n = g.vertex_count();
            for (s, t) in [(0, n - 1), (1, n - 2)] {
                assert_eq!(
                    oracle_opt_path(g, s, t, 16).unwrap(),
                    perm_opt(g, Some((s, t))),
                    "path oracle mismatch on {} ({}, {})",
                    name,
                    s,
                    t
                );
            }
        }
    }

    #[test]
    fn oracle_agrees_with_multiset_enumeration() {
        let fixtures = [
            fixed_graph("cycle5").0,
            fixed_graph("diamond").0,
            fixed_graph("bowtie").0,
            fixed_graph("k4").0,
            Graph::from_edges(5, &[(0, 2), (0, 3), (1, 2), (1, 3), (1, 4), (2, 4)]).unwrap(),
            gen_gap_tour(1),
            gen_gap_tour(2),
        ];
        for g in &fixtures {
            assert_eq!(oracle_opt_tour(g, 16).unwrap(), enumerate_min(g, None));
            let n = g.vertex_count();
            assert_eq!(
                oracle_opt_path(g, 0, n - 1, 16).unwrap(),
                enumerate_min(g, Some((0, n - 1)))
            );
        }
    }

    #[test]
    fn oracle_walk_realization_matches_the_value() {
        for (g, s, t) in [
            (fixed_graph("bowtie").0, 0, 4),
            (fixed_graph("diamond").0, 0, 3),
            (gen_gap_tour(1), 0, 5),
            (fixed_graph("cycle5").0, 2, 2),
        ] {
            let (count, mg) = oracle_path_multigraph(&g, s, t, 16).unwrap();
            assert_eq!(count, oracle_opt_path(&g, s, t, 16).unwrap());
            assert_eq!(mg.edge_count(), count);
        }
    }

    #[test]
    fn oracle_respects_the_cutoff() {
        let g = gen_gap_tour(5);
        assert!(g.vertex_count() > 16);
        assert!(matches!(
            oracle_opt_tour(&g, 16),
            Err(HarnessError::OracleTooLarge { .. })
        ));
        assert!(matches!(
            oracle_opt_tour(&petersen(), 8),
            Err(HarnessError::OracleTooLarge { .. })
        ));
        assert!(oracle_opt_tour(&petersen(), 16).is_ok());
    }

    #[test]
    fn spec_lines_round_trip() {
        let text = "# corpus\ngap-tour 3\ngap-path 2\nrandom-cubic 8 5\nrandom-2vc 9 14 7\ngrid 3 4\n\n";
        let specs = InstanceSpec::parse_corpus(text).unwrap();
        assert_eq!(specs.len(), 5);
        assert_eq!(specs[0].family.instance_id(), "gap_tour_k3");
        assert_eq!(specs[3].family.label(), "random_2vc");
        assert!(InstanceSpec::parse("next-family 3").is_err());
        assert!(InstanceSpec::parse("gap-tour x").is_err());
        assert!(InstanceSpec::parse("   # only a comment").unwrap().is_none());
    }

    #[test]
    fn bench_writes_rows_in_spec_order() {
        let specs = InstanceSpec::parse_corpus(
            "gap-tour 2\nrandom-2vc 8 12 1\ngap-path 1\nrandom-2vc 4 3 0\n",
        )
        .unwrap();
        let mut out = Vec::new();
        let rows = bench(&specs, &mut out, 12, 2).unwrap();
        assert_eq!(rows.len(), 4);
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(BENCH_HEADER));
        assert_eq!(lines.clone().count(), 4);
        for line in lines {
            assert_eq!(line.split(',').count(), 16, "row has all CSV fields: {}", line);
        }
        assert_eq!(rows[0].instance, "gap_tour_k2");
        assert_eq!(rows[0].best_edges, Some(11));
        assert_eq!(rows[0].opt, Some(10));
        assert!(rows[0].err.is_none());
        assert!(rows[1].err.is_none());
        assert!(rows[2].err.is_none());
        // the bad edge budget lands in the err column without aborting
        assert!(rows[3].err.is_some());
        assert!(rows[3].best_edges.is_none());
    }

    #[test]
    fn decimal_rendering_is_truncated_exact() {
        assert_eq!(decimal6(&crate::lp::rat(4, 3)), "1.333333");
        assert_eq!(decimal6(&crate::lp::rat(1, 2)), "0.500000");
        assert_eq!(decimal6(&rat_int(2)), "2.000000");
        assert_eq!(decimal6(&crate::lp::rat(1, 1_000_000)), "0.000001");
    }

    #[test]
    fn selftest_passes() {
        let mut out = Vec::new();
        selftest(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().count() >= 10);
        assert!(text.lines().all(|l| l.starts_with("ok ")));
    }
}
