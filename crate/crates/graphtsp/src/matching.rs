//! Maximum-weight matching in general graphs (blossom / primal-dual method)
//! and a deterministic minimum-weight perfect matching built on top of it.
//!
//! The solver follows the classic O(n^3) structure: trivial blossoms are the
//! vertices, non-trivial blossoms take ids n..2n, edge endpoint p belongs to
//! edge p/2, and vertex duals are stored doubled so every quantity stays an
//! integer. The optimality certificate (nonnegative slack everywhere, tight
//! matched edges, full blossoms with positive duals) is re-checked after
//! every solve.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

pub type Weight = i64;

const SENTINEL: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
}

struct Blossom {
    nvertex: usize,
    edges: Vec<(usize, usize, Weight)>,
    maxcardinality: bool,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<usize>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Vec<usize>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<Weight>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Blossom {
    fn new(nvertex: usize, edges: Vec<(usize, usize, Weight)>, maxcardinality: bool) -> Self {
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let endpoint = (0..2 * nedge)
            .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
            .collect();
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut blossombase: Vec<usize> = (0..nvertex).collect();
        blossombase.extend(vec![SENTINEL; nvertex]);
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(vec![0; nvertex]);
        Blossom {
            nvertex,
            edges,
            maxcardinality,
            endpoint,
            neighbend,
            mate: vec![SENTINEL; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![SENTINEL; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![SENTINEL; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase,
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![SENTINEL; 2 * nvertex],
            blossombestedges: vec![Vec::new(); 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    // Doubled slack of edge k; meaningless for edges inside a blossom.
    fn slack(&self, k: usize) -> Weight {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * wt
    }

    fn blossom_leaves(&self, b: usize) -> Vec<usize> {
        let mut leaves = Vec::new();
        if b < self.nvertex {
            leaves.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                if t < self.nvertex {
                    leaves.push(t);
                } else {
                    leaves.extend(self.blossom_leaves(t));
                }
            }
        }
        leaves
    }

    // Label the top-level blossom of w: 1 makes it an S-blossom whose leaves
    // join the scan queue, 2 makes it a T-blossom and pushes S across its
    // matched edge. p is the remote endpoint the label arrived through.
    fn assign_label(&mut self, w: usize, t: usize, p: usize) {
        let b = self.inblossom[w];
        assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = SENTINEL;
        self.bestedge[b] = SENTINEL;
        if t == 1 {
            let leaves = self.blossom_leaves(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            let base = self.blossombase[b];
            assert!(self.mate[base] != SENTINEL);
            let mbase = self.mate[base];
            let ep = self.endpoint[mbase];
            self.assign_label(ep, 1, mbase ^ 1);
        }
    }

    // Walk the alternating trees up from both ends of an S-S edge. Meeting
    // point means a new blossom (return its base); disjoint roots mean an
    // augmenting path (return SENTINEL).
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = SENTINEL;
        let mut v = v;
        let mut w = w;
        while v != SENTINEL || w != SENTINEL {
            let b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            assert!(self.label[b] == 1);
            path.push(b);
            self.label[b] = 5;
            assert!(self.labelend[b] == self.mate[self.blossombase[b]]);
            if self.labelend[b] == SENTINEL {
                v = SENTINEL;
            } else {
                v = self.endpoint[self.labelend[b]];
                let b = self.inblossom[v];
                assert!(self.label[b] == 2);
                assert!(self.labelend[b] != SENTINEL);
                v = self.endpoint[self.labelend[b]];
            }
            if w != SENTINEL {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    // Fold the odd cycle through edge k (S-S) with the given base into a new
    // S-blossom, absorbing labels and least-slack bookkeeping.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().unwrap();
        self.blossombase[b] = base;
        self.blossomparent[b] = SENTINEL;
        self.blossomparent[bb] = b;
        self.blossomchilds[b] = Vec::new();
        self.blossomendps[b] = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            self.blossomchilds[b].push(bv);
            self.blossomendps[b].push(self.labelend[bv]);
            assert!(
                self.label[bv] == 2
                    || (self.label[bv] == 1
                        && self.labelend[bv] == self.mate[self.blossombase[bv]])
            );
            assert!(self.labelend[bv] != SENTINEL);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        self.blossomchilds[b].push(bb);
        self.blossomchilds[b].reverse();
        self.blossomendps[b].reverse();
        self.blossomendps[b].push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            self.blossomchilds[b].push(bw);
            self.blossomendps[b].push(self.labelend[bw] ^ 1);
            assert!(
                self.label[bw] == 2
                    || (self.label[bw] == 1
                        && self.labelend[bw] == self.mate[self.blossombase[bw]])
            );
            assert!(self.labelend[bw] != SENTINEL);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        assert!(self.label[bb] == 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        for v in self.blossom_leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }
        // Merge least-slack edge lists of the children.
        let mut bestedgeto = vec![SENTINEL; 2 * self.nvertex];
        for bv in self.blossomchilds[b].clone() {
            let nblists: Vec<Vec<usize>> = if self.blossombestedges[bv].is_empty() {
                self.blossom_leaves(bv)
                    .into_iter()
                    .map(|v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect()
            } else {
                vec![self.blossombestedges[bv].clone()]
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == SENTINEL
                            || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.blossombestedges[bv] = Vec::new();
            self.bestedge[bv] = SENTINEL;
        }
        self.blossombestedges[b] = bestedgeto.into_iter().filter(|&k| k != SENTINEL).collect();
        self.bestedge[b] = SENTINEL;
        for k in self.blossombestedges[b].clone() {
            if self.bestedge[b] == SENTINEL || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
    }

    // Dissolve a top-level blossom whose dual hit zero. During a stage the
    // T-side sub-blossoms must be relabeled by walking the even-length arc
    // from the entry child to the base.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        for s in self.blossomchilds[b].clone() {
            self.blossomparent[s] = SENTINEL;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.blossom_leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            assert!(self.labelend[b] != SENTINEL);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = self.blossomchilds[b]
                .iter()
                .position(|&r| r == entrychild)
                .unwrap() as i64;
            let jstep: i64;
            let endptrick: usize;
            if j & 1 != 0 {
                j -= self.blossomchilds[b].len() as i64;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = pni(&self.blossomendps[b], j - endptrick as i64) ^ endptrick ^ 1;
                self.label[self.endpoint[q]] = 0;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, 2, p);
                self.allowedge[pni(&self.blossomendps[b], j - endptrick as i64) / 2] = true;
                j += jstep;
                p = pni(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = pni(&self.blossomchilds[b], j);
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = SENTINEL;
            j += jstep;
            while pni(&self.blossomchilds[b], j) != entrychild {
                let bv = pni(&self.blossomchilds[b], j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut v = SENTINEL;
                for leaf in self.blossom_leaves(bv) {
                    v = leaf;
                    if self.label[v] != 0 {
                        break;
                    }
                }
                if self.label[v] != 0 {
                    assert!(self.label[v] == 2);
                    assert!(self.inblossom[v] == bv);
                    self.label[v] = 0;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = 0;
                    let lblend = self.labelend[v];
                    self.assign_label(v, 2, lblend);
                }
                j += jstep;
            }
        }
        self.label[b] = SENTINEL;
        self.labelend[b] = SENTINEL;
        self.blossombase[b] = SENTINEL;
        self.bestedge[b] = SENTINEL;
        self.blossomchilds[b] = Vec::new();
        self.blossomendps[b] = Vec::new();
        self.blossombestedges[b] = Vec::new();
        self.unusedblossoms.push(b);
    }

    // Swap matched and unmatched edges along the even-length arc from v to
    // the base of blossom b, then rotate the child list so v's child becomes
    // the base.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let i = self.blossomchilds[b].iter().position(|&r| r == t).unwrap();
        let mut j = i as i64;
        let jstep: i64;
        let endptrick: usize;
        if i & 1 != 0 {
            j -= self.blossomchilds[b].len() as i64;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        while j != 0 {
            j += jstep;
            let mut t = pni(&self.blossomchilds[b], j);
            let p = pni(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
            if t >= self.nvertex {
                let ep = self.endpoint[p];
                self.augment_blossom(t, ep);
            }
            j += jstep;
            t = pni(&self.blossomchilds[b], j);
            if t >= self.nvertex {
                let ep = self.endpoint[p ^ 1];
                self.augment_blossom(t, ep);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        assert!(self.blossombase[b] == v);
    }

    // Flip the matching along the augmenting path through S-S edge k.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                assert!(self.label[bs] == 1);
                assert!(self.labelend[bs] == self.mate[self.blossombase[bs]]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == SENTINEL {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                assert!(self.label[bt] == 2);
                assert!(self.labelend[bt] != SENTINEL);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                assert!(self.blossombase[bt] == t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    // Complementary-slackness certificate for the final matching.
    fn verify_optimum(&self) {
        let vdualoffset = if self.maxcardinality {
            0.max(-self.dualvar[..self.nvertex].iter().min().copied().unwrap_or(0))
        } else {
            0
        };
        assert!(
            self.dualvar[..self.nvertex]
                .iter()
                .min()
                .map_or(true, |&d| d + vdualoffset >= 0)
        );
        assert!(self.dualvar[self.nvertex..].iter().min().map_or(true, |&d| d >= 0));
        for k in 0..self.edges.len() {
            let (i, j, wt) = self.edges[k];
            let mut s = self.dualvar[i] + self.dualvar[j] - 2 * wt;
            let mut iblossoms = vec![i];
            let mut jblossoms = vec![j];
            while self.blossomparent[*iblossoms.last().unwrap()] != SENTINEL {
                iblossoms.push(self.blossomparent[*iblossoms.last().unwrap()]);
            }
            while self.blossomparent[*jblossoms.last().unwrap()] != SENTINEL {
                jblossoms.push(self.blossomparent[*jblossoms.last().unwrap()]);
            }
            iblossoms.reverse();
            jblossoms.reverse();
            for (&bi, &bj) in iblossoms.iter().zip(jblossoms.iter()) {
                if bi != bj {
                    break;
                }
                s += 2 * self.dualvar[bi];
            }
            assert!(s >= 0);
            if self.mate[i] / 2 == k || self.mate[j] / 2 == k {
                assert!(self.mate[i] / 2 == k && self.mate[j] / 2 == k);
                assert!(s == 0);
            }
        }
        for v in 0..self.nvertex {
            assert!(self.mate[v] != SENTINEL || self.dualvar[v] + vdualoffset == 0);
        }
        for b in self.nvertex..2 * self.nvertex {
            if self.blossomparent[b] == SENTINEL
                && self.blossombase[b] != SENTINEL
                && self.dualvar[b] > 0
            {
                assert!(self.blossomendps[b].len() % 2 == 1);
                for (ix, &p) in self.blossomendps[b].iter().enumerate() {
                    if ix % 2 == 1 {
                        assert!(self.mate[self.endpoint[p]] == p ^ 1);
                        assert!(self.mate[self.endpoint[p ^ 1]] == p);
                    }
                }
            }
        }
    }

    fn solve(&mut self) -> Vec<usize> {
        if self.edges.is_empty() {
            return vec![SENTINEL; self.nvertex];
        }
        for _stage in 0..self.nvertex {
            self.label = vec![0; 2 * self.nvertex];
            self.bestedge = vec![SENTINEL; 2 * self.nvertex];
            for b in self.nvertex..2 * self.nvertex {
                self.blossombestedges[b] = Vec::new();
            }
            self.allowedge = vec![false; self.edges.len()];
            self.queue = Vec::new();
            for v in 0..self.nvertex {
                if self.mate[v] == SENTINEL && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, SENTINEL);
                }
            }
            let mut augmented = false;
            loop {
                while !self.queue.is_empty() && !augmented {
                    let v = self.queue.pop().unwrap();
                    assert!(self.label[self.inblossom[v]] == 1);
                    for p in self.neighbend[v].clone() {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != SENTINEL {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                assert!(self.label[self.inblossom[w]] == 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == SENTINEL
                                || kslack < self.slack(self.bestedge[b])
                            {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == SENTINEL
                                || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }
                // No augmenting path with the current tight edges: compute
                // the largest safe dual step.
                let mut deltatype = -1i32;
                let mut delta: Weight = 0;
                let mut deltaedge = 0usize;
                let mut deltablossom = 0usize;
                if !self.maxcardinality {
                    deltatype = 1;
                    delta = *self.dualvar[..self.nvertex].iter().min().unwrap();
                }
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != SENTINEL {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == SENTINEL
                        && self.label[b] == 1
                        && self.bestedge[b] != SENTINEL
                    {
                        let d = self.slack(self.bestedge[b]) / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != SENTINEL
                        && self.blossomparent[b] == SENTINEL
                        && self.label[b] == 2
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    // Only possible in max-cardinality mode: settle duals for
                    // the certificate and stop.
                    assert!(self.maxcardinality);
                    deltatype = 1;
                    delta = 0.max(*self.dualvar[..self.nvertex].iter().min().unwrap());
                }
                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        0 => {}
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => unreachable!("bad top-level label"),
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != SENTINEL && self.blossomparent[b] == SENTINEL {
                        match self.label[b] {
                            0 => {}
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => unreachable!("bad blossom label"),
                        }
                    }
                }
                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        assert!(self.label[self.inblossom[i]] == 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        assert!(self.label[self.inblossom[i]] == 1);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    _ => unreachable!("bad delta type"),
                }
            }
            if !augmented {
                break;
            }
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == SENTINEL
                    && self.blossombase[b] != SENTINEL
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
        self.verify_optimum();
        let mut mate = vec![SENTINEL; self.nvertex];
        for v in 0..self.nvertex {
            if self.mate[v] != SENTINEL {
                mate[v] = self.endpoint[self.mate[v]];
            }
        }
        for v in 0..self.nvertex {
            assert!(mate[v] == SENTINEL || mate[mate[v]] == v);
        }
        mate
    }
}

// Python-style index: negative wraps from the back.
fn pni(v: &[usize], index: i64) -> usize {
    if index >= 0 {
        v[index as usize]
    } else {
        v[v.len() - (-index) as usize]
    }
}

fn validate(n: usize, edges: &[(VertexId, VertexId, Weight)]) -> Result<(), MatchError> {
    let mut seen = HashMap::new();
    for &(i, j, _) in edges {
        if i >= n || j >= n {
            return Err(MatchError::InvalidInput(format!(
                "edge ({}, {}) out of range for n = {}",
                i, j, n
            )));
        }
        if i == j {
            return Err(MatchError::InvalidInput(format!("self-loop at {}", i)));
        }
        if seen.insert((i.min(j), i.max(j)), ()).is_some() {
            return Err(MatchError::InvalidInput(format!(
                "duplicate edge ({}, {})",
                i.min(j),
                i.max(j)
            )));
        }
    }
    Ok(())
}

/// Maximum-weight matching; with `maxcardinality` only maximum-cardinality
/// matchings compete. Returns the partner per vertex.
pub fn max_weight_matching(
    n: usize,
    edges: &[(VertexId, VertexId, Weight)],
    maxcardinality: bool,
) -> Result<Vec<Option<VertexId>>, MatchError> {
    validate(n, edges)?;
    let mate = Blossom::new(n, edges.to_vec(), maxcardinality).solve();
    Ok(mate
        .into_iter()
        .map(|m| if m == SENTINEL { None } else { Some(m) })
        .collect())
}

// Min-weight perfect matching on the listed vertices/edges (original ids),
// by negating weights and demanding maximum cardinality. None if no perfect
// matching exists.
fn min_pm_raw(
    vids: &[VertexId],
    eids: &[EdgeId],
    edges: &[(VertexId, VertexId)],
    w: &[Weight],
) -> Option<(Weight, Vec<EdgeId>)> {
    if vids.is_empty() {
        return Some((0, Vec::new()));
    }
    if vids.len() % 2 != 0 {
        return None;
    }
    let mut pos = HashMap::new();
    for (i, &v) in vids.iter().enumerate() {
        pos.insert(v, i);
    }
    let local: Vec<(usize, usize, Weight)> = eids
        .iter()
        .map(|&e| {
            let (u, v) = edges[e];
            (pos[&u], pos[&v], -w[e])
        })
        .collect();
    let mut pair_to_eid = HashMap::new();
    for (idx, &(i, j, _)) in local.iter().enumerate() {
        pair_to_eid.insert((i.min(j), i.max(j)), eids[idx]);
    }
    let mate = Blossom::new(vids.len(), local, true).solve();
    if mate.iter().any(|&m| m == SENTINEL) {
        return None;
    }
    let mut out = Vec::new();
    let mut total = 0;
    for (i, &m) in mate.iter().enumerate() {
        if i < m {
            let e = pair_to_eid[&(i, m)];
            out.push(e);
            total += w[e];
        }
    }
    out.sort_unstable();
    Some((total, out))
}

/// Minimum-weight perfect matching as sorted edge ids. On small inputs,
/// among all optimal matchings, returns the one whose sorted edge-id list
/// is lexicographically smallest, by greedily fixing edges in id order: an
/// edge is kept exactly when some optimal matching extends the kept set
/// through it. Larger inputs skip the fixing pass (it re-solves once per
/// edge) and return the single blossom solution, which is equally
/// deterministic.
pub fn min_weight_perfect_matching(
    n: usize,
    edges: &[(VertexId, VertexId)],
    w: &[Weight],
) -> Result<Vec<EdgeId>, MatchError> {
    if w.len() != edges.len() {
        return Err(MatchError::InvalidInput(format!(
            "{} weights for {} edges",
            w.len(),
            edges.len()
        )));
    }
    let with_w: Vec<(usize, usize, Weight)> =
        edges.iter().map(|&(u, v)| (u, v, 0)).collect();
    validate(n, &with_w)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let all_v: Vec<usize> = (0..n).collect();
    let all_e: Vec<usize> = (0..edges.len()).collect();
    let (best, mut witness) =
        min_pm_raw(&all_v, &all_e, edges, w).ok_or(MatchError::NoPerfectMatching)?;
    if edges.len() > 60 {
        return Ok(witness);
    }

    let mut covered = vec![false; n];
    let mut deleted = vec![false; edges.len()];
    let mut fixed: Vec<EdgeId> = Vec::new();
    let mut fixed_weight: Weight = 0;
    for e in 0..edges.len() {
        let (u, v) = edges[e];
        if deleted[e] || covered[u] || covered[v] {
            continue;
        }
        if witness.contains(&e) {
            fixed.push(e);
            fixed_weight += w[e];
            covered[u] = true;
            covered[v] = true;
            continue;
        }
        // Try forcing e: solve the rest without u, v.
        let sub_v: Vec<usize> = (0..n).filter(|&x| !covered[x] && x != u && x != v).collect();
        let sub_e: Vec<usize> = (0..edges.len())
            .filter(|&f| {
                let (a, b) = edges[f];
                f != e
                    && !deleted[f]
                    && !covered[a]
                    && !covered[b]
                    && a != u
                    && a != v
                    && b != u
                    && b != v
            })
            .collect();
        match min_pm_raw(&sub_v, &sub_e, edges, w) {
            Some((rest, rest_match)) if fixed_weight + w[e] + rest == best => {
                fixed.push(e);
                fixed_weight += w[e];
                covered[u] = true;
                covered[v] = true;
                witness = fixed.clone();
                witness.extend(rest_match);
            }
            _ => deleted[e] = true,
        }
    }
    assert_eq!(fixed_weight, best, "greedy fixing must preserve the optimum");
    assert!(covered.iter().all(|&c| c), "fixed edges must cover all vertices");
    Ok(fixed)
}

/// The one-third bound: a min-weight perfect matching of a bridgeless cubic
/// graph weighs at most a third of the total, because the all-1/3 vector
/// lies in the perfect matching polytope.
pub fn third_bound_check(w: &[Weight], matched: &[EdgeId]) -> bool {
    let total: Weight = w.iter().sum();
    let m: Weight = matched.iter().map(|&e| w[e]).sum();
    3 * m <= total
}
