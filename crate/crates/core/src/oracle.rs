//! Exact brute-force decision by pruned enumeration of all 2-layer
//! drawings, plus deterministic graph generators. This is the ground-truth
//! oracle for the solver and the fallback for constant-size instances.
//!
//! Search strategy: enumerate the X-order with the both-layer reversal
//! symmetry broken (first X-vertex canonically smaller than the last); for
//! each X-order, build the Y-order left to right. Once both Y endpoints of
//! two edges are placed their crossing status is final, so a prefix is
//! pruned as soon as the partial drawing stops being fan-planar or some
//! edge exceeds the cap.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::drawing::TwoLayerDrawing;
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Limits on the enumeration. Exceeding a limit aborts with a distinct
/// outcome, never a wrong answer.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    /// Search-tree node limit (one node per attempted Y placement).
    pub max_nodes: u64,
    /// Optional wall-clock limit.
    pub max_elapsed: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 50_000_000, max_elapsed: None }
    }
}

impl SearchBudget {
    pub fn with_max_nodes(max_nodes: u64) -> Self {
        SearchBudget { max_nodes, max_elapsed: None }
    }
}

#[derive(Debug, Clone)]
pub enum OracleOutcome {
    Yes(TwoLayerDrawing),
    No,
    BudgetExceeded,
}

impl OracleOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, OracleOutcome::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, OracleOutcome::No)
    }
}

struct Shared {
    nodes: AtomicU64,
    stop: AtomicBool,
    budget_hit: AtomicBool,
    /// Index of the best (smallest) X-permutation with a witness so far;
    /// lets other branches stop early without changing the decision.
    best_idx: AtomicUsize,
    start: Instant,
}

struct Searcher<'g> {
    g: &'g BipartiteGraph,
    k_cap: Option<u32>,
    budget: &'g SearchBudget,
    shared: &'g Shared,
    /// position per vertex index on its layer; usize::MAX when unplaced
    pos: Vec<usize>,
    /// edges grouped by Y endpoint: (edge index, x vertex index)
    edges_by_y: Vec<Vec<(usize, u32)>>,
    /// crossing lists per edge index (indices of crossing edges)
    cross: Vec<Vec<usize>>,
    /// edges whose Y endpoint is already placed
    placed_edges: Vec<usize>,
    y_prefix: Vec<u32>,
    y_rest: Vec<u32>,
}

enum Search {
    Found(Vec<u32>),
    Exhausted,
    Budget,
}

struct Undo {
    v: u32,
    new_edges: Vec<(usize, u32)>,
    touched: Vec<usize>,
}

impl<'g> Searcher<'g> {
    fn new(g: &'g BipartiteGraph, k_cap: Option<u32>, budget: &'g SearchBudget, shared: &'g Shared) -> Self {
        let m = g.num_edges();
        let mut edges_by_y: Vec<Vec<(usize, u32)>> = vec![Vec::new(); g.num_vertices()];
        for (i, &(x, y)) in g.edge_indices().iter().enumerate() {
            edges_by_y[y as usize].push((i, x));
        }
        Searcher {
            g,
            k_cap,
            budget,
            shared,
            pos: vec![usize::MAX; g.num_vertices()],
            edges_by_y,
            cross: vec![Vec::new(); m],
            placed_edges: Vec::with_capacity(m),
            y_prefix: Vec::new(),
            y_rest: Vec::new(),
        }
    }

    fn tick(&self) -> bool {
        let n = self.shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.budget.max_nodes {
            self.shared.budget_hit.store(true, Ordering::Relaxed);
            return false;
        }
        if n % 1024 == 0 {
            if let Some(limit) = self.budget.max_elapsed {
                if self.shared.start.elapsed() > limit {
                    self.shared.budget_hit.store(true, Ordering::Relaxed);
                    return false;
                }
            }
        }
        true
    }

    /// True if every updated edge still satisfies the cap and fan condition.
    fn edge_ok(&self, e: usize) -> bool {
        let list = &self.cross[e];
        if let Some(k) = self.k_cap {
            if list.len() as u32 > k {
                return false;
            }
        }
        if list.len() <= 1 {
            return true;
        }
        // a common end vertex, if any, is an endpoint of the first edge
        let ends = self.g.edge_indices();
        let (a, b) = ends[list[0]];
        let mut a_ok = true;
        let mut b_ok = true;
        for &f in &list[1..] {
            let (xf, yf) = ends[f];
            a_ok = a_ok && (a == xf || a == yf);
            b_ok = b_ok && (b == xf || b == yf);
            if !a_ok && !b_ok {
                return false;
            }
        }
        true
    }

    /// Place Y-vertex `v` at the next position. Returns the undo log, or
    /// None (with no side effects left behind) if the prefix is pruned.
    fn place(&mut self, v: u32) -> Option<Undo> {
        let p = self.y_prefix.len();
        self.pos[v as usize] = p;
        self.y_prefix.push(v);
        let new_edges = self.edges_by_y[v as usize].clone();
        let placed_before = self.placed_edges.len();
        let mut touched: Vec<usize> = Vec::new();
        for &(e, x) in &new_edges {
            let px = self.pos[x as usize];
            // every edge placed in an earlier round has a smaller Y
            // position, so the pair crosses iff its X position is greater;
            // edges sharing the Y vertex placed now never cross
            for fi in 0..placed_before {
                let f = self.placed_edges[fi];
                let (fx, _) = self.g.edge_indices()[f];
                if self.pos[fx as usize] > px {
                    self.cross[e].push(f);
                    self.cross[f].push(e);
                    touched.push(f);
                }
            }
            self.placed_edges.push(e);
        }
        let undo = Undo { v, new_edges, touched };
        let ok = undo.new_edges.iter().all(|&(e, _)| self.edge_ok(e))
            && undo.touched.iter().all(|&f| self.edge_ok(f));
        if ok {
            Some(undo)
        } else {
            self.unplace(undo);
            None
        }
    }

    fn unplace(&mut self, undo: Undo) {
        for &f in undo.touched.iter().rev() {
            self.cross[f].pop();
        }
        for &(e, _) in undo.new_edges.iter().rev() {
            self.placed_edges.pop();
            self.cross[e].clear();
        }
        self.y_prefix.pop();
        self.pos[undo.v as usize] = usize::MAX;
    }

    fn dfs(&mut self) -> Search {
        if self.y_rest.is_empty() {
            return Search::Found(self.y_prefix.clone());
        }
        if self.shared.stop.load(Ordering::Relaxed) {
            return Search::Exhausted;
        }
        for i in 0..self.y_rest.len() {
            let v = self.y_rest[i];
            if !self.tick() {
                return Search::Budget;
            }
            let Some(undo) = self.place(v) else {
                continue;
            };
            self.y_rest.remove(i);
            let sub = self.dfs();
            self.y_rest.insert(i, v);
            self.unplace(undo);
            match sub {
                Search::Found(y) => return Search::Found(y),
                Search::Budget => return Search::Budget,
                Search::Exhausted => {}
            }
        }
        Search::Exhausted
    }

    fn search_sigma_x(&mut self, sigma_x: &[u32], y_sorted: &[u32]) -> Search {
        for (p, &x) in sigma_x.iter().enumerate() {
            self.pos[x as usize] = p;
        }
        self.y_prefix.clear();
        self.y_rest = y_sorted.to_vec();
        let r = self.dfs();
        for &x in sigma_x {
            self.pos[x as usize] = usize::MAX;
        }
        r
    }
}

/// Indices sorted canonically (by id).
fn canonical(g: &BipartiteGraph, idx: &[u32]) -> Vec<u32> {
    let mut v = idx.to_vec();
    v.sort_by(|&a, &b| g.id_of(a).cmp(g.id_of(b)));
    v
}

/// All permutations of `items` in lexicographic (by id) order, with the
/// reversal symmetry broken: first < last canonically when there are at
/// least two items.
fn sigma_x_candidates(g: &BipartiteGraph) -> Vec<Vec<u32>> {
    let items = canonical(g, g.x_indices());
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(items.len());
    let mut used = vec![false; items.len()];
    fn rec(
        items: &[u32],
        used: &mut [bool],
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        g: &BipartiteGraph,
    ) {
        if cur.len() == items.len() {
            if items.len() < 2 || g.id_of(cur[0]) < g.id_of(*cur.last().unwrap()) {
                out.push(cur.clone());
            }
            return;
        }
        for i in 0..items.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            cur.push(items[i]);
            rec(items, used, cur, out, g);
            cur.pop();
            used[i] = false;
        }
    }
    rec(&items, &mut used, &mut cur, &mut out, g);
    out
}

/// Decide by exhaustive search whether `g` has a 2-layer fan-planar drawing
/// (with at most `k_cap` crossings per edge when supplied).
pub fn decide_bruteforce(g: &Arc<BipartiteGraph>, k_cap: Option<u32>, budget: &SearchBudget) -> OracleOutcome {
    decide_bruteforce_counted(g, k_cap, budget, 1).0
}

/// As `decide_bruteforce`, additionally reporting search-tree nodes and
/// supporting multi-threaded exploration of independent X-order branches.
/// The decision is independent of the thread count; the certificate is the
/// one from the canonically first X-order branch.
pub fn decide_bruteforce_counted(
    g: &Arc<BipartiteGraph>,
    k_cap: Option<u32>,
    budget: &SearchBudget,
    threads: usize,
) -> (OracleOutcome, u64) {
    let shared = Shared {
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        budget_hit: AtomicBool::new(false),
        best_idx: AtomicUsize::new(usize::MAX),
        start: Instant::now(),
    };
    let sigmas = sigma_x_candidates(g);
    let y_sorted = canonical(g, g.y_indices());

    let run_range = |lo: usize, hi: usize| -> Option<(usize, Vec<u32>, Vec<u32>)> {
        let mut s = Searcher::new(g, k_cap, budget, &shared);
        for i in lo..hi {
            if shared.best_idx.load(Ordering::Relaxed) < i || shared.stop.load(Ordering::Relaxed) {
                return None;
            }
            match s.search_sigma_x(&sigmas[i], &y_sorted) {
                Search::Found(y) => {
                    shared.best_idx.fetch_min(i, Ordering::Relaxed);
                    return Some((i, sigmas[i].clone(), y));
                }
                Search::Budget => {
                    shared.stop.store(true, Ordering::Relaxed);
                    return None;
                }
                Search::Exhausted => {}
            }
        }
        None
    };

    let mut found: Option<(usize, Vec<u32>, Vec<u32>)> = None;
    if threads <= 1 || sigmas.len() <= 1 {
        found = run_range(0, sigmas.len());
    } else {
        let nthreads = threads.min(sigmas.len());
        let chunk = sigmas.len().div_ceil(nthreads);
        let results: Vec<Option<(usize, Vec<u32>, Vec<u32>)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..nthreads)
                .map(|t| {
                    let run = &run_range;
                    let lo = t * chunk;
                    let hi = ((t + 1) * chunk).min(sigmas.len());
                    scope.spawn(move || run(lo, hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("oracle worker")).collect()
        });
        for r in results.into_iter().flatten() {
            if found.as_ref().map_or(true, |(best, _, _)| r.0 < *best) {
                found = Some(r);
            }
        }
    }

    let nodes = shared.nodes.load(Ordering::Relaxed);
    if let Some((_, xs, ys)) = found {
        let d = TwoLayerDrawing::from_indices(Arc::clone(g), xs, ys);
        let rep = d.verify(k_cap);
        debug_assert!(rep.fan_planar && rep.within_k.unwrap_or(true));
        (OracleOutcome::Yes(d), nodes)
    } else if shared.budget_hit.load(Ordering::Relaxed) {
        (OracleOutcome::BudgetExceeded, nodes)
    } else {
        (OracleOutcome::No, nodes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinKOutcome {
    Value(u32),
    NotFanPlanar,
    BudgetExceeded,
}

/// Smallest k such that `g` has a fan-planar k-planar drawing, or
/// `NotFanPlanar` when no fan-planar drawing exists at all. Fan-planar
/// drawings of a max-degree-d graph are d-planar, so k <= max degree
/// whenever the answer exists.
pub fn min_k(g: &Arc<BipartiteGraph>, budget: &SearchBudget) -> MinKOutcome {
    for k in 0..=g.max_degree() as u32 {
        match decide_bruteforce(g, Some(k), budget) {
            OracleOutcome::Yes(_) => return MinKOutcome::Value(k),
            OracleOutcome::BudgetExceeded => return MinKOutcome::BudgetExceeded,
            OracleOutcome::No => {}
        }
    }
    MinKOutcome::NotFanPlanar
}

// --- generators ------------------------------------------------------------

/// Minimal 64-bit linear congruential generator (Knuth/MMIX multiplier
/// 6364136223846793005 and increment 1442695040888963407); the high 31 bits
/// feed the modulus. Fixed here so generated instances are identical across
/// platforms and releases.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.state
    }

    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        (self.next_u64() >> 33) % n
    }
}

fn vertex_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Deterministic random bipartite graph: `m` distinct edges drawn by a
/// seeded partial Fisher-Yates shuffle over all nx*ny candidate pairs.
pub fn random_graph(nx: usize, ny: usize, m: usize, seed: u64) -> Result<BipartiteGraph> {
    if m > nx * ny {
        return Err(Error::InvalidParameter(format!("m={m} exceeds nx*ny={}", nx * ny)));
    }
    let xs = vertex_names("x", nx);
    let ys = vertex_names("y", ny);
    let mut pairs: Vec<(usize, usize)> =
        (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
    let mut rng = Lcg::new(seed);
    let total = pairs.len();
    for i in 0..m {
        let j = i + rng.below((total - i) as u64) as usize;
        pairs.swap(i, j);
    }
    let edges: Vec<(String, String)> =
        pairs[..m].iter().map(|&(i, j)| (xs[i].clone(), ys[j].clone())).collect();
    BipartiteGraph::new(xs, ys, edges)
}

/// Every labeled bipartite graph with exactly nx X-vertices and ny
/// Y-vertices, one per edge subset, in mask order.
pub fn exhaustive_graphs(nx: usize, ny: usize) -> impl Iterator<Item = BipartiteGraph> {
    let xs = vertex_names("x", nx);
    let ys = vertex_names("y", ny);
    let total = nx * ny;
    assert!(total < 64, "exhaustive enumeration limited to fewer than 64 candidate edges");
    (0u64..(1u64 << total)).map(move |mask| {
        let edges: Vec<(String, String)> = (0..total)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| (xs[b / ny].clone(), ys[b % ny].clone()))
            .collect();
        BipartiteGraph::new(xs.clone(), ys.clone(), edges).expect("generated graph is valid")
    })
}

/// No-pruning enumeration of all |X|! * |Y|! drawings; the independent
/// oracle for the pruned search. Test-only.
#[cfg(test)]
pub(crate) fn naive_decide(g: &Arc<BipartiteGraph>, k_cap: Option<u32>) -> bool {
    fn perms(items: &[u32]) -> Vec<Vec<u32>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let v = rest.remove(i);
            for mut p in perms(&rest) {
                p.insert(0, v);
                out.push(p);
            }
        }
        out
    }
    let xs: Vec<u32> = g.x_indices().to_vec();
    let ys: Vec<u32> = g.y_indices().to_vec();
    for px in perms(&xs) {
        for py in perms(&ys) {
            let d = TwoLayerDrawing::from_indices(Arc::clone(g), px.clone(), py);
            let r = d.verify(k_cap);
            if r.fan_planar && r.within_k.unwrap_or(true) {
                return true;
            }
        }
    }
    false
}
