//! Window dynamic program and the end-to-end decision pipeline.
//!
//! `DpState` is the recursion unit: a window of 2k+1 X-vertices, a drawing
//! of its closed neighborhood, a crossing budget per boundary edge, and the
//! components still to be drawn to the left. `decide_dp` answers whether a
//! connected graph admits a fan-planar k-planar 2-layer drawing; `decide`
//! wraps it with reductions, early rejection, per-component dispatch and
//! certificate lifting.

mod engine;

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::drawing::TwoLayerDrawing;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Edge, VertexSet};
use crate::oracle::{decide_bruteforce_counted, OracleOutcome, SearchBudget};
use crate::reduction::{apply_reductions, early_reject, lift_drawing};

pub use engine::DpBudget;

use engine::{canonical_idx, delta_edges, permutations, subsets, successor_structs, Engine, WinKey};

/// A state of the recursion: window S (the X-vertices of `drawing`), a
/// k-planar fan-planar drawing of G[N[S]], the budget of crossings each
/// boundary edge may still receive in the full drawing, and the components
/// of G - N[S] that remain to be drawn to the left of the window.
#[derive(Debug, Clone)]
pub struct DpState {
    host: Arc<BipartiteGraph>,
    k: u32,
    drawing: TwoLayerDrawing,
    cross_budget: BTreeMap<Edge, u32>,
    left_components: Vec<VertexSet>,
}

impl DpState {
    pub fn new(
        k: u32,
        drawing: TwoLayerDrawing,
        cross_budget: BTreeMap<Edge, u32>,
        left_components: Vec<VertexSet>,
    ) -> Result<Self> {
        let host = Arc::clone(drawing.host());
        let window: VertexSet = drawing.x_order_ids().into_iter().collect();
        if window.len() != 2 * k as usize + 1 {
            return Err(Error::InvalidState(format!(
                "window has {} vertices, expected 2k+1 = {}",
                window.len(),
                2 * k + 1
            )));
        }
        let closed = host.closed_neighborhood(&window)?;
        if drawing.drawn_vertices() != closed {
            return Err(Error::InvalidState(
                "drawing must cover exactly the closed neighborhood of the window".into(),
            ));
        }
        let report = drawing.verify(Some(k));
        if !report.fan_planar || report.within_k != Some(true) {
            return Err(Error::InvalidState("window drawing must be fan-planar and k-planar".into()));
        }
        let delta = host.boundary_edges(&window)?;
        if cross_budget.keys().cloned().collect::<std::collections::BTreeSet<_>>() != delta {
            return Err(Error::InvalidState("cross budget domain must be delta(S)".into()));
        }
        for (e, &chi) in &cross_budget {
            let drawn = report.crossings_per_edge.get(e).copied().unwrap_or(0);
            if chi > k || chi < drawn {
                return Err(Error::InvalidState(format!(
                    "budget {chi} for {{{}, {}}} outside [{drawn}, {k}]",
                    e.x, e.y
                )));
            }
        }
        let comps = host.components_after_removal(&closed)?;
        for c in &left_components {
            if !comps.contains(c) {
                return Err(Error::InvalidState(
                    "left components must each be a component of G - N[S]".into(),
                ));
            }
        }
        let mut left_components = left_components;
        left_components.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
        left_components.dedup();
        Ok(DpState { host, k, drawing, cross_budget, left_components })
    }

    pub fn host(&self) -> &Arc<BipartiteGraph> {
        &self.host
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn window(&self) -> VertexSet {
        self.drawing.x_order_ids().into_iter().collect()
    }

    pub fn window_drawing(&self) -> &TwoLayerDrawing {
        &self.drawing
    }

    pub fn cross_budget(&self) -> &BTreeMap<Edge, u32> {
        &self.cross_budget
    }

    pub fn left_components(&self) -> &[VertexSet] {
        &self.left_components
    }

    fn key(&self) -> WinKey {
        let idx = |id: &str| self.host.idx(id).expect("drawn vertex is in host");
        let mut comps: Vec<Vec<u32>> = self
            .left_components
            .iter()
            .map(|c| {
                let mut v: Vec<u32> = c.iter().map(|id| idx(id)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        comps.sort_by_key(|c| c[0]);
        WinKey {
            x: self.drawing.x_order_idx().to_vec(),
            y: self.drawing.y_order_idx().to_vec(),
            comps,
        }
    }

    /// Budget values in canonical boundary-edge order (ascending edge index
    /// equals the BTreeMap's lexicographic edge order).
    fn chi_vec(&self) -> Vec<u32> {
        self.cross_budget.values().copied().collect()
    }

    /// Base case of the recursion, defined for L = N[S]: the window drawing
    /// is the whole drawing, so every budget must be met exactly.
    pub fn base_case(&self) -> Result<bool> {
        if !self.left_components.is_empty() {
            return Err(Error::InvalidState("base case requires no left components".into()));
        }
        let report = self.drawing.verify(Some(self.k));
        Ok(self
            .cross_budget
            .iter()
            .all(|(e, &chi)| chi == report.crossings_per_edge.get(e).copied().unwrap_or(0)))
    }

    /// All states one window shift to the left: drop v*, pick the new
    /// leftmost window vertex u* from the left part, extend the drawing in
    /// every valid way, transfer budgets on shared boundary edges (minus
    /// the crossings spent on v*'s edges) and enumerate fresh budgets on
    /// u*'s edges.
    pub fn successors(&self) -> Result<Vec<DpState>> {
        if self.left_components.is_empty() {
            return Err(Error::InvalidState("base states have no successors".into()));
        }
        let g = &self.host;
        let key = self.key();
        let v_star = *key.x.last().expect("window is non-empty");
        let window: HashSet<u32> = key.x.iter().copied().collect();
        let delta = delta_edges(g, &window);
        let chi = self.chi_vec();

        // crossings of each boundary edge spent on edges of v*
        let lists = self.drawing.crossing_lists();
        let mut shift: BTreeMap<usize, u32> = BTreeMap::new();
        let mut chi_by_edge: BTreeMap<usize, u32> = BTreeMap::new();
        for (i, &e) in delta.iter().enumerate() {
            let crossers = lists.get(&e).map(Vec::as_slice).unwrap_or(&[]);
            shift.insert(e, crossers.iter().filter(|&&f| g.edge_indices()[f].0 == v_star).count() as u32);
            chi_by_edge.insert(e, chi[i]);
        }

        let mut out = Vec::new();
        'succ: for succ in successor_structs(g, self.k, &key) {
            let d_new = succ.drawing(g);
            let report = d_new.verify(Some(self.k));
            let window_new: HashSet<u32> = succ.x.iter().copied().collect();
            let delta_new = delta_edges(g, &window_new);
            let u_star = succ.x[0];

            let mut fixed: Vec<(usize, u32)> = Vec::new();
            let mut free: Vec<(usize, u32)> = Vec::new(); // (edge, lower bound)
            for &e in &delta_new {
                let edge = edge_at(g, e);
                let drawn = report.crossings_per_edge.get(&edge).copied().unwrap_or(0);
                if g.edge_indices()[e].0 == u_star {
                    free.push((e, drawn));
                } else {
                    let val = chi_by_edge[&e];
                    let spent = shift[&e];
                    if val < spent || val - spent < drawn {
                        continue 'succ;
                    }
                    fixed.push((e, val - spent));
                }
            }

            // enumerate budgets for u*'s edges, lexicographically
            let mut combos: Vec<Vec<(usize, u32)>> = vec![Vec::new()];
            for &(e, lo) in &free {
                let mut next = Vec::new();
                for combo in &combos {
                    for v in lo..=self.k {
                        let mut c = combo.clone();
                        c.push((e, v));
                        next.push(c);
                    }
                }
                combos = next;
            }

            let comps: Vec<VertexSet> = succ
                .comps
                .iter()
                .map(|c| c.iter().map(|&v| g.id_of(v).to_string()).collect())
                .collect();
            for combo in combos {
                let mut budget: BTreeMap<Edge, u32> = BTreeMap::new();
                for &(e, v) in fixed.iter().chain(&combo) {
                    budget.insert(edge_at(g, e), v);
                }
                out.push(DpState::new(self.k, d_new.clone(), budget, comps.clone())?);
            }
        }
        Ok(out)
    }

    /// The recursion's value for this state: true iff some chain of window
    /// shifts reaches a satisfied base case. Memoized through `memo`;
    /// running out of the memo budget surfaces as `Error::BudgetExceeded`.
    pub fn draw_fan_eval(&self, memo: &mut DpMemo) -> Result<bool> {
        if !memo.matches(&self.host, self.k) {
            return Err(Error::InvalidParameter("memo was built for a different graph or k".into()));
        }
        let entry = memo.engine.eval(&self.key())?;
        let chi = self.chi_vec();
        Ok(entry
            .boxes
            .iter()
            .any(|b| chi.iter().zip(b.lo.iter().zip(&b.hi)).all(|(&v, (&lo, &hi))| lo <= v && v <= hi)))
    }
}

fn edge_at(g: &BipartiteGraph, e: usize) -> Edge {
    let (x, y) = g.edge_indices()[e];
    Edge::new(g.id_of(x), g.id_of(y))
}

/// Shared memo table for `draw_fan_eval`, bound to one graph and one k.
pub struct DpMemo {
    engine: Engine,
}

impl DpMemo {
    pub fn new(host: &Arc<BipartiteGraph>, k: u32, budget: DpBudget) -> Self {
        DpMemo { engine: Engine::new(Arc::clone(host), k, budget) }
    }

    fn matches(&self, host: &Arc<BipartiteGraph>, k: u32) -> bool {
        self.engine.k == k && (Arc::ptr_eq(&self.engine.g, host) || self.engine.g == *host)
    }

    /// Number of distinct states evaluated so far.
    pub fn states(&self) -> u64 {
        self.engine.states
    }
}

#[derive(Debug, Clone)]
pub enum DpOutcome {
    Yes(TwoLayerDrawing),
    No,
    BudgetExceeded,
}

impl DpOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, DpOutcome::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, DpOutcome::No)
    }
}

/// Decide whether connected `g` has a fan-planar k-planar 2-layer drawing.
///
/// Preconditions: `g` connected, no isolated vertices, max degree at most
/// 2k+2. Windows need |X| > 2k; smaller graphs fall back to the exhaustive
/// search. A YES comes with a verified drawing.
pub fn decide_dp(g: &Arc<BipartiteGraph>, k: u32, budget: &DpBudget) -> Result<DpOutcome> {
    decide_dp_counted(g, k, budget).map(|(o, _, _)| o)
}

/// As `decide_dp`, also reporting (memoized states, oracle nodes).
pub fn decide_dp_counted(
    g: &Arc<BipartiteGraph>,
    k: u32,
    budget: &DpBudget,
) -> Result<(DpOutcome, u64, u64)> {
    if g.connected_components().len() > 1 {
        return Err(Error::InvalidParameter("decide_dp requires a connected graph".into()));
    }
    if g.vertex_set().iter().any(|v| g.degree(v).unwrap_or(0) == 0) && g.num_vertices() > 1 {
        return Err(Error::InvalidParameter("decide_dp requires no isolated vertices".into()));
    }
    if g.max_degree() > 2 * k as usize + 2 {
        return Err(Error::InvalidParameter(format!(
            "max degree {} exceeds 2k+2 = {}",
            g.max_degree(),
            2 * k + 2
        )));
    }

    if g.num_x() <= 2 * k as usize {
        // too small for a window; the exhaustive search is cheap here
        let ob = SearchBudget { max_nodes: u64::MAX, max_elapsed: budget.max_elapsed };
        let (outcome, nodes) = decide_bruteforce_counted(g, Some(k), &ob, 1);
        let mapped = match outcome {
            OracleOutcome::Yes(d) => DpOutcome::Yes(d),
            OracleOutcome::No => DpOutcome::No,
            OracleOutcome::BudgetExceeded => DpOutcome::BudgetExceeded,
        };
        return Ok((mapped, 0, nodes));
    }

    let mut eng = Engine::new(Arc::clone(g), k, budget.clone());
    let xs = canonical_idx(g, g.x_indices().iter().copied());
    for s in subsets(&xs, 2 * k as usize + 1) {
        let mut removed: Vec<u32> = s.clone();
        let n_s: HashSet<u32> = s.iter().flat_map(|&x| g.adj_at(x).iter().copied()).collect();
        removed.extend(n_s.iter().copied());
        let mut comps = g.components_idx(&removed);
        comps.sort_by_key(|c| c[0]);

        let ys = canonical_idx(g, n_s.iter().copied());
        for x_perm in permutations(&s) {
            for y_order in engine::y_completions(g, &x_perm, &[], &ys, k) {
                let key = WinKey { x: x_perm.clone(), y: y_order, comps: comps.clone() };
                let entry = match eng.eval(&key) {
                    Ok(e) => e,
                    Err(Error::BudgetExceeded(_)) => {
                        return Ok((DpOutcome::BudgetExceeded, eng.states, 0))
                    }
                    Err(e) => return Err(e),
                };
                if entry.boxes.is_empty() {
                    continue;
                }
                let cert = eng.reconstruct(&key, 0)?;
                cert.require_complete()?;
                let report = cert.verify(Some(k));
                if !report.fan_planar || report.within_k != Some(true) {
                    return Err(Error::Internal("reconstructed drawing failed verification".into()));
                }
                return Ok((DpOutcome::Yes(cert), eng.states, 0));
            }
        }
    }
    Ok((DpOutcome::No, eng.states, 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Answer {
    Yes,
    No,
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Trivial,
    BruteForce,
    Dp,
    EarlyReject,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Trivial => "TRIVIAL",
            Method::BruteForce => "BRUTE_FORCE",
            Method::Dp => "DP",
            Method::EarlyReject => "EARLY_REJECT",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct DecideStats {
    pub states: u64,
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub answer: Answer,
    pub method: Method,
    /// Complete fan-planar drawing of the original graph on YES.
    pub certificate: Option<TwoLayerDrawing>,
    pub reason: String,
    /// Largest per-component crossing bound used (max degree of the
    /// reduced component unless overridden). None when no component
    /// reached the solvers.
    pub k_used: Option<u32>,
    pub stats: DecideStats,
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    /// Force the crossing bound instead of using the reduced component's
    /// max degree; this additionally constrains the answer to k-planar
    /// drawings.
    pub k_override: Option<u32>,
    /// Always run the dynamic program, even on tiny components.
    pub force_dp: bool,
    /// Reduced components with at most this many vertices go to the
    /// exhaustive search.
    pub bf_threshold: usize,
    pub dp_budget: DpBudget,
    pub oracle_budget: SearchBudget,
    pub threads: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            k_override: None,
            force_dp: false,
            bf_threshold: 10,
            dp_budget: DpBudget::default(),
            oracle_budget: SearchBudget::default(),
            threads: 1,
        }
    }
}

/// Full decision pipeline: per connected component, reduce, early-reject,
/// pick k = max degree of the reduced component, solve (exhaustively for
/// small components, by the window DP otherwise), lift the drawing back
/// through the reduction trace, and concatenate the component drawings.
/// Components occupy disjoint intervals on both layers, so concatenation
/// cannot introduce crossings.
pub fn decide(g: &Arc<BipartiteGraph>, opts: &DecideOptions) -> Result<Decision> {
    let start = Instant::now();
    let mut stats = DecideStats::default();
    let mut method = Method::Trivial;
    let mut k_used: Option<u32> = None;
    let mut xs_out: Vec<String> = Vec::new();
    let mut ys_out: Vec<String> = Vec::new();

    for comp in g.connected_components() {
        let comp_g = Arc::new(g.induced_subgraph(&comp)?);
        let (red, trace) = apply_reductions(&comp_g);
        let red = Arc::new(red);

        let d_red = if red.num_vertices() <= 2 {
            // at most a single edge: any placement works
            let xs: Vec<&str> = red.x_vertices().collect();
            let ys: Vec<&str> = red.y_vertices().collect();
            TwoLayerDrawing::new(Arc::clone(&red), &xs, &ys)?
        } else {
            if let Some(reason) = early_reject(&red)? {
                stats.elapsed = start.elapsed();
                return Ok(Decision {
                    answer: Answer::No,
                    method: Method::EarlyReject,
                    certificate: None,
                    reason: reason.to_string(),
                    k_used,
                    stats,
                });
            }
            let delta = red.max_degree() as u32;
            let k = opts.k_override.unwrap_or(delta);
            k_used = Some(k_used.map_or(k, |p| p.max(k)));

            let use_bf = !opts.force_dp
                && (red.num_x() <= 2 * k as usize || red.num_vertices() <= opts.bf_threshold);
            let outcome = if use_bf {
                method = method.max(Method::BruteForce);
                let (o, nodes) =
                    decide_bruteforce_counted(&red, Some(k), &opts.oracle_budget, opts.threads);
                stats.nodes += nodes;
                match o {
                    OracleOutcome::Yes(d) => DpOutcome::Yes(d),
                    OracleOutcome::No => DpOutcome::No,
                    OracleOutcome::BudgetExceeded => DpOutcome::BudgetExceeded,
                }
            } else {
                method = method.max(Method::Dp);
                let (o, states, nodes) = decide_dp_counted(&red, k, &opts.dp_budget)?;
                stats.states += states;
                stats.nodes += nodes;
                o
            };
            match outcome {
                DpOutcome::Yes(d) => d,
                DpOutcome::No => {
                    stats.elapsed = start.elapsed();
                    let first = comp.iter().next().cloned().unwrap_or_default();
                    return Ok(Decision {
                        answer: Answer::No,
                        method,
                        certificate: None,
                        reason: format!(
                            "component containing `{first}` has no fan-planar 2-layer drawing (k = {k})"
                        ),
                        k_used,
                        stats,
                    });
                }
                DpOutcome::BudgetExceeded => {
                    return Err(Error::BudgetExceeded(format!(
                        "solver budget exhausted (method {method}, {} states, {} nodes)",
                        stats.states, stats.nodes
                    )));
                }
            }
        };

        let lifted = lift_drawing(&comp_g, &trace, &d_red)?;
        xs_out.extend(lifted.x_order_ids());
        ys_out.extend(lifted.y_order_ids());
    }

    let certificate = TwoLayerDrawing::new(Arc::clone(g), &xs_out, &ys_out)?;
    certificate.require_complete()?;
    if !certificate.verify(None).fan_planar {
        return Err(Error::Internal("concatenated certificate failed verification".into()));
    }
    stats.elapsed = start.elapsed();
    Ok(Decision {
        answer: Answer::Yes,
        method,
        certificate: Some(certificate),
        reason: "fan-planar 2-layer drawing found".into(),
        k_used,
        stats,
    })
}
