//! Index-level evaluation of the window dynamic program.
//!
//! A state is a window S of 2k+1 X-vertices together with a k-planar
//! fan-planar drawing D of G[N[S]] (S's order a suffix-to-be) and a set C
//! of components of G - N[S] still to be drawn to the left. Crossing
//! budgets are not enumerated: for a fixed (S, D, C) the feasible budget
//! functions form a union of per-edge interval boxes, computed bottom-up
//! from the base case (C empty, budgets exactly the window's own crossing
//! counts) through the window-shift transition. A state is winnable iff its
//! box set is non-empty; the certificate drawing is reassembled by
//! composing the window drawings along the recorded transition chain.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::drawing::TwoLayerDrawing;
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Structural part of a DP state: window drawing orders (parent-graph
/// vertex indices) plus the left components, canonically sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct WinKey {
    /// Window X-order; the window S is this as a set, the last entry is v*.
    pub x: Vec<u32>,
    /// Order of N(S) on the Y layer.
    pub y: Vec<u32>,
    /// Components of G - N[S] that remain to the left, each sorted,
    /// sorted by first element.
    pub comps: Vec<Vec<u32>>,
}

impl WinKey {
    pub fn encode(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.x.len() + self.y.len() + 8);
        out.extend_from_slice(&self.x);
        out.push(u32::MAX);
        out.extend_from_slice(&self.y);
        for c in &self.comps {
            out.push(u32::MAX);
            out.extend_from_slice(c);
        }
        out
    }

    pub fn drawing(&self, g: &Arc<BipartiteGraph>) -> TwoLayerDrawing {
        TwoLayerDrawing::from_indices(Arc::clone(g), self.x.clone(), self.y.clone())
    }
}

/// One feasible-budget box: per edge of delta(S) (in `Entry::delta` order)
/// an inclusive interval of crossing-budget values.
#[derive(Debug, Clone)]
pub(crate) struct ChiBox {
    pub lo: Vec<u32>,
    pub hi: Vec<u32>,
    /// Transition that produced this box: successor state and box index,
    /// or None for the base case.
    pub child: Option<(Vec<u32>, usize)>,
}

#[derive(Debug)]
pub(crate) struct Entry {
    /// delta(S) as parent edge indices, ascending (canonical edge order).
    pub delta: Vec<usize>,
    pub boxes: Vec<ChiBox>,
}

#[derive(Debug, Clone)]
pub struct DpBudget {
    /// Limit on distinct memoized states.
    pub max_states: u64,
    pub max_elapsed: Option<Duration>,
}

impl Default for DpBudget {
    fn default() -> Self {
        DpBudget { max_states: 5_000_000, max_elapsed: None }
    }
}

pub(crate) struct Engine {
    pub g: Arc<BipartiteGraph>,
    pub k: u32,
    budget: DpBudget,
    start: Instant,
    pub states: u64,
    memo: HashMap<Vec<u32>, Rc<Entry>>,
    keys: HashMap<Vec<u32>, WinKey>,
}

/// delta(S) for S given as a set of X indices: every edge whose X endpoint
/// is in S, ascending by edge index.
pub(crate) fn delta_edges(g: &BipartiteGraph, window: &HashSet<u32>) -> Vec<usize> {
    g.edge_indices()
        .iter()
        .enumerate()
        .filter(|(_, &(x, _))| window.contains(&x))
        .map(|(i, _)| i)
        .collect()
}

/// Vertex indices sorted by id (canonical order).
pub(crate) fn canonical_idx(g: &BipartiteGraph, items: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let mut v: Vec<u32> = items.into_iter().collect();
    v.sort_by(|&a, &b| g.id_of(a).cmp(g.id_of(b)));
    v
}

/// Open neighborhood of a set of X indices.
fn nbhd(g: &BipartiteGraph, xs: &[u32]) -> HashSet<u32> {
    xs.iter().flat_map(|&x| g.adj_at(x).iter().copied()).collect()
}

/// True iff the drawing is k-planar and fan-planar.
fn window_ok(g: &Arc<BipartiteGraph>, x: &[u32], y: &[u32], k: u32) -> bool {
    let d = TwoLayerDrawing::from_indices(Arc::clone(g), x.to_vec(), y.to_vec());
    let r = d.verify(Some(k));
    r.fan_planar && r.within_k == Some(true)
}

/// All completions of the Y layer: insert `new_ys` (one at a time, each in
/// every position) into `y_shared`, pruning arrangements whose induced
/// drawing with `x_order` stops being k-planar fan-planar. Induced
/// subdrawings of a valid drawing are valid, so the pruning is exact.
pub(crate) fn y_completions(
    g: &Arc<BipartiteGraph>,
    x_order: &[u32],
    y_shared: &[u32],
    new_ys: &[u32],
    k: u32,
) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(
        g: &Arc<BipartiteGraph>,
        x_order: &[u32],
        cur: &Vec<u32>,
        rest: &[u32],
        k: u32,
        out: &mut Vec<Vec<u32>>,
    ) {
        if !window_ok(g, x_order, cur, k) {
            return;
        }
        match rest.split_first() {
            None => out.push(cur.clone()),
            Some((&v, tail)) => {
                for pos in 0..=cur.len() {
                    let mut next = cur.clone();
                    next.insert(pos, v);
                    rec(g, x_order, &next, tail, k, out);
                }
            }
        }
    }
    rec(g, x_order, &y_shared.to_vec(), new_ys, k, &mut out);
    out
}

/// Successor states of a non-base state, per the window-shift transition:
/// drop v* (the last window vertex), add a new leftmost window vertex u*
/// from the undrawn left part, extend the drawing by u*'s unseen neighbors
/// in every valid way, and keep exactly the left components that still
/// intersect the old ones. Successors whose components would reach back
/// into N[S] are discarded, as are those that do not reconstruct L.
///
/// A successor is also discarded when composing its window with the
/// parent's makes an edge of u* cross an edge of v*: no k-planar drawing
/// with the window as a suffix contains such a crossing (an edge of the
/// left part crossing an edge of v* spans the whole window, and the 2k + 1
/// window vertices then force more than k crossings onto one of the two
/// edges), so the filter loses no witnesses, and with it every crossing
/// the composition ever adds stays off v*'s edges.
pub(crate) fn successor_structs(g: &Arc<BipartiteGraph>, k: u32, key: &WinKey) -> Vec<WinKey> {
    let mut out = Vec::new();
    if key.comps.is_empty() {
        return out;
    }
    let n_closed_s: HashSet<u32> = key.x.iter().chain(key.y.iter()).copied().collect();
    let union_c: HashSet<u32> = key.comps.iter().flatten().copied().collect();
    let l_set: HashSet<u32> = n_closed_s.union(&union_c).copied().collect();

    let candidates = canonical_idx(
        g,
        union_c.iter().copied().filter(|&v| g.side_at(v) == crate::graph::Side::X),
    );
    for u_star in candidates {
        let mut x_new: Vec<u32> = Vec::with_capacity(key.x.len());
        x_new.push(u_star);
        x_new.extend_from_slice(&key.x[..key.x.len() - 1]);
        let n_s_new = nbhd(g, &x_new);
        let y_shared: Vec<u32> = key.y.iter().copied().filter(|v| n_s_new.contains(v)).collect();
        let new_ys = canonical_idx(
            g,
            n_s_new.iter().copied().filter(|v| !n_closed_s.contains(v)),
        );

        // components of G - N[S'] that intersect the old left part
        let mut removed: Vec<u32> = x_new.clone();
        removed.extend(n_s_new.iter().copied());
        let comps_new: Vec<Vec<u32>> = {
            let mut cs: Vec<Vec<u32>> = g
                .components_idx(&removed)
                .into_iter()
                .filter(|c| c.iter().any(|v| union_c.contains(v)))
                .collect();
            cs.sort_by_key(|c| c[0]);
            cs
        };

        // left components may not reach back into N[S]
        if comps_new.iter().flatten().any(|v| n_closed_s.contains(v)) {
            continue;
        }
        // L must decompose as N[S] together with the successor's L'
        let mut l_new: HashSet<u32> = x_new.iter().copied().collect();
        l_new.extend(n_s_new.iter().copied());
        l_new.extend(comps_new.iter().flatten().copied());
        let l_check: HashSet<u32> = l_new.union(&n_closed_s).copied().collect();
        if l_check != l_set {
            continue;
        }

        let d_parent = key.drawing(g);
        let v_star = *key.x.last().expect("window is non-empty");
        for y_new in y_completions(g, &x_new, &y_shared, &new_ys, k) {
            let cand = WinKey { x: x_new.clone(), y: y_new, comps: comps_new.clone() };
            let composed = cand
                .drawing(g)
                .compose(&d_parent)
                .expect("successor window is consistent with its parent");
            let pos: HashMap<u32, usize> =
                composed.y_order_idx().iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let crossed = g.adj_at(v_star).iter().any(|ye| {
                g.adj_at(u_star).iter().any(|yf| ye != yf && pos[ye] < pos[yf])
            });
            if !crossed {
                out.push(cand);
            }
        }
    }
    out
}

impl Engine {
    pub fn new(g: Arc<BipartiteGraph>, k: u32, budget: DpBudget) -> Self {
        Engine {
            g,
            k,
            budget,
            start: Instant::now(),
            states: 0,
            memo: HashMap::new(),
            keys: HashMap::new(),
        }
    }

    /// Per-delta-edge crossing counts of the window drawing, plus the count
    /// of crossings incident to v* per edge (the c-3 shift).
    fn window_counts(&self, key: &WinKey, delta: &[usize]) -> (Vec<u32>, Vec<u32>) {
        let d = key.drawing(&self.g);
        let lists = d.crossing_lists();
        let v_star = *key.x.last().expect("window is non-empty");
        let mut counts = Vec::with_capacity(delta.len());
        let mut shifts = Vec::with_capacity(delta.len());
        for &e in delta {
            let crossers = lists.get(&e).map(Vec::as_slice).unwrap_or(&[]);
            counts.push(crossers.len() as u32);
            shifts.push(
                crossers.iter().filter(|&&f| self.g.edge_indices()[f].0 == v_star).count() as u32,
            );
        }
        (counts, shifts)
    }

    /// Evaluate a state: the set of feasible crossing-budget boxes.
    pub fn eval(&mut self, key: &WinKey) -> Result<Rc<Entry>> {
        let code = key.encode();
        if let Some(e) = self.memo.get(&code) {
            return Ok(Rc::clone(e));
        }
        self.states += 1;
        if self.states > self.budget.max_states {
            return Err(Error::BudgetExceeded(format!("state limit {} reached", self.budget.max_states)));
        }
        if let Some(limit) = self.budget.max_elapsed {
            if self.states % 256 == 0 && self.start.elapsed() > limit {
                return Err(Error::BudgetExceeded("time limit reached".into()));
            }
        }

        let window: HashSet<u32> = key.x.iter().copied().collect();
        let delta = delta_edges(&self.g, &window);
        let (counts, shifts) = self.window_counts(key, &delta);
        let v_star = *key.x.last().expect("window is non-empty");

        let mut boxes: Vec<ChiBox> = Vec::new();
        if key.comps.is_empty() {
            // base case: the window drawing itself is the full drawing of
            // G[L]; budgets must match its counts exactly
            boxes.push(ChiBox { lo: counts.clone(), hi: counts.clone(), child: None });
        } else {
            for succ in successor_structs(&self.g, self.k, key) {
                let child = self.eval(&succ)?;
                let succ_code = succ.encode();
                for (bi, cbox) in child.boxes.iter().enumerate() {
                    let mut lo = Vec::with_capacity(delta.len());
                    let mut hi = Vec::with_capacity(delta.len());
                    let mut dead = false;
                    for (i, &e) in delta.iter().enumerate() {
                        let (ex, _) = self.g.edge_indices()[e];
                        let (l, h) = if ex == v_star {
                            // dropped edge: v*'s edges receive all their
                            // crossings inside the window (no crossing with
                            // the left part in a k-planar drawing), so the
                            // budget must match the window count exactly
                            (counts[i], counts[i])
                        } else {
                            let j = child.delta.binary_search(&e).expect("shared edge in successor delta");
                            (
                                (cbox.lo[j] + shifts[i]).max(counts[i]),
                                (cbox.hi[j] + shifts[i]).min(self.k),
                            )
                        };
                        if l > h {
                            dead = true;
                            break;
                        }
                        lo.push(l);
                        hi.push(h);
                    }
                    if dead {
                        continue;
                    }
                    if !boxes.iter().any(|b| b.lo == lo && b.hi == hi) {
                        boxes.push(ChiBox { lo, hi, child: Some((succ_code.clone(), bi)) });
                    }
                }
            }
        }

        let entry = Rc::new(Entry { delta, boxes });
        self.memo.insert(code.clone(), Rc::clone(&entry));
        self.keys.insert(code, key.clone());
        Ok(entry)
    }

    /// Rebuild the full drawing for a winnable state by composing the
    /// window drawings along the transition chain, checking at every step
    /// that edges of the dropped vertex v* cross only within their window.
    pub fn reconstruct(&self, root: &WinKey, box_idx: usize) -> Result<TwoLayerDrawing> {
        // collect the chain of windows from the root down to the base state
        let mut chain: Vec<WinKey> = vec![root.clone()];
        let mut cur = root.encode();
        let mut cur_box = box_idx;
        loop {
            let entry = self.memo.get(&cur).ok_or_else(|| Error::Internal("missing memo entry".into()))?;
            match &entry.boxes.get(cur_box).ok_or_else(|| Error::Internal("missing box".into()))?.child {
                None => break,
                Some((child_code, child_box)) => {
                    let child_key = self
                        .keys
                        .get(child_code)
                        .ok_or_else(|| Error::Internal("missing child key".into()))?;
                    chain.push(child_key.clone());
                    cur = child_code.clone();
                    cur_box = *child_box;
                }
            }
        }

        // compose leftmost window first, walking back up the chain
        let mut acc = chain.last().expect("chain is non-empty").drawing(&self.g);
        for key in chain.iter().rev().skip(1) {
            let window = key.drawing(&self.g);
            let composed = acc.compose(&window)?;
            // cross-free check: edges of v* cross only edges of the window
            let v_star = *key.x.last().expect("window is non-empty");
            let full = composed.crossing_lists();
            let win = window.crossing_lists();
            for (&e, crossers) in &win {
                if self.g.edge_indices()[e].0 != v_star {
                    continue;
                }
                let mut a = crossers.clone();
                let mut b = full.get(&e).cloned().unwrap_or_default();
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    let ids = |v: &[u32]| {
                        v.iter().map(|&i| self.g.id_of(i).to_string()).collect::<Vec<_>>().join(",")
                    };
                    let (ex, ey) = self.g.edge_indices()[e];
                    return Err(Error::Internal(format!(
                        "cross-free violation at edge {{{}, {}}} while reconstructing: \
                         window x=[{}] y=[{}], left x=[{}] y=[{}], window crossers {:?}, composed {:?}",
                        self.g.id_of(ex),
                        self.g.id_of(ey),
                        ids(&key.x),
                        ids(&key.y),
                        ids(acc.x_order_idx()),
                        ids(acc.y_order_idx()),
                        a,
                        b
                    )));
                }
            }
            acc = composed;
        }
        Ok(acc)
    }
}

/// k-subsets of `items` in order, preserving item order within each subset.
pub(crate) fn subsets(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    if k <= items.len() {
        rec(items, k, 0, &mut cur, &mut out);
    }
    out
}

/// Permutations of `items` in lexicographic order of the input slice.
pub(crate) fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(items.len());
    let mut used = vec![false; items.len()];
    fn rec(items: &[u32], used: &mut [bool], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == items.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..items.len() {
            if !used[i] {
                used[i] = true;
                cur.push(items[i]);
                rec(items, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(items, &mut used, &mut cur, &mut out);
    out
}
