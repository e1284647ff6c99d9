//! The 2-layer drawing model: a pair of linear orders, crossing pairs,
//! per-edge crossing sets, fan-planarity / k-planarity verification,
//! consistency, and the composition operator used by the solver.
//!
//! A `TwoLayerDrawing` references a host graph and draws the subgraph
//! induced by the vertices listed in its two orders. A drawing covering
//! every host vertex is *complete*; window drawings used by the solver
//! cover only a closed neighborhood.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Edge, EdgeSet, Side, VertexSet};

/// A 2-layer drawing: linear orders for (a subset of) X and Y.
#[derive(Debug, Clone)]
pub struct TwoLayerDrawing {
    host: Arc<BipartiteGraph>,
    x_order: Vec<u32>,
    y_order: Vec<u32>,
}

/// Outcome of verifying a drawing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingReport {
    pub fan_planar: bool,
    pub max_crossings_per_edge: u32,
    /// The smallest k' such that the drawing is k'-planar; equals
    /// `max_crossings_per_edge`.
    pub k_planar_for: u32,
    /// Lexicographically smallest violating triple, present iff not fan-planar.
    pub violating_triple: Option<[Edge; 3]>,
    pub crossings_per_edge: BTreeMap<Edge, u32>,
    /// When a bound k was supplied: whether every edge has at most k crossings.
    pub within_k: Option<bool>,
}

/// JSON file form of a drawing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrawingFile {
    pub x_order: Vec<String>,
    pub y_order: Vec<String>,
}

impl TwoLayerDrawing {
    /// Build a drawing from id sequences. Each id must exist in the host on
    /// the matching side and appear at most once.
    pub fn new<S: AsRef<str>>(host: Arc<BipartiteGraph>, x_order: &[S], y_order: &[S]) -> Result<Self> {
        let mut seen = vec![false; host.num_vertices()];
        let mut resolve = |ids: &[S], side: Side| -> Result<Vec<u32>> {
            let mut out = Vec::with_capacity(ids.len());
            for id in ids {
                let id = id.as_ref();
                let idx = host.idx(id).ok_or_else(|| Error::UnknownVertex(id.to_string()))?;
                if host.side_at(idx) != side {
                    return Err(Error::InvalidDrawing(format!("vertex `{id}` is on the wrong layer")));
                }
                if seen[idx as usize] {
                    return Err(Error::InvalidDrawing(format!("vertex `{id}` listed twice")));
                }
                seen[idx as usize] = true;
                out.push(idx);
            }
            Ok(out)
        };
        let x_order = resolve(x_order, Side::X)?;
        let y_order = resolve(y_order, Side::Y)?;
        Ok(TwoLayerDrawing { host, x_order, y_order })
    }

    pub(crate) fn from_indices(host: Arc<BipartiteGraph>, x_order: Vec<u32>, y_order: Vec<u32>) -> Self {
        TwoLayerDrawing { host, x_order, y_order }
    }

    pub fn host(&self) -> &Arc<BipartiteGraph> {
        &self.host
    }

    pub fn x_order_ids(&self) -> Vec<String> {
        self.x_order.iter().map(|&i| self.host.id_of(i).to_string()).collect()
    }

    pub fn y_order_ids(&self) -> Vec<String> {
        self.y_order.iter().map(|&i| self.host.id_of(i).to_string()).collect()
    }

    pub(crate) fn x_order_idx(&self) -> &[u32] {
        &self.x_order
    }

    pub(crate) fn y_order_idx(&self) -> &[u32] {
        &self.y_order
    }

    /// Vertices drawn, canonical.
    pub fn drawn_vertices(&self) -> VertexSet {
        self.x_order
            .iter()
            .chain(self.y_order.iter())
            .map(|&i| self.host.id_of(i).to_string())
            .collect()
    }

    /// True if the drawing covers every vertex of the host graph.
    pub fn is_complete(&self) -> bool {
        self.x_order.len() == self.host.num_x() && self.y_order.len() == self.host.num_y()
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::InvalidDrawing("drawing does not cover the host's vertices".into()))
        }
    }

    /// Positions per host vertex index; None for undrawn vertices.
    fn positions(&self) -> Vec<Option<usize>> {
        let mut pos = vec![None; self.host.num_vertices()];
        for (p, &v) in self.x_order.iter().enumerate() {
            pos[v as usize] = Some(p);
        }
        for (p, &v) in self.y_order.iter().enumerate() {
            pos[v as usize] = Some(p);
        }
        pos
    }

    /// Host edge indices with both endpoints drawn.
    pub(crate) fn drawn_edge_indices(&self) -> Vec<usize> {
        let pos = self.positions();
        self.host
            .edge_indices()
            .iter()
            .enumerate()
            .filter(|(_, &(x, y))| pos[x as usize].is_some() && pos[y as usize].is_some())
            .map(|(i, _)| i)
            .collect()
    }

    fn edge_of(&self, i: usize) -> Edge {
        let (x, y) = self.host.edge_indices()[i];
        Edge::new(self.host.id_of(x), self.host.id_of(y))
    }

    /// Per-drawn-edge crossing lists, as host edge indices. Quadratic
    /// all-pairs scan straight from the crossing definition.
    pub(crate) fn crossing_lists(&self) -> BTreeMap<usize, Vec<usize>> {
        let pos = self.positions();
        let drawn = self.drawn_edge_indices();
        let mut out: BTreeMap<usize, Vec<usize>> = drawn.iter().map(|&i| (i, Vec::new())).collect();
        for (a, &i) in drawn.iter().enumerate() {
            let (xi, yi) = self.host.edge_indices()[i];
            let (pxi, pyi) = (pos[xi as usize].unwrap() as i64, pos[yi as usize].unwrap() as i64);
            for &j in &drawn[a + 1..] {
                let (xj, yj) = self.host.edge_indices()[j];
                let (pxj, pyj) = (pos[xj as usize].unwrap() as i64, pos[yj as usize].unwrap() as i64);
                if (pxi - pxj) * (pyi - pyj) < 0 {
                    out.get_mut(&i).unwrap().push(j);
                    out.get_mut(&j).unwrap().push(i);
                }
            }
        }
        out
    }

    /// All crossing pairs, each pair in canonical order.
    pub fn crossing_pairs(&self) -> Vec<(Edge, Edge)> {
        let lists = self.crossing_lists();
        let mut out = Vec::new();
        for (&i, crossers) in &lists {
            for &j in crossers {
                if i < j {
                    out.push((self.edge_of(i), self.edge_of(j)));
                }
            }
        }
        out.sort();
        out
    }

    /// Edges crossing `e` in this drawing.
    pub fn crossing_edges(&self, e: &Edge) -> Result<EdgeSet> {
        if !self.host.has_edge(&e.x, &e.y) {
            return Err(Error::UnknownEdge(e.x.clone(), e.y.clone()));
        }
        let idx = self
            .host
            .edge_indices()
            .iter()
            .position(|&(x, y)| self.host.id_of(x) == e.x && self.host.id_of(y) == e.y)
            .expect("edge present");
        let lists = self.crossing_lists();
        let crossers = lists
            .get(&idx)
            .ok_or_else(|| Error::InvalidDrawing(format!("edge {e} is not drawn")))?;
        Ok(crossers.iter().map(|&j| self.edge_of(j)).collect())
    }

    /// Verify fan-planarity (and k-planarity when `k` is supplied) of the
    /// drawn subgraph.
    pub fn verify(&self, k: Option<u32>) -> CrossingReport {
        let lists = self.crossing_lists();
        let edge_ends: Vec<(u32, u32)> = self.host.edge_indices().to_vec();

        let mut crossings_per_edge = BTreeMap::new();
        let mut max = 0u32;
        let mut fan_planar = true;
        let mut triple: Option<[Edge; 3]> = None;

        for (&i, crossers) in &lists {
            let c = crossers.len() as u32;
            max = max.max(c);
            crossings_per_edge.insert(self.edge_of(i), c);
            if crossers.is_empty() {
                continue;
            }
            // common end vertex across all crossing edges
            let (x0, y0) = edge_ends[crossers[0]];
            let mut candidates = vec![x0, y0];
            for &j in &crossers[1..] {
                let (xj, yj) = edge_ends[j];
                candidates.retain(|&v| v == xj || v == yj);
                if candidates.is_empty() {
                    break;
                }
            }
            if candidates.is_empty() {
                fan_planar = false;
                // smallest violating triple with this e: scan disjoint pairs
                for (a, &f) in crossers.iter().enumerate() {
                    for &f2 in &crossers[a + 1..] {
                        let (xf, yf) = edge_ends[f];
                        let (xg, yg) = edge_ends[f2];
                        if xf != xg && yf != yg {
                            let mut t = [self.edge_of(i), self.edge_of(f), self.edge_of(f2)];
                            t.sort();
                            if triple.as_ref().map_or(true, |best| t < *best) {
                                triple = Some(t);
                            }
                        }
                    }
                }
            }
        }

        CrossingReport {
            fan_planar,
            max_crossings_per_edge: max,
            k_planar_for: max,
            violating_triple: triple,
            crossings_per_edge,
            within_k: k.map(|k| max <= k),
        }
    }

    /// Subdrawing induced by a vertex set (order-preserving restriction).
    pub fn restrict(&self, verts: &VertexSet) -> TwoLayerDrawing {
        let keep = |order: &[u32]| -> Vec<u32> {
            order.iter().copied().filter(|&v| verts.contains(self.host.id_of(v))).collect()
        };
        TwoLayerDrawing {
            host: Arc::clone(&self.host),
            x_order: keep(&self.x_order),
            y_order: keep(&self.y_order),
        }
    }

    /// Drawing with both layers reversed.
    pub fn reversed(&self) -> TwoLayerDrawing {
        TwoLayerDrawing {
            host: Arc::clone(&self.host),
            x_order: self.x_order.iter().rev().copied().collect(),
            y_order: self.y_order.iter().rev().copied().collect(),
        }
    }

    fn same_host(&self, other: &TwoLayerDrawing) -> bool {
        Arc::ptr_eq(&self.host, &other.host) || *self.host == *other.host
    }

    /// True iff shared vertices appear in the same relative order on both
    /// layers of the two drawings.
    pub fn is_consistent(&self, other: &TwoLayerDrawing) -> bool {
        self.same_host(other)
            && orders_consistent(&self.x_order, &other.x_order)
            && orders_consistent(&self.y_order, &other.y_order)
    }

    /// Composition operator: a drawing of the union subgraph in which
    /// `self` plays the left part. Exclusive left vertices appear to the
    /// left of exclusive right vertices on each layer; restricted to either
    /// input's vertices, the result equals that input.
    pub fn compose(&self, right: &TwoLayerDrawing) -> Result<TwoLayerDrawing> {
        if !self.same_host(right) {
            return Err(Error::Inconsistent("drawings reference different host graphs".into()));
        }
        if !self.is_consistent(right) {
            return Err(Error::Inconsistent("shared vertices disagree on relative order".into()));
        }
        Ok(TwoLayerDrawing {
            host: Arc::clone(&self.host),
            x_order: merge_orders(&self.x_order, &right.x_order),
            y_order: merge_orders(&self.y_order, &right.y_order),
        })
    }

    // --- JSON -------------------------------------------------------------

    pub fn to_file(&self) -> DrawingFile {
        DrawingFile { x_order: self.x_order_ids(), y_order: self.y_order_ids() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("drawing serialization")
    }

    pub fn from_file(host: Arc<BipartiteGraph>, file: &DrawingFile) -> Result<Self> {
        TwoLayerDrawing::new(host, &file.x_order, &file.y_order)
    }

    pub fn from_json(host: Arc<BipartiteGraph>, json: &str) -> Result<Self> {
        let file: DrawingFile = serde_json::from_str(json)
            .map_err(|e| Error::InvalidDrawing(format!("bad drawing JSON: {e}")))?;
        TwoLayerDrawing::from_file(host, &file)
    }
}

fn orders_consistent(a: &[u32], b: &[u32]) -> bool {
    let in_b: std::collections::HashMap<u32, usize> = b.iter().enumerate().map(|(p, &v)| (v, p)).collect();
    let mut last = None;
    for &v in a {
        if let Some(&p) = in_b.get(&v) {
            if let Some(prev) = last {
                if p <= prev {
                    return false;
                }
            }
            last = Some(p);
        }
    }
    true
}

/// Merge two orders with a common (consistently ordered) shared subsequence:
/// between consecutive shared vertices, left-exclusive vertices precede
/// right-exclusive ones. The result is the unique order extending both.
fn merge_orders(left: &[u32], right: &[u32]) -> Vec<u32> {
    let in_left: std::collections::HashSet<u32> = left.iter().copied().collect();
    let shared: Vec<u32> = right.iter().copied().filter(|v| in_left.contains(v)).collect();

    let segments = |order: &[u32]| -> Vec<Vec<u32>> {
        let shared_set: std::collections::HashSet<u32> = shared.iter().copied().collect();
        let mut segs = vec![Vec::new()];
        for &v in order {
            if shared_set.contains(&v) {
                segs.push(Vec::new());
            } else {
                segs.last_mut().unwrap().push(v);
            }
        }
        segs
    };

    let lsegs = segments(left);
    let rsegs = segments(right);
    let mut out = Vec::with_capacity(left.len() + right.len() - shared.len());
    for i in 0..lsegs.len() {
        out.extend_from_slice(&lsegs[i]);
        out.extend_from_slice(&rsegs[i]);
        if i < shared.len() {
            out.push(shared[i]);
        }
    }
    out
}

/// Render a drawing as a standalone SVG document: two horizontal rails,
/// unit horizontal spacing per rail, straight segments. Edges of the
/// report's violating triple (if any) carry the `violating` class.
pub fn render_svg(d: &TwoLayerDrawing, report: Option<&CrossingReport>) -> String {
    const STEP: i64 = 60;
    const MARGIN: i64 = 40;
    const Y_TOP: i64 = 40;
    const Y_BOTTOM: i64 = 200;

    let xs = d.x_order_ids();
    let ys = d.y_order_ids();
    let width = MARGIN * 2 + STEP * (xs.len().max(ys.len()).max(1) as i64 - 1);
    let height = Y_BOTTOM + MARGIN;

    let violating: Vec<Edge> = report
        .and_then(|r| r.violating_triple.as_ref())
        .map(|t| t.to_vec())
        .unwrap_or_default();

    let xpos: BTreeMap<&str, i64> =
        xs.iter().enumerate().map(|(i, v)| (v.as_str(), MARGIN + STEP * i as i64)).collect();
    let ypos: BTreeMap<&str, i64> =
        ys.iter().enumerate().map(|(i, v)| (v.as_str(), MARGIN + STEP * i as i64)).collect();

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str(
        "<style>.edge{stroke:#444;stroke-width:1.5}.violating{stroke:#c00;stroke-width:3}\
         .vertex{fill:#1f6fb2}.label{font:12px monospace;fill:#000}</style>\n",
    );

    for e in d.host().edges() {
        let (Some(&x1), Some(&x2)) = (xpos.get(e.x.as_str()), ypos.get(e.y.as_str())) else {
            continue;
        };
        let class = if violating.contains(&e) { "edge violating" } else { "edge" };
        out.push_str(&format!(
            "<line class=\"{class}\" x1=\"{x1}\" y1=\"{Y_TOP}\" x2=\"{x2}\" y2=\"{Y_BOTTOM}\"/>\n"
        ));
    }
    for (v, &x) in &xpos {
        out.push_str(&format!("<circle class=\"vertex\" cx=\"{x}\" cy=\"{Y_TOP}\" r=\"5\"/>\n"));
        out.push_str(&format!("<text class=\"label\" x=\"{x}\" y=\"{}\">{v}</text>\n", Y_TOP - 12));
    }
    for (v, &x) in &ypos {
        out.push_str(&format!("<circle class=\"vertex\" cx=\"{x}\" cy=\"{Y_BOTTOM}\" r=\"5\"/>\n"));
        out.push_str(&format!("<text class=\"label\" x=\"{x}\" y=\"{}\">{v}</text>\n", Y_BOTTOM + 20));
    }
    out.push_str("</svg>\n");
    out
}
