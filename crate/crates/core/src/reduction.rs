//! Degree reduction with a replayable trace, the early-rejection checks,
//! and the constructive lifting of certificate drawings back through the
//! trace.
//!
//! Three rules run to a fixpoint, rescanning after every removal:
//! isolated-vertex removal; removal of all but one degree-1 neighbor of a
//! vertex; removal of all but two common degree-2 twins of a vertex pair.
//! Candidates are scanned in canonical vertex order and the kept
//! representatives are the canonically smallest, so traces are
//! deterministic.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::drawing::TwoLayerDrawing;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    Isolated,
    Deg1,
    Deg2Twin,
}

/// One vertex removal. Anchors are rule-specific:
/// DEG1 -> `[kept sibling u, common neighbor v]`;
/// DEG2_TWIN -> `[kept twin u1, kept twin u2, common neighbor v, common neighbor w]`;
/// ISOLATED -> `[]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub removed: String,
    pub rule: Rule,
    pub anchors: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serialization")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::TraceMismatch(format!("bad trace JSON: {e}")))
    }
}

/// Why a reduced graph was rejected outright.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RejectKind {
    FiveHighDegree,
    FiveMatchedDeg2,
    DegreeGate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectReason {
    pub kind: RejectKind,
    /// The vertex v that triggered the check.
    pub vertex: String,
    /// FIVE_HIGH_DEGREE: five neighbors of degree >= 3.
    /// FIVE_MATCHED_DEG2: five degree-2 neighbors with distinct second neighbors.
    /// DEGREE_GATE: all neighbors of the over-degree vertex.
    pub neighbors: Vec<String>,
    /// FIVE_MATCHED_DEG2 only: the matched partners, aligned with `neighbors`.
    pub partners: Vec<String>,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            RejectKind::FiveHighDegree => write!(
                f,
                "vertex {} has five neighbors of degree >= 3 ({})",
                self.vertex,
                self.neighbors.join(", ")
            ),
            RejectKind::FiveMatchedDeg2 => write!(
                f,
                "vertex {} has five degree-2 neighbors ({}) matched to distinct partners ({})",
                self.vertex,
                self.neighbors.join(", "),
                self.partners.join(", ")
            ),
            RejectKind::DegreeGate => {
                write!(f, "vertex {} has degree {} > 13", self.vertex, self.neighbors.len())
            }
        }
    }
}

fn find_isolated(g: &BipartiteGraph) -> Option<ReductionStep> {
    g.vertex_set()
        .into_iter()
        .find(|v| g.degree(v).unwrap() == 0)
        .map(|v| ReductionStep { removed: v, rule: Rule::Isolated, anchors: vec![] })
}

fn find_deg1(g: &BipartiteGraph) -> Option<ReductionStep> {
    for v in g.vertex_set() {
        let ones: Vec<&str> = g
            .neighbors(&v)
            .unwrap()
            .into_iter()
            .filter(|u| g.degree(u).unwrap() == 1)
            .collect();
        if ones.len() >= 2 {
            return Some(ReductionStep {
                removed: ones[1].to_string(),
                rule: Rule::Deg1,
                anchors: vec![ones[0].to_string(), v],
            });
        }
    }
    None
}

/// Common degree-2 twins of the ordered pair (v, w): vertices u with
/// N(u) = {v, w}, canonical.
fn twins(g: &BipartiteGraph, v: &str, w: &str) -> Vec<String> {
    g.neighbors(v)
        .unwrap()
        .into_iter()
        .filter(|u| {
            g.degree(u).unwrap() == 2 && {
                let ns = g.neighbors(u).unwrap();
                ns.contains(&v) && ns.contains(&w)
            }
        })
        .map(String::from)
        .collect()
}

fn find_deg2_twin(g: &BipartiteGraph) -> Option<ReductionStep> {
    for v in g.vertex_set() {
        // partners w on the same side as v, reached through a degree-2 neighbor
        let mut partners: Vec<String> = g
            .neighbors(&v)
            .unwrap()
            .into_iter()
            .filter(|u| g.degree(u).unwrap() == 2)
            .flat_map(|u| g.neighbors(u).unwrap())
            .filter(|&w| w != v)
            .map(String::from)
            .collect();
        partners.sort();
        partners.dedup();
        for w in partners {
            if v >= w {
                continue; // each unordered pair once
            }
            let t = twins(g, &v, &w);
            if t.len() >= 3 {
                return Some(ReductionStep {
                    removed: t[2].clone(),
                    rule: Rule::Deg2Twin,
                    anchors: vec![t[0].clone(), t[1].clone(), v.clone(), w.clone()],
                });
            }
        }
    }
    None
}

/// Apply the reduction rules to a fixpoint. The trace replays the removals
/// in order.
pub fn apply_reductions(g: &BipartiteGraph) -> (BipartiteGraph, ReductionTrace) {
    let mut cur = g.clone();
    let mut trace = ReductionTrace::default();
    loop {
        let step = find_isolated(&cur)
            .or_else(|| find_deg1(&cur))
            .or_else(|| find_deg2_twin(&cur));
        match step {
            Some(step) => {
                cur = cur.remove_vertex(&step.removed).expect("removed vertex exists");
                trace.steps.push(step);
            }
            None => return (cur, trace),
        }
    }
}

/// True iff no reduction rule applies.
pub fn is_reduced(g: &BipartiteGraph) -> bool {
    find_isolated(g).is_none() && find_deg1(g).is_none() && find_deg2_twin(g).is_none()
}

/// Replay a trace against `original`, re-checking each step's rule
/// precondition at its removal time.
pub fn replay_trace(original: &BipartiteGraph, trace: &ReductionTrace) -> Result<BipartiteGraph> {
    let mut cur = original.clone();
    for step in &trace.steps {
        if !cur.contains(&step.removed) {
            return Err(Error::TraceMismatch(format!("removed vertex `{}` not present", step.removed)));
        }
        let ok = match step.rule {
            Rule::Isolated => step.anchors.is_empty() && cur.degree(&step.removed)? == 0,
            Rule::Deg1 => match step.anchors.as_slice() {
                [u, v] => {
                    cur.degree(&step.removed)? == 1
                        && cur.degree(u)? == 1
                        && u != &step.removed
                        && cur.neighbors(&step.removed)?.contains(&v.as_str())
                        && cur.neighbors(u)?.contains(&v.as_str())
                }
                _ => false,
            },
            Rule::Deg2Twin => match step.anchors.as_slice() {
                [u1, u2, v, w] => {
                    let t = twins(&cur, v, w);
                    t.contains(&step.removed)
                        && t.contains(u1)
                        && t.contains(u2)
                        && u1 != &step.removed
                        && u2 != &step.removed
                        && u1 != u2
                }
                _ => false,
            },
        };
        if !ok {
            return Err(Error::TraceMismatch(format!(
                "step removing `{}` ({:?}) fails its precondition",
                step.removed, step.rule
            )));
        }
        cur = cur.remove_vertex(&step.removed)?;
    }
    Ok(cur)
}

/// Early rejection on a reduced graph. A returned reason certifies that the
/// graph has no 2-layer fan-planar drawing.
pub fn early_reject(g: &BipartiteGraph) -> Result<Option<RejectReason>> {
    if !is_reduced(g) {
        return Err(Error::NotReduced("early_reject requires a reduced graph".into()));
    }
    Ok(five_high_degree(g).or_else(|| five_matched_deg2(g)).or_else(|| degree_gate(g)))
}

/// Check (a): some vertex with at least five neighbors of degree >= 3.
pub fn five_high_degree(g: &BipartiteGraph) -> Option<RejectReason> {
    for v in g.vertex_set() {
        let high: Vec<String> = g
            .neighbors(&v)
            .unwrap()
            .into_iter()
            .filter(|u| g.degree(u).unwrap() >= 3)
            .map(String::from)
            .collect();
        if high.len() >= 5 {
            return Some(RejectReason {
                kind: RejectKind::FiveHighDegree,
                vertex: v,
                neighbors: high[..5].to_vec(),
                partners: vec![],
            });
        }
    }
    None
}

/// Check (b): some vertex v with five degree-2 neighbors whose second
/// neighbors are pairwise distinct. Each degree-2 neighbor of v has exactly
/// one candidate partner in G - v, so distinct second neighbors are exactly
/// a matching of G - v saturating the five.
pub fn five_matched_deg2(g: &BipartiteGraph) -> Option<RejectReason> {
    for v in g.vertex_set() {
        // partner -> canonically smallest degree-2 neighbor with that partner
        let mut by_partner: std::collections::BTreeMap<String, String> = Default::default();
        for u in g.neighbors(&v).unwrap() {
            if g.degree(u).unwrap() != 2 {
                continue;
            }
            let partner = g.neighbors(u).unwrap().into_iter().find(|&w| w != v);
            if let Some(w) = partner {
                by_partner.entry(w.to_string()).or_insert_with(|| u.to_string());
            }
        }
        if by_partner.len() >= 5 {
            let (partners, neighbors): (Vec<String>, Vec<String>) =
                by_partner.into_iter().take(5).unzip();
            return Some(RejectReason {
                kind: RejectKind::FiveMatchedDeg2,
                vertex: v,
                neighbors,
                partners,
            });
        }
    }
    None
}

/// Check (c): maximum degree above 13. On reduced graphs checks (a) and (b)
/// subsume this; it is kept as an independent guard.
pub fn degree_gate(g: &BipartiteGraph) -> Option<RejectReason> {
    g.vertex_set().into_iter().find(|v| g.degree(v).unwrap() > 13).map(|v| RejectReason {
        kind: RejectKind::DegreeGate,
        neighbors: g.neighbors(&v).unwrap().into_iter().map(String::from).collect(),
        vertex: v,
        partners: vec![],
    })
}

/// Re-check a reject reason against the graph it was issued for.
pub fn recheck_reason(g: &BipartiteGraph, r: &RejectReason) -> bool {
    match r.kind {
        RejectKind::FiveHighDegree => {
            r.neighbors.len() == 5
                && r.neighbors.iter().all(|u| {
                    has_edge_any(g, &r.vertex, u) && g.degree(u).map_or(false, |d| d >= 3)
                })
        }
        RejectKind::FiveMatchedDeg2 => {
            r.neighbors.len() == 5
                && r.partners.len() == 5
                && {
                    let mut ws: Vec<&String> = r.partners.iter().collect();
                    ws.sort();
                    ws.dedup();
                    ws.len() == 5
                }
                && r.neighbors.iter().zip(&r.partners).all(|(u, w)| {
                    has_edge_any(g, &r.vertex, u)
                        && has_edge_any(g, u, w)
                        && g.degree(u).map_or(false, |d| d == 2)
                })
        }
        RejectKind::DegreeGate => g.degree(&r.vertex).map_or(false, |d| d > 13),
    }
}

/// Edge test ignoring which argument is on which side.
fn has_edge_any(g: &BipartiteGraph, a: &str, b: &str) -> bool {
    g.has_edge(a, b) || g.has_edge(b, a)
}

/// Reinsert removed vertices into a fan-planar drawing of the reduced
/// graph, in reverse trace order, following the constructive lemma proofs.
/// The result is a drawing of `original` and is verified fan-planar.
pub fn lift_drawing(
    original: &Arc<BipartiteGraph>,
    trace: &ReductionTrace,
    d_reduced: &TwoLayerDrawing,
) -> Result<TwoLayerDrawing> {
    let replayed = replay_trace(original, trace)?;
    if replayed != **d_reduced.host() {
        return Err(Error::TraceMismatch("trace does not produce the drawing's host graph".into()));
    }
    if !d_reduced.verify(None).fan_planar {
        return Err(Error::LiftFailed("input drawing of the reduced graph is not fan-planar".into()));
    }

    let mut xs = d_reduced.x_order_ids();
    let mut ys = d_reduced.y_order_ids();
    for step in trace.steps.iter().rev() {
        let side = original
            .side_of(&step.removed)
            .ok_or_else(|| Error::UnknownVertex(step.removed.clone()))?;
        let order = match side {
            crate::graph::Side::X => &mut xs,
            crate::graph::Side::Y => &mut ys,
        };
        match step.rule {
            Rule::Isolated => order.push(step.removed.clone()),
            Rule::Deg1 => {
                let u = &step.anchors[0];
                let pos = order
                    .iter()
                    .position(|s| s == u)
                    .ok_or_else(|| Error::TraceMismatch(format!("anchor `{u}` not drawn")))?;
                order.insert(pos + 1, step.removed.clone());
            }
            Rule::Deg2Twin => {
                // a position strictly between the kept twins: immediately to
                // the right of whichever is drawn leftmost
                let (u1, u2) = (&step.anchors[0], &step.anchors[1]);
                let p1 = order.iter().position(|s| s == u1);
                let p2 = order.iter().position(|s| s == u2);
                let pos = match (p1, p2) {
                    (Some(a), Some(b)) => a.min(b),
                    _ => return Err(Error::TraceMismatch(format!("twin anchors `{u1}`/`{u2}` not drawn"))),
                };
                order.insert(pos + 1, step.removed.clone());
            }
        }
    }

    let lifted = TwoLayerDrawing::new(Arc::clone(original), &xs, &ys)?;
    lifted.require_complete()?;
    let report = lifted.verify(None);
    if !report.fan_planar {
        return Err(Error::LiftFailed(format!(
            "lifted drawing has violating triple {:?}",
            report.violating_triple
        )));
    }
    Ok(lifted)
}

/// Convenience: the vertices removed by a trace.
pub fn removed_vertices(trace: &ReductionTrace) -> VertexSet {
    trace.steps.iter().map(|s| s.removed.clone()).collect()
}
