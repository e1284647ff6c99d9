//! Bipartite graph representation, the text file format, and the set-level
//! queries (N(U), N[U], delta(U), connected components) the rest of the
//! crate is built on.
//!
//! Vertex ids are opaque strings matching `[A-Za-z0-9_]+`; every canonical
//! order in this crate is lexicographic by id.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Canonically ordered set of vertex ids.
pub type VertexSet = BTreeSet<String>;

/// An edge of a bipartite graph, stored as its X endpoint and Y endpoint.
/// The derived order (x, then y) is the canonical edge order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Edge {
    pub x: String,
    pub y: String,
}

impl Edge {
    pub fn new(x: impl Into<String>, y: impl Into<String>) -> Self {
        Edge { x: x.into(), y: y.into() }
    }

    /// True if the two edges share an endpoint.
    pub fn shares_vertex(&self, other: &Edge) -> bool {
        self.x == other.x || self.y == other.y
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.x, self.y)
    }
}

/// Canonically ordered set of edges.
pub type EdgeSet = BTreeSet<Edge>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

/// A simple bipartite graph with sides X and Y.
///
/// Immutable after construction. Vertex iteration order is declaration
/// order; all set-valued queries return canonically (lexicographically)
/// ordered results.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    ids: Vec<String>,
    index: HashMap<String, u32>,
    side: Vec<Side>,
    x_decl: Vec<u32>,
    y_decl: Vec<u32>,
    /// (x index, y index) pairs, sorted by (x id, y id).
    edges: Vec<(u32, u32)>,
    /// Neighbor indices per vertex, sorted by neighbor id.
    adj: Vec<Vec<u32>>,
}

impl PartialEq for BipartiteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.x_vertex_set() == other.x_vertex_set()
            && self.y_vertex_set() == other.y_vertex_set()
            && self.edge_set() == other.edge_set()
    }
}

impl Eq for BipartiteGraph {}

impl BipartiteGraph {
    /// Build a graph from declared sides and edges given by id pairs (x, y).
    pub fn new<S: AsRef<str>>(
        x: impl IntoIterator<Item = S>,
        y: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self> {
        let mut g = BipartiteGraph {
            ids: Vec::new(),
            index: HashMap::new(),
            side: Vec::new(),
            x_decl: Vec::new(),
            y_decl: Vec::new(),
            edges: Vec::new(),
            adj: Vec::new(),
        };
        for v in x {
            g.declare(v.as_ref(), Side::X).map_err(no_line)?;
        }
        for v in y {
            g.declare(v.as_ref(), Side::Y).map_err(no_line)?;
        }
        for (a, b) in edges {
            g.declare_edge(a.as_ref(), b.as_ref()).map_err(no_line)?;
        }
        g.finish();
        Ok(g)
    }

    fn declare(&mut self, id: &str, side: Side) -> std::result::Result<(), String> {
        if id.is_empty() || !id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
            return Err(format!("invalid vertex name `{id}`"));
        }
        if self.index.contains_key(id) {
            return Err(format!("duplicate vertex declaration `{id}`"));
        }
        let idx = self.ids.len() as u32;
        self.index.insert(id.to_string(), idx);
        self.ids.push(id.to_string());
        self.side.push(side);
        self.adj.push(Vec::new());
        match side {
            Side::X => self.x_decl.push(idx),
            Side::Y => self.y_decl.push(idx),
        }
        Ok(())
    }

    fn declare_edge(&mut self, x: &str, y: &str) -> std::result::Result<(), String> {
        let &xi = self.index.get(x).ok_or_else(|| format!("unknown vertex `{x}` in edge"))?;
        let &yi = self.index.get(y).ok_or_else(|| format!("unknown vertex `{y}` in edge"))?;
        if self.side[xi as usize] != Side::X {
            return Err(format!("edge endpoint `{x}` is not an X-vertex"));
        }
        if self.side[yi as usize] != Side::Y {
            return Err(format!("edge endpoint `{y}` is not a Y-vertex"));
        }
        if self.edges.contains(&(xi, yi)) {
            return Err(format!("duplicate edge {{{x}, {y}}}"));
        }
        self.edges.push((xi, yi));
        Ok(())
    }

    fn finish(&mut self) {
        let ids = &self.ids;
        self.edges
            .sort_by(|&(a, b), &(c, d)| (&ids[a as usize], &ids[b as usize]).cmp(&(&ids[c as usize], &ids[d as usize])));
        for &(x, y) in &self.edges {
            self.adj[x as usize].push(y);
            self.adj[y as usize].push(x);
        }
        for nbrs in &mut self.adj {
            nbrs.sort_by(|&a, &b| ids[a as usize].cmp(&ids[b as usize]));
        }
    }

    // --- accessors -------------------------------------------------------

    pub fn x_vertices(&self) -> impl Iterator<Item = &str> {
        self.x_decl.iter().map(move |&i| self.ids[i as usize].as_str())
    }

    pub fn y_vertices(&self) -> impl Iterator<Item = &str> {
        self.y_decl.iter().map(move |&i| self.ids[i as usize].as_str())
    }

    pub fn x_vertex_set(&self) -> VertexSet {
        self.x_vertices().map(String::from).collect()
    }

    pub fn y_vertex_set(&self) -> VertexSet {
        self.y_vertices().map(String::from).collect()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.ids.iter().cloned().collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn num_x(&self) -> usize {
        self.x_decl.len()
    }

    pub fn num_y(&self) -> usize {
        self.y_decl.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges
            .iter()
            .map(|&(x, y)| Edge::new(self.ids[x as usize].clone(), self.ids[y as usize].clone()))
            .collect()
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges
            .iter()
            .map(move |&(x, y)| Edge::new(self.ids[x as usize].clone(), self.ids[y as usize].clone()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn side_of(&self, id: &str) -> Option<Side> {
        self.index.get(id).map(|&i| self.side[i as usize])
    }

    pub fn has_edge(&self, x: &str, y: &str) -> bool {
        match (self.index.get(x), self.index.get(y)) {
            (Some(&xi), Some(&yi)) => self.edges.contains(&(xi, yi)),
            _ => false,
        }
    }

    pub fn degree(&self, id: &str) -> Result<usize> {
        let &i = self.index.get(id).ok_or_else(|| Error::UnknownVertex(id.to_string()))?;
        Ok(self.adj[i as usize].len())
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Neighbors of a vertex in canonical order.
    pub fn neighbors(&self, id: &str) -> Result<Vec<&str>> {
        let &i = self.index.get(id).ok_or_else(|| Error::UnknownVertex(id.to_string()))?;
        Ok(self.adj[i as usize].iter().map(|&j| self.ids[j as usize].as_str()).collect())
    }

    // --- index-level accessors for the search modules --------------------

    pub(crate) fn idx(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub(crate) fn id_of(&self, idx: u32) -> &str {
        &self.ids[idx as usize]
    }

    pub(crate) fn side_at(&self, idx: u32) -> Side {
        self.side[idx as usize]
    }

    pub(crate) fn adj_at(&self, idx: u32) -> &[u32] {
        &self.adj[idx as usize]
    }

    pub(crate) fn edge_indices(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub(crate) fn x_indices(&self) -> &[u32] {
        &self.x_decl
    }

    pub(crate) fn y_indices(&self) -> &[u32] {
        &self.y_decl
    }

    // --- set-level queries ------------------------------------------------

    fn check_members(&self, u: &VertexSet) -> Result<()> {
        for v in u {
            if !self.contains(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        Ok(())
    }

    /// Open neighborhood N(U).
    pub fn open_neighborhood(&self, u: &VertexSet) -> Result<VertexSet> {
        self.check_members(u)?;
        let mut out = VertexSet::new();
        for v in u {
            let i = self.index[v];
            for &j in &self.adj[i as usize] {
                out.insert(self.ids[j as usize].clone());
            }
        }
        Ok(out)
    }

    /// Closed neighborhood N[U] = U ∪ N(U).
    pub fn closed_neighborhood(&self, u: &VertexSet) -> Result<VertexSet> {
        let mut out = self.open_neighborhood(u)?;
        out.extend(u.iter().cloned());
        Ok(out)
    }

    /// Boundary edges delta(U): edges with exactly one endpoint in U.
    pub fn boundary_edges(&self, u: &VertexSet) -> Result<EdgeSet> {
        self.check_members(u)?;
        let mut out = EdgeSet::new();
        for &(x, y) in &self.edges {
            let xs = &self.ids[x as usize];
            let ys = &self.ids[y as usize];
            if u.contains(xs) != u.contains(ys) {
                out.insert(Edge::new(xs.clone(), ys.clone()));
            }
        }
        Ok(out)
    }

    /// Connected components, each canonical, sorted by smallest member.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        self.components_excluding(&[]).unwrap_or_default()
    }

    /// Components of the subgraph induced by removing `removed`.
    pub fn components_after_removal(&self, removed: &VertexSet) -> Result<Vec<VertexSet>> {
        self.check_members(removed)?;
        let removed_idx: Vec<u32> = removed.iter().map(|v| self.index[v]).collect();
        self.components_excluding(&removed_idx)
    }

    fn components_excluding(&self, removed: &[u32]) -> Result<Vec<VertexSet>> {
        let comps = self.components_idx(removed);
        let mut out: Vec<VertexSet> = comps
            .into_iter()
            .map(|c| c.into_iter().map(|i| self.ids[i as usize].clone()).collect::<VertexSet>())
            .collect();
        out.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
        Ok(out)
    }

    /// Index-level components of G - removed; each component sorted by index.
    pub(crate) fn components_idx(&self, removed: &[u32]) -> Vec<Vec<u32>> {
        let n = self.ids.len();
        let mut gone = vec![false; n];
        for &r in removed {
            gone[r as usize] = true;
        }
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n as u32 {
            if gone[start as usize] || seen[start as usize] {
                continue;
            }
            let mut comp = vec![start];
            seen[start as usize] = true;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v as usize] {
                    if !gone[w as usize] && !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Fresh graph induced by `verts`; declaration order is canonical.
    pub fn induced_subgraph(&self, verts: &VertexSet) -> Result<BipartiteGraph> {
        self.check_members(verts)?;
        let xs: Vec<&str> = verts.iter().map(String::as_str).filter(|v| self.side_of(v) == Some(Side::X)).collect();
        let ys: Vec<&str> = verts.iter().map(String::as_str).filter(|v| self.side_of(v) == Some(Side::Y)).collect();
        let es: Vec<(&str, &str)> = self
            .edges
            .iter()
            .map(|&(x, y)| (self.ids[x as usize].as_str(), self.ids[y as usize].as_str()))
            .filter(|(x, y)| verts.contains(*x) && verts.contains(*y))
            .collect();
        BipartiteGraph::new(xs, ys, es)
    }

    /// Fresh graph with one vertex (and its incident edges) removed.
    pub fn remove_vertex(&self, id: &str) -> Result<BipartiteGraph> {
        if !self.contains(id) {
            return Err(Error::UnknownVertex(id.to_string()));
        }
        let mut verts = self.vertex_set();
        verts.remove(id);
        self.induced_subgraph(&verts)
    }

    // --- file format ------------------------------------------------------

    /// Parse the graph file format: `x NAME`, `y NAME`, `e XNAME YNAME`,
    /// one record per line, `#` starting a comment line.
    pub fn parse(text: &str) -> Result<BipartiteGraph> {
        let mut g = BipartiteGraph {
            ids: Vec::new(),
            index: HashMap::new(),
            side: Vec::new(),
            x_decl: Vec::new(),
            y_decl: Vec::new(),
            edges: Vec::new(),
            adj: Vec::new(),
        };
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(' ').collect();
            let res = match fields.as_slice() {
                ["x", name] => g.declare(name, Side::X),
                ["y", name] => g.declare(name, Side::Y),
                ["e", x, y] => g.declare_edge(x, y),
                _ => Err(format!("malformed line `{line}`")),
            };
            if let Err(msg) = res {
                return Err(Error::Parse { line: lineno, msg });
            }
        }
        g.finish();
        Ok(g)
    }

    /// Canonical serialization: x-lines, then y-lines, then e-lines, each
    /// group lexicographic. `parse(serialize(g)) == g` and the output is
    /// byte-stable.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for v in self.x_vertex_set() {
            out.push_str("x ");
            out.push_str(&v);
            out.push('\n');
        }
        for v in self.y_vertex_set() {
            out.push_str("y ");
            out.push_str(&v);
            out.push('\n');
        }
        for e in self.edges() {
            out.push_str("e ");
            out.push_str(&e.x);
            out.push(' ');
            out.push_str(&e.y);
            out.push('\n');
        }
        out
    }
}

fn no_line(msg: String) -> Error {
    Error::Parse { line: 0, msg }
}

/// Parse helper mirroring `BipartiteGraph::parse`.
pub fn parse_graph(text: &str) -> Result<BipartiteGraph> {
    BipartiteGraph::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(items: &[&str]) -> VertexSet {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn path_abc() -> BipartiteGraph {
        // a - b - c with b on Y
        BipartiteGraph::new(vec!["a", "c"], vec!["b"], vec![("a", "b"), ("c", "b")]).unwrap()
    }

    #[test]
    fn parse_single_edge() {
        let g = BipartiteGraph::parse("x a\ny b\ne a b\n").unwrap();
        assert_eq!(g.x_vertex_set(), vs(&["a"]));
        assert_eq!(g.y_vertex_set(), vs(&["b"]));
        assert_eq!(g.num_edges(), 1);
        assert!(g.has_edge("a", "b"));
    }

    #[test]
    fn parse_undeclared_vertex_reports_line() {
        let err = BipartiteGraph::parse("e a b\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 1, msg: "unknown vertex `a` in edge".into() });
    }

    #[test]
    fn parse_k23_counts() {
        let text = "x v\nx w\ny u1\ny u2\ny u3\ne v u1\ne v u2\ne v u3\ne w u1\ne w u2\ne w u3\n";
        let g = BipartiteGraph::parse(text).unwrap();
        assert_eq!((g.num_x(), g.num_y(), g.num_edges()), (2, 3, 6));
    }

    #[test]
    fn parse_rejects_duplicates_and_side_mixups() {
        assert!(matches!(
            BipartiteGraph::parse("x a\nx a\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            BipartiteGraph::parse("x a\ny a\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            BipartiteGraph::parse("x a\ny b\ne a b\ne a b\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            BipartiteGraph::parse("x a\nx b\ne a b\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            BipartiteGraph::parse("x a b\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn closed_neighborhood_star() {
        let g = BipartiteGraph::new(
            vec!["c"],
            vec!["l1", "l2", "l3"],
            vec![("c", "l1"), ("c", "l2"), ("c", "l3")],
        )
        .unwrap();
        assert_eq!(g.closed_neighborhood(&vs(&["c"])).unwrap(), vs(&["c", "l1", "l2", "l3"]));
        assert_eq!(g.closed_neighborhood(&VertexSet::new()).unwrap(), VertexSet::new());
    }

    #[test]
    fn closed_neighborhood_path_end() {
        let g = path_abc();
        assert_eq!(g.closed_neighborhood(&vs(&["a"])).unwrap(), vs(&["a", "b"]));
        assert!(g.closed_neighborhood(&vs(&["zzz"])).is_err());
    }

    #[test]
    fn boundary_edges_path_middle() {
        let g = path_abc();
        let d = g.boundary_edges(&vs(&["b"])).unwrap();
        assert_eq!(d, [Edge::new("a", "b"), Edge::new("c", "b")].into_iter().collect());
        assert!(g.boundary_edges(&vs(&["a", "b", "c"])).unwrap().is_empty());
    }

    #[test]
    fn boundary_edges_k22_side() {
        let g = BipartiteGraph::new(
            vec!["a", "b"],
            vec!["c", "d"],
            vec![("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
        )
        .unwrap();
        assert_eq!(g.boundary_edges(&vs(&["a", "b"])).unwrap().len(), 4);
    }

    #[test]
    fn components_basics() {
        let g = BipartiteGraph::new(
            vec!["a", "c"],
            vec!["b", "d"],
            vec![("a", "b"), ("c", "d")],
        )
        .unwrap();
        let comps = g.connected_components();
        assert_eq!(comps, vec![vs(&["a", "b"]), vs(&["c", "d"])]);

        // path a-b-c-d, remove b
        let p = BipartiteGraph::new(vec!["a", "c"], vec!["b", "d"], vec![("a", "b"), ("c", "b"), ("c", "d")]).unwrap();
        assert_eq!(p.connected_components().len(), 1);
        let after = p.components_after_removal(&vs(&["b"])).unwrap();
        assert_eq!(after, vec![vs(&["a"]), vs(&["c", "d"])]);
    }

    #[test]
    fn serialize_round_trip_canonical() {
        let g = BipartiteGraph::new(vec!["b", "a"], vec!["z", "y"], vec![("b", "z"), ("a", "y")]).unwrap();
        let s = g.serialize();
        assert_eq!(s, "x a\nx b\ny y\ny z\ne a y\ne b z\n");
        let g2 = BipartiteGraph::parse(&s).unwrap();
        assert_eq!(g, g2);
        assert_eq!(g2.serialize(), s);
    }
}
