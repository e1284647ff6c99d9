//! Randomized invariants for the graph, drawing, reduction and oracle layers.

use std::sync::Arc;

use proptest::prelude::*;

use fanplanar::graph::{BipartiteGraph, VertexSet};
use fanplanar::oracle::{decide_bruteforce, Lcg, SearchBudget};
use fanplanar::reduction::{apply_reductions, lift_drawing, replay_trace};
use fanplanar::TwoLayerDrawing;

/// Graph with `nx`/`ny` named vertices and edges taken from the mask bits.
fn mask_graph(nx: usize, ny: usize, mask: u64) -> BipartiteGraph {
    let xs: Vec<String> = (1..=nx).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=ny).map(|i| format!("y{i}")).collect();
    let edges: Vec<(String, String)> = (0..nx * ny)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| (xs[b / ny.max(1)].clone(), ys[b % ny.max(1)].clone()))
        .collect();
    BipartiteGraph::new(xs, ys, edges).unwrap()
}

fn graphs(max_side: usize) -> impl Strategy<Value = BipartiteGraph> {
    (0..=max_side, 0..=max_side, any::<u64>()).prop_map(|(nx, ny, mask)| mask_graph(nx, ny, mask))
}

/// Shuffle of `items` driven by a seed (Fisher-Yates over the LCG).
fn shuffle(items: &mut Vec<String>, seed: u64) {
    let mut rng = Lcg::new(seed);
    for i in (1..items.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

fn shuffled_drawing(g: &Arc<BipartiteGraph>, seed: u64) -> TwoLayerDrawing {
    let mut xs: Vec<String> = g.x_vertices().map(str::to_string).collect();
    let mut ys: Vec<String> = g.y_vertices().map(str::to_string).collect();
    shuffle(&mut xs, seed);
    shuffle(&mut ys, seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    TwoLayerDrawing::new(Arc::clone(g), &xs, &ys).unwrap()
}

proptest! {
    #[test]
    fn serialize_round_trips(g in graphs(4)) {
        let text = g.serialize();
        let back = fanplanar::parse_graph(&text).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn cut_is_symmetric(g in graphs(4), pick in any::<u64>()) {
        let all: Vec<String> = g.vertex_set().into_iter().collect();
        let u: VertexSet =
            all.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        let rest: VertexSet = all.iter().filter(|v| !u.contains(*v)).cloned().collect();
        prop_assert_eq!(g.boundary_edges(&u).unwrap(), g.boundary_edges(&rest).unwrap());
    }

    #[test]
    fn closed_neighborhood_contains_set(g in graphs(4), pick in any::<u64>()) {
        let all: Vec<String> = g.vertex_set().into_iter().collect();
        let u: VertexSet =
            all.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        let closed = g.closed_neighborhood(&u).unwrap();
        prop_assert!(closed.is_superset(&u));
        let open = g.open_neighborhood(&u).unwrap();
        prop_assert_eq!(closed, u.union(&open).cloned().collect::<VertexSet>());
    }

    #[test]
    fn components_partition_the_graph(g in graphs(4)) {
        let comps = g.connected_components();
        let mut seen = VertexSet::new();
        for c in &comps {
            prop_assert!(seen.is_disjoint(c));
            seen.extend(c.iter().cloned());
        }
        prop_assert_eq!(seen, g.vertex_set());
        for e in g.edges() {
            let home = comps.iter().position(|c| c.contains(&e.x));
            let other = comps.iter().position(|c| c.contains(&e.y));
            prop_assert_eq!(home, other);
        }
    }

    #[test]
    fn reversal_preserves_crossings(g in graphs(4), seed in any::<u64>()) {
        let g = Arc::new(g);
        let d = shuffled_drawing(&g, seed);
        let mut a = d.crossing_pairs();
        let mut b = d.reversed().crossing_pairs();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn crossing_edges_never_share_a_vertex(g in graphs(4), seed in any::<u64>()) {
        let g = Arc::new(g);
        let d = shuffled_drawing(&g, seed);
        for (e, f) in d.crossing_pairs() {
            prop_assert!(!e.shares_vertex(&f));
        }
    }

    #[test]
    fn fan_planar_is_degree_planar(g in graphs(4), seed in any::<u64>()) {
        let g = Arc::new(g);
        let d = shuffled_drawing(&g, seed);
        let r = d.verify(None);
        if r.fan_planar {
            prop_assert!(r.max_crossings_per_edge as usize <= g.max_degree());
        }
    }

    #[test]
    fn induced_subdrawings_stay_fan_planar(g in graphs(4), seed in any::<u64>(), pick in any::<u64>()) {
        let g = Arc::new(g);
        let d = shuffled_drawing(&g, seed);
        let all: Vec<String> = g.vertex_set().into_iter().collect();
        let u: VertexSet =
            all.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        let sub = d.restrict(&u);
        let whole: std::collections::BTreeSet<_> = d.crossing_pairs().into_iter().collect();
        for pair in sub.crossing_pairs() {
            prop_assert!(whole.contains(&pair));
        }
        if d.verify(None).fan_planar {
            prop_assert!(sub.verify(None).fan_planar);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Lemmas deg-1 and deg-2: reductions never change the answer, and
    // certificates lift back through the trace.
    #[test]
    fn reductions_preserve_the_decision(g in graphs(3)) {
        let g = Arc::new(g);
        let (red, trace) = apply_reductions(&g);
        prop_assert_eq!(&replay_trace(&g, &trace).unwrap(), &red);
        let red = Arc::new(red);
        let budget = SearchBudget::default();
        let before = decide_bruteforce(&g, None, &budget);
        let after = decide_bruteforce(&red, None, &budget);
        prop_assert_eq!(before.is_yes(), after.is_yes());
        if let fanplanar::OracleOutcome::Yes(d) = after {
            let lifted = lift_drawing(&g, &trace, &d).unwrap();
            prop_assert!(lifted.verify(None).fan_planar);
            prop_assert!(lifted.is_complete());
        }
    }

    // monotonicity of the k cap
    #[test]
    fn oracle_monotone_in_k(g in graphs(3), k in 0u32..3) {
        let g = Arc::new(g);
        let budget = SearchBudget::default();
        if decide_bruteforce(&g, Some(k), &budget).is_yes() {
            prop_assert!(decide_bruteforce(&g, Some(k + 1), &budget).is_yes());
        }
    }
}
