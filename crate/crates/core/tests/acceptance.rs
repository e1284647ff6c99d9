//! Acceptance gate: one pass/fail line per criterion.
//!
//! 1. decide == exhaustive oracle on every labeled graph with |X|,|Y| <= 3
//! 2. decide_dp == oracle (k in {1,2}) on paths, even cycles and random
//!    connected graphs with max degree 4
//! 3. reductions never change the oracle's answer; lifted certificates verify
//! 4. rejection-lemma firings are always confirmed NO by the oracle
//! 5. every fan-planar drawing seen has max crossings per edge <= max degree
//! 6. exploratory search for a fan-planar reduced graph with a degree-7 vertex
//! 7. two runs with fixed seeds produce byte-identical JSON reports

use std::sync::Arc;

use fanplanar::dpsolver::{decide, decide_dp, DecideOptions, DpBudget, DpOutcome};
use fanplanar::graph::BipartiteGraph;
use fanplanar::oracle::{decide_bruteforce, exhaustive_graphs, random_graph, Lcg, OracleOutcome, SearchBudget};
use fanplanar::reduction::{apply_reductions, early_reject, is_reduced, lift_drawing};
use fanplanar::{Answer, TwoLayerDrawing};

#[derive(Default)]
struct Recorder {
    /// (max crossings per edge, host max degree) per fan-planar drawing seen
    drawings: Vec<(u32, usize)>,
    /// serialized components on which early_reject fired
    reject_firings: Vec<String>,
    report: serde_json::Map<String, serde_json::Value>,
}

impl Recorder {
    fn record_drawing(&mut self, d: &TwoLayerDrawing) {
        let r = d.verify(None);
        assert!(r.fan_planar, "recorded drawing must be fan-planar");
        self.drawings.push((r.max_crossings_per_edge, d.host().max_degree()));
    }

    /// Note every early_reject firing among the graph's reduced components.
    fn scan_rejections(&mut self, g: &BipartiteGraph) {
        for comp in g.connected_components() {
            let comp_g = g.induced_subgraph(&comp).unwrap();
            let (red, _) = apply_reductions(&comp_g);
            if red.num_vertices() > 0 && early_reject(&red).unwrap().is_some() {
                self.reject_firings.push(comp_g.serialize());
            }
        }
    }
}

fn oracle(g: &Arc<BipartiteGraph>, k: Option<u32>) -> OracleOutcome {
    decide_bruteforce(g, k, &SearchBudget::default())
}

/// Path a1 - ... - an, odd positions on X.
fn path(n: usize) -> BipartiteGraph {
    let xs: Vec<String> = (1..=n).step_by(2).map(|i| format!("a{i}")).collect();
    let ys: Vec<String> = (2..=n).step_by(2).map(|i| format!("a{i}")).collect();
    let es: Vec<(String, String)> = (1..n)
        .map(|i| {
            if i % 2 == 1 {
                (format!("a{i}"), format!("a{}", i + 1))
            } else {
                (format!("a{}", i + 1), format!("a{i}"))
            }
        })
        .collect();
    BipartiteGraph::new(xs, ys, es).unwrap()
}

fn cycle(n: usize) -> BipartiteGraph {
    let p = path(n);
    let mut es: Vec<(String, String)> = p.edges().map(|e| (e.x, e.y)).collect();
    es.push(("a1".into(), format!("a{n}")));
    let xs: Vec<String> = p.x_vertices().map(str::to_string).collect();
    let ys: Vec<String> = p.y_vertices().map(str::to_string).collect();
    BipartiteGraph::new(xs, ys, es).unwrap()
}

/// Criterion 1: pipeline equals oracle on every graph with |X|,|Y| <= 3.
fn criterion_1(rec: &mut Recorder) -> (bool, String) {
    let mut total = 0u64;
    let mut mismatches = 0u64;
    for nx in 0..=3 {
        for ny in 0..=3 {
            for g in exhaustive_graphs(nx, ny) {
                total += 1;
                rec.scan_rejections(&g);
                let g = Arc::new(g);
                let dec = decide(&g, &DecideOptions::default()).unwrap();
                let bf = oracle(&g, None);
                if (dec.answer == Answer::Yes) != bf.is_yes() {
                    mismatches += 1;
                    continue;
                }
                if let Some(c) = &dec.certificate {
                    rec.record_drawing(c);
                }
                if let OracleOutcome::Yes(w) = &bf {
                    rec.record_drawing(w);
                }
            }
        }
    }
    rec.report.insert("c1".into(), serde_json::json!({ "graphs": total, "mismatches": mismatches }));
    (mismatches == 0, format!("{total} graphs, {mismatches} mismatches"))
}

/// 200 seeded random connected graphs, max degree <= 4, n <= 12.
fn random_connected_corpus() -> Vec<BipartiteGraph> {
    let mut rng = Lcg::new(0xacce57);
    let mut out = Vec::new();
    while out.len() < 200 {
        let nx = 2 + rng.below(4) as usize;
        let ny = 2 + rng.below(4) as usize;
        let lo = (nx + ny - 1) as u64;
        let hi = (nx * ny).min(2 * (nx + ny)) as u64;
        if hi < lo {
            continue;
        }
        let m = (lo + rng.below(hi - lo + 1)) as usize;
        let g = random_graph(nx, ny, m, rng.next_u64()).unwrap();
        if g.max_degree() <= 4 && g.connected_components().len() == 1 {
            out.push(g);
        }
    }
    out
}

/// Criterion 2: decide_dp equals the capped oracle wherever its
/// preconditions hold.
fn criterion_2(rec: &mut Recorder) -> (bool, String) {
    let mut corpus: Vec<BipartiteGraph> = Vec::new();
    for n in 8..=14 {
        corpus.push(path(n));
        if n % 2 == 0 {
            corpus.push(cycle(n));
        }
    }
    corpus.extend(random_connected_corpus());

    let mut runs = 0u64;
    let mut mismatches = 0u64;
    for g in corpus {
        let g = Arc::new(g);
        for k in [1u32, 2] {
            if g.max_degree() > 2 * k as usize + 2 {
                continue;
            }
            runs += 1;
            let dp = decide_dp(&g, k, &DpBudget::default()).unwrap();
            let bf = oracle(&g, Some(k));
            if dp.is_yes() != bf.is_yes() {
                mismatches += 1;
                continue;
            }
            if let DpOutcome::Yes(d) = &dp {
                let r = d.verify(Some(k));
                assert!(r.fan_planar && r.within_k == Some(true));
                rec.record_drawing(d);
            }
            if let OracleOutcome::Yes(w) = &bf {
                rec.record_drawing(w);
            }
        }
    }
    rec.report.insert("c2".into(), serde_json::json!({ "runs": runs, "mismatches": mismatches }));
    (mismatches == 0, format!("{runs} dp-vs-oracle runs, {mismatches} mismatches"))
}

/// Criterion 3: the oracle's answer is invariant under the reductions, and
/// certificates of the reduced graph lift back and verify.
fn criterion_3(rec: &mut Recorder) -> (bool, String) {
    let mut rng = Lcg::new(0x5eed);
    let mut violations = 0u64;
    let mut lifted_ok = 0u64;
    for _ in 0..500 {
        let nx = 1 + rng.below(4) as usize;
        let ny = 1 + rng.below(5) as usize;
        let m = rng.below((nx * ny) as u64 + 1) as usize;
        let g = Arc::new(random_graph(nx, ny, m, rng.next_u64()).unwrap());
        rec.scan_rejections(&g);

        let (red, trace) = apply_reductions(&g);
        let red = Arc::new(red);
        let before = oracle(&g, None);
        let after = oracle(&red, None);
        if before.is_yes() != after.is_yes() {
            violations += 1;
            continue;
        }
        if let OracleOutcome::Yes(d) = &after {
            let lifted = lift_drawing(&g, &trace, d).unwrap();
            let r = lifted.verify(None);
            if r.fan_planar && lifted.is_complete() {
                lifted_ok += 1;
                rec.record_drawing(&lifted);
            } else {
                violations += 1;
            }
        }
    }
    rec.report.insert(
        "c3".into(),
        serde_json::json!({ "graphs": 500, "violations": violations, "lifted": lifted_ok }),
    );
    (violations == 0, format!("500 graphs, {violations} violations, {lifted_ok} lifted certificates"))
}

/// Criterion 4: named rejection instances plus every firing recorded from
/// the other corpora are confirmed NO by the oracle.
fn criterion_4(rec: &mut Recorder) -> (bool, String) {
    // K_{3,5}: Lemma about five neighbors of degree >= 3
    let k35 = {
        let xs: Vec<String> = (1..=3).map(|i| format!("x{i}")).collect();
        let ys: Vec<String> = (1..=5).map(|i| format!("y{i}")).collect();
        let es: Vec<(String, String)> =
            xs.iter().flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone()))).collect();
        BipartiteGraph::new(xs, ys, es).unwrap()
    };
    // 5-spider: five degree-2 neighbors matched to distinct second neighbors
    let spider = {
        let mut xs = vec!["v".to_string()];
        let mut ys = Vec::new();
        let mut es = Vec::new();
        for i in 1..=5 {
            xs.push(format!("w{i}"));
            ys.push(format!("u{i}"));
            es.push(("v".to_string(), format!("u{i}")));
            es.push((format!("w{i}"), format!("u{i}")));
        }
        BipartiteGraph::new(xs, ys, es).unwrap()
    };

    let mut failures = 0u64;
    for g in [&k35, &spider] {
        let (red, _) = apply_reductions(g);
        let fired = early_reject(&red).unwrap().is_some();
        let no = oracle(&Arc::new(g.clone()), None).is_no();
        if !fired || !no {
            failures += 1;
        }
    }

    let firings = rec.reject_firings.clone();
    for text in &firings {
        let g = Arc::new(fanplanar::parse_graph(text).unwrap());
        if !oracle(&g, None).is_no() {
            failures += 1;
        }
    }
    rec.report.insert(
        "c4".into(),
        serde_json::json!({ "corpus_firings": firings.len(), "failures": failures }),
    );
    (
        failures == 0,
        format!("K35 + 5-spider + {} corpus firings confirmed NO, {failures} failures", firings.len()),
    )
}

/// Criterion 5: every recorded fan-planar drawing is Delta-planar.
fn criterion_5(rec: &mut Recorder) -> (bool, String) {
    let total = rec.drawings.len();
    let violations = rec.drawings.iter().filter(|&&(c, d)| c as usize > d).count();
    rec.report.insert("c5".into(), serde_json::json!({ "drawings": total, "violations": violations }));
    (violations == 0, format!("{total} drawings, {violations} degree-bound violations"))
}

/// Criterion 6: look for a fan-planar reduced graph with a degree-7 vertex:
/// one degree-1 neighbor plus three twin pairs to distinct partners, and
/// variants adding one extra Y-vertex attached to the partners.
fn criterion_6(rec: &mut Recorder) -> (bool, String) {
    let base = |extra: &[usize]| -> BipartiteGraph {
        let mut xs = vec!["v".to_string()];
        let mut ys = vec!["u0".to_string()];
        let mut es = vec![("v".to_string(), "u0".to_string())];
        for i in 1..=3 {
            xs.push(format!("w{i}"));
            for j in 1..=2 {
                let t = format!("t{i}{j}");
                es.push(("v".to_string(), t.clone()));
                es.push((format!("w{i}"), t.clone()));
                ys.push(t);
            }
        }
        if !extra.is_empty() {
            ys.push("z".to_string());
            for &i in extra {
                es.push((format!("w{i}"), "z".to_string()));
            }
        }
        BipartiteGraph::new(xs, ys, es).unwrap()
    };

    let mut candidates: Vec<Vec<usize>> = vec![vec![]];
    for mask in 1u8..8 {
        candidates.push((1..=3).filter(|i| mask >> (i - 1) & 1 == 1).collect());
    }

    for extra in &candidates {
        let g = base(extra);
        if !is_reduced(&g) || g.degree("v").unwrap() != 7 {
            continue;
        }
        let g = Arc::new(g);
        if let OracleOutcome::Yes(d) = oracle(&g, None) {
            rec.record_drawing(&d);
            rec.report.insert(
                "c6".into(),
                serde_json::json!({
                    "found": true,
                    "graph": g.serialize(),
                    "drawing": serde_json::to_value(d.to_file()).unwrap(),
                }),
            );
            return (true, format!("witness found ({} vertices, degree-7 vertex v)", g.num_vertices()));
        }
    }
    rec.report.insert("c6".into(), serde_json::json!({ "found": false }));
    // flagged discrepancy, not a hard failure: the exact figure graph is unknown
    (true, "FLAG: no fan-planar member found in the degree-7 family".into())
}

struct RunOutput {
    results: Vec<(&'static str, bool, String)>,
    report_json: String,
}

fn run_all() -> RunOutput {
    let mut rec = Recorder::default();
    let mut results = Vec::new();
    let c1 = criterion_1(&mut rec);
    results.push(("1 exhaustive pipeline equivalence", c1.0, c1.1));
    let c2 = criterion_2(&mut rec);
    results.push(("2 dp-vs-oracle equivalence", c2.0, c2.1));
    let c3 = criterion_3(&mut rec);
    results.push(("3 reduction safety", c3.0, c3.1));
    let c4 = criterion_4(&mut rec);
    results.push(("4 rejection lemma soundness", c4.0, c4.1));
    let c5 = criterion_5(&mut rec);
    results.push(("5 degree-planarity observation", c5.0, c5.1));
    let c6 = criterion_6(&mut rec);
    results.push(("6 degree-7 family (exploratory)", c6.0, c6.1));
    let report_json = serde_json::to_string_pretty(&serde_json::Value::Object(rec.report)).unwrap();
    RunOutput { results, report_json }
}

#[test]
fn acceptance() {
    let first = run_all();
    let second = run_all();

    let mut all_pass = true;
    for (name, pass, detail) in &first.results {
        println!("criterion {name}: {} — {detail}", if *pass { "PASS" } else { "FAIL" });
        all_pass &= pass;
    }
    let deterministic = first.report_json == second.report_json;
    println!(
        "criterion 7 determinism: {} — reports {}",
        if deterministic { "PASS" } else { "FAIL" },
        if deterministic { "byte-identical across two runs" } else { "differ between runs" }
    );
    println!("{}", first.report_json);
    assert!(all_pass && deterministic, "acceptance criteria failed");
}
