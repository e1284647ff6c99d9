//! Command-line front end: decide / verify / reduce / oracle / gen.
//!
//! Exit codes: 0 = YES (or verification passed), 1 = NO, 2 = usage or
//! parse error, 3 = budget exhausted.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fanplanar::dpsolver::{decide, DecideOptions, DpBudget};
use fanplanar::graph::parse_graph;
use fanplanar::oracle::{decide_bruteforce_counted, exhaustive_graphs, random_graph, OracleOutcome, SearchBudget};
use fanplanar::reduction::apply_reductions;
use fanplanar::{render_svg, BipartiteGraph, Error, TwoLayerDrawing};

#[derive(Parser)]
#[command(name = "fanplanar", about = "Decide 2-layer fan-planarity of bipartite graphs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Dp,
    Bf,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the graph admits a fan-planar 2-layer drawing.
    Decide {
        file: PathBuf,
        /// Crossing bound; defaults to the reduced component's max degree.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// With --method bf: reduce components first and lift the result.
        #[arg(long)]
        reduce_first: bool,
        /// Write the certificate drawing as JSON to this path.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Write an SVG rendering of the certificate to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Print a JSON report instead of plain text.
        #[arg(long)]
        json: bool,
        /// Search-node budget for the exhaustive oracle.
        #[arg(long)]
        max_nodes: Option<u64>,
        /// State budget for the dynamic program.
        #[arg(long)]
        max_states: Option<u64>,
        /// Wall-clock budget in milliseconds.
        #[arg(long)]
        timeout_ms: Option<u64>,
        /// Worker threads for the exhaustive oracle.
        #[arg(long, default_value = "1")]
        threads: usize,
    },
    /// Check a drawing against its graph.
    Verify {
        graph: PathBuf,
        drawing: PathBuf,
        /// Additionally check that no edge has more than k crossings.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Apply the degree reductions and print the reduced graph.
    Reduce {
        file: PathBuf,
        /// Write the reduction trace as JSON to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Exhaustive search, no reductions.
    Oracle {
        file: PathBuf,
        /// Cap on crossings per edge.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        max_nodes: Option<u64>,
        #[arg(long)]
        timeout_ms: Option<u64>,
        #[arg(long, default_value = "1")]
        threads: usize,
        /// Write the witness drawing as JSON to this path.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Emit graphs in the edge-list format, separated by `---` lines.
    Gen {
        /// NX NY M SEED: one random graph.
        #[arg(long, num_args = 4, value_names = ["NX", "NY", "M", "SEED"], conflicts_with = "exhaustive")]
        random: Option<Vec<u64>>,
        /// NX NY: every labeled graph of that shape.
        #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
        exhaustive: Option<Vec<u64>>,
    },
}

#[derive(Serialize)]
struct ReducedSizes {
    vertices: usize,
    edges: usize,
}

#[derive(Serialize)]
struct ReportStats {
    states: u64,
    nodes: u64,
    /// Wall-clock time; the only field that varies between runs.
    elapsed_ms: u64,
}

/// Stable report schema; key order is fixed by field order.
#[derive(Serialize)]
struct CliReport {
    answer: String,
    method: String,
    reason: String,
    certificate: Option<serde_json::Value>,
    reduced_sizes: ReducedSizes,
    k_used: Option<u32>,
    stats: ReportStats,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded(_) => 3,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

fn load_graph(path: &PathBuf) -> fanplanar::Result<Arc<BipartiteGraph>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
    Ok(Arc::new(parse_graph(&text)?))
}

fn write_out(path: &PathBuf, content: &str) -> fanplanar::Result<()> {
    std::fs::write(path, content)
        .map_err(|e| Error::Internal(format!("writing {}: {e}", path.display())))
}

fn run(cmd: Command) -> fanplanar::Result<i32> {
    match cmd {
        Command::Decide {
            file,
            k,
            method,
            reduce_first,
            certificate,
            svg,
            json,
            max_nodes,
            max_states,
            timeout_ms,
            threads,
        } => {
            let g = load_graph(&file)?;
            let max_elapsed = timeout_ms.map(Duration::from_millis);
            let oracle_budget = SearchBudget {
                max_nodes: max_nodes.unwrap_or(SearchBudget::default().max_nodes),
                max_elapsed,
            };
            let dp_budget = DpBudget {
                max_states: max_states.unwrap_or(DpBudget::default().max_states),
                max_elapsed,
            };

            let (answer, method_name, reason, cert, k_used, states, nodes, elapsed, reduced) =
                if method == MethodArg::Bf && !reduce_first {
                    // raw oracle on the unreduced graph
                    let start = std::time::Instant::now();
                    let (outcome, nodes) = decide_bruteforce_counted(&g, k, &oracle_budget, threads);
                    let elapsed = start.elapsed();
                    let (answer, cert, reason) = match outcome {
                        OracleOutcome::Yes(d) => {
                            ("YES", Some(d), "exhaustive search found a drawing".to_string())
                        }
                        OracleOutcome::No => {
                            ("NO", None, "exhaustive search exhausted all drawings".to_string())
                        }
                        OracleOutcome::BudgetExceeded => {
                            return Err(Error::BudgetExceeded(format!(
                                "oracle stopped after {nodes} nodes"
                            )))
                        }
                    };
                    let sizes = ReducedSizes { vertices: g.num_vertices(), edges: g.num_edges() };
                    (answer, "BRUTE_FORCE".to_string(), reason, cert, k, 0, nodes, elapsed, sizes)
                } else {
                    let opts = DecideOptions {
                        k_override: k,
                        force_dp: method == MethodArg::Dp,
                        bf_threshold: if method == MethodArg::Bf {
                            usize::MAX
                        } else {
                            DecideOptions::default().bf_threshold
                        },
                        dp_budget,
                        oracle_budget,
                        threads,
                    };
                    let d = decide(&g, &opts)?;
                    let (red, _) = apply_reductions(&g);
                    let sizes = ReducedSizes { vertices: red.num_vertices(), edges: red.num_edges() };
                    let answer = if d.answer == fanplanar::Answer::Yes { "YES" } else { "NO" };
                    (
                        answer,
                        d.method.to_string(),
                        d.reason,
                        d.certificate,
                        d.k_used,
                        d.stats.states,
                        d.stats.nodes,
                        d.stats.elapsed,
                        sizes,
                    )
                };

            let mut cert_value = None;
            if let Some(d) = &cert {
                // never emit an unverified drawing
                if !d.verify(None).fan_planar {
                    return Err(Error::Internal("certificate failed re-verification".into()));
                }
                if let Some(path) = &certificate {
                    write_out(path, &d.to_json())?;
                    cert_value = Some(serde_json::Value::String(path.display().to_string()));
                } else if json {
                    cert_value = Some(serde_json::to_value(d.to_file()).expect("drawing to JSON"));
                }
                if let Some(path) = &svg {
                    write_out(path, &render_svg(d, Some(&d.verify(None))))?;
                }
            }

            let report = CliReport {
                answer: answer.to_string(),
                method: method_name,
                reason,
                certificate: cert_value,
                reduced_sizes: reduced,
                k_used,
                stats: ReportStats {
                    states,
                    nodes,
                    elapsed_ms: elapsed.as_millis() as u64,
                },
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report to JSON"));
            } else {
                println!("answer: {}", report.answer);
                println!("method: {}", report.method);
                println!("reason: {}", report.reason);
                if let Some(k) = report.k_used {
                    println!("k: {k}");
                }
            }
            Ok(if answer == "YES" { 0 } else { 1 })
        }

        Command::Verify { graph, drawing, k } => {
            let g = load_graph(&graph)?;
            let text = std::fs::read_to_string(&drawing)
                .map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", drawing.display()) })?;
            let d = TwoLayerDrawing::from_json(Arc::clone(&g), &text)?;
            let report = d.verify(k);
            println!("fan-planar: {}", report.fan_planar);
            println!("max-crossings-per-edge: {}", report.max_crossings_per_edge);
            println!("k-planar-for: {}", report.k_planar_for);
            if let Some(within) = report.within_k {
                println!("within-k: {within}");
            }
            if let Some(t) = &report.violating_triple {
                println!(
                    "violating-triple: {{{}, {}}} {{{}, {}}} {{{}, {}}}",
                    t[0].x, t[0].y, t[1].x, t[1].y, t[2].x, t[2].y
                );
            }
            for (e, c) in &report.crossings_per_edge {
                println!("crossings {} {}: {c}", e.x, e.y);
            }
            Ok(if report.fan_planar && report.within_k != Some(false) { 0 } else { 1 })
        }

        Command::Reduce { file, trace } => {
            let g = load_graph(&file)?;
            let (red, tr) = apply_reductions(&g);
            print!("{}", red.serialize());
            if let Some(path) = &trace {
                write_out(path, &tr.to_json())?;
            }
            Ok(0)
        }

        Command::Oracle { file, k, max_nodes, timeout_ms, threads, certificate } => {
            let g = load_graph(&file)?;
            let budget = SearchBudget {
                max_nodes: max_nodes.unwrap_or(SearchBudget::default().max_nodes),
                max_elapsed: timeout_ms.map(Duration::from_millis),
            };
            let (outcome, nodes) = decide_bruteforce_counted(&g, k, &budget, threads);
            match outcome {
                OracleOutcome::Yes(d) => {
                    println!("YES ({nodes} nodes)");
                    if let Some(path) = &certificate {
                        write_out(path, &d.to_json())?;
                    }
                    Ok(0)
                }
                OracleOutcome::No => {
                    println!("NO ({nodes} nodes)");
                    Ok(1)
                }
                OracleOutcome::BudgetExceeded => {
                    Err(Error::BudgetExceeded(format!("oracle stopped after {nodes} nodes")))
                }
            }
        }

        Command::Gen { random, exhaustive } => match (random, exhaustive) {
            (Some(args), None) => {
                let g = random_graph(args[0] as usize, args[1] as usize, args[2] as usize, args[3])?;
                print!("{}", g.serialize());
                Ok(0)
            }
            (None, Some(args)) => {
                let mut first = true;
                for g in exhaustive_graphs(args[0] as usize, args[1] as usize) {
                    if !first {
                        println!("---");
                    }
                    first = false;
                    print!("{}", g.serialize());
                }
                Ok(0)
            }
            _ => Err(Error::InvalidParameter("gen needs exactly one of --random or --exhaustive".into())),
        },
    }
}
