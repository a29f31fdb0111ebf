use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ising_lab::error::Error;
use ising_lab::exact::{interaction_matrix, ising_poly, tutte_eval};
use ising_lab::graph::{parse_graph, MultiGraph, Terminals};
use ising_lab::numerics::{parse_cplx_literal, poly_roots, Cplx, Poly, PrecisionContext};
use ising_lab::region::{classify, comparison_table, phi_ratio};
use ising_lab::saw::{build_saw_tree, certify_zero_free, divisibility_check};
use ising_lab::{fptas, gadget};

/// Ising partition functions with complex edge interactions: exact
/// evaluation, zero-free certification, disk-based approximation, region
/// classification, and gadget implementation of arbitrary weights.
#[derive(Parser)]
#[command(name = "ising-lab", version, about)]
struct Cli {
    /// Working precision in decimal digits (>= 30). Overrides ISING_LAB_PRECISION.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Output format for tabular commands.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Seed for randomized suites (reserved; all commands are deterministic).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumeration cap on vertex count for exact computations (<= 26).
    #[arg(long, global = true, default_value_t = 24)]
    cap: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file: text ("n m" header then edge lines) or JSON.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact polynomial, value, and interaction matrix at beta.
    Exact {
        #[command(flatten)]
        graph: GraphArg,
        /// Edge interaction "RE,IM" (or a single real).
        #[arg(long)]
        beta: String,
        /// Terminal pair "S,T" for the interaction matrix (default 0,1).
        #[arg(long)]
        terminals: Option<String>,
    },
    /// Parameter-plane geometry.
    Region {
        #[command(subcommand)]
        cmd: RegionCmd,
    },
    /// Zero-free certification of a graph at beta for degree bound Delta.
    Certify {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        delta: u32,
    },
    /// Approximate log Z on the zero-free disk with an explicit tail bound.
    Fptas {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: u32,
    },
    /// Self-avoiding-walk tree with pin labels, plus the divisibility check.
    SawTree {
        #[command(flatten)]
        graph: GraphArg,
        /// Root vertex.
        #[arg(long, default_value_t = 0)]
        root: u32,
    },
    /// Implement a target edge interaction through a bounded-degree gadget.
    Implement {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        delta: u32,
        #[arg(long)]
        target: String,
        #[arg(long)]
        eps: f64,
        /// Write the compiled gadget graph here when it stays desk sized.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Roots of the exact polynomial, classified and annotated.
    FindZeros {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 3)]
        delta: u32,
    },
}

#[derive(Subcommand)]
enum RegionCmd {
    /// Classify a parameter point.
    Classify {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        delta: u32,
    },
    /// Comparison table of the zero-free parameters over a Delta range.
    Table {
        #[arg(long, default_value_t = 3)]
        from: u32,
        #[arg(long, default_value_t = 20)]
        to: u32,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Domain(_)
        | Error::Precondition(_)
        | Error::Degenerate(_)
        | Error::SpecialPoint(_)
        | Error::NotInRegion
        | Error::HasLoop
        | Error::Arity { .. }
        | Error::ZeroDivisor => 2,
        Error::TooLarge(_) => 3,
        _ => 4,
    }
}

fn load_graph(path: &PathBuf) -> Result<MultiGraph, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("bad JSON graph: {e}"),
        })?;
        let n = v["n"].as_u64().ok_or(Error::Parse { line: 0, msg: "missing n".into() })? as usize;
        let edges = v["edges"]
            .as_array()
            .ok_or(Error::Parse { line: 0, msg: "missing edges".into() })?
            .iter()
            .map(|e| {
                let pair = e.as_array().filter(|p| p.len() == 2).ok_or(Error::Parse {
                    line: 0,
                    msg: "edge must be [u, v]".into(),
                })?;
                Ok((
                    pair[0].as_u64().unwrap_or(u64::MAX) as u32,
                    pair[1].as_u64().unwrap_or(u64::MAX) as u32,
                ))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(MultiGraph::new(n, edges))
    } else {
        parse_graph(&text)
    }
}

fn parse_beta(s: &str, ctx: &PrecisionContext) -> Result<Cplx, Error> {
    // accepts "RE,IM", "RE", and the a+bi literal form
    if let Some((re, im)) = s.split_once(',') {
        let lit = format!(
            "{}{}{}i",
            re.trim(),
            if im.trim().starts_with('-') { "" } else { "+" },
            im.trim()
        );
        return parse_cplx_literal(&lit, ctx);
    }
    parse_cplx_literal(s.trim(), ctx)
}

fn parse_terminals(s: &Option<String>, g: &MultiGraph) -> Result<Terminals, Error> {
    let (a, b) = match s {
        Some(t) => {
            let (x, y) = t.split_once(',').ok_or(Error::Parse {
                line: 0,
                msg: "terminals must be S,T".into(),
            })?;
            (
                x.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse { line: 0, msg: "bad terminal".into() })?,
                y.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse { line: 0, msg: "bad terminal".into() })?,
            )
        }
        None => (0, 1),
    };
    if a == b || a as usize >= g.n || b as usize >= g.n {
        return Err(Error::Parse { line: 0, msg: "terminals out of range or equal".into() });
    }
    Ok(Terminals::new(a, b))
}

fn check_cap(g: &MultiGraph, cap: usize) -> Result<(), Error> {
    if g.n > cap {
        return Err(Error::TooLarge(format!("graph has {} vertices, cap is {cap}", g.n)));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let digits = cli
        .precision
        .or_else(|| std::env::var("ISING_LAB_PRECISION").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(50);
    if digits < 30 {
        return Err(Error::Domain("precision must be at least 30 digits".into()));
    }
    if cli.cap > 26 {
        return Err(Error::Domain("enumeration cap must be <= 26".into()));
    }
    let ctx = PrecisionContext::new(digits);
    match cli.cmd {
        Cmd::Exact { graph, beta, terminals } => {
            let g = load_graph(&graph.graph)?;
            check_cap(&g, cli.cap)?;
            let beta = parse_beta(&beta, &ctx)?;
            let zp = ising_poly(&g)?;
            let value = zp.eval(&beta, &ctx);
            let t = parse_terminals(&terminals, &g)?;
            let im = interaction_matrix(&g, t)?;
            let gamma = &beta - &Cplx::one(&ctx);
            let tutte = tutte_eval(&g, &Cplx::from_f64(&ctx, 2.0, 0.0), &gamma, &ctx)?;
            let ip = |v: &Vec<rug::Integer>| {
                Poly::Exact(ising_lab::numerics::RatPoly::from_integers(v)).to_json()
            };
            let out = json!({
                "poly": Poly::Exact(zp.to_rat_poly()).to_json(),
                "value": value.to_string(),
                "tutte_value": tutte.to_string(),
                "interaction": {
                    "z00": ip(&im.z00),
                    "z01": ip(&im.z01),
                    "z10": ip(&im.z10),
                    "z11": ip(&im.z11),
                    "terminals": [t.s, t.t],
                },
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Cmd::Region { cmd } => match cmd {
            RegionCmd::Classify { beta, delta } => {
                let beta = parse_beta(&beta, &ctx)?;
                let cl = classify(&beta, delta, &[], &ctx)?;
                let ratio = phi_ratio(&beta, &ctx).to_f64();
                let out = json!({
                    "beta": beta.to_string(),
                    "delta": delta,
                    "ratio": ratio,
                    "classification": cl,
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            }
            RegionCmd::Table { from, to } => {
                let rows = comparison_table(from, to, &ctx)?;
                if cli.format == "csv" {
                    println!("delta,eps,barvinok_delta,eps_scaled,barvinok_scaled");
                    for r in &rows {
                        println!(
                            "{},{:.6},{:.6},{:.6},{:.6}",
                            r.delta, r.eps, r.barvinok, r.eps_scaled, r.barvinok_scaled
                        );
                    }
                } else {
                    println!("{}", serde_json::to_string_pretty(&rows).unwrap());
                }
            }
        },
        Cmd::Certify { graph, beta, delta } => {
            let g = load_graph(&graph.graph)?;
            check_cap(&g, cli.cap)?;
            let beta = parse_beta(&beta, &ctx)?;
            let rep = certify_zero_free(&g, &beta, delta, &ctx)?;
            println!("{}", serde_json::to_string_pretty(&rep).unwrap());
        }
        Cmd::Fptas { graph, beta, eps, delta } => {
            let g = load_graph(&graph.graph)?;
            check_cap(&g, cli.cap)?;
            let beta = parse_beta(&beta, &ctx)?;
            let r = fptas::approx_log_z(&g, &beta, eps, delta, &ctx)?;
            let exact = ising_poly(&g)?.eval(&beta, &ctx);
            let observed = {
                let ratio = &r.z_value / &exact;
                (&ratio - &Cplx::one(&ctx)).norm().to_f64()
            };
            let z_hat = r.z_value.to_string();
            let out = json!({
                "result": r,
                "z_hat": z_hat,
                "exact": exact.to_string(),
                "observed_relative_error": observed,
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Cmd::SawTree { graph, root } => {
            let g = load_graph(&graph.graph)?;
            let t = build_saw_tree(&g, root)?;
            let quotient = if g.n <= cli.cap && g.is_connected() {
                Some(Poly::Exact(divisibility_check(&g, root)?).to_json())
            } else {
                None
            };
            let nodes = t.len();
            let out = json!({
                "tree": t,
                "nodes": nodes,
                "quotient": quotient,
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Cmd::Implement { beta, delta, target, eps, graph_out } => {
            let beta = parse_beta(&beta, &ctx)?;
            let target = parse_beta(&target, &ctx)?;
            let out = gadget::implement_target(&beta, delta, &target, eps, &ctx)?;
            if let (Some(path), Some((g, t))) = (&graph_out, &out.graph) {
                let mut text = ising_lab::graph::emit_graph(g);
                text.push_str(&format!("# terminals {} {}\n", t.s, t.t));
                std::fs::write(path, text).map_err(|e| Error::Parse {
                    line: 0,
                    msg: format!("cannot write {}: {e}", path.display()),
                })?;
            }
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Cmd::FindZeros { graph, delta } => {
            let g = load_graph(&graph.graph)?;
            check_cap(&g, cli.cap)?;
            let zp = ising_poly(&g)?;
            let roots = poly_roots(&zp.to_rat_poly().to_cpoly(&ctx), &ctx)?;
            // a zero qualifies as a hardness witness when some terminal pair
            // of degree <= Delta-1 keeps a pinned sum nonzero there
            let mut registry: Vec<Cplx> = Vec::new();
            for root in &roots {
                let mut qualifies = false;
                if root.im.to_f64().abs() > 1e-9 && g.n <= 12 {
                    'pairs: for s in 0..g.n as u32 {
                        for t in s + 1..g.n as u32 {
                            if g.degree(s) > delta as usize - 1 || g.degree(t) > delta as usize - 1 {
                                continue;
                            }
                            let im = interaction_matrix(&g, Terminals::new(s, t))?;
                            let z01 = im.eval(0, 1, root, &ctx);
                            let z00 = im.eval(0, 0, root, &ctx);
                            if z01.norm().to_f64() > 1e-9 || z00.norm().to_f64() > 1e-9 {
                                qualifies = true;
                                break 'pairs;
                            }
                        }
                    }
                }
                if qualifies {
                    registry.push(root.clone());
                }
            }
            let mut entries = Vec::new();
            for root in &roots {
                let cl = classify(root, delta, &registry, &ctx)?;
                entries.push(json!({
                    "root": root.to_string(),
                    "ratio": phi_ratio(root, &ctx).to_f64(),
                    "qualifies_as_hardness_witness": registry
                        .iter()
                        .any(|z| z.dist(root).to_f64() < 1e-12),
                    "classification": cl,
                }));
            }
            println!("{}", serde_json::to_string_pretty(&entries).unwrap());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
