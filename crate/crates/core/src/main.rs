//! Command-line front end: generation, ingestion, tuning, measurement,
//! cascades and experiment sweeps.
//!
//! Exit code is nonzero only on config or I/O failure; non-converged tuning
//! is reported in the output, not as a process failure.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use netillusion::attributes::{
    activate_random, attribute_profile, paradox_metrics, read_assignment, write_assignment,
};
use netillusion::generators::{erdos_renyi, scale_free, ErConfig, PowerLawConfig};
use netillusion::graph::{assortativity, degree_stats, Graph};
use netillusion::illusion::{
    illusion_report, run_threshold_cascade, write_per_k_csv, Comparison,
};
use netillusion::ingest::{load_dataset, DatasetSpec};
use netillusion::sweep::{run_fixed_r_ensemble, run_sweep, EnsembleConfig, SweepConfig};
use netillusion::tuning::{rewire_to_assortativity, swap_attributes_to_rho};

/// Data directory override, checked when `--data-root` is not given.
const DATA_ENV: &str = "NETILLUSION_DATA";

#[derive(Parser)]
#[command(name = "netillusion", version, about = "Majority-illusion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Edge-list file (`u v` per line, `#` comments).
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Attribute assignment file (`label value` per line).
    #[arg(long)]
    assignment: PathBuf,
    /// Threshold fraction.
    #[arg(long, default_value_t = 0.5)]
    phi: f64,
    /// `strict` (> phi k) or `inclusive` (>= phi k).
    #[arg(long, default_value = "strict")]
    comparison: Comparison,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic graph and write its edge list.
    Generate {
        /// `powerlaw` or `er`.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        /// Power-law exponent (powerlaw only).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1)]
        k_min: u32,
        #[arg(long)]
        k_max: Option<u32>,
        /// Target mean degree (er only).
        #[arg(long)]
        mean_degree: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Optional JSON generation report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Load a dataset spec, preprocess, and emit a normalized edge list.
    Ingest {
        /// Dataset spec TOML.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        data_root: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Provenance report JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Rewire a graph toward a target assortativity.
    Rewire {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        target_r: f64,
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
        #[arg(long)]
        max_iters: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Activate a random fraction of nodes.
    Activate {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Swap attributes toward a target degree-attribute correlation.
    TuneRho {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        target_rho: f64,
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
        #[arg(long)]
        max_iters: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Measure empirical, model and Gaussian illusion fractions.
    Measure {
        #[command(flatten)]
        args: MeasureArgs,
        /// Report JSON path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional per-degree model breakdown CSV.
        #[arg(long)]
        per_k: Option<PathBuf>,
    },
    /// Evaluate only the statistical model (no empirical scan output focus).
    Model {
        #[command(flatten)]
        args: MeasureArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        per_k: Option<PathBuf>,
    },
    /// Run the synchronous threshold cascade to fixity.
    Cascade {
        #[command(flatten)]
        args: MeasureArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural and attribute statistics of a graph.
    Stats {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        assignment: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep from a TOML config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data_root: Option<PathBuf>,
        /// Override the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a fixed-assortativity structure ensemble from a TOML config.
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data_root: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn data_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(DATA_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn read_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (edges, declared) = netillusion::ingest::parse_edge_list(file)?;
    if let Some(n) = declared {
        if edges.iter().all(|&(a, b)| a < n && b < n) {
            let labels: Vec<u64> = (0..n).collect();
            return Ok(Graph::from_labeled(&labels, &edges)?.0);
        }
    }
    Ok(Graph::from_edge_list(&edges)?.0)
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn write_graph(g: &Graph, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    g.write_edge_list(&mut w)?;
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate {
            kind,
            n,
            alpha,
            k_min,
            k_max,
            mean_degree,
            seed,
            out,
            report,
        } => match kind.as_str() {
            "powerlaw" => {
                let cfg = PowerLawConfig {
                    n,
                    alpha: alpha.context("--alpha required for powerlaw")?,
                    k_min,
                    k_max,
                };
                let (g, gen_report) = scale_free(&cfg, seed)?;
                write_graph(&g, &out)?;
                if let Some(path) = report {
                    write_json(&gen_report, Some(&path))?;
                }
                eprintln!(
                    "powerlaw graph: {} nodes, {} edges (requested mean degree {:.3}, realized {:.3})",
                    g.node_count(),
                    g.edge_count(),
                    gen_report.requested_mean_degree,
                    gen_report.realized_mean_degree
                );
                Ok(())
            }
            "er" => {
                let cfg = ErConfig {
                    n,
                    mean_degree: mean_degree.context("--mean-degree required for er")?,
                };
                let (g, build) = erdos_renyi(&cfg, seed)?;
                write_graph(&g, &out)?;
                if let Some(path) = report {
                    write_json(&build, Some(&path))?;
                }
                eprintln!(
                    "er graph: {} nodes, {} edges (mean degree {:.3})",
                    g.node_count(),
                    g.edge_count(),
                    g.mean_degree()
                );
                Ok(())
            }
            other => anyhow::bail!("unknown generator kind `{other}`"),
        },
        Command::Ingest {
            spec,
            data_root: root,
            out,
            report,
        } => {
            let spec = DatasetSpec::from_toml_file(&spec)?;
            let (g, provenance) = load_dataset(&spec, &data_root(root))?;
            write_graph(&g, &out)?;
            for warning in &provenance.warnings {
                eprintln!("warning [{}]: {}", provenance.dataset, warning);
            }
            if let Some(path) = report {
                write_json(&provenance, Some(&path))?;
            } else {
                write_json(&provenance, None)?;
            }
            Ok(())
        }
        Command::Rewire {
            graph,
            target_r,
            tolerance,
            max_iters,
            seed,
            out,
            report,
        } => {
            let g = read_graph(&graph.graph)?;
            let (tuned, result) =
                rewire_to_assortativity(&g, target_r, tolerance, max_iters, seed)?;
            write_graph(&tuned, &out)?;
            if !result.converged {
                eprintln!(
                    "warning: rewiring stopped at r = {:.4} (target {:.4})",
                    result.achieved, result.target
                );
            }
            write_json(&result, report.as_deref())?;
            Ok(())
        }
        Command::Activate {
            graph,
            fraction,
            seed,
            out,
        } => {
            let g = read_graph(&graph.graph)?;
            let a = activate_random(&g, fraction, seed)?;
            let mut w = BufWriter::new(File::create(&out)?);
            write_assignment(&g, &a, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::TuneRho {
            graph,
            assignment,
            target_rho,
            tolerance,
            max_iters,
            seed,
            out,
            report,
        } => {
            let g = read_graph(&graph.graph)?;
            let a = read_assignment(&g, BufReader::new(File::open(&assignment)?))?;
            let (tuned, result) =
                swap_attributes_to_rho(&g, &a, target_rho, tolerance, max_iters, seed)?;
            let mut w = BufWriter::new(File::create(&out)?);
            write_assignment(&g, &tuned, &mut w)?;
            w.flush()?;
            if !result.converged {
                eprintln!(
                    "warning: attribute swapping stopped at rho = {:.4} (target {:.4})",
                    result.achieved, result.target
                );
            }
            write_json(&result, report.as_deref())?;
            Ok(())
        }
        Command::Measure { args, out, per_k } | Command::Model { args, out, per_k } => {
            let g = read_graph(&args.graph.graph)?;
            let a = read_assignment(&g, BufReader::new(File::open(&args.assignment)?))?;
            let report = illusion_report(&g, &a, args.phi, args.comparison)?;
            if let Some(path) = per_k {
                let mut w = BufWriter::new(File::create(path)?);
                write_per_k_csv(&report.per_k_model, &mut w)?;
                w.flush()?;
            }
            write_json(&report, out.as_deref())?;
            Ok(())
        }
        Command::Cascade { args, out } => {
            let g = read_graph(&args.graph.graph)?;
            let a = read_assignment(&g, BufReader::new(File::open(&args.assignment)?))?;
            let result = run_threshold_cascade(&g, &a, args.phi, args.comparison)?;
            write_json(&result, out.as_deref())?;
            Ok(())
        }
        Command::Stats {
            graph,
            assignment,
            out,
        } => {
            let g = read_graph(&graph.graph)?;
            let stats = degree_stats(&g);
            let mut summary = serde_json::json!({
                "nodes": g.node_count(),
                "edges": g.edge_count(),
                "mean_degree": stats.mean_degree(),
                "mean_q_degree": stats.mean_q_degree(),
                "sigma_k": stats.sigma_k(),
                "sigma_q": stats.sigma_q(),
                "friendship_paradox_strength": stats.paradox_strength(),
                "assortativity": assortativity(&g).ok(),
            });
            if let Some(path) = assignment {
                let a = read_assignment(&g, BufReader::new(File::open(&path)?))?;
                let metrics = paradox_metrics(&g, &a);
                summary["paradox_metrics"] = serde_json::to_value(metrics)?;
                if let Ok(profile) = attribute_profile(&g, &a) {
                    summary["rho_kx"] = serde_json::to_value(profile.rho_kx)?;
                }
            }
            write_json(&summary, out.as_deref())?;
            Ok(())
        }
        Command::Sweep {
            config,
            data_root: root,
            out,
            workers,
        } => {
            let mut cfg = SweepConfig::from_toml_file(&config)?;
            if let Some(path) = out {
                cfg.output_path = path;
            }
            let cells = run_sweep(&cfg, &data_root(root), workers)?;
            let failures = cells.iter().filter(|c| c.error.is_some()).count();
            let unconverged = cells
                .iter()
                .filter(|c| c.error.is_none() && !(c.r_converged && c.rho_converged))
                .count();
            eprintln!(
                "sweep: {} cells -> {} ({} failed, {} unconverged)",
                cells.len(),
                cfg.output_path.display(),
                failures,
                unconverged
            );
            Ok(())
        }
        Command::Ensemble {
            config,
            data_root: root,
            out,
            workers,
        } => {
            let mut cfg = EnsembleConfig::from_toml_file(&config)?;
            if let Some(path) = out {
                cfg.output_path = path;
            }
            let levels = run_fixed_r_ensemble(&cfg, &data_root(root), workers)?;
            eprintln!(
                "ensemble: {} levels -> {}",
                levels.len(),
                cfg.output_path.display()
            );
            Ok(())
        }
    }
}
