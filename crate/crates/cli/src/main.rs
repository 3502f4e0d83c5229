//! `bcast`: broadcast capacity, tree packings and scheduling simulations.

mod config;
mod error;
mod source;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bcast_core::graph::{min_cut_sink, tree_packing, validate_packing};
use bcast_core::sim::{broadcast_rate, run, sweep_k, write_sweep_csv, SimConfig};
use clap::{Parser, Subcommand};

use config::{Experiment, Overrides, Purpose, SimSection};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "bcast",
    version,
    about = "Broadcast capacity and scheduling experiments"
)]
struct Cli {
    /// Graph: diamond4, pathN, starN, random(n,m,seed) or an edge-list file
    #[arg(long, global = true)]
    graph: Option<String>,
    /// Experiment config file (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV output
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Run a single replication with this seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the broadcast capacity and a sink attaining it
    Capacity,
    /// Print a maximum packing of edge-disjoint spanning arborescences
    Trees,
    /// Run one simulation per seed and write the sample CSVs
    Simulate {
        #[command(flatten)]
        sim: SimSection,
        /// Activation family for slotted runs
        #[arg(long)]
        family: Option<String>,
    },
    /// Run the multi-class heuristic over a list of class counts
    Sweep {
        #[command(flatten)]
        sim: SimSection,
        /// Class counts to compare
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Config(problems) => {
                    eprintln!("error: invalid configuration");
                    for p in problems {
                        eprintln!("  - {p}");
                    }
                }
                CliError::Runtime(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => Some(config::read_file(path)?),
        None => None,
    };
    let graph_only = || -> Result<bcast_core::Digraph, CliError> {
        let src = cli
            .graph
            .clone()
            .or_else(|| file.as_ref().and_then(|f| f.graph.source.clone()));
        match src {
            Some(src) => source::load_graph(&src),
            None => Err(CliError::Config(vec![
                "no graph given (use --graph or [graph] source)".into(),
            ])),
        }
    };
    match &cli.command {
        Command::Capacity => capacity(&graph_only()?),
        Command::Trees => trees(&graph_only()?),
        Command::Simulate { sim, family } => {
            let ov = Overrides {
                graph: cli.graph.clone(),
                out_dir: cli.out_dir.clone(),
                seed: cli.seed,
                family: family.clone(),
                sim: sim.clone(),
                sweep_k: None,
            };
            let exp = config::resolve(
                file.unwrap_or_default(),
                cli.config.as_deref(),
                ov,
                Purpose::Simulate,
            )?;
            simulate(&exp)
        }
        Command::Sweep { sim, ks } => {
            let ov = Overrides {
                graph: cli.graph.clone(),
                out_dir: cli.out_dir.clone(),
                seed: cli.seed,
                family: None,
                sim: sim.clone(),
                sweep_k: ks.clone(),
            };
            let exp = config::resolve(
                file.unwrap_or_default(),
                cli.config.as_deref(),
                ov,
                Purpose::Sweep,
            )?;
            sweep(&exp)
        }
    }
}

fn capacity(g: &bcast_core::Digraph) -> Result<(), CliError> {
    match min_cut_sink(g) {
        Some((cap, sink)) => {
            println!("capacity {cap}");
            println!("sink {sink}");
        }
        None => println!("capacity 0"),
    }
    Ok(())
}

fn trees(g: &bcast_core::Digraph) -> Result<(), CliError> {
    let trees =
        tree_packing(g).map_err(|e| CliError::Runtime(format!("tree packing failed: {e}")))?;
    validate_packing(g, &trees).map_err(|e| CliError::Runtime(format!("invalid packing: {e}")))?;
    if trees.is_empty() {
        println!("no trees");
        return Ok(());
    }
    println!("capacity {}", trees.len());
    for (idx, t) in trees.iter().enumerate() {
        let edges: Vec<String> = t
            .edges()
            .iter()
            .map(|&e| {
                let (u, v) = g.edge(e);
                format!("{e}:{u}->{v}")
            })
            .collect();
        println!("tree {idx}: {}", edges.join(" "));
    }
    println!("pairwise edge-disjoint: yes");
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    let file = File::create(&path)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn simulate(exp: &Experiment) -> Result<(), CliError> {
    std::fs::create_dir_all(&exp.out_dir)?;
    for &seed in &exp.seeds {
        let cfg = SimConfig {
            seed,
            ..exp.sim.clone()
        };
        let result = run(&cfg, &exp.graph, exp.family.as_ref())?;
        let rate = broadcast_rate(&result, exp.burn_in)?;
        let stem = format!("{}-seed{seed}", exp.prefix);
        let mut out = create(&exp.out_dir, &format!("{stem}.csv"))?;
        result.write_csv(&mut out)?;
        out.flush()?;
        let mut out = create(&exp.out_dir, &format!("{stem}-nodes.csv"))?;
        result.write_nodes_csv(&mut out)?;
        out.flush()?;
        println!("seed {seed}: broadcast rate {rate:.4}");
    }
    Ok(())
}

fn sweep(exp: &Experiment) -> Result<(), CliError> {
    std::fs::create_dir_all(&exp.out_dir)?;
    for &seed in &exp.seeds {
        let rows = sweep_k(
            &exp.graph,
            exp.sim.lambda,
            &exp.sweep_k,
            exp.sim.horizon,
            seed,
        )?;
        let mut out = create(
            &exp.out_dir,
            &format!("{}-sweep-seed{seed}.csv", exp.prefix),
        )?;
        write_sweep_csv(&rows, &mut out)?;
        out.flush()?;
        for (k, rate) in rows {
            println!("seed {seed}: k={k} rate {rate:.4}");
        }
    }
    Ok(())
}
