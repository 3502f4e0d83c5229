//! Experiment configuration: a TOML file merged with command-line overrides.

use std::path::{Path, PathBuf};

use bcast_core::sim::{default_burn_in, PolicyKind, SimConfig, TimeModel};
use bcast_core::{ActivationFamily, Digraph};
use serde::Deserialize;

use crate::error::CliError;
use crate::source::{load_family, load_graph};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub graph: GraphSection,
    pub sim: SimSection,
    pub output: OutputSection,
    pub sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSection {
    pub source: Option<String>,
    /// Activation family for slotted runs.
    pub family: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    /// pi_star, pi_kh, static_tree or pi_rand
    #[arg(long)]
    pub policy: Option<String>,
    /// Mean arrivals per slot
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Run length in slots
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Class count for pi_kh
    #[arg(long)]
    pub k: Option<usize>,
    /// Rate margin for pi_rand
    #[arg(long)]
    pub eps: Option<f64>,
    /// Extra sampled sequences for pi_rand
    #[arg(long)]
    pub extra: Option<usize>,
    /// mini-slot or slotted
    #[arg(long)]
    pub time_model: Option<String>,
    /// Slots between samples
    #[arg(long)]
    pub sample_every: Option<u64>,
    /// Slots excluded from the rate estimate
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// Replication seeds
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub prefix: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub k: Option<Vec<usize>>,
}

/// Values given on the command line, taking precedence over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub graph: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub family: Option<String>,
    pub sim: SimSection,
    pub sweep_k: Option<Vec<usize>>,
}

#[derive(Debug)]
pub struct Experiment {
    pub graph: Digraph,
    pub family: Option<ActivationFamily>,
    /// Run template; the seed is replaced per replication.
    pub sim: SimConfig,
    pub burn_in: u64,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub prefix: String,
    pub sweep_k: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Simulate,
    Sweep,
}

pub fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![format!("reading config {}: {e}", path.display())]))?;
    toml::from_str(&text).map_err(|e| CliError::Config(vec![format!("{}: {e}", path.display())]))
}

fn merge<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// Merges and validates everything, reporting all problems together.
pub fn resolve(
    file: FileConfig,
    config_path: Option<&Path>,
    ov: Overrides,
    purpose: Purpose,
) -> Result<Experiment, CliError> {
    let mut problems = Vec::new();
    let s = ov.sim;
    let f = file.sim;

    let graph = match merge(ov.graph, file.graph.source) {
        Some(src) => match load_graph(&src) {
            Ok(g) => Some(g),
            Err(CliError::Config(mut p)) => {
                problems.append(&mut p);
                None
            }
            Err(e) => return Err(e),
        },
        None => {
            problems.push("no graph given (use --graph or [graph] source)".into());
            None
        }
    };

    let lambda = merge(s.lambda, f.lambda);
    let lambda_given = lambda.is_some();
    if !lambda_given {
        problems.push("sim.lambda is required".into());
    }
    let horizon = merge(s.horizon, f.horizon).unwrap_or(10_000);
    if horizon == 0 {
        problems.push("horizon must be at least 1 slot".into());
    }
    let k = merge(s.k, f.k);
    let policy_name = merge(s.policy, f.policy).unwrap_or_else(|| match purpose {
        Purpose::Simulate => "pi_star".into(),
        Purpose::Sweep => "pi_kh".into(),
    });
    let policy = match policy_name.as_str() {
        "pi_star" => Some(PolicyKind::PiStar),
        "pi_kh" => match (k, purpose) {
            (Some(k), _) => Some(PolicyKind::PiKh { k }),
            (None, Purpose::Sweep) => Some(PolicyKind::PiKh { k: 1 }),
            (None, Purpose::Simulate) => {
                problems.push("pi_kh needs sim.k".into());
                None
            }
        },
        "static_tree" => Some(PolicyKind::StaticTree),
        "pi_rand" => Some(PolicyKind::PiRand {
            eps: merge(s.eps, f.eps),
            extra: merge(s.extra, f.extra),
        }),
        other => {
            problems.push(format!(
                "unknown policy {other:?} (expected pi_star, pi_kh, static_tree or pi_rand)"
            ));
            None
        }
    };
    if purpose == Purpose::Sweep
        && policy.is_some()
        && !matches!(policy, Some(PolicyKind::PiKh { .. }))
    {
        problems.push(format!(
            "sweep runs the pi_kh policy, config selects {policy_name}"
        ));
    }
    let time_model = match merge(s.time_model, f.time_model).as_deref() {
        None | Some("mini-slot") => Some(TimeModel::MiniSlot),
        Some("slotted") => Some(TimeModel::Slotted),
        Some(other) => {
            problems.push(format!(
                "unknown time_model {other:?} (expected mini-slot or slotted)"
            ));
            None
        }
    };
    if purpose == Purpose::Sweep && time_model == Some(TimeModel::Slotted) {
        problems.push("sweep supports the mini-slot model only".into());
    }
    let sample_every = merge(s.sample_every, f.sample_every).unwrap_or((horizon / 100).max(1));
    let burn_in = merge(s.burn_in, f.burn_in).unwrap_or(default_burn_in(horizon));
    if horizon > 0 && burn_in >= horizon {
        problems.push(format!("burn_in {burn_in} must be below horizon {horizon}"));
    }
    let seeds = match ov.seed {
        Some(seed) => vec![seed],
        None => merge(s.seeds, f.seeds).unwrap_or_else(|| vec![1]),
    };
    if seeds.is_empty() {
        problems.push("sim.seeds must not be empty".into());
    }
    let mut sweep_k = merge(ov.sweep_k, file.sweep.k).unwrap_or_default();
    if purpose == Purpose::Sweep {
        if sweep_k.is_empty() {
            problems.push("sweep needs a non-empty k list ([sweep] k or --ks)".into());
        }
        if sweep_k.contains(&0) {
            problems.push("sweep k values must be at least 1".into());
        }
    } else {
        sweep_k.clear();
    }

    let family = match (&graph, time_model) {
        (Some(g), Some(TimeModel::Slotted)) => {
            let src = merge(ov.family, file.graph.family).unwrap_or_else(|| "primary".into());
            match load_family(&src, g) {
                Ok(fam) => Some(fam),
                Err(e) => {
                    problems.push(e.to_string());
                    None
                }
            }
        }
        _ => None,
    };

    // a missing lambda is already reported; check the rest against zero load
    let sim = match (policy, time_model) {
        (Some(policy), Some(time_model)) => {
            let lambda = lambda.unwrap_or(0.0);
            let sim = SimConfig {
                lambda,
                horizon,
                seed: seeds.first().copied().unwrap_or(0),
                time_model,
                policy,
                sample_every,
            };
            if let Some(g) = &graph {
                if time_model == TimeModel::MiniSlot || family.is_some() {
                    for e in sim.problems(g, family.as_ref()) {
                        let msg = e.to_string();
                        if !problems.iter().any(|p| msg.ends_with(p.as_str())) {
                            problems.push(msg);
                        }
                    }
                }
                if purpose == Purpose::Sweep && lambda_given {
                    let cap = bcast_core::graph::broadcast_capacity(g) as f64;
                    if lambda >= cap {
                        problems.push(format!(
                            "sweep needs lambda below the broadcast capacity {cap}"
                        ));
                    }
                }
            }
            Some(sim)
        }
        _ => None,
    };

    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }
    let prefix = file
        .output
        .prefix
        .or_else(|| {
            config_path
                .and_then(|p| p.file_stem())
                .map(|s| s.to_string_lossy().into_owned())
        })
        .unwrap_or_else(|| "run".into());
    Ok(Experiment {
        graph: graph.expect("checked"),
        family,
        sim: sim.expect("checked"),
        burn_in,
        seeds,
        out_dir: merge(ov.out_dir, file.output.dir).unwrap_or_else(|| PathBuf::from(".")),
        prefix,
        sweep_k,
    })
}
