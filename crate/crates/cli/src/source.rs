//! Graph and activation-family sources named on the command line or in configs.

use std::path::Path;

use bcast_core::graph::fixtures;
use bcast_core::sim::random_digraph;
use bcast_core::wireless::{primary_interference_family, ActivationFamily};
use bcast_core::Digraph;

use crate::error::CliError;

/// Resolves a builtin name (`diamond4`, `pathN`/`path(N)`, `starN`/`star(N)`,
/// `random(n,m,seed)`) or else an edge-list file.
pub fn load_graph(src: &str) -> Result<Digraph, CliError> {
    let src = src.trim();
    if src == "diamond4" {
        return Ok(fixtures::diamond4());
    }
    if let Some(args) = call_args(src, "random") {
        let nums = parse_numbers(&args, 3, src)?;
        return random_digraph(nums[0] as usize, nums[1] as usize, nums[2])
            .map_err(|e| CliError::Config(vec![format!("graph {src}: {e}")]));
    }
    for (name, build) in [
        ("path", fixtures::path as fn(usize) -> Digraph),
        ("star", fixtures::star),
    ] {
        let arg = call_args(src, name).or_else(|| {
            src.strip_prefix(name)
                .filter(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
                .map(str::to_string)
        });
        if let Some(arg) = arg {
            let n = parse_numbers(&arg, 1, src)?[0] as usize;
            if n < 2 {
                return Err(CliError::Config(vec![format!(
                    "graph {src}: need at least 2 nodes"
                )]));
            }
            return Ok(build(n));
        }
    }
    let path = Path::new(src);
    if !path.is_file() {
        return Err(CliError::Config(vec![format!(
            "graph {src:?} is neither a builtin (diamond4, pathN, starN, random(n,m,seed)) nor an existing file"
        )]));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![format!("reading {src}: {e}")]))?;
    Digraph::parse(&text).map_err(|e| CliError::Config(vec![format!("{src}: {e}")]))
}

/// Resolves `primary`, `primary-maximal`, `all-edges`, `singletons`, or a family file.
pub fn load_family(src: &str, g: &Digraph) -> Result<ActivationFamily, CliError> {
    let m = g.edge_count();
    let config = |msg: String| CliError::Config(vec![msg]);
    match src.trim() {
        "primary" => {
            primary_interference_family(g, false).map_err(|e| config(format!("family: {e}")))
        }
        "primary-maximal" => {
            primary_interference_family(g, true).map_err(|e| config(format!("family: {e}")))
        }
        "all-edges" => Ok(ActivationFamily::all_edges(m)),
        "singletons" => Ok(ActivationFamily::singletons(m)),
        other => {
            let text = std::fs::read_to_string(other).map_err(|e| {
                config(format!(
                    "family {other:?} is not a builtin and cannot be read: {e}"
                ))
            })?;
            ActivationFamily::parse(&text, m).map_err(|e| config(format!("{other}: {e}")))
        }
    }
}

fn call_args(src: &str, name: &str) -> Option<String> {
    src.strip_prefix(name)?
        .strip_prefix('(')?
        .strip_suffix(')')
        .map(str::to_string)
}

fn parse_numbers(args: &str, count: usize, src: &str) -> Result<Vec<u64>, CliError> {
    let nums: Result<Vec<u64>, _> = args.split(',').map(|a| a.trim().parse::<u64>()).collect();
    match nums {
        Ok(v) if v.len() == count => Ok(v),
        _ => Err(CliError::Config(vec![format!(
            "graph {src}: expected {count} non-negative integer argument(s)"
        )])),
    }
}
