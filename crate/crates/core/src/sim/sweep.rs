use std::io::{self, Write};

use rayon::prelude::*;

use super::{run, PolicyKind, SimConfig};
use crate::error::Result;
use crate::graph::Digraph;

/// One mini-slot multi-class heuristic run per `k`, all sharing `seed` (and so
/// the same arrival sample path). Runs execute in parallel; rows come back in
/// the order of `k_values`.
pub fn sweep_k(
    g: &Digraph,
    lambda: f64,
    k_values: &[usize],
    horizon: u64,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    k_values
        .par_iter()
        .map(|&k| {
            let cfg = SimConfig::new(lambda, horizon, seed, PolicyKind::PiKh { k });
            run(&cfg, g, None).map(|r| (k, r.rate))
        })
        .collect()
}

/// Writes `k,rate` rows.
pub fn write_sweep_csv<W: Write>(rows: &[(usize, f64)], mut out: W) -> io::Result<()> {
    writeln!(out, "k,rate")?;
    for (k, rate) in rows {
        writeln!(out, "{k},{rate}")?;
    }
    Ok(())
}
