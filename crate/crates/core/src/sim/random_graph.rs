use rand::seq::index::sample;

use super::{stream, stream_rng};
use crate::error::{Error, Result};
use crate::graph::{broadcast_capacity, Digraph};

/// Gives up on resampling after this many draws.
const MAX_ATTEMPTS: usize = 1_000_000;

/// Uniformly random simple digraph on `n` nodes with `m` distinct directed
/// edges and source 0, redrawn until every node is reachable from the source.
pub fn random_digraph(n: usize, m: usize, seed: u64) -> Result<Digraph> {
    if n < 2 || m < n - 1 || m > n * (n - 1) {
        return Err(Error::Argument(format!(
            "no simple digraph with n={n}, m={m} can reach every node (need n >= 2, n-1 <= m <= n(n-1))"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let mut rng = stream_rng(seed, stream::GRAPH);
    for _ in 0..MAX_ATTEMPTS {
        let mut picked = sample(&mut rng, pairs.len(), m).into_vec();
        picked.sort_unstable();
        let edges: Vec<(usize, usize)> = picked.into_iter().map(|i| pairs[i]).collect();
        let mut has_in = vec![false; n];
        for &(_, v) in &edges {
            has_in[v] = true;
        }
        if has_in[1..].iter().any(|&x| !x) {
            continue;
        }
        let g = Digraph::new(n, 0, edges)?;
        if broadcast_capacity(&g) >= 1 {
            return Ok(g);
        }
    }
    Err(Error::Infeasible(format!(
        "no connected sample for n={n}, m={m} after {MAX_ATTEMPTS} draws"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_nodes() {
        let g = random_digraph(2, 1, 7).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn shape_and_determinism() {
        for seed in 0..20 {
            let g = random_digraph(8, 20, seed).unwrap();
            assert_eq!((g.node_count(), g.edge_count()), (8, 20));
            assert!(broadcast_capacity(&g) >= 1);
            let mut e = g.edges().to_vec();
            e.dedup();
            assert_eq!(e.len(), 20);
            assert!(e.iter().all(|&(u, v)| u != v));
            assert_eq!(Digraph::parse(&g.to_edge_list()).unwrap(), g);
            assert_eq!(random_digraph(8, 20, seed).unwrap(), g);
        }
        assert_ne!(
            random_digraph(8, 20, 1).unwrap(),
            random_digraph(8, 20, 2).unwrap()
        );
    }

    #[test]
    fn bounds() {
        assert!(random_digraph(1, 0, 0).is_err());
        assert!(random_digraph(5, 3, 0).is_err());
        assert!(random_digraph(4, 13, 0).is_err());
        let full = random_digraph(4, 12, 0).unwrap();
        assert_eq!(broadcast_capacity(&full), 3);
    }
}
