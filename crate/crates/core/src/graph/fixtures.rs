//! Small named topologies used by tests, the CLI and the experiment presets.

use super::Digraph;

/// Node names of the diamond network, in index order.
pub const DIAMOND_NAMES: [&str; 4] = ["r", "a", "b", "c"];

/// The four-node diamond network: source `r=0`, `a=1`, `b=2`, `c=3` with
/// edges `ra, ab, bc, rb, rc, ca` (ids 0..6). Its broadcast capacity is 2.
pub fn diamond4() -> Digraph {
    Digraph::new(4, 0, vec![(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (3, 1)])
        .expect("diamond fixture is valid")
}

/// Directed path `0 -> 1 -> .. -> n-1` rooted at node 0.
pub fn path(n: usize) -> Digraph {
    Digraph::new(n, 0, (1..n).map(|v| (v - 1, v)).collect()).expect("path fixture is valid")
}

/// Star with the source at the centre and `n-1` leaves.
pub fn star(n: usize) -> Digraph {
    Digraph::new(n, 0, (1..n).map(|v| (0, v)).collect()).expect("star fixture is valid")
}

/// The diamond with `ca` removed; acyclic, capacity 1.
pub fn diamond4_dag() -> Digraph {
    Digraph::new(4, 0, vec![(0, 1), (1, 2), (2, 3), (0, 2), (0, 3)]).expect("valid")
}
