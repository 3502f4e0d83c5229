//! Directed network model, capacity computation and reachable-set machinery.

mod flow;
mod packing;
mod reach;

pub mod fixtures;

use std::fmt;

use crate::error::{Error, Result};

pub use flow::{broadcast_capacity, cut_capacity, max_flow, min_cut_sink};
pub use packing::{tree_packing, validate_packing, Arborescence};
pub use reach::{
    enumerate_reachable_sequences, enumerate_reachable_sets, in_edges, is_reachable_set, out_edges,
    sequence_from_arborescence, set_plus_edge, ReachableSequence, ReachableSetIter,
    MAX_ENUMERATION_NODES,
};

pub type NodeId = usize;
/// Position of an edge in [`Digraph::edges`].
pub type EdgeId = usize;

/// Largest node count representable by a [`NodeSet`].
pub const MAX_SET_NODES: usize = 64;

/// A set of nodes stored as a 64-bit mask; bit `i` is set iff node `i` is a member.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeSet(u64);

/// A node set that contains the source and spans a source-rooted arborescence
/// in its induced subgraph. Validity is checked by [`is_reachable_set`].
pub type ReachableSet = NodeSet;

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(node: NodeId) -> Self {
        debug_assert!(node < MAX_SET_NODES);
        NodeSet(1 << node)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_SET_NODES);
        if n == MAX_SET_NODES {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn from_nodes<I: IntoIterator<Item = NodeId>>(nodes: I) -> Self {
        nodes.into_iter().fold(NodeSet::EMPTY, NodeSet::with)
    }

    pub fn contains(self, node: NodeId) -> bool {
        node < MAX_SET_NODES && self.0 & (1 << node) != 0
    }

    #[must_use]
    pub fn with(self, node: NodeId) -> Self {
        NodeSet(self.0 | (1 << node))
    }

    #[must_use]
    pub fn without(self, node: NodeId) -> Self {
        NodeSet(self.0 & !(1 << node))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = NodeId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A simple directed graph with unit-capacity edges and a designated source.
///
/// Edge identity is the position in the edge list; all deterministic
/// tie-breaks in this crate use ascending edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    source: NodeId,
    edges: Vec<(NodeId, NodeId)>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
}

impl Digraph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(n: usize, source: NodeId, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("graph must have at least one node".into()));
        }
        if source >= n {
            return Err(Error::Argument(format!(
                "source {source} out of range for n={n}"
            )));
        }
        let mut out_adj: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
        let mut in_adj: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            check_edge(n, u, v)?;
            if out_adj[u].iter().any(|&e| edges[e].1 == v) {
                return Err(Error::Argument(format!("duplicate edge {u} -> {v}")));
            }
            out_adj[u].push(id);
            in_adj[v].push(id);
        }
        Ok(Digraph {
            n,
            source,
            edges,
            out_adj,
            in_adj,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    pub fn out_edge_ids(&self, u: NodeId) -> &[EdgeId] {
        &self.out_adj[u]
    }

    pub fn in_edge_ids(&self, v: NodeId) -> &[EdgeId] {
        &self.in_adj[v]
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.out_adj
            .get(u)?
            .iter()
            .copied()
            .find(|&e| self.edges[e].1 == v)
    }

    /// Every node as a [`NodeSet`]; only meaningful when `n <= 64`.
    pub fn all_nodes(&self) -> NodeSet {
        NodeSet::full(self.n)
    }

    /// Fails unless every node fits into a [`NodeSet`].
    pub fn require_set_width(&self, limit: usize, what: &str) -> Result<()> {
        if self.n > limit {
            Err(Error::Capability(format!(
                "{what} supports at most {limit} nodes, graph has {}",
                self.n
            )))
        } else {
            Ok(())
        }
    }

    /// Parses the edge-list format: header `n m r`, then `m` lines `u v`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header 'n m r'".into(),
        })?;
        let [n, m, r] = parse_fields::<3>(hline, header)?;
        if n == 0 {
            return Err(Error::Parse {
                line: hline,
                msg: "node count must be positive".into(),
            });
        }
        if r >= n {
            return Err(Error::Parse {
                line: hline,
                msg: format!("source {r} out of range for n={n}"),
            });
        }

        let mut edges = Vec::with_capacity(m);
        let mut seen = std::collections::HashSet::with_capacity(m);
        for _ in 0..m {
            let Some((line, l)) = lines.next() else {
                return Err(Error::Parse {
                    line: text.lines().count() + 1,
                    msg: format!("expected {m} edges, found {}", edges.len()),
                });
            };
            let [u, v] = parse_fields::<2>(line, l)?;
            check_edge(n, u, v).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            if !seen.insert((u, v)) {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate edge {u} {v}"),
                });
            }
            edges.push((u, v));
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                msg: format!("more than {m} edge lines"),
            });
        }
        Digraph::new(n, r, edges)
    }

    /// Serializes to the edge-list format accepted by [`Digraph::parse`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.edges.len(), self.source);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// A copy of the graph keeping only the edges for which `keep` is true.
    /// Edge ids are renumbered.
    pub fn subgraph(&self, keep: impl Fn(EdgeId) -> bool) -> Digraph {
        let edges = (0..self.edges.len())
            .filter(|&e| keep(e))
            .map(|e| self.edges[e])
            .collect();
        Digraph::new(self.n, self.source, edges).expect("subgraph of a valid graph")
    }
}

fn check_edge(n: usize, u: NodeId, v: NodeId) -> Result<()> {
    if u >= n || v >= n {
        return Err(Error::Argument(format!(
            "edge {u} -> {v}: node index out of range for n={n}"
        )));
    }
    if u == v {
        return Err(Error::Argument(format!("self-loop at node {u}")));
    }
    Ok(())
}

fn parse_fields<const N: usize>(line: usize, text: &str) -> Result<[usize; N]> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != N {
        return Err(Error::Parse {
            line,
            msg: format!("expected {N} integers, found {} fields", fields.len()),
        });
    }
    let mut out = [0usize; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("not a non-negative integer: {f:?}"),
        })?;
    }
    Ok(out)
}
