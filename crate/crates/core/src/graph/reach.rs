use super::{Arborescence, Digraph, EdgeId, NodeSet};
use crate::error::{Error, Result};

/// Subset enumeration is refused above this node count.
pub const MAX_ENUMERATION_NODES: usize = 25;

/// True iff `set` contains the source and every member is reachable from the
/// source inside the subgraph induced by `set`.
pub fn is_reachable_set(g: &Digraph, set: NodeSet) -> bool {
    let r = g.source();
    if !set.contains(r) || !set.is_subset(g.all_nodes()) {
        return false;
    }
    let mut seen = NodeSet::singleton(r);
    let mut stack = vec![r];
    while let Some(x) = stack.pop() {
        for &e in g.out_edge_ids(x) {
            let y = g.edge(e).1;
            if set.contains(y) && !seen.contains(y) {
                seen = seen.with(y);
                stack.push(y);
            }
        }
    }
    seen == set
}

/// Edges leaving `set`, in id order.
pub fn out_edges(g: &Digraph, set: NodeSet) -> Vec<EdgeId> {
    (0..g.edge_count())
        .filter(|&e| {
            let (a, b) = g.edge(e);
            set.contains(a) && !set.contains(b)
        })
        .collect()
}

/// Edges with both endpoints inside `set`, in id order.
pub fn in_edges(g: &Digraph, set: NodeSet) -> Vec<EdgeId> {
    (0..g.edge_count())
        .filter(|&e| {
            let (a, b) = g.edge(e);
            set.contains(a) && set.contains(b)
        })
        .collect()
}

/// `set` with the head of `e` added. `e` must leave `set`.
pub fn set_plus_edge(g: &Digraph, set: NodeSet, e: EdgeId) -> Result<NodeSet> {
    if e >= g.edge_count() {
        return Err(Error::Argument(format!("edge id {e} out of range")));
    }
    let (a, b) = g.edge(e);
    if !set.contains(a) || set.contains(b) {
        return Err(Error::Argument(format!(
            "edge {a}->{b} does not leave {set}"
        )));
    }
    Ok(set.with(b))
}

/// A packet trajectory: `n-1` (set, edge) steps growing the replication set
/// one node at a time from `{source}` to the full node set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReachableSequence {
    steps: Vec<(NodeSet, EdgeId)>,
}

impl ReachableSequence {
    pub fn new(g: &Digraph, steps: Vec<(NodeSet, EdgeId)>) -> Result<Self> {
        let seq = ReachableSequence { steps };
        seq.validate(g)?;
        Ok(seq)
    }

    pub fn steps(&self) -> &[(NodeSet, EdgeId)] {
        &self.steps
    }

    /// Checks: first set is `{r}`; sets grow by exactly one node per step; each
    /// edge leads from the current set to the node added next; length `n-1`.
    pub fn validate(&self, g: &Digraph) -> Result<()> {
        let n = g.node_count();
        if self.steps.len() != n - 1 {
            return Err(Error::Logic(format!(
                "sequence length {} != {}",
                self.steps.len(),
                n - 1
            )));
        }
        if self.steps.first().map(|s| s.0) != Some(NodeSet::singleton(g.source())) {
            return Err(Error::Logic(
                "sequence must start at the source singleton".into(),
            ));
        }
        for (j, &(set, e)) in self.steps.iter().enumerate() {
            let next = set_plus_edge(g, set, e).map_err(|err| Error::Logic(err.to_string()))?;
            let expected_next = match self.steps.get(j + 1) {
                Some(&(s, _)) => s,
                None => g.all_nodes(),
            };
            if next != expected_next {
                return Err(Error::Logic(format!(
                    "step {j}: {set} + edge {e} = {next}, expected {expected_next}"
                )));
            }
        }
        Ok(())
    }
}

/// Orders a tree's edges into a reachable sequence, always taking the
/// lowest-id tree edge whose tail is already covered.
pub fn sequence_from_arborescence(g: &Digraph, tree: &Arborescence) -> Result<ReachableSequence> {
    g.require_set_width(super::MAX_SET_NODES, "reachable sequences")?;
    let mut set = NodeSet::singleton(g.source());
    let mut pending: Vec<EdgeId> = tree.edges().to_vec();
    let mut steps = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let idx = pending
            .iter()
            .position(|&e| {
                let (a, b) = g.edge(e);
                set.contains(a) && !set.contains(b)
            })
            .ok_or_else(|| Error::Logic("tree edges do not form an arborescence".into()))?;
        let e = pending.remove(idx);
        steps.push((set, e));
        set = set.with(g.edge(e).1);
    }
    ReachableSequence::new(g, steps)
}

/// Lazily yields every reachable proper subset in ascending bit-pattern order.
pub struct ReachableSetIter<'g> {
    g: &'g Digraph,
    // iterates over masks of the non-source nodes, compressed
    next: u64,
    end: u64,
    others: Vec<usize>,
}

impl Iterator for ReachableSetIter<'_> {
    type Item = NodeSet;

    fn next(&mut self) -> Option<NodeSet> {
        while self.next < self.end {
            let packed = self.next;
            self.next += 1;
            let mut set = NodeSet::singleton(self.g.source());
            for (k, &v) in self.others.iter().enumerate() {
                if packed & (1 << k) != 0 {
                    set = set.with(v);
                }
            }
            if is_reachable_set(self.g, set) {
                return Some(set);
            }
        }
        None
    }
}

/// Enumerates all reachable proper subsets of the nodes.
///
/// Because the non-source nodes are scanned as a counter, output order is
/// ascending in bit pattern.
pub fn enumerate_reachable_sets(g: &Digraph) -> Result<ReachableSetIter<'_>> {
    let n = g.node_count();
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::Capability(format!(
            "reachable-set enumeration limited to {MAX_ENUMERATION_NODES} nodes, graph has {n}"
        )));
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != g.source()).collect();
    Ok(ReachableSetIter {
        g,
        next: 0,
        end: (1u64 << others.len()) - 1,
        others,
    })
}

/// Enumerates reachable sequences depth-first (lowest edge id first), stopping
/// after `limit` sequences.
pub fn enumerate_reachable_sequences(g: &Digraph, limit: usize) -> Result<Vec<ReachableSequence>> {
    g.require_set_width(MAX_ENUMERATION_NODES, "reachable-sequence enumeration")?;
    fn extend(
        g: &Digraph,
        set: NodeSet,
        steps: &mut Vec<(NodeSet, EdgeId)>,
        out: &mut Vec<ReachableSequence>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if set == g.all_nodes() {
            out.push(ReachableSequence {
                steps: steps.clone(),
            });
            return;
        }
        for e in out_edges(g, set) {
            steps.push((set, e));
            extend(g, set.with(g.edge(e).1), steps, out, limit);
            steps.pop();
        }
    }
    let mut out = Vec::new();
    if g.node_count() > 1 {
        extend(
            g,
            NodeSet::singleton(g.source()),
            &mut Vec::new(),
            &mut out,
            limit,
        );
    }
    Ok(out)
}
