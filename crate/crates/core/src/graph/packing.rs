use super::flow::{capacity_at_least, masked_capacity};
use super::{Digraph, EdgeId};
use crate::error::{Error, Result};

/// A spanning arborescence rooted at the graph source, stored as sorted edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arborescence {
    edges: Vec<EdgeId>,
}

impl Arborescence {
    /// Wraps and validates an edge list.
    pub fn new(g: &Digraph, mut edges: Vec<EdgeId>) -> Result<Self> {
        edges.sort_unstable();
        let tree = Arborescence { edges };
        tree.validate(g)?;
        Ok(tree)
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Checks the arborescence invariants: `n-1` distinct edges, in-degree one at
    /// every non-source node and zero at the source, every node reachable from
    /// the source along tree edges.
    pub fn validate(&self, g: &Digraph) -> Result<()> {
        let n = g.node_count();
        let r = g.source();
        if self.edges.len() != n - 1 {
            return Err(Error::Logic(format!(
                "arborescence has {} edges, expected {}",
                self.edges.len(),
                n - 1
            )));
        }
        let mut indeg = vec![0usize; n];
        for (i, &e) in self.edges.iter().enumerate() {
            if e >= g.edge_count() {
                return Err(Error::Logic(format!("edge id {e} out of range")));
            }
            if i > 0 && self.edges[i - 1] == e {
                return Err(Error::Logic(format!("edge {e} repeated")));
            }
            indeg[g.edge(e).1] += 1;
        }
        for (v, &d) in indeg.iter().enumerate() {
            let want = usize::from(v != r);
            if d != want {
                return Err(Error::Logic(format!(
                    "node {v} has tree in-degree {d}, expected {want}"
                )));
            }
        }
        let mut reached = vec![false; n];
        reached[r] = true;
        let mut stack = vec![r];
        while let Some(x) = stack.pop() {
            for &e in g.out_edge_ids(x) {
                let y = g.edge(e).1;
                if self.contains(e) && !reached[y] {
                    reached[y] = true;
                    stack.push(y);
                }
            }
        }
        if let Some(v) = reached.iter().position(|&x| !x) {
            return Err(Error::Logic(format!(
                "node {v} not reachable along tree edges"
            )));
        }
        Ok(())
    }
}

/// Validates each tree and checks that the trees are pairwise edge-disjoint.
pub fn validate_packing(g: &Digraph, trees: &[Arborescence]) -> Result<()> {
    let mut owner = vec![None; g.edge_count()];
    for (i, t) in trees.iter().enumerate() {
        t.validate(g)?;
        for &e in t.edges() {
            if let Some(j) = owner[e].replace(i) {
                return Err(Error::Logic(format!(
                    "edge {e} shared by trees {j} and {i}"
                )));
            }
        }
    }
    Ok(())
}

/// Packs `broadcast_capacity(g)` edge-disjoint spanning arborescences rooted at the source.
///
/// Trees are extracted one at a time. Each tree is grown from the source by
/// taking the lowest-id frontier edge whose removal (together with the tree
/// grown so far) leaves capacity at least `remaining - 1` for every sink.
/// Edmonds' branching theorem (in Lovász's constructive form) guarantees such an
/// edge always exists, so a failure here means a bug and is reported as
/// [`Error::Logic`].
pub fn tree_packing(g: &Digraph) -> Result<Vec<Arborescence>> {
    let n = g.node_count();
    if n < 2 {
        return Ok(Vec::new());
    }
    let mut available = vec![true; g.edge_count()];
    let capacity = masked_capacity(g, &available);
    let mut trees = Vec::with_capacity(capacity);

    for remaining in (1..=capacity).rev() {
        let need = remaining - 1;
        let mut in_tree = vec![false; n];
        in_tree[g.source()] = true;
        let mut tree = Vec::with_capacity(n - 1);

        while tree.len() < n - 1 {
            let mut chosen = None;
            for e in 0..g.edge_count() {
                let (a, b) = g.edge(e);
                if !available[e] || !in_tree[a] || in_tree[b] {
                    continue;
                }
                available[e] = false;
                if capacity_at_least(g, &available, need) {
                    chosen = Some(e);
                    break;
                }
                available[e] = true;
            }
            let Some(e) = chosen else {
                return Err(Error::Logic(format!(
                    "tree packing stuck growing tree {} after {} edges",
                    trees.len(),
                    tree.len()
                )));
            };
            in_tree[g.edge(e).1] = true;
            tree.push(e);
        }
        trees.push(Arborescence::new(g, tree)?);
    }
    Ok(trees)
}
