use crate::error::Result;
use crate::graph::{validate_packing, Arborescence, Digraph, EdgeId};

use super::MultiClassState;

/// Static routing over edge-disjoint arborescences: class `c` is bound to tree `c`.
#[derive(Clone, Debug)]
pub struct StaticTreeRouting {
    trees: Vec<Arborescence>,
    owner: Vec<Option<usize>>,
}

impl StaticTreeRouting {
    /// Validates the packing and indexes each edge by the tree that owns it.
    pub fn new(g: &Digraph, trees: Vec<Arborescence>) -> Result<Self> {
        validate_packing(g, &trees)?;
        let mut owner = vec![None; g.edge_count()];
        for (c, t) in trees.iter().enumerate() {
            for &e in t.edges() {
                owner[e] = Some(c);
            }
        }
        Ok(StaticTreeRouting { trees, owner })
    }

    pub fn classes(&self) -> usize {
        self.trees.len()
    }

    pub fn trees(&self) -> &[Arborescence] {
        &self.trees
    }

    pub fn owner(&self, e: EdgeId) -> Option<usize> {
        self.owner[e]
    }
}

/// Forwards the head-of-line packet of the class owning `e = (i, j)`, if node
/// `i` already holds it. Edges outside every tree never carry traffic.
pub fn static_tree_decide(
    state: &MultiClassState,
    routing: &StaticTreeRouting,
    g: &Digraph,
    e: EdgeId,
) -> Option<usize> {
    let c = routing.owner(e)?;
    let (tail, head) = g.edge(e);
    (state.received(c, head) < state.received(c, tail)).then_some(c)
}
