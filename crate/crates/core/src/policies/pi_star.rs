use crate::graph::{Digraph, EdgeId, ReachableSet};
use crate::queues::VirtualQueueState;

/// Highest-weight class that could cross `e`, with its weight (any sign).
///
/// Candidates are the non-empty `Q_F` with `e` leaving `F`. Ties prefer the
/// smaller set, then the smaller bit pattern.
pub fn pi_star_best(
    state: &VirtualQueueState,
    g: &Digraph,
    e: EdgeId,
) -> Option<(ReachableSet, i64)> {
    let (tail, head) = g.edge(e);
    let mut best: Option<(ReachableSet, i64)> = None;
    // nonzero() is in ascending bit order, so strict comparisons keep the
    // smallest pattern among equals
    for (f, _) in state.nonzero() {
        if !f.contains(tail) || f.contains(head) {
            continue;
        }
        let w = state.weight(g, f, e);
        let better = match best {
            None => true,
            Some((bf, bw)) => w > bw || (w == bw && f.len() < bf.len()),
        };
        if better {
            best = Some((f, w));
        }
    }
    best
}

/// Max-weight decision for the active edge: the class to forward, or `None` to idle
/// when no candidate has strictly positive weight.
pub fn pi_star_decide(state: &VirtualQueueState, g: &Digraph, e: EdgeId) -> Option<ReachableSet> {
    pi_star_best(state, g, e)
        .filter(|&(_, w)| w > 0)
        .map(|(f, _)| f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::diamond4;
    use crate::graph::NodeSet;

    fn state_with(g: &Digraph, r: u64, ra: u64) -> VirtualQueueState {
        let mut q = VirtualQueueState::new(g).unwrap();
        q.admit(r + ra);
        for _ in 0..ra {
            q.transmit(g, NodeSet::singleton(0), 0).unwrap();
        }
        q
    }

    #[test]
    fn picks_max_weight() {
        let g = diamond4();
        // candidates for ra: only {r} (the only set holding r but not a); weight 4-1
        let q = state_with(&g, 4, 1);
        assert_eq!(pi_star_best(&q, &g, 0), Some((NodeSet::singleton(0), 3)));
        assert_eq!(pi_star_decide(&q, &g, 0), Some(NodeSet::singleton(0)));
        // for rb both {r} (4-0) and {r,a} (1-0) qualify
        assert_eq!(pi_star_decide(&q, &g, 3), Some(NodeSet::singleton(0)));
    }

    #[test]
    fn idles_without_positive_weight() {
        let g = diamond4();
        let q = VirtualQueueState::new(&g).unwrap();
        for e in 0..6 {
            assert_eq!(pi_star_decide(&q, &g, e), None);
        }
        let q = state_with(&g, 1, 1);
        assert_eq!(pi_star_decide(&q, &g, 0), None);
    }

    #[test]
    fn ties_prefer_smaller_sets() {
        let g = diamond4();
        let mut q = VirtualQueueState::new(&g).unwrap();
        q.admit(2);
        q.transmit(&g, NodeSet::singleton(0), 0).unwrap();
        // Q_{r}=1, Q_{r,a}=1; for rc both weigh 1
        assert_eq!(pi_star_decide(&q, &g, 4), Some(NodeSet::singleton(0)));
    }
}
