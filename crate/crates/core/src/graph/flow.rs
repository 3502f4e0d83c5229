use std::collections::VecDeque;

use super::{Digraph, EdgeId, NodeId, NodeSet};
use crate::error::{Error, Result};

/// Value of a maximum `s -> t` flow with unit edge capacities.
///
/// Returns 0 when `s == t` or `t` is unreachable.
pub fn max_flow(g: &Digraph, s: NodeId, t: NodeId) -> usize {
    flow_value(g, s, t, None, usize::MAX)
}

/// Minimum over non-source nodes of the max-flow from the source.
///
/// Single-node graphs have capacity 0.
pub fn broadcast_capacity(g: &Digraph) -> usize {
    min_cut_sink(g).map_or(0, |(cap, _)| cap)
}

/// The broadcast capacity together with the lowest-indexed sink attaining it.
pub fn min_cut_sink(g: &Digraph) -> Option<(usize, NodeId)> {
    let r = g.source();
    let mut best: Option<(usize, NodeId)> = None;
    for t in (0..g.node_count()).filter(|&t| t != r) {
        let limit = best.map_or(usize::MAX, |(c, _)| c);
        let f = flow_value(g, r, t, None, limit);
        if best.is_none_or(|(c, _)| f < c) {
            best = Some((f, t));
            if f == 0 {
                break;
            }
        }
    }
    best
}

/// Number of edges leaving the node set `cut`.
///
/// `cut` must contain the source and must not be the whole node set.
pub fn cut_capacity(g: &Digraph, cut: NodeSet) -> Result<usize> {
    if !cut.contains(g.source()) {
        return Err(Error::Argument(format!(
            "cut {cut} does not contain the source"
        )));
    }
    if !cut.is_subset(g.all_nodes()) {
        return Err(Error::Argument(format!(
            "cut {cut} has nodes outside the graph"
        )));
    }
    if cut == g.all_nodes() {
        return Err(Error::Argument(
            "cut must be a proper subset of the nodes".into(),
        ));
    }
    Ok(g.edges()
        .iter()
        .filter(|&&(a, b)| cut.contains(a) && !cut.contains(b))
        .count())
}

/// True if every non-source node receives at least `k` edge-disjoint paths
/// from the source using only edges with `allowed[e]`.
pub(crate) fn capacity_at_least(g: &Digraph, allowed: &[bool], k: usize) -> bool {
    if k == 0 {
        return true;
    }
    let r = g.source();
    (0..g.node_count())
        .filter(|&t| t != r)
        .all(|t| flow_value(g, r, t, Some(allowed), k) >= k)
}

/// Broadcast capacity restricted to the edges with `allowed[e]`.
pub(crate) fn masked_capacity(g: &Digraph, allowed: &[bool]) -> usize {
    let r = g.source();
    (0..g.node_count())
        .filter(|&t| t != r)
        .map(|t| flow_value(g, r, t, Some(allowed), usize::MAX))
        .min()
        .unwrap_or(0)
}

/// BFS augmenting paths on the unit-capacity residual graph, stopping once
/// `limit` units have been routed.
fn flow_value(g: &Digraph, s: NodeId, t: NodeId, allowed: Option<&[bool]>, limit: usize) -> usize {
    if s == t {
        return 0;
    }
    let n = g.node_count();
    let usable = |e: EdgeId| allowed.is_none_or(|a| a[e]);
    let mut used = vec![false; g.edge_count()];
    // (edge, forward?) that discovered each node
    let mut parent: Vec<Option<(EdgeId, bool)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut value = 0;

    while value < limit {
        seen.iter_mut().for_each(|x| *x = false);
        queue.clear();
        seen[s] = true;
        queue.push_back(s);
        'bfs: while let Some(x) = queue.pop_front() {
            for &e in g.out_edge_ids(x) {
                let y = g.edge(e).1;
                if !seen[y] && !used[e] && usable(e) {
                    seen[y] = true;
                    parent[y] = Some((e, true));
                    if y == t {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
            for &e in g.in_edge_ids(x) {
                let y = g.edge(e).0;
                if !seen[y] && used[e] {
                    seen[y] = true;
                    parent[y] = Some((e, false));
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] {
            break;
        }
        let mut v = t;
        while v != s {
            let (e, forward) = parent[v].expect("augmenting path is connected");
            used[e] = forward;
            v = if forward { g.edge(e).0 } else { g.edge(e).1 };
        }
        value += 1;
    }
    value
}
