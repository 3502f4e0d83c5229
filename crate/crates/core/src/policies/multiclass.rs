use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Digraph, EdgeId, NodeId, NodeSet, ReachableSet, MAX_SET_NODES};

/// Network state under per-class in-order delivery.
///
/// `R[c][i]` is the highest in-order packet index of class `c` held by node `i`;
/// under in-order delivery this fully describes where every packet is. The
/// state also maintains the per-set packet counts `Q_G` incrementally: for one
/// class, the packets held by exactly `G` number
/// `(min_{i in G} R[c][i] - max_{i not in G} R[c][i])^+`, which is positive only
/// when `G` is an upper level set of that class's row.
#[derive(Clone, Debug)]
pub struct MultiClassState {
    n: usize,
    source: NodeId,
    all: NodeSet,
    r: Vec<u64>,
    arrivals: Vec<u64>,
    levels: Vec<Vec<(NodeSet, u64)>>,
    q: HashMap<NodeSet, u64>,
}

impl MultiClassState {
    pub fn new(g: &Digraph, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("class count must be at least 1".into()));
        }
        g.require_set_width(MAX_SET_NODES, "multi-class state")?;
        let n = g.node_count();
        Ok(MultiClassState {
            n,
            source: g.source(),
            all: g.all_nodes(),
            r: vec![0; k * n],
            arrivals: vec![0; k],
            levels: vec![Vec::new(); k],
            q: HashMap::new(),
        })
    }

    /// Builds a state from explicit rows `R[c][..]`; arrivals are read from the source column.
    pub fn from_rows(g: &Digraph, rows: &[Vec<u64>]) -> Result<Self> {
        let mut s = MultiClassState::new(g, rows.len())?;
        for (c, row) in rows.iter().enumerate() {
            if row.len() != s.n {
                return Err(Error::Argument(format!(
                    "row {c} has {} entries",
                    row.len()
                )));
            }
            let top = row[s.source];
            if row.iter().any(|&x| x > top) {
                return Err(Error::Argument(format!("row {c} exceeds the source count")));
            }
            s.r[c * s.n..(c + 1) * s.n].copy_from_slice(row);
            s.arrivals[c] = top;
            s.refresh(c);
        }
        Ok(s)
    }

    pub fn classes(&self) -> usize {
        self.arrivals.len()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// `R[c][i]`.
    pub fn received(&self, class: usize, node: NodeId) -> u64 {
        self.r[class * self.n + node]
    }

    pub fn row(&self, class: usize) -> &[u64] {
        &self.r[class * self.n..(class + 1) * self.n]
    }

    pub fn arrivals(&self, class: usize) -> u64 {
        self.arrivals[class]
    }

    /// Packets admitted over all classes.
    pub fn admitted(&self) -> u64 {
        self.arrivals.iter().sum()
    }

    /// Distinct packets held by `node` over all classes.
    pub fn received_count(&self, node: NodeId) -> u64 {
        (0..self.classes()).map(|c| self.received(c, node)).sum()
    }

    /// Packets held by every node.
    pub fn delivered(&self) -> u64 {
        (0..self.classes())
            .map(|c| self.row(c).iter().copied().min().unwrap_or(0))
            .sum()
    }

    /// Packets not yet held by every node, summed from the cached `Q_G`.
    pub fn total_backlog(&self) -> u64 {
        self.q.values().sum()
    }

    /// Appends one packet to `class` at the source.
    pub fn admit(&mut self, class: usize) {
        self.arrivals[class] += 1;
        self.r[class * self.n + self.source] += 1;
        self.refresh(class);
    }

    /// `Q_G` from the incrementally maintained cache. The full node set reads as zero.
    pub fn q_of_set(&self, set: NodeSet) -> u64 {
        self.q.get(&set).copied().unwrap_or(0)
    }

    /// `Q_G = sum_c (min_{i in G} R[c][i] - max_{i not in G} R[c][i])^+`, evaluated
    /// directly. Delivered packets have left the system, so the full set reads as zero.
    pub fn q_of_set_direct(&self, set: NodeSet) -> u64 {
        if set == self.all || set.is_empty() {
            return 0;
        }
        (0..self.classes())
            .map(|c| {
                let row = self.row(c);
                let inside = set.iter().map(|i| row[i]).min().unwrap_or(0);
                let outside = (0..self.n)
                    .filter(|&i| !set.contains(i))
                    .map(|i| row[i])
                    .max();
                inside.saturating_sub(outside.unwrap_or(0))
            })
            .sum()
    }

    /// The footprint of class `class`'s head-of-line packet for `node`, if that
    /// packet has arrived at the source.
    pub fn hol_set(&self, class: usize, node: NodeId) -> Option<ReachableSet> {
        let next = self.received(class, node) + 1;
        if next > self.arrivals[class] {
            return None;
        }
        let row = self.row(class);
        Some(NodeSet::from_nodes((0..self.n).filter(|&i| row[i] >= next)))
    }

    fn refresh(&mut self, class: usize) {
        for (set, count) in std::mem::take(&mut self.levels[class]) {
            let slot = self.q.get_mut(&set).expect("cached level present");
            *slot -= count;
            if *slot == 0 {
                self.q.remove(&set);
            }
        }
        let row = &self.r[class * self.n..(class + 1) * self.n];
        let mut order: Vec<NodeId> = (0..self.n).collect();
        order.sort_by(|&a, &b| row[b].cmp(&row[a]));
        let mut levels = Vec::new();
        let mut set = NodeSet::EMPTY;
        let mut idx = 0;
        while idx < self.n {
            let value = row[order[idx]];
            while idx < self.n && row[order[idx]] == value {
                set = set.with(order[idx]);
                idx += 1;
            }
            // the last level is the full set: delivered packets are not counted
            if idx < self.n {
                let below = row[order[idx]];
                levels.push((set, value - below));
            }
        }
        for &(set, count) in &levels {
            *self.q.entry(set).or_insert(0) += count;
        }
        self.levels[class] = levels;
    }
}

/// Best eligible class for the active edge `(i, j)` with its weight (any sign).
///
/// For each class, the head-of-line packet for `j` is eligible if it has
/// arrived and is present at `i`; its weight is `Q_{F_c} - Q_{F_c + j}`.
/// Ties go to the lowest class index.
pub fn pi_kh_best(state: &MultiClassState, g: &Digraph, e: EdgeId) -> Option<(usize, i64)> {
    let (tail, head) = g.edge(e);
    let mut best: Option<(usize, i64)> = None;
    for c in 0..state.classes() {
        let Some(set) = state.hol_set(c, head) else {
            continue;
        };
        if !set.contains(tail) {
            continue;
        }
        let w = state.q_of_set(set) as i64 - state.q_of_set(set.with(head)) as i64;
        if best.is_none_or(|(_, bw)| w > bw) {
            best = Some((c, w));
        }
    }
    best
}

/// Multi-class heuristic decision: the class whose head-of-line packet crosses
/// `e`, or `None` to idle when no eligible class has positive weight.
pub fn pi_kh_decide(state: &MultiClassState, g: &Digraph, e: EdgeId) -> Option<usize> {
    pi_kh_best(state, g, e)
        .filter(|&(_, w)| w > 0)
        .map(|(c, _)| c)
}

/// Delivers class `class`'s head-of-line packet across `e = (i, j)`.
pub fn pi_kh_apply(
    state: &mut MultiClassState,
    g: &Digraph,
    class: usize,
    e: EdgeId,
) -> Result<()> {
    let (tail, head) = g.edge(e);
    if class >= state.classes() {
        return Err(Error::Logic(format!("class {class} out of range")));
    }
    let next = state.received(class, head) + 1;
    if state.received(class, tail) < next {
        return Err(Error::Logic(format!(
            "class {class} packet {next} not present at node {tail}"
        )));
    }
    state.r[class * state.n + head] = next;
    state.refresh(class);
    Ok(())
}

/// Uniform class label in `0..k`, consuming one draw.
pub fn assign_class<R: Rng + ?Sized>(rng: &mut R, k: usize) -> usize {
    rng.random_range(0..k)
}
