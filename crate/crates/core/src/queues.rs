//! Virtual queues over reachable sets.
//!
//! `Q_F` counts packets whose current replication footprint is exactly the
//! reachable set `F`. Packets enter at `{source}` and leave the system once
//! their footprint covers every node; `Q_V` is therefore never stored and reads
//! as zero.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::graph::{Digraph, EdgeId, NodeId, NodeSet, ReachableSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualQueueState {
    counts: BTreeMap<NodeSet, u64>,
    source: NodeSet,
    all: NodeSet,
    admitted: u64,
    delivered: u64,
}

impl VirtualQueueState {
    pub fn new(g: &Digraph) -> Result<Self> {
        g.require_set_width(crate::graph::MAX_SET_NODES, "virtual queues")?;
        Ok(VirtualQueueState {
            counts: BTreeMap::new(),
            source: NodeSet::singleton(g.source()),
            all: g.all_nodes(),
            admitted: 0,
            delivered: 0,
        })
    }

    /// Adds `packets` fresh arrivals to `Q_{r}`.
    pub fn admit(&mut self, packets: u64) {
        if packets == 0 {
            return;
        }
        *self.counts.entry(self.source).or_insert(0) += packets;
        self.admitted += packets;
    }

    /// Moves one class-`set` packet across `e`.
    ///
    /// Fails with [`Error::Logic`] if `Q_set` is empty or `e` does not leave `set`.
    pub fn transmit(&mut self, g: &Digraph, set: ReachableSet, e: EdgeId) -> Result<()> {
        let next = crate::graph::set_plus_edge(g, set, e)
            .map_err(|err| Error::Logic(format!("transmit: {err}")))?;
        let slot = self
            .counts
            .get_mut(&set)
            .ok_or_else(|| Error::Logic(format!("transmit from empty queue {set}")))?;
        *slot -= 1;
        if *slot == 0 {
            self.counts.remove(&set);
        }
        if next == self.all {
            self.delivered += 1;
        } else {
            debug_assert!(crate::graph::is_reachable_set(g, next));
            *self.counts.entry(next).or_insert(0) += 1;
        }
        Ok(())
    }

    /// `Q_F`, with absent sets and the full node set reading as zero.
    pub fn count(&self, set: ReachableSet) -> u64 {
        self.counts.get(&set).copied().unwrap_or(0)
    }

    /// Back-pressure weight `Q_F - Q_{F+e}`; `e` must leave `F`.
    pub fn weight(&self, g: &Digraph, set: ReachableSet, e: EdgeId) -> i64 {
        let head = g.edge(e).1;
        debug_assert!(set.contains(g.edge(e).0) && !set.contains(head));
        self.count(set) as i64 - self.count(set.with(head)) as i64
    }

    pub fn total_backlog(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Distinct packets held by `node`: every delivered packet plus every
    /// in-flight packet whose footprint contains it.
    pub fn received_count(&self, node: NodeId) -> u64 {
        self.delivered
            + self
                .counts
                .iter()
                .filter(|(f, _)| f.contains(node))
                .map(|(_, &c)| c)
                .sum::<u64>()
    }

    pub fn admitted(&self) -> u64 {
        self.admitted
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    /// Non-empty queues in ascending bit-pattern order.
    pub fn nonzero(&self) -> impl Iterator<Item = (NodeSet, u64)> + '_ {
        self.counts.iter().map(|(&f, &c)| (f, c))
    }

    /// Writes a `kind,set,count` CSV: one `queue` row per non-empty set (set
    /// as decimal bit pattern), then the `admitted` and `delivered` counters.
    pub fn write_snapshot_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "kind,set,count")?;
        for (f, c) in self.nonzero() {
            writeln!(out, "queue,{},{c}", f.bits())?;
        }
        writeln!(out, "admitted,,{}", self.admitted)?;
        writeln!(out, "delivered,,{}", self.delivered)
    }
}
