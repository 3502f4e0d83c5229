//! Policy adapters behind a common per-edge interface.

use rand_chacha::ChaCha8Rng;

use super::{PolicyKind, Sample, SimConfig};
use crate::error::{Error, Result};
use crate::graph::{broadcast_capacity, sequence_from_arborescence, tree_packing, Digraph, EdgeId};
use crate::policies::{
    assign_class, build_pi_rand, pi_kh_apply, pi_kh_decide, pi_rand_decide, pi_star_decide,
    sample_extra_sequences, static_tree_decide, MultiClassState, RandPolicyTable,
    StaticTreeRouting,
};
use crate::queues::VirtualQueueState;
use crate::wireless::{pi_kh_edge_weight, pi_star_edge_weight};

pub(crate) trait Scheduler {
    /// Admits `packets` arrivals at the source.
    fn admit(&mut self, packets: u64, classes: &mut ChaCha8Rng);
    /// Lets the policy use active edge `e` once. Returns whether a packet moved.
    fn serve(&mut self, e: EdgeId, rng: &mut ChaCha8Rng) -> Result<bool>;
    /// Max-weight activation weight of `e`, floored at zero.
    fn edge_weight(&self, e: EdgeId) -> i64;
    fn sample(&self, slot: u64) -> Sample;
}

pub(crate) fn build<'g>(
    config: &SimConfig,
    g: &'g Digraph,
    sequence_rng: &mut ChaCha8Rng,
) -> Result<Box<dyn Scheduler + 'g>> {
    Ok(match config.policy {
        PolicyKind::PiStar => Box::new(MaxWeight {
            g,
            q: VirtualQueueState::new(g)?,
        }),
        PolicyKind::PiKh { k } => Box::new(InOrder {
            g,
            state: MultiClassState::new(g, k)?,
            routing: None,
        }),
        PolicyKind::StaticTree => {
            let routing = StaticTreeRouting::new(g, tree_packing(g)?)?;
            if routing.classes() == 0 {
                return Err(Error::Argument(
                    "static tree routing needs capacity >= 1".into(),
                ));
            }
            Box::new(InOrder {
                g,
                state: MultiClassState::new(g, routing.classes())?,
                routing: Some(routing),
            })
        }
        PolicyKind::PiRand { eps, extra } => {
            let trees = tree_packing(g)?;
            let tree_seqs = trees
                .iter()
                .map(|t| sequence_from_arborescence(g, t))
                .collect::<Result<Vec<_>>>()?;
            let count = extra.unwrap_or(4 * g.edge_count());
            let extra = sample_extra_sequences(g, &tree_seqs, count, sequence_rng)?;
            let eps = eps.unwrap_or_else(|| default_eps(config.lambda, g));
            let table = build_pi_rand(g, &trees, &extra, eps)?;
            Box::new(Randomized {
                g,
                q: VirtualQueueState::new(g)?,
                table,
            })
        }
    })
}

/// Default rate margin: half the gap to capacity below capacity, `1/(4n)` otherwise.
pub fn default_eps(lambda: f64, g: &Digraph) -> f64 {
    let cap = broadcast_capacity(g) as f64;
    if lambda < cap {
        (cap - lambda) / 2.0
    } else {
        1.0 / (4.0 * g.node_count() as f64)
    }
}

fn queue_sample(q: &VirtualQueueState, n: usize, slot: u64) -> Sample {
    let received: Vec<u64> = (0..n).map(|i| q.received_count(i)).collect();
    Sample {
        slot,
        admitted: q.admitted(),
        delivered: q.delivered(),
        min_received: received.iter().copied().min().unwrap_or(0),
        received,
        backlog: q.total_backlog(),
    }
}

struct MaxWeight<'g> {
    g: &'g Digraph,
    q: VirtualQueueState,
}

impl Scheduler for MaxWeight<'_> {
    fn admit(&mut self, packets: u64, _: &mut ChaCha8Rng) {
        self.q.admit(packets);
    }

    fn serve(&mut self, e: EdgeId, _: &mut ChaCha8Rng) -> Result<bool> {
        match pi_star_decide(&self.q, self.g, e) {
            Some(f) => self.q.transmit(self.g, f, e).map(|_| true),
            None => Ok(false),
        }
    }

    fn edge_weight(&self, e: EdgeId) -> i64 {
        pi_star_edge_weight(&self.q, self.g, e)
    }

    fn sample(&self, slot: u64) -> Sample {
        queue_sample(&self.q, self.g.node_count(), slot)
    }
}

struct Randomized<'g> {
    g: &'g Digraph,
    q: VirtualQueueState,
    table: RandPolicyTable,
}

impl Scheduler for Randomized<'_> {
    fn admit(&mut self, packets: u64, _: &mut ChaCha8Rng) {
        self.q.admit(packets);
    }

    fn serve(&mut self, e: EdgeId, rng: &mut ChaCha8Rng) -> Result<bool> {
        match pi_rand_decide(&self.table, &self.q, e, rng) {
            Some(f) => self.q.transmit(self.g, f, e).map(|_| true),
            None => Ok(false),
        }
    }

    fn edge_weight(&self, _: EdgeId) -> i64 {
        // queue-oblivious; never used with activation families
        0
    }

    fn sample(&self, slot: u64) -> Sample {
        queue_sample(&self.q, self.g.node_count(), slot)
    }
}

/// Multi-class in-order delivery, either max-weight over classes or static trees.
struct InOrder<'g> {
    g: &'g Digraph,
    state: MultiClassState,
    routing: Option<StaticTreeRouting>,
}

impl Scheduler for InOrder<'_> {
    fn admit(&mut self, packets: u64, classes: &mut ChaCha8Rng) {
        let k = self.state.classes();
        for _ in 0..packets {
            let c = assign_class(classes, k);
            self.state.admit(c);
        }
    }

    fn serve(&mut self, e: EdgeId, _: &mut ChaCha8Rng) -> Result<bool> {
        let choice = match &self.routing {
            None => pi_kh_decide(&self.state, self.g, e),
            Some(r) => static_tree_decide(&self.state, r, self.g, e),
        };
        match choice {
            Some(c) => pi_kh_apply(&mut self.state, self.g, c, e).map(|_| true),
            None => Ok(false),
        }
    }

    fn edge_weight(&self, e: EdgeId) -> i64 {
        match &self.routing {
            None => pi_kh_edge_weight(&self.state, self.g, e),
            Some(r) => r.owner(e).map_or(0, |c| {
                let (tail, head) = self.g.edge(e);
                self.state.received(c, tail) as i64 - self.state.received(c, head) as i64
            }),
        }
    }

    fn sample(&self, slot: u64) -> Sample {
        let n = self.g.node_count();
        let received: Vec<u64> = (0..n).map(|i| self.state.received_count(i)).collect();
        Sample {
            slot,
            admitted: self.state.admitted(),
            delivered: self.state.delivered(),
            min_received: received.iter().copied().min().unwrap_or(0),
            received,
            backlog: self.state.total_backlog(),
        }
    }
}
