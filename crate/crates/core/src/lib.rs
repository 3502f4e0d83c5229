//! Broadcast capacity and throughput-optimal broadcast scheduling for directed networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] holds the [`Digraph`] model, max-flow based capacity computation,
//!   arborescence packing and the reachable-set machinery that indexes packet
//!   replication footprints.
//! * [`queues`] tracks virtual queues `Q_F`, one per reachable set `F`.
//! * [`policies`] implements the max-weight policy, the multi-class in-order
//!   heuristic, static tree routing and the stationary randomized policy.
//! * [`wireless`] adds feasible-activation families and max-weight activation.
//! * [`sim`] drives the policies in the mini-slot and slotted time models.

pub mod error;
pub mod graph;
pub mod policies;
pub mod queues;
pub mod sim;
pub mod wireless;

pub use error::{Error, Result};
pub use graph::{Arborescence, Digraph, EdgeId, NodeId, NodeSet, ReachableSequence, ReachableSet};
pub use policies::{MultiClassState, RandPolicyTable};
pub use queues::VirtualQueueState;
pub use sim::{PolicyKind, RunResult, Sample, SimConfig, TimeModel};
pub use wireless::ActivationFamily;
