//! Broadcast scheduling policies.
//!
//! Every policy answers the same question once per active edge: which packet
//! (if any) should cross it. The max-weight policy and the randomized policy
//! work on [`VirtualQueueState`](crate::queues::VirtualQueueState); the
//! multi-class heuristic and static tree routing work on [`MultiClassState`].

mod multiclass;
mod pi_star;
mod rand_policy;
mod static_tree;

pub use multiclass::{assign_class, pi_kh_apply, pi_kh_best, pi_kh_decide, MultiClassState};
pub use pi_star::{pi_star_best, pi_star_decide};
pub use rand_policy::{build_pi_rand, pi_rand_decide, sample_extra_sequences, RandPolicyTable};
pub use static_tree::{static_tree_decide, StaticTreeRouting};
