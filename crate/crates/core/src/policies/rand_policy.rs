use std::collections::HashSet;
use std::io::{self, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{
    out_edges, sequence_from_arborescence, validate_packing, Arborescence, Digraph, EdgeId,
    NodeSet, ReachableSequence, ReachableSet,
};
use crate::queues::VirtualQueueState;

/// Slack allowed when checking that per-edge probabilities sum to at most one.
const FEASIBILITY_TOL: f64 = 1e-12;

/// Stationary randomized policy: for each edge, the probability that a class-`F`
/// packet is attempted when the edge is active.
///
/// Rates are built along reachable sequences. With `eps` the per-slot rate
/// margin (`lambda <= capacity - eps`) and `m` mini-slots per slot, step `j`
/// (1-based) of a tree sequence receives expected rate
/// `1/m - (eps/m)(n-j)/n` per mini-slot, and step `j` of each of the `B'`
/// extra sequences receives `(eps/m) j / (2 n^2 B')`. Stored values are the
/// conditional probabilities, i.e. `m` times those rates.
#[derive(Clone, Debug, PartialEq)]
pub struct RandPolicyTable {
    m: usize,
    per_edge: Vec<Vec<(ReachableSet, f64)>>,
}

impl RandPolicyTable {
    /// `(set, probability)` entries for `e` in ascending set order.
    pub fn entries(&self, e: EdgeId) -> &[(ReachableSet, f64)] {
        &self.per_edge[e]
    }

    /// Conditional probability that class `set` is attempted on active edge `e`.
    pub fn probability(&self, e: EdgeId, set: ReachableSet) -> f64 {
        self.per_edge[e]
            .iter()
            .find(|(f, _)| *f == set)
            .map_or(0.0, |&(_, p)| p)
    }

    /// Expected rate per mini-slot allocated to `(e, set)`.
    pub fn expected_rate(&self, e: EdgeId, set: ReachableSet) -> f64 {
        self.probability(e, set) / self.m as f64
    }

    /// Sum of conditional probabilities over all classes on `e`.
    pub fn edge_total(&self, e: EdgeId) -> f64 {
        self.per_edge[e].iter().map(|&(_, p)| p).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.per_edge.len()
    }

    /// Writes `edge,set,probability` rows (set as decimal bit pattern).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "edge,set,probability")?;
        for (e, entries) in self.per_edge.iter().enumerate() {
            for (f, p) in entries {
                writeln!(out, "{e},{},{p}", f.bits())?;
            }
        }
        Ok(())
    }
}

/// Builds the randomized rate table from a tree packing and `extra` additional sequences.
pub fn build_pi_rand(
    g: &Digraph,
    trees: &[Arborescence],
    extra: &[ReachableSequence],
    eps: f64,
) -> Result<RandPolicyTable> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Argument(format!(
            "rate margin must be positive, got {eps}"
        )));
    }
    validate_packing(g, trees)?;
    let n = g.node_count() as f64;
    let mut per_edge: Vec<Vec<(ReachableSet, f64)>> = vec![Vec::new(); g.edge_count()];
    let mut add =
        |e: EdgeId, f: ReachableSet, p: f64| match per_edge[e].iter_mut().find(|x| x.0 == f) {
            Some(slot) => slot.1 += p,
            None => per_edge[e].push((f, p)),
        };

    for tree in trees {
        let seq = sequence_from_arborescence(g, tree)?;
        for (idx, &(f, e)) in seq.steps().iter().enumerate() {
            let j = (idx + 1) as f64;
            add(e, f, 1.0 - eps * (n - j) / n);
        }
    }
    let b = extra.len() as f64;
    for seq in extra {
        seq.validate(g)?;
        for (idx, &(f, e)) in seq.steps().iter().enumerate() {
            let j = (idx + 1) as f64;
            add(e, f, eps * j / (2.0 * n * n * b));
        }
    }

    for (e, entries) in per_edge.iter_mut().enumerate() {
        entries.sort_by_key(|&(f, _)| f);
        if let Some(&(f, p)) = entries.iter().find(|&&(_, p)| p < 0.0) {
            return Err(Error::Infeasible(format!(
                "edge {e}, set {f}: negative probability {p}"
            )));
        }
        let total: f64 = entries.iter().map(|&(_, p)| p).sum();
        if total > 1.0 + FEASIBILITY_TOL {
            return Err(Error::Infeasible(format!(
                "edge {e}: probabilities sum to {total}"
            )));
        }
    }
    Ok(RandPolicyTable {
        m: g.edge_count(),
        per_edge,
    })
}

/// Samples up to `count` distinct reachable sequences by random growth from
/// `{source}`, picking a uniformly random boundary edge at each step.
/// Sequences equal to one in `exclude` are rejected; sampling gives up after
/// `50 * count` attempts, so fewer sequences come back on graphs with few of them.
pub fn sample_extra_sequences<R: Rng + ?Sized>(
    g: &Digraph,
    exclude: &[ReachableSequence],
    count: usize,
    rng: &mut R,
) -> Result<Vec<ReachableSequence>> {
    g.require_set_width(crate::graph::MAX_SET_NODES, "sequence sampling")?;
    if crate::graph::broadcast_capacity(g) == 0 {
        return Err(Error::Argument(
            "graph has a node unreachable from the source".into(),
        ));
    }
    let mut seen: HashSet<ReachableSequence> = exclude.iter().cloned().collect();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 50 * count {
        attempts += 1;
        let mut set = NodeSet::singleton(g.source());
        let mut steps = Vec::with_capacity(g.node_count() - 1);
        while set != g.all_nodes() {
            let frontier = out_edges(g, set);
            let e = frontier[rng.random_range(0..frontier.len())];
            steps.push((set, e));
            set = set.with(g.edge(e).1);
        }
        let seq = ReachableSequence::new(g, steps)?;
        if seen.insert(seq.clone()) {
            out.push(seq);
        }
    }
    Ok(out)
}

/// Samples a class for the active edge from the table; idles (returns `None`)
/// with the residual probability or when the sampled class is empty.
pub fn pi_rand_decide<R: Rng + ?Sized>(
    table: &RandPolicyTable,
    state: &VirtualQueueState,
    e: EdgeId,
    rng: &mut R,
) -> Option<ReachableSet> {
    let entries = table.entries(e);
    if entries.is_empty() {
        return None;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(f, p) in entries {
        acc += p;
        if u < acc {
            return (state.count(f) > 0).then_some(f);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::diamond4;
    use crate::graph::tree_packing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(nodes: &[usize]) -> NodeSet {
        NodeSet::from_nodes(nodes.iter().copied())
    }

    #[test]
    fn diamond_tree_rates() {
        let g = diamond4();
        let trees = tree_packing(&g).unwrap();
        let eps = 0.05;
        let table = build_pi_rand(&g, &trees, &[], eps).unwrap();
        // per-mini-slot margin is eps/m
        let e = eps / 6.0;
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(
            table.expected_rate(0, set(&[0])),
            1.0 / 6.0 - 3.0 * e / 4.0
        ));
        assert!(close(
            table.expected_rate(1, set(&[0, 1])),
            1.0 / 6.0 - 2.0 * e / 4.0
        ));
        assert!(close(
            table.expected_rate(2, set(&[0, 1, 2])),
            1.0 / 6.0 - e / 4.0
        ));
        assert!(close(
            table.expected_rate(3, set(&[0])),
            1.0 / 6.0 - 3.0 * e / 4.0
        ));
        assert!(close(
            table.expected_rate(4, set(&[0, 2])),
            1.0 / 6.0 - 2.0 * e / 4.0
        ));
        assert!(close(
            table.expected_rate(5, set(&[0, 2, 3])),
            1.0 / 6.0 - e / 4.0
        ));
        assert_eq!(table.expected_rate(0, set(&[0, 2])), 0.0);
    }

    #[test]
    fn extra_sequences_keep_edges_feasible() {
        let g = diamond4();
        let trees = tree_packing(&g).unwrap();
        let tree_seqs: Vec<_> = trees
            .iter()
            .map(|t| sequence_from_arborescence(&g, t).unwrap())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let extra = sample_extra_sequences(&g, &tree_seqs, 24, &mut rng).unwrap();
        assert!(!extra.is_empty());
        for s in &extra {
            assert!(!tree_seqs.contains(s));
        }
        let eps = 0.05;
        let table = build_pi_rand(&g, &trees, &extra, eps).unwrap();
        let m = 6.0;
        let n = 4.0;
        for e in 0..6 {
            let rate: f64 = table
                .entries(e)
                .iter()
                .map(|&(f, _)| table.expected_rate(e, f))
                .sum();
            assert!(
                rate <= 1.0 / m - (eps / m) / (2.0 * n) + 1e-12,
                "edge {e}: {rate}"
            );
        }
        // every (edge, set) rate equals the sum of its per-sequence components,
        // written in the un-simplified form eps/(2nB) - eps/(2nB) (n-j)/n
        let e_ms = eps / m;
        let b = extra.len() as f64;
        let mut want = std::collections::HashMap::<(usize, NodeSet), f64>::new();
        for s in &tree_seqs {
            for (idx, &(f, e)) in s.steps().iter().enumerate() {
                let j = idx as f64 + 1.0;
                *want.entry((e, f)).or_default() += 1.0 / m - e_ms * (n - j) / n;
            }
        }
        for s in &extra {
            for (idx, &(f, e)) in s.steps().iter().enumerate() {
                let j = idx as f64 + 1.0;
                let unit = e_ms / (2.0 * n * b);
                *want.entry((e, f)).or_default() += unit - unit * (n - j) / n;
            }
        }
        for (&(e, f), &rate) in &want {
            assert!(
                (table.expected_rate(e, f) - rate).abs() < 1e-15,
                "({e}, {f})"
            );
        }
        let entries: usize = (0..6).map(|e| table.entries(e).len()).sum();
        assert_eq!(entries, want.len());
    }

    #[test]
    fn rejects_infeasible_margins() {
        let g = diamond4();
        let trees = tree_packing(&g).unwrap();
        assert!(matches!(
            build_pi_rand(&g, &trees, &[], 2.0),
            Err(Error::Infeasible(_))
        ));
        assert!(build_pi_rand(&g, &trees, &[], 0.0).is_err());
    }

    #[test]
    fn decide_idles_on_empty_entries_and_queues() {
        let g = diamond4();
        let trees = tree_packing(&g).unwrap();
        let table = build_pi_rand(&g, &trees[..1], &[], 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut q = VirtualQueueState::new(&g).unwrap();
        // rb is on the second tree, which was left out
        q.admit(5);
        assert!((0..100).all(|_| pi_rand_decide(&table, &q, 3, &mut rng).is_none()));
        // ab wants class {r,a}, which is empty
        assert!((0..100).all(|_| pi_rand_decide(&table, &q, 1, &mut rng).is_none()));
        let hits = (0..10_000)
            .filter(|_| pi_rand_decide(&table, &q, 0, &mut rng).is_some())
            .count();
        let p = table.probability(0, set(&[0]));
        assert!((hits as f64 / 10_000.0 - p).abs() < 0.02);
    }

    #[test]
    fn csv_export() {
        let g = diamond4();
        let trees = tree_packing(&g).unwrap();
        let table = build_pi_rand(&g, &trees, &[], 0.4).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("edge,set,probability\n0,1,0.7"));
        assert_eq!(text.lines().count(), 7);
    }
}
