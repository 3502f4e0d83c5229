//! Feasible-activation families and max-weight activation for the slotted model.

use crate::error::{Error, Result};
use crate::graph::{Digraph, EdgeId};
use crate::policies::{pi_kh_best, pi_star_best, MultiClassState};
use crate::queues::VirtualQueueState;

/// Full matching enumeration is refused above this edge count.
pub const MAX_MATCHING_EDGES: usize = 20;

/// The edge subsets allowed to transmit together in one slot.
///
/// The empty activation is always a member and always comes first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivationFamily {
    m: usize,
    sets: Vec<Vec<EdgeId>>,
}

impl ActivationFamily {
    /// Validates ids against `m`, normalizes each set to ascending order and
    /// rejects duplicates. The empty set is prepended when missing.
    pub fn new(m: usize, sets: Vec<Vec<EdgeId>>) -> Result<Self> {
        let mut out: Vec<Vec<EdgeId>> = Vec::with_capacity(sets.len() + 1);
        if !sets.iter().any(Vec::is_empty) {
            out.push(Vec::new());
        }
        for mut s in sets {
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Argument(format!("activation {s:?} repeats an edge")));
            }
            if let Some(&e) = s.iter().find(|&&e| e >= m) {
                return Err(Error::Argument(format!(
                    "edge id {e} out of range for m={m}"
                )));
            }
            if out.contains(&s) {
                return Err(Error::Argument(format!("duplicate activation {s:?}")));
            }
            out.push(s);
        }
        Ok(ActivationFamily { m, sets: out })
    }

    /// `{∅, E}`: every edge transmits every slot (the wired slotted model).
    pub fn all_edges(m: usize) -> Self {
        let mut sets = vec![Vec::new()];
        if m > 0 {
            sets.push((0..m).collect());
        }
        ActivationFamily { m, sets }
    }

    /// `∅` plus every single edge: one transmission per slot.
    pub fn singletons(m: usize) -> Self {
        ActivationFamily {
            m,
            sets: std::iter::once(Vec::new())
                .chain((0..m).map(|e| vec![e]))
                .collect(),
        }
    }

    pub fn sets(&self) -> &[Vec<EdgeId>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// Parses one activation per line: space-separated edge ids, `-` for the
    /// empty set. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str, m: usize) -> Result<Self> {
        let mut sets = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "-" {
                sets.push(Vec::new());
                continue;
            }
            let set = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<EdgeId>().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("not an edge id: {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            sets.push(set);
        }
        ActivationFamily::new(m, sets)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sets {
            if s.is_empty() {
                out.push('-');
            } else {
                let ids: Vec<String> = s.iter().map(ToString::to_string).collect();
                out.push_str(&ids.join(" "));
            }
            out.push('\n');
        }
        out
    }
}

fn conflicts(g: &Digraph, e: EdgeId, f: EdgeId) -> bool {
    let (a, b) = g.edge(e);
    let (c, d) = g.edge(f);
    a == c || a == d || b == c || b == d
}

/// All matchings of `g` (edges sharing an endpoint, in either direction, conflict).
///
/// With `maximal_only` only the inclusion-maximal matchings (plus `∅`) are
/// listed and the edge-count guard is lifted.
pub fn primary_interference_family(g: &Digraph, maximal_only: bool) -> Result<ActivationFamily> {
    let m = g.edge_count();
    if !maximal_only && m > MAX_MATCHING_EDGES {
        return Err(Error::Capability(format!(
            "matching enumeration limited to {MAX_MATCHING_EDGES} edges, graph has {m}"
        )));
    }
    let mut sets = Vec::new();
    if maximal_only {
        fn walk(g: &Digraph, next: EdgeId, chosen: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
            if next == g.edge_count() {
                let maximal = (0..g.edge_count())
                    .all(|e| chosen.contains(&e) || chosen.iter().any(|&f| conflicts(g, e, f)));
                if maximal && !chosen.is_empty() {
                    out.push(chosen.clone());
                }
                return;
            }
            if chosen.iter().all(|&f| !conflicts(g, next, f)) {
                chosen.push(next);
                walk(g, next + 1, chosen, out);
                chosen.pop();
            }
            walk(g, next + 1, chosen, out);
        }
        walk(g, 0, &mut Vec::new(), &mut sets);
        sets.sort();
    } else {
        for mask in 0u32..(1 << m) {
            let edges: Vec<EdgeId> = (0..m).filter(|&e| mask & (1 << e) != 0).collect();
            let ok = edges
                .iter()
                .enumerate()
                .all(|(i, &e)| edges[i + 1..].iter().all(|&f| !conflicts(g, e, f)));
            if ok {
                sets.push(edges);
            }
        }
    }
    ActivationFamily::new(m, sets)
}

/// Edge weight for the max-weight policy: the best back-pressure among
/// non-empty classes that could cross `e`, floored at zero.
pub fn pi_star_edge_weight(state: &VirtualQueueState, g: &Digraph, e: EdgeId) -> i64 {
    pi_star_best(state, g, e).map_or(0, |(_, w)| w.max(0))
}

/// Edge weight for the multi-class heuristic: the best eligible head-of-line
/// class weight, floored at zero.
pub fn pi_kh_edge_weight(state: &MultiClassState, g: &Digraph, e: EdgeId) -> i64 {
    pi_kh_best(state, g, e).map_or(0, |(_, w)| w.max(0))
}

/// Index of the member with the largest total weight (negative weights count
/// as zero); ties go to the earliest member, so all-zero instances pick `∅`.
pub fn choose_activation_index(weights: &[i64], fam: &ActivationFamily) -> usize {
    let mut best = (0, i64::MIN);
    for (idx, set) in fam.sets.iter().enumerate() {
        let total: i64 = set.iter().map(|&e| weights[e].max(0)).sum();
        if total > best.1 {
            best = (idx, total);
        }
    }
    best.0
}

/// The maximum-weight member of `fam`; see [`choose_activation_index`].
pub fn choose_activation<'f>(weights: &[i64], fam: &'f ActivationFamily) -> &'f [EdgeId] {
    &fam.sets[choose_activation_index(weights, fam)]
}
