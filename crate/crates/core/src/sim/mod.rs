//! Mini-slot and slotted simulation of broadcast policies.

mod engine;
mod random_graph;
mod sweep;

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::graph::{broadcast_capacity, Digraph, EdgeId, MAX_ENUMERATION_NODES, MAX_SET_NODES};
use crate::wireless::{choose_activation, ActivationFamily};

pub use engine::default_eps;
pub use random_graph::random_digraph;
pub use sweep::{sweep_k, write_sweep_csv};

/// Independent RNG streams derived from one seed, one per source of randomness.
pub mod stream {
    pub const ARRIVALS: u64 = 0;
    pub const EDGES: u64 = 1;
    pub const CLASSES: u64 = 2;
    pub const POLICY: u64 = 3;
    pub const SEQUENCES: u64 = 4;
    pub const GRAPH: u64 = 5;
}

/// Generator for one stream of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeModel {
    /// One uniformly random edge is active per mini-slot, `m` mini-slots per slot.
    MiniSlot,
    /// A max-weight member of an activation family transmits each slot.
    Slotted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolicyKind {
    PiStar,
    PiKh {
        k: usize,
    },
    StaticTree,
    /// `eps` defaults to [`default_eps`], `extra` to `4m` sampled sequences.
    PiRand {
        eps: Option<f64>,
        extra: Option<usize>,
    },
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::PiStar => "pi_star",
            PolicyKind::PiKh { .. } => "pi_kh",
            PolicyKind::StaticTree => "static_tree",
            PolicyKind::PiRand { .. } => "pi_rand",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Mean arrivals per slot.
    pub lambda: f64,
    /// Run length in slots.
    pub horizon: u64,
    pub seed: u64,
    pub time_model: TimeModel,
    pub policy: PolicyKind,
    /// Slots between samples; slot 0 and the horizon are always sampled.
    pub sample_every: u64,
}

impl SimConfig {
    /// Mini-slot run sampled 100 times over the horizon.
    pub fn new(lambda: f64, horizon: u64, seed: u64, policy: PolicyKind) -> Self {
        SimConfig {
            lambda,
            horizon,
            seed,
            time_model: TimeModel::MiniSlot,
            policy,
            sample_every: (horizon / 100).max(1),
        }
    }

    /// Every problem with running this configuration on `g`, in a fixed order.
    pub fn problems(&self, g: &Digraph, fam: Option<&ActivationFamily>) -> Vec<Error> {
        let mut out = Vec::new();
        let arg = |s: String| Error::Argument(s);
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            out.push(arg(format!(
                "lambda must be a finite non-negative number, got {}",
                self.lambda
            )));
        }
        if self.horizon == 0 {
            out.push(arg("horizon must be at least 1 slot".into()));
        }
        if self.sample_every == 0 {
            out.push(arg("sample_every must be at least 1 slot".into()));
        }
        if g.edge_count() == 0 {
            out.push(arg("graph has no edges".into()));
        }
        let n = g.node_count();
        if n > MAX_SET_NODES {
            out.push(Error::Capability(format!(
                "simulation supports at most {MAX_SET_NODES} nodes, graph has {n}"
            )));
        }
        match self.policy {
            PolicyKind::PiStar if n > MAX_ENUMERATION_NODES => out.push(Error::Capability(
                format!("pi_star supports at most {MAX_ENUMERATION_NODES} nodes, graph has {n}"),
            )),
            PolicyKind::PiKh { k: 0 } => out.push(arg("pi_kh needs k >= 1".into())),
            PolicyKind::StaticTree | PolicyKind::PiRand { .. } if broadcast_capacity(g) == 0 => out
                .push(arg(format!(
                    "{} needs broadcast capacity >= 1",
                    self.policy.name()
                ))),
            PolicyKind::PiRand { eps: Some(eps), .. } => {
                let cap = broadcast_capacity(g) as f64;
                if !(eps > 0.0 && eps.is_finite()) {
                    out.push(arg(format!("pi_rand eps must be positive, got {eps}")));
                } else if self.lambda < cap && eps > cap - self.lambda + 1e-12 {
                    out.push(arg(format!(
                        "pi_rand eps {eps} exceeds capacity gap {}",
                        cap - self.lambda
                    )));
                }
            }
            _ => {}
        }
        match (self.time_model, fam) {
            (TimeModel::Slotted, None) => {
                out.push(arg("slotted runs need an activation family".into()))
            }
            (TimeModel::Slotted, Some(f)) => {
                if f.edge_count() != g.edge_count() {
                    out.push(arg(format!(
                        "activation family is for {} edges, graph has {}",
                        f.edge_count(),
                        g.edge_count()
                    )));
                }
                if matches!(self.policy, PolicyKind::PiRand { .. }) {
                    out.push(Error::Capability(
                        "pi_rand is defined for the mini-slot model only".into(),
                    ));
                }
            }
            (TimeModel::MiniSlot, Some(_)) => {
                out.push(arg("activation families apply to slotted runs only".into()))
            }
            (TimeModel::MiniSlot, None) => {}
        }
        out
    }

    pub fn validate(&self, g: &Digraph, fam: Option<&ActivationFamily>) -> Result<()> {
        match self.problems(g, fam).into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Cumulative counters at the end of a slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub slot: u64,
    pub admitted: u64,
    /// Packets held by every node.
    pub delivered: u64,
    pub min_received: u64,
    /// Distinct packets held by each node.
    pub received: Vec<u64>,
    /// Packets not yet held by every node.
    pub backlog: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub samples: Vec<Sample>,
    /// Broadcast rate with the default burn-in (first 10% of the horizon).
    pub rate: f64,
}

impl RunResult {
    pub fn horizon(&self) -> u64 {
        self.samples.last().map_or(0, |s| s.slot)
    }

    pub fn last(&self) -> &Sample {
        self.samples
            .last()
            .expect("runs record at least the initial sample")
    }

    /// Writes `slot,admitted,delivered,min_received,backlog` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "slot,admitted,delivered,min_received,backlog")?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.slot, s.admitted, s.delivered, s.min_received, s.backlog
            )?;
        }
        Ok(())
    }

    /// Writes `slot,node0,node1,...` rows of per-node received counts.
    pub fn write_nodes_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.samples.first().map_or(0, |s| s.received.len());
        let header: Vec<String> = (0..n).map(|i| format!("node{i}")).collect();
        writeln!(out, "slot,{}", header.join(","))?;
        for s in &self.samples {
            let row: Vec<String> = s.received.iter().map(ToString::to_string).collect();
            writeln!(out, "{},{}", s.slot, row.join(","))?;
        }
        Ok(())
    }
}

/// Rate at which the slowest node gains packets after `burn_in`:
/// `(min_i R_i(T) - min_i R_i(burn_in)) / (T - burn_in)`, using the latest
/// sample at or before `burn_in` as the starting point.
pub fn broadcast_rate(result: &RunResult, burn_in: u64) -> Result<f64> {
    let end = result
        .samples
        .last()
        .ok_or_else(|| Error::Argument("run has no samples".into()))?;
    if burn_in >= end.slot {
        return Err(Error::Argument(format!(
            "burn-in {burn_in} must be below the horizon {}",
            end.slot
        )));
    }
    let start = result
        .samples
        .iter()
        .rev()
        .find(|s| s.slot <= burn_in)
        .expect("slot 0 is always sampled");
    Ok((end.min_received - start.min_received) as f64 / (end.slot - start.slot) as f64)
}

/// Default burn-in: the first 10% of the horizon.
pub fn default_burn_in(horizon: u64) -> u64 {
    horizon / 10
}

/// What a slotted run saw and did in one slot, for external checking.
#[derive(Debug)]
pub struct SlotTrace<'a> {
    pub slot: u64,
    /// Per-edge activation weights at the decision point (slotted runs only).
    pub weights: &'a [i64],
    pub family: Option<&'a ActivationFamily>,
    pub activation: &'a [EdgeId],
    pub sample: &'a Sample,
}

/// Runs `config` on `g`. `fam` is required for, and only for, slotted runs.
pub fn run(config: &SimConfig, g: &Digraph, fam: Option<&ActivationFamily>) -> Result<RunResult> {
    run_inner(config, g, fam, None)
}

/// Like [`run`], calling `observer` at the end of every slot.
pub fn run_observed(
    config: &SimConfig,
    g: &Digraph,
    fam: Option<&ActivationFamily>,
    observer: &mut dyn FnMut(&SlotTrace<'_>),
) -> Result<RunResult> {
    run_inner(config, g, fam, Some(observer))
}

fn run_inner(
    config: &SimConfig,
    g: &Digraph,
    fam: Option<&ActivationFamily>,
    mut observer: Option<&mut dyn FnMut(&SlotTrace<'_>)>,
) -> Result<RunResult> {
    config.validate(g, fam)?;
    let m = g.edge_count();
    let mut arrivals = stream_rng(config.seed, stream::ARRIVALS);
    let mut edges = stream_rng(config.seed, stream::EDGES);
    let mut classes = stream_rng(config.seed, stream::CLASSES);
    let mut policy = stream_rng(config.seed, stream::POLICY);
    let mut sequences = stream_rng(config.seed, stream::SEQUENCES);
    let mut sched = engine::build(config, g, &mut sequences)?;

    let per_draw = match config.time_model {
        TimeModel::MiniSlot => config.lambda / m as f64,
        TimeModel::Slotted => config.lambda,
    };
    let poisson = if per_draw > 0.0 {
        Some(Poisson::new(per_draw).map_err(|e| Error::Argument(format!("arrival rate: {e}")))?)
    } else {
        None
    };
    let draw = |rng: &mut ChaCha8Rng| poisson.as_ref().map_or(0, |p| p.sample(rng) as u64);

    let mut samples = vec![sched.sample(0)];
    let mut weights = vec![0i64; m];
    for slot in 1..=config.horizon {
        let mut activation: &[EdgeId] = &[];
        match config.time_model {
            TimeModel::MiniSlot => {
                for _ in 0..m {
                    sched.admit(draw(&mut arrivals), &mut classes);
                    let e = edges.random_range(0..m);
                    sched.serve(e, &mut policy)?;
                }
            }
            TimeModel::Slotted => {
                let fam = fam.expect("validated");
                sched.admit(draw(&mut arrivals), &mut classes);
                for (e, w) in weights.iter_mut().enumerate() {
                    *w = sched.edge_weight(e);
                }
                activation = choose_activation(&weights, fam);
                for &e in activation {
                    sched.serve(e, &mut policy)?;
                }
            }
        }
        let due = slot % config.sample_every == 0 || slot == config.horizon;
        if let Some(obs) = observer.as_deref_mut() {
            let sample = sched.sample(slot);
            obs(&SlotTrace {
                slot,
                weights: &weights,
                family: fam,
                activation,
                sample: &sample,
            });
            if due {
                samples.push(sample);
            }
        } else if due {
            samples.push(sched.sample(slot));
        }
    }

    let mut result = RunResult { samples, rate: 0.0 };
    result.rate = broadcast_rate(&result, default_burn_in(config.horizon))?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{diamond4, path};

    fn conserved(r: &RunResult) {
        let mut prev: Option<&Sample> = None;
        for s in &r.samples {
            assert_eq!(s.admitted, s.delivered + s.backlog, "slot {}", s.slot);
            assert!(s
                .received
                .iter()
                .all(|&x| x <= s.admitted && x >= s.delivered));
            assert_eq!(s.min_received, *s.received.iter().min().unwrap());
            if let Some(p) = prev {
                assert!(s.slot > p.slot);
                assert!(s.admitted >= p.admitted && s.delivered >= p.delivered);
                assert!(s.received.iter().zip(&p.received).all(|(a, b)| a >= b));
            }
            prev = Some(s);
        }
    }

    #[test]
    fn zero_arrivals_stay_empty() {
        let g = diamond4();
        for policy in [
            PolicyKind::PiStar,
            PolicyKind::PiKh { k: 3 },
            PolicyKind::StaticTree,
            PolicyKind::PiRand {
                eps: None,
                extra: None,
            },
        ] {
            let r = run(&SimConfig::new(0.0, 500, 1, policy), &g, None).unwrap();
            assert!(r.samples.iter().all(|s| s.delivered == 0 && s.backlog == 0));
            assert_eq!(r.rate, 0.0);
        }
    }

    #[test]
    fn runs_are_deterministic_and_conserve() {
        let g = diamond4();
        for policy in [
            PolicyKind::PiStar,
            PolicyKind::PiKh { k: 4 },
            PolicyKind::StaticTree,
            PolicyKind::PiRand {
                eps: Some(0.1),
                extra: Some(8),
            },
        ] {
            let cfg = SimConfig {
                sample_every: 7,
                ..SimConfig::new(1.8, 2_000, 42, policy)
            };
            let a = run(&cfg, &g, None).unwrap();
            let b = run(&cfg, &g, None).unwrap();
            assert_eq!(a, b);
            conserved(&a);
            assert_eq!(a.samples[0].slot, 0);
            assert_eq!(a.horizon(), 2_000);
            let c = run(&SimConfig { seed: 43, ..cfg }, &g, None).unwrap();
            assert_ne!(a.samples, c.samples);
        }
    }

    #[test]
    fn slotted_runs_conserve() {
        let g = diamond4();
        let fam = crate::wireless::primary_interference_family(&g, false).unwrap();
        for policy in [
            PolicyKind::PiStar,
            PolicyKind::PiKh { k: 2 },
            PolicyKind::StaticTree,
        ] {
            let cfg = SimConfig {
                time_model: TimeModel::Slotted,
                sample_every: 1,
                ..SimConfig::new(0.5, 1_000, 3, policy)
            };
            let r = run(&cfg, &g, Some(&fam)).unwrap();
            conserved(&r);
            assert!(r.last().delivered > 0);
        }
    }

    #[test]
    fn configuration_errors() {
        let g = diamond4();
        let ok = SimConfig::new(1.0, 10, 1, PolicyKind::PiStar);
        assert!(ok.validate(&g, None).is_ok());
        let slotted = SimConfig {
            time_model: TimeModel::Slotted,
            ..ok.clone()
        };
        assert!(run(&slotted, &g, None).is_err());
        let fam = ActivationFamily::all_edges(6);
        assert!(run(&ok, &g, Some(&fam)).is_err());
        let rand = SimConfig {
            policy: PolicyKind::PiRand {
                eps: None,
                extra: None,
            },
            ..slotted
        };
        assert!(matches!(
            run(&rand, &g, Some(&fam)),
            Err(Error::Capability(_))
        ));
        let bad = SimConfig {
            lambda: -1.0,
            horizon: 0,
            sample_every: 0,
            ..ok.clone()
        };
        assert_eq!(bad.problems(&g, None).len(), 3);
        let big = path(30);
        assert!(matches!(run(&ok, &big, None), Err(Error::Capability(_))));
        assert!(run(
            &SimConfig {
                policy: PolicyKind::PiKh { k: 0 },
                ..ok.clone()
            },
            &g,
            None
        )
        .is_err());
        let eps = SimConfig {
            policy: PolicyKind::PiRand {
                eps: Some(0.5),
                extra: None,
            },
            lambda: 1.9,
            ..ok
        };
        assert!(run(&eps, &g, None).is_err());
    }

    #[test]
    fn rate_estimator() {
        let mk = |pts: &[(u64, u64)]| RunResult {
            samples: pts
                .iter()
                .map(|&(slot, r)| Sample {
                    slot,
                    admitted: r,
                    delivered: r,
                    min_received: r,
                    received: vec![r, r],
                    backlog: 0,
                })
                .collect(),
            rate: 0.0,
        };
        let r = mk(&[(0, 0), (10, 5), (20, 25), (30, 45)]);
        assert_eq!(broadcast_rate(&r, 10).unwrap(), 2.0);
        // latest sample at or before the burn-in is the start point
        assert_eq!(broadcast_rate(&r, 15).unwrap(), 2.0);
        assert_eq!(broadcast_rate(&r, 0).unwrap(), 1.5);
        assert!(broadcast_rate(&r, 30).is_err());
    }

    #[test]
    fn rate_bounded_by_admissions() {
        let g = diamond4();
        let r = run(&SimConfig::new(1.5, 3_000, 9, PolicyKind::PiStar), &g, None).unwrap();
        let last = r.last();
        assert!(r.rate * (last.slot - default_burn_in(3_000)) as f64 <= last.admitted as f64);
        assert!((r.rate - 1.5).abs() < 0.15, "{}", r.rate);
    }

    #[test]
    fn csv_layouts() {
        let g = path(3);
        let cfg = SimConfig {
            sample_every: 5,
            ..SimConfig::new(0.5, 10, 1, PolicyKind::PiStar)
        };
        let r = run(&cfg, &g, None).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("slot,admitted,delivered,min_received,backlog\n0,0,0,0,0\n"));
        assert_eq!(text.lines().count(), 4);
        let mut buf = Vec::new();
        r.write_nodes_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("slot,node0,node1,node2\n0,0,0,0\n"));
    }
}
