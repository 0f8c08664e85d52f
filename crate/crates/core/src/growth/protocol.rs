use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use super::step::{apply_step, choose_lifts, lifts_from_maximum, DpStepRecord, LiftPool, OpKind};
use super::GrowthError;
use crate::graph::{ExtEdge, StubGraph};
use crate::matching::{IncrementalMatching, MatchingStrategy};
use crate::rng::{rng_from_seed, DpgRng};
use crate::trace::{SeedSummary, Trace, TraceDirection, TraceEvent};

/// Steps between full recomputations of the maintained maximum matching.
const RECOMPUTE_EVERY: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Protocol {
    /// Even degree `2 * ceil(c * nu)`, `0 < c <= 1`.
    Linear { c: f64 },
    /// `Linear` with `c = 1`.
    Max,
    /// Degree drawn from `i^-gamma` on `[1, 2 * nu]`. `certainty_c` only
    /// feeds the analysis of the result.
    ScaleFree { gamma: f64, certainty_c: f64 },
    /// Constant degree `c`.
    Regular { c: usize },
}

impl Protocol {
    pub fn validate(&self) -> Result<(), GrowthError> {
        let bad = |m: String| Err(GrowthError::BadProtocol(m));
        match *self {
            Protocol::Linear { c } if !(c > 0.0 && c <= 1.0) => bad(format!("linear c={c} not in (0,1]")),
            Protocol::ScaleFree { gamma, .. } if !(gamma > 1.0 && gamma.is_finite()) => {
                bad(format!("gamma={gamma} must exceed 1"))
            }
            Protocol::ScaleFree { certainty_c, .. } if !(certainty_c > 0.0) => {
                bad(format!("certainty c={certainty_c} must be positive"))
            }
            Protocol::Regular { c } if c < 2 => bad(format!("regular degree {c} below 2")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Linear { c } => write!(f, "linear:{c}"),
            Protocol::Max => write!(f, "max"),
            Protocol::ScaleFree { gamma, certainty_c } => write!(f, "sf:{gamma}:{certainty_c}"),
            Protocol::Regular { c } => write!(f, "regular:{c}"),
        }
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number {t:?} in {s:?}: {e}"));
        let p = match (name, args.as_slice()) {
            ("max", []) => Protocol::Max,
            ("linear", [c]) => Protocol::Linear { c: num(c)? },
            ("sf", [g]) => Protocol::ScaleFree {
                gamma: num(g)?,
                certainty_c: 1.0,
            },
            ("sf", [g, c]) => Protocol::ScaleFree {
                gamma: num(g)?,
                certainty_c: num(c)?,
            },
            ("regular", [c]) => Protocol::Regular {
                c: c.parse().map_err(|e| format!("bad degree {c:?}: {e}"))?,
            },
            _ => {
                return Err(format!(
                    "unknown protocol {s:?} (expected max, linear:c, sf:gamma[:c] or regular:c)"
                ))
            }
        };
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub protocol: Protocol,
    pub strategy: MatchingStrategy,
    pub seed: u64,
    pub target_n: usize,
}

/// `(numerator, denominator)` of the decimal that prints as `c`.
pub(crate) fn exact_decimal(c: f64) -> (u128, u128) {
    let text = format!("{c}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    let den = 10u128.pow(frac.len() as u32);
    let num = format!("{int}{frac}").parse::<u128>().expect("non-negative decimal");
    (num, den)
}

/// `2 * ceil(c * nu)`, with `c` taken as the exact decimal it prints as.
pub fn next_degree_linear(nu: usize, c: f64) -> usize {
    let (num, den) = exact_decimal(c);
    2 * (num * nu as u128).div_ceil(den) as usize
}

/// Sampler for the truncated power law `P(i) ∝ i^-gamma` on `[1, 2 * nu]`
/// that keeps its prefix sums between calls.
#[derive(Clone, Debug)]
pub struct PowerLawSampler {
    gamma: f64,
    prefix: Vec<f64>,
}

impl PowerLawSampler {
    pub fn new(gamma: f64) -> Self {
        PowerLawSampler {
            gamma,
            prefix: Vec::new(),
        }
    }

    fn extend_to(&mut self, len: usize) {
        while self.prefix.len() < len {
            let j = self.prefix.len() + 1;
            let last = self.prefix.last().copied().unwrap_or(0.0);
            self.prefix.push(last + (j as f64).powf(-self.gamma));
        }
    }

    /// Probability mass of `i` on `[1, 2 * nu]`.
    pub fn probability(&mut self, nu: usize, i: usize) -> f64 {
        self.extend_to(2 * nu);
        (i as f64).powf(-self.gamma) / self.prefix[2 * nu - 1]
    }

    /// `P(X <= i)` on `[1, 2 * nu]`.
    pub fn cdf(&mut self, nu: usize, i: usize) -> f64 {
        self.extend_to(2 * nu);
        self.prefix[i.min(2 * nu) - 1] / self.prefix[2 * nu - 1]
    }

    /// One draw; consumes exactly one `f64` from `rng`.
    pub fn sample<R: Rng + ?Sized>(&mut self, nu: usize, rng: &mut R) -> usize {
        assert!(nu >= 1, "power-law degree needs nu >= 1");
        let len = 2 * nu;
        self.extend_to(len);
        let sums = &self.prefix[..len];
        let u = rng.gen::<f64>() * sums[len - 1];
        sums.partition_point(|&s| s <= u).min(len - 1) + 1
    }
}

/// Degree `i` in `[1, 2 * nu]` with probability `i^-gamma / sum_j j^-gamma`.
pub fn next_degree_scale_free<R: Rng + ?Sized>(nu: usize, gamma: f64, rng: &mut R) -> usize {
    PowerLawSampler::new(gamma).sample(nu, rng)
}

/// Runs a growth protocol one DP-step at a time while keeping a maximum
/// matching of the current graph.
pub struct Grower {
    sg: StubGraph,
    matching: IncrementalMatching,
    rng: DpgRng,
    protocol: Protocol,
    strategy: MatchingStrategy,
    sampler: PowerLawSampler,
    since_recompute: usize,
}

impl Grower {
    pub fn new(seed: StubGraph, protocol: Protocol, strategy: MatchingStrategy, rng_seed: u64) -> Result<Self, GrowthError> {
        protocol.validate()?;
        if seed.graph().edge_count() == 0 {
            return Err(GrowthError::SeedTooSmall);
        }
        let matching = IncrementalMatching::new(seed.graph());
        let gamma = match protocol {
            Protocol::ScaleFree { gamma, .. } => gamma,
            _ => 2.0,
        };
        Ok(Grower {
            sg: seed,
            matching,
            rng: rng_from_seed(rng_seed),
            protocol,
            strategy,
            sampler: PowerLawSampler::new(gamma),
            since_recompute: 0,
        })
    }

    pub fn state(&self) -> &StubGraph {
        &self.sg
    }

    pub fn into_state(self) -> StubGraph {
        self.sg
    }

    /// Matching number of the current graph.
    pub fn nu(&self) -> usize {
        self.matching.nu()
    }

    /// Draws the p-degree and `r` for the next step.
    fn plan(&mut self) -> (usize, Option<usize>) {
        let nu = self.matching.nu();
        let p = match self.protocol {
            Protocol::Max => next_degree_linear(nu, 1.0),
            Protocol::Linear { c } => next_degree_linear(nu, c),
            Protocol::ScaleFree { .. } => self.sampler.sample(nu, &mut self.rng),
            Protocol::Regular { c } => c,
        };
        let r = (p % 2 == 1 && self.sg.deficient().is_none())
            .then(|| self.rng.gen_range(0..=p + 1));
        (p, r)
    }

    pub fn step(&mut self) -> Result<DpStepRecord, GrowthError> {
        let nu = self.matching.nu();
        let (p, r) = self.plan();
        let op = match (p % 2, self.sg.deficient(), r) {
            (0, _, _) => OpKind::Op1,
            (_, Some(_), _) => OpKind::Op2,
            (_, None, Some(0)) => OpKind::Op3a,
            _ => OpKind::Op3b,
        };
        let pool = LiftPool::for_op(op, p);
        let lifts = match self.strategy {
            MatchingStrategy::MaximumThenSubset => lifts_from_maximum(
                &self.matching.edges(),
                self.sg.deficient(),
                pool,
                &mut self.rng,
            )?,
            s => choose_lifts(&self.sg, pool, s, &mut self.rng)?,
        };
        let mut rec = apply_step(&mut self.sg, p, &lifts, r, None)?;
        rec.nu = Some(nu);
        self.since_recompute += 1;
        if self.since_recompute >= RECOMPUTE_EVERY {
            self.since_recompute = 0;
            self.matching.recompute(self.sg.graph());
        } else {
            for e in &rec.lifted {
                if let ExtEdge::Real(e) = e {
                    self.matching.edge_removed(e.u(), e.v());
                }
            }
            // Adding one vertex raises the matching number by at most one.
            self.matching.repair(self.sg.graph(), Some(nu + 1));
        }
        Ok(rec)
    }
}

/// A finished growth run.
#[derive(Clone, Debug)]
pub struct GrowthRun {
    pub graph: StubGraph,
    pub trace: Trace,
}

/// Grows `seed` until it has `config.target_n` vertices.
pub fn grow(seed: StubGraph, config: &ProtocolConfig) -> Result<GrowthRun, GrowthError> {
    grow_with(seed, config, |_, _| {})
}

/// [`grow`], calling `observe` after every step.
pub fn grow_with<F>(seed: StubGraph, config: &ProtocolConfig, mut observe: F) -> Result<GrowthRun, GrowthError>
where
    F: FnMut(&StubGraph, &DpStepRecord),
{
    let mut trace = Trace::new(TraceDirection::Grow);
    trace.protocol = Some(config.protocol.to_string());
    trace.strategy = Some(config.strategy.to_string());
    trace.rng_seed = Some(config.seed);
    trace.seed = Some(SeedSummary::of(&seed));
    let mut grower = Grower::new(seed, config.protocol, config.strategy, config.seed)?;
    while grower.state().graph().vertex_count() < config.target_n {
        let rec = grower.step()?;
        observe(grower.state(), &rec);
        trace.events.push(TraceEvent::Step(rec));
    }
    Ok(GrowthRun {
        graph: grower.into_state(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use crate::matching::maximum_matching;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_degrees() {
        assert_eq!(next_degree_linear(10, 1.0), 20);
        assert_eq!(next_degree_linear(10, 0.75), 16);
        assert_eq!(next_degree_linear(1, 0.1), 2);
        // 0.6 * 5 is 3 exactly, not the float 3.0000000000000004.
        assert_eq!(next_degree_linear(5, 0.6), 6);
        assert_eq!(next_degree_linear(7, 0.9), 14);
    }

    #[test]
    fn power_law_small_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gamma = 2.5;
        let p1 = 1.0 / (1.0 + 2f64.powf(-gamma));
        let draws = 1_000_000;
        let ones = (0..draws)
            .filter(|_| next_degree_scale_free(1, gamma, &mut rng) == 1)
            .count() as f64;
        let sigma = (draws as f64 * p1 * (1.0 - p1)).sqrt();
        assert!((ones - draws as f64 * p1).abs() < 4.0 * sigma);
        assert!((0..10_000).all(|_| next_degree_scale_free(5, 50.0, &mut rng) == 1));
    }

    #[test]
    fn cached_sampler_matches_fresh_one() {
        let mut a = ChaCha8Rng::seed_from_u64(8);
        let mut b = a.clone();
        let mut cached = PowerLawSampler::new(2.2);
        for nu in [3, 50, 7, 120, 1] {
            assert_eq!(cached.sample(nu, &mut a), next_degree_scale_free(nu, 2.2, &mut b));
        }
    }

    #[test]
    fn protocol_names_round_trip() {
        for s in ["max", "linear:0.6", "sf:2.5:1", "regular:4"] {
            assert_eq!(s.parse::<Protocol>().unwrap().to_string(), s);
        }
        assert!("linear:1.5".parse::<Protocol>().is_err());
        assert!("sf:1".parse::<Protocol>().is_err());
        assert!("regular:1".parse::<Protocol>().is_err());
    }

    #[test]
    fn maintained_matching_stays_maximum() {
        for protocol in [Protocol::Max, Protocol::ScaleFree { gamma: 2.5, certainty_c: 1.0 }] {
            let mut g = Grower::new(
                StubGraph::new(complete(4)),
                protocol,
                MatchingStrategy::MaximumThenSubset,
                5,
            )
            .unwrap();
            for _ in 0..150 {
                g.step().unwrap();
                assert_eq!(g.nu(), maximum_matching(g.state().graph()).len());
            }
        }
    }

    #[test]
    fn regular_growth_keeps_degrees() {
        let config = ProtocolConfig {
            protocol: Protocol::Regular { c: 4 },
            strategy: MatchingStrategy::MaximumThenSubset,
            seed: 1,
            target_n: 60,
        };
        grow_with(StubGraph::new(complete(5)), &config, |sg, _| {
            assert!(sg.graph().is_regular(4));
        })
        .unwrap();
    }

    #[test]
    fn empty_seed_is_rejected() {
        let config = ProtocolConfig {
            protocol: Protocol::Max,
            strategy: MatchingStrategy::MaximumThenSubset,
            seed: 1,
            target_n: 10,
        };
        assert!(matches!(
            grow(StubGraph::new(empty(3)), &config),
            Err(GrowthError::SeedTooSmall)
        ));
    }
}
