use num_rational::Ratio;
use serde::Serialize;

use super::AnalysisError;
use crate::graph::{Graph, StubGraph};
use crate::growth::exact_decimal;
use crate::trace::{Trace, TraceEvent};

/// One inserted vertex: the graph order `n` right after its insertion, its
/// degree, the matching number it was drawn from, and the edge density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthSample {
    pub n: usize,
    pub d_n: usize,
    pub nu_n: Option<usize>,
    pub m_n: usize,
    pub rho_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthLawReport {
    pub law: String,
    pub samples: Vec<GrowthSample>,
    /// Samples the verdict was based on.
    pub checked: usize,
    /// Smallest constant for which the law holds on the checked samples.
    pub fitted_constant: f64,
    /// The constant the verdict used.
    pub slack: f64,
    pub passed: bool,
}

pub fn edge_density(g: &Graph) -> Result<f64, AnalysisError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(AnalysisError::TooSmall(n));
    }
    Ok(g.edge_count() as f64 / (n * (n - 1) / 2) as f64)
}

/// Per-step samples of a growth trace; needs the seed summary header.
pub fn growth_samples(trace: &Trace) -> Result<Vec<GrowthSample>, AnalysisError> {
    let seed = trace.seed.ok_or(AnalysisError::MissingSeed)?;
    let mut n = seed.n;
    let mut m = seed.m as isize;
    let mut out = Vec::with_capacity(trace.events.len());
    for ev in &trace.events {
        let TraceEvent::Step(rec) = ev else {
            return Err(AnalysisError::WrongProtocol("trace contains removals".into()));
        };
        n += 1;
        m += rec.edge_delta();
        let pairs = (n * (n - 1) / 2) as f64;
        out.push(GrowthSample {
            n,
            d_n: rec.p_degree,
            nu_n: rec.nu,
            m_n: m as usize,
            rho_n: m as f64 / pairs,
        });
    }
    Ok(out)
}

fn is_max_protocol(p: Option<&str>) -> bool {
    match p {
        Some("max") => true,
        Some(s) => s
            .strip_prefix("linear:")
            .and_then(|c| c.parse::<f64>().ok())
            .is_some_and(|c| c == 1.0),
        None => false,
    }
}

/// `d(v_n) ≥ n − 2 log₂ n − slack` for every sample with `n ≥ warmup`.
pub fn check_maxdpg_law(trace: &Trace, slack: f64, warmup: usize) -> Result<GrowthLawReport, AnalysisError> {
    if !is_max_protocol(trace.protocol.as_deref()) {
        return Err(AnalysisError::WrongProtocol(format!(
            "expected a max trace, got {:?}",
            trace.protocol
        )));
    }
    let samples = growth_samples(trace)?;
    let mut fitted = f64::NEG_INFINITY;
    let mut checked = 0;
    for s in samples.iter().filter(|s| s.n >= warmup) {
        let deficit = s.n as f64 - 2.0 * (s.n as f64).log2() - s.d_n as f64;
        fitted = fitted.max(deficit);
        checked += 1;
    }
    Ok(GrowthLawReport {
        law: "d(v_n) >= n - 2 log2 n - C".into(),
        checked,
        passed: fitted <= slack,
        fitted_constant: fitted,
        slack,
        samples,
    })
}

/// `½ − a log₂ n / n ≤ ρ_n ≤ ½` for every sample with `n ≥ warmup`; the
/// fitted constant is the smallest such `a`, or infinite when some `ρ_n`
/// exceeds ½.
pub fn check_density_law(trace: &Trace, a: f64, warmup: usize) -> Result<GrowthLawReport, AnalysisError> {
    let samples = growth_samples(trace)?;
    let mut fitted = f64::NEG_INFINITY;
    let mut checked = 0;
    for s in samples.iter().filter(|s| s.n >= warmup) {
        let n = s.n as f64;
        let need = if s.rho_n > 0.5 {
            f64::INFINITY
        } else {
            (0.5 - s.rho_n) * n / n.log2()
        };
        fitted = fitted.max(need);
        checked += 1;
    }
    Ok(GrowthLawReport {
        law: "1/2 - a log2 n / n <= rho_n <= 1/2".into(),
        checked,
        passed: fitted <= a,
        fitted_constant: fitted,
        slack: a,
        samples,
    })
}

type Q = Ratio<i128>;

fn exact(x: f64, what: &str) -> Result<Q, AnalysisError> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(AnalysisError::BadParams(format!("{what} = {x} must be a non-negative number")));
    }
    let (num, den) = exact_decimal(x);
    let conv = |v: u128| i128::try_from(v).map_err(|_| AnalysisError::BadParams(format!("{what} = {x} has too many digits")));
    Ok(Q::new(conv(num)?, conv(den)?))
}

fn sorted_p_degrees(seed: &StubGraph) -> Vec<usize> {
    let mut d: Vec<usize> = seed.graph().vertices().map(|v| seed.p_degree(v)).collect();
    d.sort_unstable();
    d
}

/// Smallest `K ≥ 0` with `d(i) ≥ (2c − 1) i − K` for the seed's degrees in
/// ascending order.
pub fn minimal_linear_k(seed: &StubGraph, c: f64) -> Result<f64, AnalysisError> {
    let slope = exact(c, "c")? * 2 - 1;
    let k = sorted_p_degrees(seed)
        .iter()
        .enumerate()
        .map(|(i, &d)| slope * (i as i128 + 1) - d as i128)
        .fold(Q::from_integer(0), |a, b| a.max(b));
    Ok(*k.numer() as f64 / *k.denom() as f64)
}

/// The exact inequality `d(n) ≥ (2c − 1) n − K − 2` on
/// `n₀ < n ≤ 2c (n₀ + 1 − 3/(2c − 1)) − K`, after checking the premise
/// `d(i) ≥ (2c − 1) i − K` on the seed's degrees in ascending order.
/// An empty range passes vacuously.
pub fn check_linear_law(trace: &Trace, seed: &StubGraph, c: f64, k: f64) -> Result<GrowthLawReport, AnalysisError> {
    let cq = exact(c, "c")?;
    let kq = exact(k, "K")?;
    let half = Q::new(1, 2);
    if !(cq > half && cq <= Q::from_integer(1)) {
        return Err(AnalysisError::BadParams(format!("c = {c} must lie in (1/2, 1]")));
    }
    let slope = cq * 2 - 1;
    for (i, &d) in sorted_p_degrees(seed).iter().enumerate() {
        let i = i as i128 + 1;
        if Q::from_integer(d as i128) < slope * i - kq {
            return Err(AnalysisError::HypothesisFailed { i: i as usize, degree: d });
        }
    }
    let n0 = seed.graph().vertex_count() as i128;
    let upper = cq * 2 * (Q::from_integer(n0 + 1) - Q::from_integer(3) / slope) - kq;
    let samples = growth_samples(trace)?;
    let mut checked = 0;
    let mut passed = true;
    let mut fitted = f64::NEG_INFINITY;
    for s in &samples {
        let n = Q::from_integer(s.n as i128);
        if s.n as i128 <= n0 || n > upper {
            continue;
        }
        checked += 1;
        // K needed at this n: (2c − 1) n − 2 − d(n).
        let need = slope * n - 2 - s.d_n as i128;
        fitted = fitted.max(*need.numer() as f64 / *need.denom() as f64);
        if Q::from_integer(s.d_n as i128) < slope * n - kq - 2 {
            passed = false;
        }
    }
    Ok(GrowthLawReport {
        law: format!("d(n) >= (2c-1) n - K - 2 for n0 < n <= 2c(n0 + 1 - 3/(2c-1)) - K, c = {c}"),
        checked,
        fitted_constant: fitted,
        slack: k,
        passed,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `ln Δ` against `ln n`.
    pub exponent: f64,
    pub intercept: f64,
    pub gamma: f64,
    pub exceeds_inverse_gamma: bool,
}

/// Final order and largest p-degree of a growth trace.
pub fn final_max_degree(trace: &Trace) -> Result<ScalingPoint, AnalysisError> {
    let seed = trace.seed.ok_or(AnalysisError::MissingSeed)?;
    let mut point = ScalingPoint {
        n: seed.n,
        max_degree: seed.max_degree,
    };
    for ev in &trace.events {
        if let TraceEvent::Step(rec) = ev {
            point.n += 1;
            point.max_degree = point.max_degree.max(rec.p_degree);
        }
    }
    Ok(point)
}

/// Log-log regression of the maximum degree against the order over several
/// runs, compared with `1/γ`.
pub fn max_degree_scaling(traces: &[Trace], gamma: f64) -> Result<ScalingReport, AnalysisError> {
    let points = traces.iter().map(final_max_degree).collect::<Result<Vec<_>, _>>()?;
    regress(points, gamma)
}

pub fn regress(points: Vec<ScalingPoint>, gamma: f64) -> Result<ScalingReport, AnalysisError> {
    let mut ns: Vec<usize> = points.iter().map(|p| p.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 || points.iter().any(|p| p.max_degree == 0) {
        return Err(AnalysisError::InsufficientData(format!(
            "need at least 3 distinct orders with edges, got {}",
            ns.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.max_degree as f64).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;
    Ok(ScalingReport {
        intercept: my - exponent * mx,
        exceeds_inverse_gamma: exponent > 1.0 / gamma,
        exponent,
        gamma,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use crate::growth::{grow, Protocol, ProtocolConfig};
    use crate::matching::MatchingStrategy;

    fn run(seed: Graph, protocol: Protocol, n: usize, rng: u64) -> Trace {
        let cfg = ProtocolConfig {
            protocol,
            strategy: MatchingStrategy::MaximumThenSubset,
            seed: rng,
            target_n: n,
        };
        grow(StubGraph::new(seed), &cfg).unwrap().trace
    }

    #[test]
    fn densities() {
        assert_eq!(edge_density(&complete(7)).unwrap(), 1.0);
        let pm = Graph::from_edges(10, (0..5).map(|i| (2 * i, 2 * i + 1))).unwrap();
        assert!((edge_density(&pm).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!(matches!(edge_density(&empty(1)), Err(AnalysisError::TooSmall(1))));
    }

    #[test]
    fn samples_track_the_graph() {
        let t = run(complete(2), Protocol::Max, 80, 3);
        let s = growth_samples(&t).unwrap();
        assert_eq!(s.len(), 78);
        assert_eq!(s[0].n, 3);
        let mut sg = StubGraph::new(complete(2));
        let mut t = t;
        sg = t.replay(&sg).unwrap();
        let last = s.last().unwrap();
        assert_eq!(last.m_n, sg.graph().edge_count());
        assert_eq!(last.rho_n, edge_density(sg.graph()).unwrap());
    }

    #[test]
    fn maxdpg_guard_and_warmup() {
        let lin = run(complete(2), Protocol::Linear { c: 0.6 }, 30, 1);
        assert!(matches!(check_maxdpg_law(&lin, 10.0, 0), Err(AnalysisError::WrongProtocol(_))));
        let max = run(complete(2), Protocol::Max, 40, 1);
        let r = check_maxdpg_law(&max, 0.0, 1000).unwrap();
        assert_eq!(r.checked, 0);
        assert!(r.passed);
        let r = check_maxdpg_law(&max, 100.0, 16).unwrap();
        assert!(r.passed && r.checked == 25);
    }

    #[test]
    fn linear_premise_and_range() {
        let seed = StubGraph::new(complete(6));
        assert_eq!(minimal_linear_k(&seed, 0.75).unwrap(), 0.0);
        let t = run(complete(6), Protocol::Linear { c: 0.75 }, 20, 2);
        let r = check_linear_law(&t, &seed, 0.75, 0.0).unwrap();
        assert_eq!(r.checked, 0);
        assert!(r.passed);
        let path = StubGraph::new(path(10));
        assert_eq!(minimal_linear_k(&path, 0.9).unwrap(), 6.0);
        assert!(matches!(
            check_linear_law(&t, &path, 0.9, 5.9),
            Err(AnalysisError::HypothesisFailed { i: 10, degree: 2 })
        ));
    }

    #[test]
    fn linear_law_holds_on_a_large_seed() {
        let seed = complete(50);
        let sg = StubGraph::new(seed.clone());
        let k = minimal_linear_k(&sg, 0.9).unwrap();
        let t = run(seed, Protocol::Linear { c: 0.9 }, 100, 5);
        let r = check_linear_law(&t, &sg, 0.9, k).unwrap();
        assert!(r.checked > 10);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn regression_recovers_a_power() {
        let pts = [100usize, 1000, 10000]
            .iter()
            .map(|&n| ScalingPoint {
                n,
                max_degree: (3.0 * (n as f64).powf(0.6)).round() as usize,
            })
            .collect();
        let r = regress(pts, 2.5).unwrap();
        assert!((r.exponent - 0.6).abs() < 0.01);
        assert!(r.exceeds_inverse_gamma);
        let flat = vec![ScalingPoint { n: 10, max_degree: 4 }; 3];
        assert!(matches!(regress(flat, 2.5), Err(AnalysisError::InsufficientData(_))));
    }
}
