use serde::Serialize;

use super::zeta::{zeta, HurwitzTails};
use super::AnalysisError;
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `D_{≥i} ≤ C n ζ(γ, i)`.
    DistributionBounded,
    /// `D_i ≤ C n i^-γ`.
    DensityBounded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub i: usize,
    pub observed: usize,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLawReport {
    pub gamma: f64,
    pub c: f64,
    pub bound_kind: BoundKind,
    pub n: usize,
    pub max_degree: usize,
    pub violations: Vec<Violation>,
    /// Largest width of the ζ brackets used; zero for the density check.
    pub bracket_width: f64,
    pub passed: bool,
}

fn check_params(gamma: f64, c: f64) -> Result<(), AnalysisError> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(AnalysisError::BadParams(format!("gamma = {gamma} must exceed 1")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(AnalysisError::BadParams(format!("C = {c} must be positive")));
    }
    Ok(())
}

/// Checks `D_{≥i}(g) ≤ C n ζ(γ, i)` for every `1 ≤ i ≤ Δ + 1`, comparing
/// against the lower end of the ζ bracket so that a pass is certain.
pub fn check_distribution_bounded(g: &Graph, gamma: f64, c: f64) -> Result<PowerLawReport, AnalysisError> {
    check_params(gamma, c)?;
    let hist = g.degree_histogram();
    let n = g.vertex_count();
    let delta = g.max_degree();
    let tails = HurwitzTails::new(gamma, delta + 1);
    let mut violations = Vec::new();
    let mut width: f64 = 0.0;
    let mut at_least = n - hist.count(0);
    for i in 1..=delta + 1 {
        let b = tails.tail(i);
        width = width.max(b.width());
        let bound = c * n as f64 * b.lower;
        if at_least as f64 > bound {
            violations.push(Violation { i, observed: at_least, bound });
        }
        at_least -= hist.count(i);
    }
    Ok(PowerLawReport {
        gamma,
        c,
        bound_kind: BoundKind::DistributionBounded,
        n,
        max_degree: delta,
        passed: violations.is_empty(),
        violations,
        bracket_width: width,
    })
}

/// Checks `D_i(g) ≤ C n i^-γ` for every `i ≥ 1`.
pub fn check_density_bounded(g: &Graph, gamma: f64, c: f64) -> Result<PowerLawReport, AnalysisError> {
    check_params(gamma, c)?;
    let hist = g.degree_histogram();
    let n = g.vertex_count();
    let violations: Vec<Violation> = (1..=g.max_degree())
        .filter_map(|i| {
            let observed = hist.count(i);
            let bound = c * n as f64 * (i as f64).powf(-gamma);
            (observed as f64 > bound).then_some(Violation { i, observed, bound })
        })
        .collect();
    Ok(PowerLawReport {
        gamma,
        c,
        bound_kind: BoundKind::DensityBounded,
        n,
        max_degree: g.max_degree(),
        passed: violations.is_empty(),
        violations,
        bracket_width: 0.0,
    })
}

/// `C = (1 + √c) / (ζ(γ) − 1/(γ − 1))`, the coefficient for which SF growth
/// with certainty level `c` stays distribution-bounded.
pub fn sf_theoretical_c(gamma: f64, certainty: f64) -> Result<f64, AnalysisError> {
    if !(gamma > 1.0 && gamma.is_finite()) || !(certainty > 0.0 && certainty.is_finite()) {
        return Err(AnalysisError::BadParams(format!(
            "need gamma > 1 and c > 0, got gamma = {gamma}, c = {certainty}"
        )));
    }
    let den = zeta(gamma).mid() - 1.0 / (gamma - 1.0);
    if den <= 0.0 {
        return Err(AnalysisError::BadParams(format!("ζ(γ) − 1/(γ−1) = {den} is not positive")));
    }
    Ok((1.0 + certainty.sqrt()) / den)
}

/// The constant `t = 1/(4q + 8)`, `q = (4C/(γ−2))^(1/(γ−2)) + 1`, in the
/// linear lower bound `ν(G_n) ≥ t n` for SF growth with `γ > 2`.
pub fn sf_matching_constant(gamma: f64, certainty: f64) -> Result<f64, AnalysisError> {
    if gamma <= 2.0 {
        return Err(AnalysisError::BadParams(format!("gamma = {gamma} must exceed 2")));
    }
    let c = sf_theoretical_c(gamma, certainty)?;
    let q = (4.0 * c / (gamma - 2.0)).powf(1.0 / (gamma - 2.0)) + 1.0;
    Ok(1.0 / (4.0 * q + 8.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;

    #[test]
    fn perfect_matching_passes() {
        let g = Graph::from_edges(20, (0..10).map(|i| (2 * i, 2 * i + 1))).unwrap();
        let c = 1.1 / zeta(2.5).mid();
        let r = check_distribution_bounded(&g, 2.5, c).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn star_hub_violates_the_tail() {
        let r = check_distribution_bounded(&star(99), 3.0, 1.0).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violations.last().unwrap().i, 99);
        assert!(r.violations.iter().all(|v| v.i > 1));
    }

    #[test]
    fn isolated_vertices_pass_trivially() {
        let r = check_distribution_bounded(&empty(7), 2.0, 0.01).unwrap();
        assert!(r.passed);
        assert!(check_density_bounded(&empty(7), 2.0, 0.01).unwrap().passed);
    }

    #[test]
    fn larger_c_never_hurts() {
        let g = star(30);
        let mut passed = false;
        for k in 1..40 {
            let now = check_distribution_bounded(&g, 2.0, k as f64 * 0.25).unwrap().passed;
            assert!(now || !passed);
            passed = now;
        }
        assert!(passed);
    }

    #[test]
    fn theoretical_c() {
        let c = sf_theoretical_c(2.0, 0.25).unwrap();
        assert!(c <= 3.0);
        let apery = 1.202_056_903_159_594_3;
        let want = 2.0 / (apery - 0.5);
        assert!((sf_theoretical_c(3.0, 1.0).unwrap() - want).abs() < 1e-9);
        let near_zero = sf_theoretical_c(2.5, 1e-12).unwrap();
        assert!((near_zero - 1.0 / (zeta(2.5).mid() - 1.0 / 1.5)).abs() < 1e-5);
        assert!(sf_theoretical_c(1.0, 1.0).is_err());
        assert!(sf_matching_constant(2.5, 1.0).unwrap() > 0.0);
    }
}
