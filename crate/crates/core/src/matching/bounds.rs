use serde::Serialize;

use super::{maximum_matching, MatchingError};
use crate::graph::Graph;

/// Denominator used by [`generalized_vizing_bound`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneralizedVizingVariant {
    /// Divide by `q`.
    #[default]
    Literal,
    /// Divide by `q + 1`.
    DenPlusOne,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingBoundReport {
    pub vizing_bound: u64,
    pub posa_bound: u64,
    pub generalized_vizing_bound: u64,
    pub generalized_vizing_variant: GeneralizedVizingVariant,
    pub exact_nu: Option<u64>,
}

/// `ceil(m / (Δ + 1))`.
pub fn vizing_lower_bound(g: &Graph) -> Result<u64, MatchingError> {
    let m = g.edge_count() as u64;
    if m == 0 {
        return Err(MatchingError::EmptyGraph);
    }
    Ok(m.div_ceil(g.max_degree() as u64 + 1))
}

/// `floor(min_q max((n - D_{<=q} + q - 1) / 2, q))` over `0 <= q < (n-1)/2`.
pub fn posa_lower_bound(g: &Graph) -> Result<u64, MatchingError> {
    let n = g.vertex_count() as i64;
    if n < 2 {
        return Err(MatchingError::TooSmall);
    }
    let hist = g.degree_histogram();
    // Work with twice the expression to stay in integers.
    let best = (0..)
        .take_while(|&q: &i64| 2 * q < n - 1)
        .map(|q| {
            let low = hist.at_most(q as usize) as i64;
            (n - low + q - 1).max(2 * q)
        })
        .min()
        .expect("q = 0 is always in range");
    Ok(best.max(0) as u64 / 2)
}

/// `ceil(max_{1<=q<n} (m - sum_{i>=q} i * D_i) / q)`, clamped at 0.
pub fn generalized_vizing_bound(g: &Graph, variant: GeneralizedVizingVariant) -> u64 {
    let n = g.vertex_count();
    let m = g.edge_count() as i64;
    let hist = g.degree_histogram();
    let total = hist.degree_sum() as i64;
    let mut best: u64 = 0;
    // sum_{i>=q} i * D_i = total - below, with `below` summing degrees under q.
    let mut below: i64 = 0;
    for q in 1..n {
        below += (q as i64 - 1) * hist.count(q - 1) as i64;
        let num = m - (total - below);
        if num > 0 {
            let den = match variant {
                GeneralizedVizingVariant::Literal => q as i64,
                GeneralizedVizingVariant::DenPlusOne => q as i64 + 1,
            };
            best = best.max((num as u64).div_ceil(den as u64));
        }
    }
    best
}

/// All three bounds, with errored bounds reported as 0.
pub fn matching_bound_report(
    g: &Graph,
    compute_exact: bool,
    variant: GeneralizedVizingVariant,
) -> MatchingBoundReport {
    MatchingBoundReport {
        vizing_bound: vizing_lower_bound(g).unwrap_or(0),
        posa_bound: posa_lower_bound(g).unwrap_or(0),
        generalized_vizing_bound: generalized_vizing_bound(g, variant),
        generalized_vizing_variant: variant,
        exact_nu: compute_exact.then(|| maximum_matching(g).len() as u64),
    }
}
