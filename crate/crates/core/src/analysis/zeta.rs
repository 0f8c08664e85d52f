//! Certified brackets for ζ(γ) and the tails ζ(γ, i) = Σ_{j≥i} j^-γ.

/// Terms summed explicitly before the integral tail takes over.
pub const PARTIAL_TERMS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn mid(self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(self) -> f64 {
        self.upper - self.lower
    }
}

/// The integral bounds `i^(1-γ)/(γ-1) < ζ(γ, i) < (i-1)^(1-γ)/(γ-1)`, for `i ≥ 2`.
pub fn integral_bracket(gamma: f64, i: usize) -> Bracket {
    assert!(gamma > 1.0 && i >= 2);
    let s = gamma - 1.0;
    Bracket {
        lower: (i as f64).powf(-s) / s,
        upper: ((i - 1) as f64).powf(-s) / s,
    }
}

/// Tails ζ(γ, i) for `1 ≤ i ≤ max_i`: exact partial sums up to a cutoff,
/// summed from the small end, plus the integral bracket beyond it. The
/// bracket is widened by the worst-case rounding of the summation.
#[derive(Clone, Debug)]
pub struct HurwitzTails {
    gamma: f64,
    cutoff: usize,
    /// `partial[i - 1] = Σ_{j=i}^{cutoff} j^-γ`.
    partial: Vec<f64>,
    tail: Bracket,
}

impl HurwitzTails {
    pub fn new(gamma: f64, max_i: usize) -> Self {
        assert!(gamma > 1.0, "gamma must exceed 1");
        let max_i = max_i.max(1);
        let cutoff = PARTIAL_TERMS.max(max_i);
        let mut beyond = 0.0;
        for j in (max_i + 1..=cutoff).rev() {
            beyond += (j as f64).powf(-gamma);
        }
        let mut partial = vec![0.0; max_i];
        let mut acc = beyond;
        for i in (1..=max_i).rev() {
            acc += (i as f64).powf(-gamma);
            partial[i - 1] = acc;
        }
        HurwitzTails {
            gamma,
            cutoff,
            partial,
            tail: integral_bracket(gamma, cutoff + 1),
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn max_i(&self) -> usize {
        self.partial.len()
    }

    /// Bracket for ζ(γ, i).
    pub fn tail(&self, i: usize) -> Bracket {
        assert!(i >= 1, "tails start at 1");
        let (sum, terms) = if i <= self.partial.len() {
            (self.partial[i - 1], self.cutoff - i + 1)
        } else if i <= self.cutoff {
            let s: f64 = (i..=self.cutoff).rev().map(|j| (j as f64).powf(-self.gamma)).sum();
            (s, self.cutoff - i + 1)
        } else {
            return integral_bracket(self.gamma, i);
        };
        let rounding = sum * (terms as f64 + 2.0) * f64::EPSILON;
        Bracket {
            lower: sum - rounding + self.tail.lower,
            upper: sum + rounding + self.tail.upper,
        }
    }
}

/// Bracket for the Riemann zeta function at `gamma > 1`.
pub fn zeta(gamma: f64) -> Bracket {
    HurwitzTails::new(gamma, 1).tail(1)
}
