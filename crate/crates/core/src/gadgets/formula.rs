use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::GadgetError;

/// A CNF formula over variables `1..=num_vars`; literal `-v` is the negation
/// of `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Formula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, GadgetError> {
        let f = Formula { num_vars, clauses };
        f.validate()?;
        Ok(f)
    }

    /// Literals in range, no variable twice in a clause, no empty clause.
    pub fn validate(&self) -> Result<(), GadgetError> {
        for (ci, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(GadgetError::BadFormula(format!("clause {} is empty", ci + 1)));
            }
            for (j, &l) in c.iter().enumerate() {
                if l == 0 || l.unsigned_abs() as usize > self.num_vars {
                    return Err(GadgetError::BadFormula(format!("literal {l} out of range")));
                }
                if c[..j].iter().any(|&m| m.abs() == l.abs()) {
                    return Err(GadgetError::BadFormula(format!(
                        "variable {} twice in clause {}",
                        l.abs(),
                        ci + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// At most 3 literals per clause and at most 3 occurrences per variable.
    pub fn is_three_sat_three(&self) -> bool {
        if self.validate().is_err() || self.clauses.iter().any(|c| c.len() > 3) {
            return false;
        }
        let mut occ = vec![0usize; self.num_vars + 1];
        for l in self.clauses.iter().flatten() {
            occ[l.unsigned_abs() as usize] += 1;
        }
        occ.iter().all(|&k| k <= 3)
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    /// A satisfying assignment by exhaustive enumeration.
    pub fn brute_force_sat(&self) -> Option<Vec<bool>> {
        assert!(self.num_vars < 32, "too many variables to enumerate");
        (0u32..1 << self.num_vars).find_map(|mask| {
            let a: Vec<bool> = (0..self.num_vars).map(|i| mask >> i & 1 == 1).collect();
            self.satisfied_by(&a).then_some(a)
        })
    }

    pub fn count_satisfying(&self) -> usize {
        (0u32..1 << self.num_vars)
            .filter(|mask| {
                let a: Vec<bool> = (0..self.num_vars).map(|i| mask >> i & 1 == 1).collect();
                self.satisfied_by(&a)
            })
            .count()
    }

    pub fn parse_dimacs(text: &str) -> Result<Self, GadgetError> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let l = line.trim();
            if l.is_empty() || l.starts_with('c') || l.starts_with('%') {
                continue;
            }
            let bad = |msg: String| GadgetError::BadFormula(format!("line {}: {msg}", i + 1));
            if let Some(rest) = l.strip_prefix('p') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                match f.as_slice() {
                    ["cnf", v, c] => {
                        let v = v.parse().map_err(|_| bad(format!("bad variable count {v:?}")))?;
                        let c = c.parse().map_err(|_| bad(format!("bad clause count {c:?}")))?;
                        header = Some((v, c));
                    }
                    _ => return Err(bad("expected `p cnf <vars> <clauses>`".into())),
                }
                continue;
            }
            if header.is_none() {
                return Err(bad("clause before `p cnf` header".into()));
            }
            for tok in l.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|_| bad(format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let (num_vars, count) = header.ok_or_else(|| GadgetError::BadFormula("missing `p cnf` header".into()))?;
        if count != clauses.len() {
            return Err(GadgetError::BadFormula(format!(
                "header declares {count} clauses, found {}",
                clauses.len()
            )));
        }
        Formula::new(num_vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&format!("{l} "));
            }
            out.push_str("0\n");
        }
        out
    }

    /// Random 3-SAT-3 formula: each clause draws 1, 2 or 3 distinct
    /// variables with spare occurrences (weights 0.15, 0.35, 0.5) and random
    /// signs.
    pub fn random_three_sat_three<R: Rng + ?Sized>(num_vars: usize, num_clauses: usize, rng: &mut R) -> Self {
        let mut occ = vec![0usize; num_vars + 1];
        let mut clauses = Vec::new();
        for _ in 0..num_clauses {
            let mut free: Vec<usize> = (1..=num_vars).filter(|&v| occ[v] < 3).collect();
            if free.is_empty() {
                break;
            }
            free.shuffle(rng);
            let len = match rng.gen_range(0..20) {
                0..=2 => 1,
                3..=9 => 2,
                _ => 3,
            }
            .min(free.len());
            let clause: Vec<i32> = free[..len]
                .iter()
                .map(|&v| {
                    occ[v] += 1;
                    if rng.gen_bool(0.5) {
                        v as i32
                    } else {
                        -(v as i32)
                    }
                })
                .collect();
            clauses.push(clause);
        }
        Formula { num_vars, clauses }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clause = |c: &Vec<i32>| {
            c.iter()
                .map(|&l| if l > 0 { format!("x{l}") } else { format!("¬x{}", -l) })
                .collect::<Vec<_>>()
                .join(" ∨ ")
        };
        let parts: Vec<String> = self.clauses.iter().map(|c| format!("({})", clause(c))).collect();
        write!(f, "{}", parts.join(" ∧ "))
    }
}

/// Result of unit propagation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Simplified {
    /// Remaining clauses, each with 2 or 3 literals.
    pub formula: Formula,
    /// Literals forced true.
    pub forced: Vec<i32>,
    /// Propagation derived an empty clause.
    pub conflict: bool,
}

/// Unit propagation to a fixpoint. The remaining formula keeps the variable
/// numbering and contains no unit clauses; it is satisfiable iff the input
/// is.
pub fn unit_propagate(f: &Formula) -> Simplified {
    let mut clauses = f.clauses.clone();
    let mut forced: Vec<i32> = Vec::new();
    loop {
        let Some(unit) = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]) else {
            break;
        };
        forced.push(unit);
        let mut next = Vec::with_capacity(clauses.len());
        for c in clauses {
            if c.contains(&unit) {
                continue;
            }
            let reduced: Vec<i32> = c.into_iter().filter(|&l| l != -unit).collect();
            if reduced.is_empty() {
                return Simplified {
                    formula: Formula {
                        num_vars: f.num_vars,
                        clauses: Vec::new(),
                    },
                    forced,
                    conflict: true,
                };
            }
            next.push(reduced);
        }
        clauses = next;
    }
    Simplified {
        formula: Formula {
            num_vars: f.num_vars,
            clauses,
        },
        forced,
        conflict: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let text = "c example\np cnf 3 2\n1 -2 3 0\n-1 2 0\n";
        let f = Formula::parse_dimacs(text).unwrap();
        assert_eq!(f.clauses, vec![vec![1, -2, 3], vec![-1, 2]]);
        assert_eq!(Formula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
        assert!(Formula::parse_dimacs("p cnf 2 2\n1 0\n").is_err());
        assert!(Formula::parse_dimacs("p cnf 2 1\n1 -1 0\n").is_err());
        assert!(Formula::parse_dimacs("p cnf 2 1\n3 0\n").is_err());
    }

    #[test]
    fn brute_force_counts() {
        let f = Formula::new(3, vec![vec![1, 2, 3]]).unwrap();
        assert_eq!(f.count_satisfying(), 7);
        let g = Formula::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(g.brute_force_sat(), None);
    }

    #[test]
    fn propagation_preserves_satisfiability() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.gen_range(1..=6);
            let mut f = Formula::random_three_sat_three(n, rng.gen_range(1..=8), &mut rng);
            // Sprinkle in unit clauses where occurrences allow.
            if rng.gen_bool(0.5) && f.is_three_sat_three() {
                let v = rng.gen_range(1..=n) as i32;
                f.clauses.push(vec![if rng.gen_bool(0.5) { v } else { -v }]);
            }
            let s = unit_propagate(&f);
            assert!(s.formula.clauses.iter().all(|c| c.len() >= 2));
            let sat = f.brute_force_sat().is_some();
            if s.conflict {
                assert!(!sat);
            } else {
                let mut fixed = s.formula.clone();
                fixed.clauses.extend(s.forced.iter().map(|&l| vec![l]));
                assert_eq!(fixed.brute_force_sat().is_some(), sat);
            }
        }
    }
}
