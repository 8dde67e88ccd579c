//! CNF formulas and the occurrence restrictions the planar reductions need.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// 0-indexed variable.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, positive: false }
    }

    /// DIMACS encoding: `var + 1`, negated for negative literals.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(value: i64) -> Option<Self> {
        (value != 0).then(|| Self { var: value.unsigned_abs() as usize - 1, positive: value > 0 })
    }

    pub fn is_true_under(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var + 1)
        } else {
            write!(f, "¬x{}", self.var + 1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("clause {clause} mentions variable {var}, formula has {num_vars}")]
    VariableOutOfRange { clause: usize, var: usize, num_vars: usize },
    #[error("clause {clause} has {len} literals (at most 3 allowed)")]
    ClauseTooLong { clause: usize, len: usize },
    #[error("clause {clause} repeats literal {literal}")]
    DuplicateLiteral { clause: usize, literal: Literal },
    #[error("variable x{} occurs {count} times (at most 3 allowed)", var + 1)]
    TooManyOccurrences { var: usize, count: usize },
    #[error("variable x{} never occurs {}", var + 1, if *positive { "positively" } else { "negatively" })]
    MissingPolarity { var: usize, positive: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, CnfError> {
        for (clause, lits) in clauses.iter().enumerate() {
            if let Some(l) = lits.iter().find(|l| l.var >= num_vars) {
                return Err(CnfError::VariableOutOfRange { clause, var: l.var, num_vars });
            }
        }
        Ok(Self { num_vars, clauses })
    }

    /// Shorthand from DIMACS-style signed integers.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        let clauses = clauses
            .iter()
            .map(|c| c.iter().map(|&x| Literal::from_dimacs(x).expect("literal 0 is a terminator")).collect())
            .collect();
        Self::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Indices of the clauses containing `literal`.
    pub fn occurrences(&self, literal: Literal) -> Vec<usize> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(&literal))
            .map(|(j, _)| j)
            .collect()
    }

    /// At most 3 literals per clause, no repeated literal, at most 3
    /// occurrences per variable, and both polarities of every variable used.
    /// Planarity of the incidence graph is not checked here.
    pub fn validate_restricted(&self) -> Result<(), CnfError> {
        let mut pos = vec![0usize; self.num_vars];
        let mut neg = vec![0usize; self.num_vars];
        for (clause, lits) in self.clauses.iter().enumerate() {
            if lits.len() > 3 {
                return Err(CnfError::ClauseTooLong { clause, len: lits.len() });
            }
            for (i, &l) in lits.iter().enumerate() {
                if lits[..i].contains(&l) {
                    return Err(CnfError::DuplicateLiteral { clause, literal: l });
                }
                if l.positive {
                    pos[l.var] += 1;
                } else {
                    neg[l.var] += 1;
                }
            }
        }
        for var in 0..self.num_vars {
            let count = pos[var] + neg[var];
            if count > 3 {
                return Err(CnfError::TooManyOccurrences { var, count });
            }
            if pos[var] == 0 {
                return Err(CnfError::MissingPolarity { var, positive: true });
            }
            if neg[var] == 0 {
                return Err(CnfError::MissingPolarity { var, positive: false });
            }
        }
        Ok(())
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars
            && self.clauses.iter().all(|c| c.iter().any(|l| l.is_true_under(assignment)))
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, clause) in self.clauses.iter().enumerate() {
            if j > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "(")?;
            for (i, l) in clause.iter().enumerate() {
                if i > 0 {
                    write!(f, " ∨ ")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restrictions() {
        let ok = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[-1, -2]]).unwrap();
        assert!(ok.validate_restricted().is_ok());
        let long = CnfFormula::from_dimacs_clauses(2, &[&[1, 2, -1, -2]]).unwrap();
        assert_eq!(long.validate_restricted(), Err(CnfError::ClauseTooLong { clause: 0, len: 4 }));
        let one_sided = CnfFormula::from_dimacs_clauses(1, &[&[1], &[1]]).unwrap();
        assert_eq!(one_sided.validate_restricted(), Err(CnfError::MissingPolarity { var: 0, positive: false }));
        let crowded = CnfFormula::from_dimacs_clauses(1, &[&[1], &[1], &[-1], &[-1]]).unwrap();
        assert_eq!(crowded.validate_restricted(), Err(CnfError::TooManyOccurrences { var: 0, count: 4 }));
        let dup = CnfFormula::from_dimacs_clauses(1, &[&[1, 1], &[-1]]).unwrap();
        assert!(matches!(dup.validate_restricted(), Err(CnfError::DuplicateLiteral { .. })));
        assert!(CnfFormula::from_dimacs_clauses(1, &[&[2]]).is_err());
    }

    #[test]
    fn satisfaction() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[-1, -2]]).unwrap();
        assert!(f.is_satisfied_by(&[true, false]));
        assert!(!f.is_satisfied_by(&[true, true]));
        assert_eq!(f.occurrences(Literal::neg(1)), vec![1]);
        assert_eq!(f.to_string(), "(x1 ∨ x2) ∧ (¬x1 ∨ ¬x2)");
    }
}
