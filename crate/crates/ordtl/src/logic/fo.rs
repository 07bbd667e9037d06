//! First-order formulas over a linear order with monadic predicates.

use std::collections::BTreeSet;

/// A first-order formula in the monadic language of linear order: variables
/// range over points, atoms are `x < y`, `x = y` and `P(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FoFormula {
    Less(String, String),
    Equal(String, String),
    Pred(String, String),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
}

impl FoFormula {
    /// Free variables of the formula.
    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            FoFormula::Less(a, b) | FoFormula::Equal(a, b) => {
                [a.clone(), b.clone()].into_iter().collect()
            }
            FoFormula::Pred(_, x) => [x.clone()].into_iter().collect(),
            FoFormula::Not(f) => f.free_vars(),
            FoFormula::And(f, g) | FoFormula::Or(f, g) => {
                let mut s = f.free_vars();
                s.extend(g.free_vars());
                s
            }
            FoFormula::Exists(v, f) | FoFormula::Forall(v, f) => {
                let mut s = f.free_vars();
                s.remove(v);
                s
            }
        }
    }

    /// Predicate names occurring in the formula.
    pub fn pred_names(&self) -> BTreeSet<String> {
        match self {
            FoFormula::Less(_, _) | FoFormula::Equal(_, _) => BTreeSet::new(),
            FoFormula::Pred(p, _) => [p.clone()].into_iter().collect(),
            FoFormula::Not(f) => f.pred_names(),
            FoFormula::And(f, g) | FoFormula::Or(f, g) => {
                let mut s = f.pred_names();
                s.extend(g.pred_names());
                s
            }
            FoFormula::Exists(_, f) | FoFormula::Forall(_, f) => f.pred_names(),
        }
    }

    /// Maximum quantifier nesting depth.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            FoFormula::Less(_, _) | FoFormula::Equal(_, _) | FoFormula::Pred(_, _) => 0,
            FoFormula::Not(f) => f.quantifier_depth(),
            FoFormula::And(f, g) | FoFormula::Or(f, g) => {
                f.quantifier_depth().max(g.quantifier_depth())
            }
            FoFormula::Exists(_, f) | FoFormula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Tree node count, for size reports.
    pub fn size(&self) -> usize {
        match self {
            FoFormula::Less(_, _) | FoFormula::Equal(_, _) | FoFormula::Pred(_, _) => 1,
            FoFormula::Not(f) | FoFormula::Exists(_, f) | FoFormula::Forall(_, f) => 1 + f.size(),
            FoFormula::And(f, g) | FoFormula::Or(f, g) => 1 + f.size() + g.size(),
        }
    }
}

/// `a < b`.
pub fn fo_less(a: &str, b: &str) -> FoFormula {
    FoFormula::Less(a.to_string(), b.to_string())
}

/// `a = b`.
pub fn fo_equal(a: &str, b: &str) -> FoFormula {
    FoFormula::Equal(a.to_string(), b.to_string())
}

/// `P(x)`.
pub fn fo_pred(p: &str, x: &str) -> FoFormula {
    FoFormula::Pred(p.to_string(), x.to_string())
}

/// Negation.
pub fn fo_not(f: FoFormula) -> FoFormula {
    FoFormula::Not(Box::new(f))
}

/// Binary conjunction.
pub fn fo_and(f: FoFormula, g: FoFormula) -> FoFormula {
    FoFormula::And(Box::new(f), Box::new(g))
}

/// Binary disjunction.
pub fn fo_or(f: FoFormula, g: FoFormula) -> FoFormula {
    FoFormula::Or(Box::new(f), Box::new(g))
}

/// Conjunction of a list; `TRUE`-like when empty is not representable, so the
/// empty case is an error at the call site — callers always have a seed.
pub fn fo_and_all(parts: Vec<FoFormula>) -> FoFormula {
    let mut it = parts.into_iter();
    let first = it.next().expect("fo_and_all of empty list");
    it.fold(first, fo_and)
}

/// Disjunction of a list; see [`fo_and_all`] about emptiness.
pub fn fo_or_all(parts: Vec<FoFormula>) -> FoFormula {
    let mut it = parts.into_iter();
    let first = it.next().expect("fo_or_all of empty list");
    it.fold(first, fo_or)
}

/// `∃v. f`.
pub fn fo_exists(v: &str, f: FoFormula) -> FoFormula {
    FoFormula::Exists(v.to_string(), Box::new(f))
}

/// `∀v. f`.
pub fn fo_forall(v: &str, f: FoFormula) -> FoFormula {
    FoFormula::Forall(v.to_string(), Box::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_vars_respect_binding() {
        let f = fo_exists("y", fo_and(fo_less("x", "y"), fo_pred("P", "y")));
        let fv = f.free_vars();
        assert!(fv.contains("x"));
        assert!(!fv.contains("y"));
    }

    #[test]
    fn quantifier_depth_nested() {
        let f = fo_exists("y", fo_forall("z", fo_less("y", "z")));
        assert_eq!(f.quantifier_depth(), 2);
        assert_eq!(fo_and(f.clone(), fo_pred("P", "x")).quantifier_depth(), 2);
    }
}
