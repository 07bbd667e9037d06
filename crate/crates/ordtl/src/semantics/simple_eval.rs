//! Evaluation of simple formulas under variable assignments.

use super::fo_eval::{check_position, Assignment};
use super::pe_eval::eval_pe_with;
use super::Evaluator;
use crate::models::{compare, Boundary, GappedChain, IntervalSpec};
use crate::partition::SimpleFormula;
use std::cmp::Ordering;

/// Truth of a simple formula, reusing an evaluator's cached slot truths.
/// Every free variable must be assigned a valid position.
pub fn eval_simple_with(ev: &mut Evaluator, f: &SimpleFormula, a: &Assignment) -> bool {
    match f {
        SimpleFormula::VarLess(x, y) => compare(&a[x], &a[y]) == Ordering::Less,
        SimpleFormula::VarEq(x, y) => compare(&a[x], &a[y]) == Ordering::Equal,
        SimpleFormula::OnLine(pe) => eval_pe_with(ev, &IntervalSpec::whole(), pe),
        SimpleFormula::OnLeftRay(pe, z) => {
            let iv = IntervalSpec::right_closed(Boundary::MinusInfinity, a[z].clone());
            eval_pe_with(ev, &iv, pe)
        }
        SimpleFormula::OnRightRay(pe, z) => {
            let iv = IntervalSpec::left_closed(a[z].clone(), Boundary::PlusInfinity);
            eval_pe_with(ev, &iv, pe)
        }
        SimpleFormula::OnClosed(pe, y, z) => {
            if compare(&a[y], &a[z]) == Ordering::Greater {
                return false;
            }
            eval_pe_with(ev, &IntervalSpec::closed(a[y].clone(), a[z].clone()), pe)
        }
        SimpleFormula::And(parts) => parts.iter().all(|p| eval_simple_with(ev, p, a)),
        SimpleFormula::Or(parts) => parts.iter().any(|p| eval_simple_with(ev, p, a)),
    }
}

/// Validating wrapper around [`eval_simple_with`] for one-off evaluation.
pub fn eval_simple(
    model: &GappedChain,
    f: &SimpleFormula,
    a: &Assignment,
) -> Result<bool, String> {
    for (v, p) in a {
        check_position(model, v, p)?;
    }
    for v in f.free_vars() {
        if !a.contains_key(&v) {
            return Err(format!("free variable '{}' is not assigned", v));
        }
    }
    let mut ev = Evaluator::new(model);
    Ok(eval_simple_with(&mut ev, f, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::tl::atom;
    use crate::models::{frac, parse_model, Position};
    use crate::partition::{PartitionExpr, SimpleFormula};

    #[test]
    fn interval_atoms_follow_assignments() {
        let m = parse_model("pt{P} dense{P} pt{Q}").unwrap();
        let mut a = Assignment::new();
        a.insert("y".into(), Position::AtPoint(0));
        a.insert("z".into(), Position::InDense(1, frac(1, 2)));
        let all_p = SimpleFormula::OnClosed(
            PartitionExpr::of(vec![atom("P")], &[]),
            "y".into(),
            "z".into(),
        );
        assert!(eval_simple(&m, &all_p, &a).unwrap());
        // Reversed endpoints: false, not an error.
        let rev = SimpleFormula::OnClosed(
            PartitionExpr::of(vec![atom("P")], &[]),
            "z".into(),
            "y".into(),
        );
        assert!(!eval_simple(&m, &rev, &a).unwrap());
        // The right ray from z picks up the Q point.
        let ray = SimpleFormula::OnRightRay(
            PartitionExpr::of(vec![atom("P"), atom("Q")], &[2]),
            "z".into(),
        );
        assert!(eval_simple(&m, &ray, &a).unwrap());
        let line = SimpleFormula::OnLine(PartitionExpr::of(
            vec![atom("P"), atom("Q")],
            &[2],
        ));
        assert!(eval_simple(&m, &line, &Assignment::new()).unwrap());
    }

    #[test]
    fn missing_assignment_is_an_error() {
        let m = parse_model("pt{}").unwrap();
        let f = SimpleFormula::VarLess("y".into(), "z".into());
        assert!(eval_simple(&m, &f, &Assignment::new()).is_err());
    }
}
