//! Derived temporal operators and the first-order-to-temporal translation.

use crate::logic::fo::FoFormula;
use crate::logic::tl::{self, mirror_tl, TlFormula};
use crate::negation::negate_simple;
use crate::partition::{exists_simple, s_and2, s_or2, split_pe, PartitionExpr, SimpleFormula};
use std::collections::BTreeSet;

/// `BOX P`: P holds at every strictly later point.
pub fn box_future(p: &TlFormula) -> TlFormula {
    tl::not(&tl::until(&tl::tt(), &tl::not(p)))
}

/// `BOXPAST P`: P holds at every strictly earlier point.
pub fn box_past(p: &TlFormula) -> TlFormula {
    tl::not(&tl::since(&tl::tt(), &tl::not(p)))
}

/// `KPLUS P`: P-points accumulate to the right of now — every strictly later
/// point has a P strictly between.
pub fn kplus(p: &TlFormula) -> TlFormula {
    tl::not(&tl::until(&tl::not(p), &tl::tt()))
}

/// `KMINUS P`: mirror of [`kplus`].
pub fn kminus(p: &TlFormula) -> TlFormula {
    tl::not(&tl::since(&tl::not(p), &tl::tt()))
}

/// `GAMMA+ P`: some gap lies strictly ahead with P throughout the interval up
/// to it and not-P accumulating just after it.
pub fn gamma_plus(p: &TlFormula) -> TlFormula {
    tl::and(vec![
        tl::until(p, p),
        tl::not(&tl::until(p, &tl::not(p))),
        tl::not(&box_future(p)),
        tl::not(&tl::until(p, &tl::and2(p, &kplus(&tl::not(p))))),
    ])
}

/// `GAMMA- P`: mirror of [`gamma_plus`].
pub fn gamma_minus(p: &TlFormula) -> TlFormula {
    tl::and(vec![
        tl::since(p, p),
        tl::not(&tl::since(p, &tl::not(p))),
        tl::not(&box_past(p)),
        tl::not(&tl::since(p, &tl::and2(p, &kminus(&tl::not(p))))),
    ])
}

/// `USTAR P Q`: some strictly later point closes a two-piece pattern — P
/// throughout an initial stretch including now, then Q throughout the rest
/// including the endpoint, with the switch-over allowed to fall on a point,
/// between points, or at a gap.
pub fn ustar(p: &TlFormula, q: &TlFormula) -> TlFormula {
    tl::and2(
        p,
        &tl::or(vec![
            tl::until(p, q),
            tl::until(q, q),
            tl::until(p, &tl::and2(p, &tl::until(q, q))),
            tl::until_s(p, q),
        ]),
    )
}

/// `SSTAR P Q`: mirror of [`ustar`].
pub fn sstar(p: &TlFormula, q: &TlFormula) -> TlFormula {
    tl::and2(
        p,
        &tl::or(vec![
            tl::since(p, q),
            tl::since(q, q),
            tl::since(p, &tl::and2(p, &tl::since(q, q))),
            tl::since_s(p, q),
        ]),
    )
}

/// `UGAP P1 P2`: some gap lies strictly ahead with both P1 and P2 holding
/// throughout the interval up to it and not-P1 accumulating just after it.
pub fn ugap(p1: &TlFormula, p2: &TlFormula) -> TlFormula {
    let both = tl::and2(p1, p2);
    tl::and(vec![
        gamma_plus(p1),
        gamma_plus(&both),
        tl::not(&tl::until_s(&both, p1)),
    ])
}

/// `SGAP P1 P2`: mirror of [`ugap`].
pub fn sgap(p1: &TlFormula, p2: &TlFormula) -> TlFormula {
    let both = tl::and2(p1, p2);
    tl::and(vec![
        gamma_minus(p1),
        gamma_minus(&both),
        tl::not(&tl::since_s(&both, p1)),
    ])
}

/// Arity of a derived operator name, or None if the name is not derived.
pub fn derived_arity(op: &str) -> Option<usize> {
    match op {
        "BOX" | "BOXPAST" | "KPLUS" | "KMINUS" | "GAMMA+" | "GAMMA-" => Some(1),
        "USTAR" | "SSTAR" | "UGAP" | "SGAP" => Some(2),
        _ => None,
    }
}

/// Expands a derived operator applied to arguments; None if the name is not
/// a derived operator or the argument count is wrong.
pub fn expand(op: &str, args: &[TlFormula]) -> Option<TlFormula> {
    if derived_arity(op) != Some(args.len()) {
        return None;
    }
    Some(match op {
        "BOX" => box_future(&args[0]),
        "BOXPAST" => box_past(&args[0]),
        "KPLUS" => kplus(&args[0]),
        "KMINUS" => kminus(&args[0]),
        "GAMMA+" => gamma_plus(&args[0]),
        "GAMMA-" => gamma_minus(&args[0]),
        "USTAR" => ustar(&args[0], &args[1]),
        "SSTAR" => sstar(&args[0], &args[1]),
        "UGAP" => ugap(&args[0], &args[1]),
        _ => sgap(&args[0], &args[1]),
    })
}

/// How the final piece of a partition pattern is allowed to end.
pub enum TerminalMode {
    /// The pattern fills a bounded window `[t, b]` for some witness point `b`.
    Bounded,
    /// The pattern fills the whole ray `[t, +oo)`.
    Ray,
    /// The pattern fills `[t, g)` for a gap `g` recognized by the given
    /// formula: it holds throughout `(t, g)` and its negation accumulates
    /// just right of `g`.
    ToGap(TlFormula),
}

/// The four-disjunct advance from `p`-points to a `q`-point, without the
/// leading `p` conjunct of [`ustar`]; used where the current point is exempt.
fn relaxed_four(p: &TlFormula, q: &TlFormula) -> TlFormula {
    tl::or(vec![
        tl::until(p, q),
        tl::until(q, q),
        tl::until(p, &tl::and2(p, &tl::until(q, q))),
        tl::until_s(p, q),
    ])
}

/// Builds one positional formula per slot of `pe`, future-directed.
///
/// `out[i]` holds at a point iff that point can start piece `i + 1` of a
/// placement of the rest of the pattern, with the last piece ending as `mode`
/// dictates.  `out[0]` at `t` therefore says the full pattern fits on a
/// window starting at `t`.  Marked slots must be singletons.
pub fn build_f(pe: &PartitionExpr, mode: &TerminalMode) -> Vec<TlFormula> {
    let k = pe.len();
    assert!(k > 0, "empty partition expression");
    let d = &pe.deltas;
    if let TerminalMode::ToGap(delta) = mode {
        // The window's left endpoint is exempt from `delta`, so the head
        // formula requires only its own slot now and advances over
        // `slot && delta` from there.
        let mut out = vec![tl::ff(); k];
        if !pe.is_marked(k) {
            out[k - 1] = if k == 1 {
                tl::and2(&d[0], &ugap(delta, &d[0]))
            } else {
                tl::and(vec![d[k - 1].clone(), delta.clone(), ugap(delta, &d[k - 1])])
            };
        }
        if k == 1 {
            return out;
        }
        for i in (0..k - 1).rev() {
            let body = tl::and2(&d[i], delta);
            let next_body = tl::and2(&d[i + 1], delta);
            let step = match (pe.is_marked(i + 1), pe.is_marked(i + 2)) {
                (true, true) => tl::until(&tl::ff(), &out[i + 1]),
                (true, false) => tl::until(&next_body, &out[i + 1]),
                (false, true) => tl::until(&body, &out[i + 1]),
                (false, false) => relaxed_four(&body, &out[i + 1]),
            };
            out[i] = if i == 0 {
                tl::and2(&d[0], &step)
            } else {
                tl::and(vec![d[i].clone(), delta.clone(), step])
            };
        }
        return out;
    }
    let mut out = vec![tl::ff(); k];
    out[k - 1] = match mode {
        TerminalMode::Bounded => d[k - 1].clone(),
        TerminalMode::Ray if pe.is_marked(k) => tl::and2(&d[k - 1], &box_future(&tl::ff())),
        TerminalMode::Ray => tl::and2(&d[k - 1], &box_future(&d[k - 1])),
        TerminalMode::ToGap(_) => unreachable!(),
    };
    for i in (0..k - 1).rev() {
        let step = match (pe.is_marked(i + 1), pe.is_marked(i + 2)) {
            (true, true) => tl::until(&tl::ff(), &out[i + 1]),
            (true, false) => tl::until(&d[i + 1], &out[i + 1]),
            (false, true) => tl::until(&d[i], &out[i + 1]),
            (false, false) => relaxed_four(&d[i], &out[i + 1]),
        };
        out[i] = tl::and2(&d[i], &step);
    }
    out
}

/// Reverses a partition expression and mirrors every slot formula, so a
/// future-directed build over the result reads as past-directed over `pe`.
pub fn flip_pe(pe: &PartitionExpr) -> PartitionExpr {
    PartitionExpr::new(
        pe.deltas.iter().rev().map(mirror_tl).collect(),
        pe.marked.iter().map(|&m| pe.len() + 1 - m).collect(),
    )
}

/// Point formula equivalent to `OnRightRay(pe, z)` read at `z`.
pub fn right_ray_tl(pe: &PartitionExpr) -> TlFormula {
    build_f(pe, &TerminalMode::Ray)[0].clone()
}

/// Point formula equivalent to `OnLeftRay(pe, z)` read at `z`.
pub fn left_ray_tl(pe: &PartitionExpr) -> TlFormula {
    mirror_tl(&build_f(&flip_pe(pe), &TerminalMode::Ray)[0])
}

/// Point formula equivalent to `OnLine(pe)`; it takes the same truth value at
/// every point of the order, since it asserts a global splitting.
pub fn line_tl(pe: &PartitionExpr) -> TlFormula {
    let mut cases = Vec::new();
    for (left, right) in split_pe(pe) {
        cases.push(tl::and2(&left_ray_tl(&left), &right_ray_tl(&right)));
    }
    tl::or(cases)
}

/// Compiles a simple formula whose only free variable is `z` into a temporal
/// formula read at the point `z` denotes.
pub fn simple_to_tl(f: &SimpleFormula, z: &str) -> TlFormula {
    match f {
        SimpleFormula::VarEq(a, b) => {
            assert!(a == z && b == z, "stray variable in simple formula");
            tl::tt()
        }
        SimpleFormula::VarLess(a, b) => {
            assert!(a == z && b == z, "stray variable in simple formula");
            tl::ff()
        }
        SimpleFormula::OnLine(pe) => line_tl(pe),
        SimpleFormula::OnLeftRay(pe, v) => {
            assert!(v == z, "stray variable in simple formula");
            left_ray_tl(pe)
        }
        SimpleFormula::OnRightRay(pe, v) => {
            assert!(v == z, "stray variable in simple formula");
            right_ray_tl(pe)
        }
        SimpleFormula::OnClosed(pe, y, v) => {
            assert!(y == z && v == z, "stray variable in simple formula");
            if pe.len() == 1 {
                pe.deltas[0].clone()
            } else {
                tl::ff()
            }
        }
        SimpleFormula::And(parts) => tl::and(parts.iter().map(|p| simple_to_tl(p, z)).collect()),
        SimpleFormula::Or(parts) => tl::or(parts.iter().map(|p| simple_to_tl(p, z)).collect()),
    }
}

/// Translates a first-order formula into an equivalent simple formula over
/// the same free variables.
pub fn fo_to_simple(f: &FoFormula) -> SimpleFormula {
    let mut used: BTreeSet<String> = f.free_vars();
    let renamed = crate::semantics::rename_binders(f, &mut used);
    fo_to_simple_inner(&renamed)
}

fn fo_to_simple_inner(f: &FoFormula) -> SimpleFormula {
    match f {
        FoFormula::Less(a, b) => SimpleFormula::VarLess(a.clone(), b.clone()),
        FoFormula::Equal(a, b) => SimpleFormula::VarEq(a.clone(), b.clone()),
        FoFormula::Pred(p, v) => SimpleFormula::OnClosed(
            PartitionExpr::of(vec![tl::atom(p)], &[1]),
            v.clone(),
            v.clone(),
        ),
        FoFormula::Not(g) => negate_simple(&fo_to_simple_inner(g)),
        FoFormula::And(a, b) => s_and2(fo_to_simple_inner(a), fo_to_simple_inner(b)),
        FoFormula::Or(a, b) => s_or2(fo_to_simple_inner(a), fo_to_simple_inner(b)),
        FoFormula::Exists(v, g) => exists_simple(&fo_to_simple_inner(g), v),
        FoFormula::Forall(v, g) => {
            let inner = negate_simple(&fo_to_simple_inner(g));
            negate_simple(&exists_simple(&inner, v))
        }
    }
}

/// Translates a first-order formula with free variables contained in `{x}`
/// into a temporal formula equivalent to it at every point.
pub fn translate(f: &FoFormula, x: &str) -> Result<TlFormula, String> {
    let free = f.free_vars();
    let extra: Vec<&String> = free.iter().filter(|v| v.as_str() != x).collect();
    if !extra.is_empty() {
        return Err(format!(
            "free variables beyond {x}: {}",
            extra.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        ));
    }
    Ok(simple_to_tl(&fo_to_simple(f), x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_fo;
    use crate::logic::tl::{atom, mirror_tl};
    use crate::models::{parse_model, Boundary, GappedChain, IntervalSpec};
    use crate::semantics::{eval_pe, eval_tl, Evaluator};

    fn corpus() -> Vec<GappedChain> {
        [
            "pt{P} pt{} pt{P,Q}",
            "pt{Q} pt{P} pt{P} pt{}",
            "dense{P}",
            "pt{} dense{P} gap dense{Q} pt{Q}",
            "dense{} gap dense{P,Q} pt{P}",
        ]
        .iter()
        .map(|s| parse_model(s).expect("corpus model"))
        .collect()
    }

    fn some_pes() -> Vec<PartitionExpr> {
        let p = atom("P");
        let q = atom("Q");
        vec![
            PartitionExpr::of(vec![p.clone()], &[]),
            PartitionExpr::of(vec![p.clone()], &[1]),
            PartitionExpr::of(vec![p.clone(), q.clone()], &[]),
            PartitionExpr::of(vec![p.clone(), q.clone()], &[1]),
            PartitionExpr::of(vec![p.clone(), q.clone()], &[2]),
            PartitionExpr::of(vec![p.clone(), q.clone()], &[1, 2]),
            PartitionExpr::of(vec![p.clone(), tl::tt(), q.clone()], &[2]),
        ]
    }

    #[test]
    fn mirror_maps_future_operators_to_past() {
        let p = atom("P");
        let q = atom("Q");
        assert_eq!(mirror_tl(&box_future(&p)), box_past(&p));
        assert_eq!(mirror_tl(&kplus(&p)), kminus(&p));
        assert_eq!(mirror_tl(&gamma_plus(&p)), gamma_minus(&p));
        assert_eq!(mirror_tl(&ustar(&p, &q)), sstar(&p, &q));
        assert_eq!(mirror_tl(&ugap(&p, &q)), sgap(&p, &q));
    }

    #[test]
    fn expand_checks_arity() {
        let p = atom("P");
        assert!(expand("BOX", &[p.clone()]).is_some());
        assert!(expand("BOX", &[p.clone(), p.clone()]).is_none());
        assert!(expand("NOPE", &[p]).is_none());
    }

    #[test]
    fn bounded_build_composes_expected_steps() {
        let p = atom("P");
        let q = atom("Q");
        let open = build_f(&PartitionExpr::of(vec![p.clone(), q.clone()], &[]), &TerminalMode::Bounded);
        assert_eq!(open[1], q);
        assert_eq!(open[0], ustar(&p, &q));
        let first = build_f(&PartitionExpr::of(vec![p.clone(), q.clone()], &[1]), &TerminalMode::Bounded);
        assert_eq!(first[0], tl::and2(&p, &tl::until(&q, &q)));
        let second = build_f(&PartitionExpr::of(vec![p.clone(), q.clone()], &[2]), &TerminalMode::Bounded);
        assert_eq!(second[0], tl::and2(&p, &tl::until(&p, &q)));
        let both = build_f(&PartitionExpr::of(vec![p.clone(), q.clone()], &[1, 2]), &TerminalMode::Bounded);
        assert_eq!(both[0], tl::and2(&p, &tl::until(&tl::ff(), &q)));
    }

    #[test]
    fn ray_formulas_match_interval_evaluation() {
        for m in corpus() {
            let mut ev = Evaluator::new(&m);
            for pe in some_pes() {
                let right = right_ray_tl(&pe);
                let left = left_ray_tl(&pe);
                for t in m.enumerate_sample_positions(2) {
                    let right_iv = IntervalSpec::left_closed(t.clone(), Boundary::PlusInfinity);
                    let left_iv = IntervalSpec::right_closed(Boundary::MinusInfinity, t.clone());
                    assert_eq!(
                        ev.truth_at(&right, &t),
                        eval_pe(&m, &right_iv, &pe),
                        "right ray {pe} at {t:?} on {m}"
                    );
                    assert_eq!(
                        ev.truth_at(&left, &t),
                        eval_pe(&m, &left_iv, &pe),
                        "left ray {pe} at {t:?} on {m}"
                    );
                }
            }
        }
    }

    #[test]
    fn line_formula_is_uniform_and_matches_whole_order() {
        for m in corpus() {
            let mut ev = Evaluator::new(&m);
            for pe in some_pes() {
                let f = line_tl(&pe);
                let want = eval_pe(&m, &IntervalSpec::whole(), &pe);
                for t in m.enumerate_sample_positions(2) {
                    assert_eq!(ev.truth_at(&f, &t), want, "{pe} at {t:?} on {m}");
                }
            }
        }
    }

    #[test]
    fn gap_terminated_build_requires_a_recognized_gap() {
        let p = atom("P");
        let gapped = parse_model("pt{} dense{P} gap dense{} pt{}").unwrap();
        let solid = parse_model("pt{} dense{P} pt{}").unwrap();
        let pe = PartitionExpr::of(vec![tl::tt()], &[]);
        let f = build_f(&pe, &TerminalMode::ToGap(p.clone()))[0].clone();
        assert_eq!(
            eval_tl(&gapped, &f),
            vec![Some(true), Some(true), None, Some(false), Some(false)]
        );
        assert!(eval_tl(&solid, &f).iter().all(|v| *v != Some(true)));
        let marked = PartitionExpr::of(vec![p.clone()], &[1]);
        assert_eq!(build_f(&marked, &TerminalMode::ToGap(p.clone()))[0], tl::ff());
    }

    #[test]
    fn gap_terminated_build_chains_through_marked_heads() {
        let p = atom("P");
        let m = parse_model("pt{} dense{P} gap dense{} pt{}").unwrap();
        let pe = PartitionExpr::of(vec![tl::tt(), p.clone()], &[1]);
        let f = build_f(&pe, &TerminalMode::ToGap(p.clone()))[0].clone();
        let truths = eval_tl(&m, &f);
        assert_eq!(truths[0], Some(true));
        assert_eq!(truths[1], Some(true));
        assert_eq!(truths[3], Some(false));
    }

    #[test]
    fn translation_requires_a_single_free_variable() {
        let f = parse_fo("(< x y)").unwrap();
        assert!(translate(&f, "x").is_err());
        let g = parse_fo("(E y (< x y))").unwrap();
        assert!(translate(&g, "x").is_ok());
    }

    #[test]
    fn translation_matches_first_order_evaluation() {
        let formulas = [
            "(P x)",
            "(E y (& (< x y) (Q y)))",
            "(A y (| (= x y) (| (< x y) (P y))))",
            "(& (P x) (! (E y (& (< y x) (P y)))))",
        ];
        for m in corpus() {
            for src in formulas {
                let f = parse_fo(src).unwrap();
                let lifted = translate(&f, "x").unwrap();
                let want = crate::semantics::eval_fo_regions(&m, &f, "x").unwrap();
                assert_eq!(eval_tl(&m, &lifted), want, "{src} on {m}");
            }
        }
    }
}
