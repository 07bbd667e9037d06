//! Negation of simple formulas, kept inside the simple fragment.
//!
//! The fragment has no negation operator, so complements must be expressed
//! positively. Variable-order atoms negate by trichotomy and boolean
//! structure by De Morgan; the real work is negating a partition pattern on
//! an interval. That splits into scenarios by where the pattern's outer
//! slots first fail — nowhere, right at an endpoint, at an interior point,
//! or only past a gap — and each scenario admits a positive description of
//! failure, quantifying in at most one extra interior witness point, which
//! [`crate::partition::exists_simple`] then eliminates again.

use crate::logic::tl::{self, mirror_tl, TlFormula};
use crate::partition::{
    exists_simple, s_and, s_and2, s_false, s_or, s_or2, s_true, PartitionExpr, SimpleFormula,
};
use crate::translate::{
    build_f, flip_pe, gamma_minus, gamma_plus, kminus, kplus, left_ray_tl, line_tl, right_ray_tl,
    ugap, TerminalMode,
};
use std::collections::{BTreeSet, HashMap};

/// One scenario of a case analysis: whenever `cond` describes the interval,
/// the negated statement is equivalent to `form` there.
pub struct CaseSplit {
    pub cond: SimpleFormula,
    pub form: SimpleFormula,
}

/// Shared state for one negation: a supply of fresh witness variable names.
pub struct NegCtx {
    avoid: BTreeSet<String>,
    fresh: usize,
}

// Interval negations depend only on the pattern once endpoints are pinned to
// the canonical pair, and their results mention no other free variables, so
// one memo can serve every negation in the thread.
thread_local! {
    static MEMO: std::cell::RefCell<HashMap<String, SimpleFormula>> =
        std::cell::RefCell::new(HashMap::new());
}

fn memo_get(key: &str) -> Option<SimpleFormula> {
    MEMO.with(|m| m.borrow().get(key).cloned())
}

fn memo_put(key: String, val: SimpleFormula) {
    MEMO.with(|m| m.borrow_mut().insert(key, val));
}

impl NegCtx {
    pub fn new() -> NegCtx {
        NegCtx::avoiding(BTreeSet::new())
    }

    /// A context whose fresh names will not collide with `avoid`.
    pub fn avoiding(avoid: BTreeSet<String>) -> NegCtx {
        NegCtx { avoid, fresh: 0 }
    }

    fn fresh_var(&mut self) -> String {
        loop {
            let name = format!("_w{}", self.fresh);
            self.fresh += 1;
            if !self.avoid.contains(&name) {
                return name;
            }
        }
    }
}

impl Default for NegCtx {
    fn default() -> NegCtx {
        NegCtx::new()
    }
}

/// `d` holds at the point named `z`.
pub fn pointwise(d: &TlFormula, z: &str) -> SimpleFormula {
    SimpleFormula::OnClosed(
        PartitionExpr::of(vec![d.clone()], &[1]),
        z.to_string(),
        z.to_string(),
    )
}

/// The pattern fills the open interval `(a, b)`; false when the interior is
/// empty or the endpoints are out of order.
pub fn part_open(pe: &PartitionExpr, a: &str, b: &str) -> SimpleFormula {
    let mut deltas = vec![tl::tt()];
    deltas.extend(pe.deltas.iter().cloned());
    deltas.push(tl::tt());
    let mut marks: BTreeSet<usize> = pe.marked.iter().map(|&j| j + 1).collect();
    marks.insert(1);
    marks.insert(pe.len() + 2);
    SimpleFormula::OnClosed(PartitionExpr::new(deltas, marks), a.to_string(), b.to_string())
}

/// Some point strictly inside `(a, b)` satisfies `d`.
pub fn has_point(d: &TlFormula, a: &str, b: &str) -> SimpleFormula {
    s_or(vec![
        part_open(&PartitionExpr::of(vec![d.clone()], &[1]), a, b),
        part_open(&PartitionExpr::of(vec![d.clone(), tl::tt()], &[1]), a, b),
        part_open(&PartitionExpr::of(vec![tl::tt(), d.clone()], &[2]), a, b),
        part_open(&PartitionExpr::of(vec![tl::tt(), d.clone(), tl::tt()], &[2]), a, b),
    ])
}

/// Every point of `(a, b)` satisfies `d`, and there is at least one.
fn all_open(d: &TlFormula, a: &str, b: &str) -> SimpleFormula {
    part_open(&PartitionExpr::of(vec![d.clone()], &[]), a, b)
}

/// `b` is the immediate successor of `a`.
pub fn suc(a: &str, b: &str) -> SimpleFormula {
    s_and2(
        SimpleFormula::VarLess(a.to_string(), b.to_string()),
        SimpleFormula::OnClosed(
            PartitionExpr::of(vec![tl::tt(), tl::tt()], &[1, 2]),
            a.to_string(),
            b.to_string(),
        ),
    )
}

/// Some point lies strictly between `a` and `b`.
fn neg_suc(a: &str, b: &str) -> SimpleFormula {
    part_open(&PartitionExpr::of(vec![tl::tt()], &[]), a, b)
}

/// The open interval `(a, b)` is empty, including the out-of-order cases.
pub fn empty_open(a: &str, b: &str) -> SimpleFormula {
    s_or(vec![
        SimpleFormula::VarEq(a.to_string(), b.to_string()),
        SimpleFormula::VarLess(b.to_string(), a.to_string()),
        suc(a, b),
    ])
}

/// At least two points lie strictly between `a` and `b`.
fn at_least2(a: &str, b: &str) -> SimpleFormula {
    part_open(&PartitionExpr::of(vec![tl::tt(), tl::tt()], &[]), a, b)
}

/// Reads a simple formula on the reversed order: `f` holds in a model at an
/// assignment iff `mirror_simple(f)` holds in the reversed model at the
/// reflected assignment.
pub fn mirror_simple(f: &SimpleFormula) -> SimpleFormula {
    match f {
        SimpleFormula::VarLess(a, b) => SimpleFormula::VarLess(b.clone(), a.clone()),
        SimpleFormula::VarEq(a, b) => SimpleFormula::VarEq(a.clone(), b.clone()),
        SimpleFormula::OnLine(pe) => SimpleFormula::OnLine(flip_pe(pe)),
        SimpleFormula::OnLeftRay(pe, z) => SimpleFormula::OnRightRay(flip_pe(pe), z.clone()),
        SimpleFormula::OnRightRay(pe, z) => SimpleFormula::OnLeftRay(flip_pe(pe), z.clone()),
        SimpleFormula::OnClosed(pe, y, z) => {
            SimpleFormula::OnClosed(flip_pe(pe), z.clone(), y.clone())
        }
        SimpleFormula::And(ps) => s_and(ps.iter().map(mirror_simple).collect()),
        SimpleFormula::Or(ps) => s_or(ps.iter().map(mirror_simple).collect()),
    }
}

// Canonical endpoint names used for memoized interval computations; `#`
// cannot occur in parsed variable names or fresh names, so substituting
// them afterwards cannot capture anything.
const CANON_LO: &str = "#a";
const CANON_HI: &str = "#b";

/// Renames free variables according to `map`; names not in the map stay.
fn rename_vars(f: &SimpleFormula, map: &HashMap<String, String>) -> SimpleFormula {
    let r = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
    match f {
        SimpleFormula::VarLess(a, b) => SimpleFormula::VarLess(r(a), r(b)),
        SimpleFormula::VarEq(a, b) => SimpleFormula::VarEq(r(a), r(b)),
        SimpleFormula::OnLine(pe) => SimpleFormula::OnLine(pe.clone()),
        SimpleFormula::OnLeftRay(pe, z) => SimpleFormula::OnLeftRay(pe.clone(), r(z)),
        SimpleFormula::OnRightRay(pe, z) => SimpleFormula::OnRightRay(pe.clone(), r(z)),
        SimpleFormula::OnClosed(pe, y, z) => SimpleFormula::OnClosed(pe.clone(), r(y), r(z)),
        SimpleFormula::And(ps) => {
            SimpleFormula::And(ps.iter().map(|p| rename_vars(p, map)).collect())
        }
        SimpleFormula::Or(ps) => {
            SimpleFormula::Or(ps.iter().map(|p| rename_vars(p, map)).collect())
        }
    }
}

fn endpoint_renaming(z0: &str, z1: &str) -> HashMap<String, String> {
    let mut map = HashMap::new();
    map.insert(CANON_LO.to_string(), z0.to_string());
    map.insert(CANON_HI.to_string(), z1.to_string());
    map
}

/// Negates a simple formula; the result is again simple and holds exactly
/// when `f` does not.
pub fn negate_simple(f: &SimpleFormula) -> SimpleFormula {
    let mut ctx = NegCtx::avoiding(f.free_vars());
    negate_with(&mut ctx, f)
}

/// Negation sharing a caller-provided context.
pub fn negate_with(ctx: &mut NegCtx, f: &SimpleFormula) -> SimpleFormula {
    match f {
        SimpleFormula::And(ps) => s_or(ps.iter().map(|p| negate_with(ctx, p)).collect()),
        SimpleFormula::Or(ps) => s_and(ps.iter().map(|p| negate_with(ctx, p)).collect()),
        SimpleFormula::VarEq(a, b) => {
            if a == b {
                s_false()
            } else {
                s_or2(
                    SimpleFormula::VarLess(a.clone(), b.clone()),
                    SimpleFormula::VarLess(b.clone(), a.clone()),
                )
            }
        }
        SimpleFormula::VarLess(a, b) => {
            if a == b {
                s_true()
            } else {
                s_or2(
                    SimpleFormula::VarEq(a.clone(), b.clone()),
                    SimpleFormula::VarLess(b.clone(), a.clone()),
                )
            }
        }
        // A whole-line pattern compiles to a point formula with the same
        // truth value everywhere, so one unmarked slot of its negation
        // asserts the complement.
        SimpleFormula::OnLine(pe) => {
            SimpleFormula::OnLine(PartitionExpr::of(vec![tl::not(&line_tl(pe))], &[]))
        }
        SimpleFormula::OnRightRay(pe, z) => pointwise(&tl::not(&right_ray_tl(pe)), z),
        SimpleFormula::OnLeftRay(pe, z) => pointwise(&tl::not(&left_ray_tl(pe)), z),
        SimpleFormula::OnClosed(pe, y, z) => negate_closed(ctx, pe, y, z),
    }
}

/// Negation of the pattern filling the closed interval `[y, z]`.
fn negate_closed(ctx: &mut NegCtx, pe: &PartitionExpr, y: &str, z: &str) -> SimpleFormula {
    let n = pe.len();
    let d1 = pe.deltas[0].clone();
    let dn = pe.deltas[n - 1].clone();
    let mut out = vec![SimpleFormula::VarLess(z.to_string(), y.to_string())];
    // [y, y]: a single point carries the pattern iff there is one slot and
    // its formula holds there.
    if n == 1 {
        out.push(s_and2(
            SimpleFormula::VarEq(y.to_string(), z.to_string()),
            pointwise(&tl::not(&d1), y),
        ));
    } else {
        out.push(SimpleFormula::VarEq(y.to_string(), z.to_string()));
    }
    // y < z: the endpoints must sit in the outer pieces and the interior
    // must split for the rest; negate that conjunction.
    let neg_e = if n == 1 && pe.is_marked(1) {
        // A marked single slot cannot cover two points.
        s_true()
    } else if n == 1 {
        s_or(vec![
            pointwise(&tl::not(&d1), y),
            pointwise(&tl::not(&d1), z),
            s_and2(neg_suc(y, z), neg_part_open(ctx, pe, y, z)),
        ])
    } else {
        // The interior carries the middle slots plus whatever is left of the
        // outer pieces once the endpoints are removed; an unmarked outer
        // piece may or may not spill into the interior.
        let keeps_l: &[bool] = if pe.is_marked(1) { &[false] } else { &[true, false] };
        let keeps_r: &[bool] = if pe.is_marked(n) { &[false] } else { &[true, false] };
        let mut conj = Vec::new();
        for &kl in keeps_l {
            for &kr in keeps_r {
                let mut deltas = Vec::new();
                let mut marks = BTreeSet::new();
                if kl {
                    deltas.push(d1.clone());
                }
                for j in 2..n {
                    deltas.push(pe.deltas[j - 1].clone());
                    if pe.is_marked(j) {
                        marks.insert(deltas.len());
                    }
                }
                if kr {
                    deltas.push(dn.clone());
                }
                if deltas.is_empty() {
                    continue;
                }
                conj.push(neg_part_open(ctx, &PartitionExpr::new(deltas, marks), y, z));
            }
        }
        if n == 2 {
            // Two adjacent singletons leave an empty interior.
            conj.push(neg_suc(y, z));
        }
        s_or(vec![
            pointwise(&tl::not(&d1), y),
            pointwise(&tl::not(&dn), z),
            s_and(conj),
        ])
    };
    out.push(s_and2(SimpleFormula::VarLess(y.to_string(), z.to_string()), neg_e));
    s_or(out)
}

/// Negation of the pattern filling the open interval `(z0, z1)`: holds iff
/// the interior is empty or no splitting of it matches `pe`.
pub fn neg_part_open(
    ctx: &mut NegCtx,
    pe: &PartitionExpr,
    z0: &str,
    z1: &str,
) -> SimpleFormula {
    // Memoize on canonical endpoint names so every call site with the same
    // pattern shares one computation, whatever its endpoints are called.
    if z0 != CANON_LO || z1 != CANON_HI {
        let canon = neg_part_open(ctx, pe, CANON_LO, CANON_HI);
        return rename_vars(&canon, &endpoint_renaming(z0, z1));
    }
    let key = format!("pe:{pe}");
    if let Some(hit) = memo_get(&key) {
        return hit;
    }
    let mut parts = vec![empty_open(z0, z1)];
    for case in neg_part_open_cases(ctx, pe, z0, z1) {
        parts.push(s_and2(case.cond, case.form));
    }
    let out = s_or(parts);
    memo_put(key, out.clone());
    out
}

/// The scenario analysis behind [`neg_part_open`].
///
/// The returned order is: slot-1 never fails, slot-n never fails, failures
/// accumulate at an endpoint, first slot-1 failure at an interior point,
/// last slot-n failure at an interior point, then the three arrangements of
/// the case where both failure sets are bounded away only by gaps. On any
/// nonempty interior, either one of the first five conditions holds or both
/// outer slots reach a gap (slot 1 forward from `z0`, slot n backward from
/// `z1`), in which case the final three conditions subdivide; under each
/// condition the negation of the pattern is exactly the paired form.
pub fn neg_part_open_cases(
    ctx: &mut NegCtx,
    pe: &PartitionExpr,
    z0: &str,
    z1: &str,
) -> Vec<CaseSplit> {
    let n = pe.len();
    if n == 1 {
        let not_d = tl::not(&pe.deltas[0]);
        let mut form = vec![has_point(&not_d, z0, z1)];
        if pe.is_marked(1) {
            form.push(at_least2(z0, z1));
        }
        return vec![CaseSplit { cond: s_true(), form: s_or(form) }];
    }
    vec![
        case1(ctx, pe, z0, z1),
        mirrored_case(ctx, pe, z0, z1, case1),
        case2(pe, z0, z1),
        case3(ctx, pe, z0, z1),
        mirrored_case(ctx, pe, z0, z1, case3),
        case4(ctx, pe, z0, z1),
        case5(ctx, pe, z0, z1),
        case6(pe, z0, z1),
    ]
}

/// Builds the reflected variant of a scenario: run it on the flipped pattern
/// with the endpoints swapped, then read the results backwards.
fn mirrored_case(
    ctx: &mut NegCtx,
    pe: &PartitionExpr,
    z0: &str,
    z1: &str,
    case: fn(&mut NegCtx, &PartitionExpr, &str, &str) -> CaseSplit,
) -> CaseSplit {
    let flipped = flip_pe(pe);
    let split = case(ctx, &flipped, z1, z0);
    CaseSplit { cond: mirror_simple(&split.cond), form: mirror_simple(&split.form) }
}

/// Scenario: every interior point satisfies the first slot formula.
fn case1(ctx: &mut NegCtx, pe: &PartitionExpr, z0: &str, z1: &str) -> CaseSplit {
    CaseSplit {
        cond: all_open(&pe.deltas[0], z0, z1),
        form: case1_form(ctx, pe, z0, z1),
    }
}

/// The negation on `(a, b)` given that the whole interior satisfies slot 1.
fn case1_form(ctx: &mut NegCtx, pe: &PartitionExpr, a: &str, b: &str) -> SimpleFormula {
    let n = pe.len();
    if !pe.is_marked(1) {
        return neg_exists_prefix(ctx, pe, a, b, Side::Right);
    }
    // Slot 1 is a singleton, so it must grab a first interior point; that
    // point exists only as an immediate successor of `a`, and the remaining
    // slots must then fail beyond it.
    let w = ctx.fresh_var();
    let step = s_and(vec![
        suc(a, &w),
        SimpleFormula::VarLess(w.clone(), b.to_string()),
        neg_part_open(ctx, &pe.slice(2, n), &w, b),
    ]);
    s_or2(pointwise(&kplus(&tl::tt()), a), exists_simple(&step, &w))
}

/// Mirror of [`case1_form`]: the whole interior satisfies the last slot.
fn case1_form_mirror(ctx: &mut NegCtx, pe: &PartitionExpr, a: &str, b: &str) -> SimpleFormula {
    let flipped = flip_pe(pe);
    let inner = case1_form(ctx, &flipped, b, a);
    mirror_simple(&inner)
}

/// Scenario: outer-slot failures accumulate at the near endpoint, so the
/// outer piece cannot even start.
fn case2(pe: &PartitionExpr, z0: &str, z1: &str) -> CaseSplit {
    let d1 = &pe.deltas[0];
    let dn = &pe.deltas[pe.len() - 1];
    CaseSplit {
        cond: s_or2(
            pointwise(&kplus(&tl::not(d1)), z0),
            pointwise(&kminus(&tl::not(dn)), z1),
        ),
        form: s_true(),
    }
}

/// Scenario: the first slot-1 failure happens at an interior point `w`,
/// either attained there or accumulating just right of it.
fn case3(ctx: &mut NegCtx, pe: &PartitionExpr, z0: &str, z1: &str) -> CaseSplit {
    let d1 = pe.deltas[0].clone();
    let not_d1 = tl::not(&d1);
    let w = ctx.fresh_var();
    let inf_w = s_and(vec![
        SimpleFormula::VarLess(z0.to_string(), w.clone()),
        SimpleFormula::VarLess(w.clone(), z1.to_string()),
        s_or2(suc(z0, &w), all_open(&d1, z0, &w)),
        s_or2(pointwise(&not_d1, &w), pointwise(&kplus(&not_d1), &w)),
    ]);
    let mut all = vec![inf_w.clone()];
    for i in 1..=pe.len() {
        let split = if !pe.is_marked(i) && i == pe.len() {
            // Pieces 1..n filling (z0, w) would sit inside the all-slot-1
            // stretch left of the first failure.
            let full_low = s_or2(
                suc(z0, &w),
                s_and2(all_open(&d1, z0, &w), case1_form(ctx, pe, z0, &w)),
            );
            neg_a(ctx, pe, i, z0, &w, z1, Some(&full_low), None)
        } else {
            // For an unmarked slot 1 the "piece 1 continues past w" reading
            // is already impossible here: either slot 1 fails at w itself
            // (covered by the middle disjunct) or its failures accumulate
            // right of w and no piece can cross.
            neg_a(ctx, pe, i, z0, &w, z1, None, None)
        };
        all.push(split);
    }
    CaseSplit {
        cond: exists_simple(&inf_w, &w),
        form: exists_simple(&s_and(all), &w),
    }
}

/// Scenario: slot-1 failures start only past a gap, slot-n failures stop
/// before one, and an interior point separates the two homogeneous zones.
fn case4(ctx: &mut NegCtx, pe: &PartitionExpr, z0: &str, z1: &str) -> CaseSplit {
    let n = pe.len();
    let d1 = pe.deltas[0].clone();
    let dn = pe.deltas[n - 1].clone();
    let w = ctx.fresh_var();
    let in_w = s_and(vec![
        pointwise(&gamma_plus(&d1), z0),
        has_point(&tl::not(&d1), z0, z1),
        pointwise(&gamma_minus(&dn), z1),
        has_point(&tl::not(&dn), z0, z1),
        SimpleFormula::VarLess(z0.to_string(), w.clone()),
        SimpleFormula::VarLess(w.clone(), z1.to_string()),
        s_or2(suc(z0, &w), all_open(&d1, z0, &w)),
        s_or2(suc(&w, z1), all_open(&dn, &w, z1)),
    ]);
    let mut all = vec![in_w.clone()];
    for i in 1..=n {
        let split = if !pe.is_marked(i) && i == 1 {
            let full_high = s_or2(
                suc(&w, z1),
                s_and2(all_open(&dn, &w, z1), case1_form_mirror(ctx, pe, &w, z1)),
            );
            neg_a(ctx, pe, i, z0, &w, z1, None, Some(&full_high))
        } else if !pe.is_marked(i) && i == n {
            let full_low = s_or2(
                suc(z0, &w),
                s_and2(all_open(&d1, z0, &w), case1_form(ctx, pe, z0, &w)),
            );
            neg_a(ctx, pe, i, z0, &w, z1, Some(&full_low), None)
        } else {
            neg_a(ctx, pe, i, z0, &w, z1, None, None)
        };
        all.push(split);
    }
    CaseSplit {
        cond: exists_simple(&in_w, &w),
        form: exists_simple(&s_and(all), &w),
    }
}

/// Scenario: both outer gaps exist and their failure zones interleave
/// around some interior point, so the outer pieces cannot both fit.
fn case5(ctx: &mut NegCtx, pe: &PartitionExpr, z0: &str, z1: &str) -> CaseSplit {
    let n = pe.len();
    let d1 = pe.deltas[0].clone();
    let dn = pe.deltas[n - 1].clone();
    let w = ctx.fresh_var();
    let gammas = s_and2(
        pointwise(&gamma_plus(&d1), z0),
        pointwise(&gamma_minus(&dn), z1),
    );
    let between = s_and(vec![
        SimpleFormula::VarLess(z0.to_string(), w.clone()),
        SimpleFormula::VarLess(w.clone(), z1.to_string()),
        has_point(&tl::not(&d1), z0, &w),
        has_point(&tl::not(&dn), &w, z1),
    ]);
    let mut all = vec![between.clone()];
    for i in 2..n {
        all.push(neg_a(ctx, pe, i, z0, &w, z1, None, None));
    }
    CaseSplit {
        cond: s_and2(gammas, exists_simple(&between, &w)),
        form: exists_simple(&s_and(all), &w),
    }
}

/// Scenario: the two outer gaps coincide — the interior splits cleanly into
/// a slot-1 zone followed by a slot-n zone at one gap, with no overlap
/// stretch reaching it — and the pattern must bridge that gap to exist.
fn case6(pe: &PartitionExpr, z0: &str, z1: &str) -> CaseSplit {
    let n = pe.len();
    let d1 = pe.deltas[0].clone();
    let dn = pe.deltas[n - 1].clone();
    let reach = tl::until(&d1, &tl::and2(&d1, &ugap(&d1, &dn)));
    let cond = s_and(vec![
        pointwise(&gamma_plus(&d1), z0),
        has_point(&tl::not(&d1), z0, z1),
        pointwise(&gamma_minus(&dn), z1),
        has_point(&tl::not(&dn), z0, z1),
        part_open(&PartitionExpr::of(vec![d1.clone(), dn.clone()], &[]), z0, z1),
        pointwise(&tl::not(&reach), z0),
    ]);
    // The pattern holds iff some cut index i puts pieces 1..i before the
    // gap and the rest after, with piece i allowed to straddle it when
    // unmarked; negate that disjunction.
    let mut conj = Vec::new();
    for i in 1..=n {
        let mut tail = Vec::new();
        if i < n {
            tail.push(pointwise(&tl::not(&back_from_gap(pe, i + 1)), z1));
        }
        if !pe.is_marked(i) {
            tail.push(pointwise(&tl::not(&back_from_gap(pe, i)), z1));
        }
        conj.push(s_or2(
            pointwise(&tl::not(&front_to_gap(pe, i)), z0),
            s_and(tail),
        ));
    }
    CaseSplit { cond, form: s_and(conj) }
}

/// Pieces 1..i of the pattern, led by the singleton `{z0}`, fill `[z0, g)`
/// up to the slot-1 recognized gap `g`; read at `z0`.
fn front_to_gap(pe: &PartitionExpr, i: usize) -> TlFormula {
    let mut deltas = vec![tl::tt()];
    deltas.extend(pe.deltas[..i].iter().cloned());
    let mut marks: BTreeSet<usize> = pe
        .marked
        .iter()
        .filter(|&&j| j <= i)
        .map(|&j| j + 1)
        .collect();
    marks.insert(1);
    let padded = PartitionExpr::new(deltas, marks);
    build_f(&padded, &TerminalMode::ToGap(pe.deltas[0].clone()))[0].clone()
}

/// Pieces i..n of the pattern, trailed by the singleton `{z1}`, fill
/// `(g, z1]` from the slot-n recognized gap `g`; read at `z1` looking back.
fn back_from_gap(pe: &PartitionExpr, i: usize) -> TlFormula {
    let n = pe.len();
    let mut deltas = vec![tl::tt()];
    for j in (i..=n).rev() {
        deltas.push(mirror_tl(&pe.deltas[j - 1]));
    }
    let mut marks: BTreeSet<usize> = pe
        .marked
        .iter()
        .filter(|&&j| j >= i)
        .map(|&j| n - j + 2)
        .collect();
    marks.insert(1);
    let padded = PartitionExpr::new(deltas, marks);
    mirror_tl(&build_f(&padded, &TerminalMode::ToGap(mirror_tl(&pe.deltas[n - 1])))[0])
}

/// `not C<i` on `(z0, w)`: pieces 1..i-1 cannot fill it. Needs `i <= n` so
/// the recursion shrinks.
fn neg_c_less(
    ctx: &mut NegCtx,
    pe: &PartitionExpr,
    i: usize,
    z0: &str,
    w: &str,
) -> SimpleFormula {
    if i == 1 {
        neg_suc(z0, w)
    } else {
        neg_part_open(ctx, &pe.slice(1, i - 1), z0, w)
    }
}

/// `not C>i` on `(w, z1)`: pieces i+1..n cannot fill it. Needs `i >= 1`.
fn neg_c_greater(
    ctx: &mut NegCtx,
    pe: &PartitionExpr,
    i: usize,
    w: &str,
    z1: &str,
) -> SimpleFormula {
    if i == pe.len() {
        neg_suc(w, z1)
    } else {
        neg_part_open(ctx, &pe.slice(i + 1, pe.len()), w, z1)
    }
}

/// `not A_i(w)`: the interior point `w` cannot lie in piece `i`. For a
/// marked slot the sides must fail outright; for an unmarked one both the
/// "piece i starts/ends at w" and "piece i extends past w" readings must
/// fail. The extension readings at the outer slots would recurse on the
/// full pattern, so the caller passes a scenario-specific stand-in
/// (`full_low` for pieces 1..n on `(z0, w)`, `full_high` for pieces 1..n on
/// `(w, z1)`), or `None` when the scenario already rules the reading out.
#[allow(clippy::too_many_arguments)]
fn neg_a(
    ctx: &mut NegCtx,
    pe: &PartitionExpr,
    i: usize,
    z0: &str,
    w: &str,
    z1: &str,
    full_low: Option<&SimpleFormula>,
    full_high: Option<&SimpleFormula>,
) -> SimpleFormula {
    let n = pe.len();
    let not_di = tl::not(&pe.deltas[i - 1]);
    if pe.is_marked(i) {
        return s_or(vec![
            neg_c_less(ctx, pe, i, z0, w),
            pointwise(&not_di, w),
            neg_c_greater(ctx, pe, i, w, z1),
        ]);
    }
    let mut low = vec![neg_c_less(ctx, pe, i, z0, w)];
    if i < n {
        low.push(neg_c_less(ctx, pe, i + 1, z0, w));
    } else if let Some(f) = full_low {
        low.push(f.clone());
    }
    let mut high = vec![neg_c_greater(ctx, pe, i, w, z1)];
    if i > 1 {
        high.push(neg_c_greater(ctx, pe, i - 1, w, z1));
    } else if let Some(f) = full_high {
        high.push(f.clone());
    }
    s_or(vec![s_and(low), pointwise(&not_di, w), s_and(high)])
}

/// Which end of the interval a placement is anchored to.
pub enum Side {
    Left,
    Right,
}

/// Negates an anchored placement: for `Side::Left`, "some `b` strictly
/// inside `(z0, z1)` bounds a copy of the pattern on `(z0, b]`"; for
/// `Side::Right`, the mirror image "some `c` strictly inside bounds a copy
/// on `[c, z1)`".
fn neg_exists_prefix(
    ctx: &mut NegCtx,
    pe: &PartitionExpr,
    z0: &str,
    z1: &str,
    side: Side,
) -> SimpleFormula {
    match side {
        Side::Right => {
            let flipped = flip_pe(pe);
            let inner = neg_exists_prefix(ctx, &flipped, z1, z0, Side::Left);
            mirror_simple(&inner)
        }
        Side::Left => {
            // Lead with the singleton {z0}; the bounded slot formulas then
            // hold throughout their pieces, so a placement on (z0, b] is the
            // same as the head formula at z0 plus an interior chain of
            // points carrying the per-piece formulas in order.
            let mut deltas = vec![tl::tt()];
            deltas.extend(pe.deltas.iter().cloned());
            let mut marks: BTreeSet<usize> = pe.marked.iter().map(|&j| j + 1).collect();
            marks.insert(1);
            let padded = PartitionExpr::new(deltas, marks);
            let fs = build_f(&padded, &TerminalMode::Bounded);
            s_or2(
                pointwise(&tl::not(&fs[0]), z0),
                neg_exists_chain(ctx, &fs[1..], z0, z1),
            )
        }
    }
}

/// Negates "points t_1 < ... < t_n, all strictly inside `(z0, z1)`, satisfy
/// P_1, ..., P_n respectively". The scenario split mirrors the partition
/// one: where the P_1 points start and the P_n points stop.
fn neg_exists_chain(
    ctx: &mut NegCtx,
    ps: &[TlFormula],
    z0: &str,
    z1: &str,
) -> SimpleFormula {
    if ps.is_empty() {
        return s_false();
    }
    if z0 != CANON_LO || z1 != CANON_HI {
        let canon = neg_exists_chain(ctx, ps, CANON_LO, CANON_HI);
        return rename_vars(&canon, &endpoint_renaming(z0, z1));
    }
    let key = format!(
        "ch:{}",
        ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")
    );
    if let Some(hit) = memo_get(&key) {
        return hit;
    }
    let n = ps.len();
    let p1 = ps[0].clone();
    let pn = ps[n - 1].clone();
    let not_p1 = tl::not(&p1);
    let not_pn = tl::not(&pn);
    let mut parts = vec![empty_open(z0, z1)];
    if n == 1 {
        parts.push(all_open(&not_p1, z0, z1));
    } else {
        // No starting or no finishing point at all.
        parts.push(s_or2(all_open(&not_p1, z0, z1), all_open(&not_pn, z0, z1)));
        // Starting points accumulate right of z0: the first link is free.
        parts.push(s_and2(
            pointwise(&kplus(&p1), z0),
            neg_exists_chain(ctx, &ps[1..], z0, z1),
        ));
        parts.push(s_and2(
            pointwise(&kminus(&pn), z1),
            neg_exists_chain(ctx, &ps[..n - 1], z0, z1),
        ));
        // First P_1 point (attained or accumulating) at an interior w.
        {
            let w = ctx.fresh_var();
            let inf_w = s_and(vec![
                SimpleFormula::VarLess(z0.to_string(), w.clone()),
                SimpleFormula::VarLess(w.clone(), z1.to_string()),
                s_or2(suc(z0, &w), all_open(&not_p1, z0, &w)),
                s_or2(pointwise(&p1, &w), pointwise(&kplus(&p1), &w)),
            ]);
            let rest = neg_exists_chain(ctx, &ps[1..], &w, z1);
            parts.push(exists_simple(&s_and(vec![inf_w, rest]), &w));
        }
        // Last P_n point at an interior w.
        {
            let w = ctx.fresh_var();
            let sup_w = s_and(vec![
                SimpleFormula::VarLess(z0.to_string(), w.clone()),
                SimpleFormula::VarLess(w.clone(), z1.to_string()),
                s_or2(suc(&w, z1), all_open(&not_pn, &w, z1)),
                s_or2(pointwise(&pn, &w), pointwise(&kminus(&pn), &w)),
            ]);
            let rest = neg_exists_chain(ctx, &ps[..n - 1], z0, &w);
            parts.push(exists_simple(&s_and(vec![sup_w, rest]), &w));
        }
        // Both bounded only by gaps, with the P_n zone wholly before the
        // P_1 zone: no chain can cross back.
        parts.push(s_and(vec![
            pointwise(&gamma_plus(&not_p1), z0),
            has_point(&p1, z0, z1),
            pointwise(&gamma_minus(&not_pn), z1),
            has_point(&pn, z0, z1),
            part_open(&PartitionExpr::of(vec![not_p1.clone(), not_pn.clone()], &[]), z0, z1),
        ]));
        // Both bounded only by gaps but interleaved around w: every split of
        // the chain at w must fail on one side.
        {
            let w = ctx.fresh_var();
            let gammas = s_and2(
                pointwise(&gamma_plus(&not_p1), z0),
                pointwise(&gamma_minus(&not_pn), z1),
            );
            let between = s_and(vec![
                SimpleFormula::VarLess(z0.to_string(), w.clone()),
                SimpleFormula::VarLess(w.clone(), z1.to_string()),
                has_point(&p1, z0, &w),
                has_point(&pn, &w, z1),
            ]);
            let mut body = vec![between.clone()];
            for k in 1..n {
                body.push(s_or2(
                    neg_exists_chain(ctx, &ps[..k], z0, &w),
                    neg_exists_chain(ctx, &ps[k..], &w, z1),
                ));
            }
            for k in 2..n {
                body.push(s_or(vec![
                    neg_exists_chain(ctx, &ps[..k - 1], z0, &w),
                    pointwise(&tl::not(&ps[k - 1]), &w),
                    neg_exists_chain(ctx, &ps[k..], &w, z1),
                ]));
            }
            parts.push(s_and2(gammas, exists_simple(&s_and(body), &w)));
        }
    }
    let out = s_or(parts);
    memo_put(key, out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{compare, parse_model, GappedChain, Position};
    use crate::semantics::fo_eval::candidate_positions;
    use crate::semantics::{eval_point_predicate, eval_simple, Assignment, Evaluator};
    use crate::semantics::eval_simple_with;

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
        let p = tl::atom("P");
        let q = tl::atom("Q");
        vec![
            PartitionExpr::of(vec![tl::tt()], &[]),
            PartitionExpr::of(vec![p.clone()], &[]),
            PartitionExpr::of(vec![p.clone()], &[1]),
            PartitionExpr::of(vec![p.clone(), q.clone()], &[]),
            PartitionExpr::of(vec![p.clone(), q.clone()], &[1]),
            PartitionExpr::of(vec![p.clone(), q.clone()], &[2]),
            PartitionExpr::of(vec![p.clone(), q.clone()], &[1, 2]),
            PartitionExpr::of(vec![p.clone(), tl::tt(), q.clone()], &[]),
            PartitionExpr::of(vec![p.clone(), tl::tt(), q.clone()], &[2]),
            PartitionExpr::of(vec![q.clone(), p.clone()], &[]),
        ]
    }

    fn assignments(m: &GappedChain, vars: &[&str]) -> Vec<Assignment> {
        let positions = m.enumerate_sample_positions(2);
        let mut out = vec![Assignment::new()];
        for v in vars {
            let mut next = Vec::new();
            for a in &out {
                for p in &positions {
                    let mut b = a.clone();
                    b.insert(v.to_string(), p.clone());
                    next.push(b);
                }
            }
            out = next;
        }
        out
    }

    fn sample_formulas() -> Vec<SimpleFormula> {
        let p = tl::atom("P");
        let q = tl::atom("Q");
        let pe_p = PartitionExpr::of(vec![p.clone()], &[]);
        let pe_pm = PartitionExpr::of(vec![p.clone()], &[1]);
        let pe_pq = PartitionExpr::of(vec![p.clone(), q.clone()], &[]);
        let pe_mid = PartitionExpr::of(vec![tl::tt(), p.clone(), tl::tt()], &[2]);
        vec![
            SimpleFormula::VarLess("y".into(), "z".into()),
            SimpleFormula::VarEq("y".into(), "z".into()),
            SimpleFormula::OnLine(pe_pq.clone()),
            SimpleFormula::OnLeftRay(pe_p.clone(), "y".into()),
            SimpleFormula::OnRightRay(pe_pq.clone(), "z".into()),
            SimpleFormula::OnClosed(pe_pm.clone(), "y".into(), "y".into()),
            SimpleFormula::OnClosed(pe_p.clone(), "y".into(), "z".into()),
            SimpleFormula::OnClosed(pe_pq.clone(), "y".into(), "z".into()),
            SimpleFormula::OnClosed(pe_mid.clone(), "y".into(), "z".into()),
            s_and2(
                SimpleFormula::VarLess("y".into(), "z".into()),
                SimpleFormula::OnClosed(pe_pq, "y".into(), "z".into()),
            ),
            s_or2(
                SimpleFormula::OnClosed(pe_pm, "z".into(), "z".into()),
                SimpleFormula::OnLeftRay(pe_p, "z".into()),
            ),
        ]
    }

    #[test]
    fn probe_sizes() {
        for pe in some_pes() {
            let t0 = std::time::Instant::now();
            let mut ctx = NegCtx::new();
            let neg = neg_part_open(&mut ctx, &pe, "u", "v");
            let len = format!("{neg}").len();
            println!("pe={pe} len={len} time={:?}", t0.elapsed());
        }
    }

    #[test]
    fn negation_complements_sample_formulas() {
        for m in corpus() {
            for f in sample_formulas() {
                let neg = negate_simple(&f);
                let vars: Vec<String> = f.free_vars().into_iter().collect();
                let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
                let mut ev = Evaluator::new(&m);
                for a in assignments(&m, &var_refs) {
                    let got = eval_simple_with(&mut ev, &f, &a);
                    let flipped = eval_simple_with(&mut ev, &neg, &a);
                    assert_ne!(got, flipped, "{f} vs {neg} at {a:?} on {m}");
                }
            }
        }
    }

    #[test]
    fn open_interval_negation_complements() {
        for m in corpus() {
            for pe in some_pes() {
                let mut ctx = NegCtx::new();
                let neg = neg_part_open(&mut ctx, &pe, "u", "v");
                let pos = part_open(&pe, "u", "v");
                let mut ev = Evaluator::new(&m);
                for a in assignments(&m, &["u", "v"]) {
                    let got = eval_simple_with(&mut ev, &pos, &a);
                    let flipped = eval_simple_with(&mut ev, &neg, &a);
                    assert_ne!(got, flipped, "{pe} at {a:?} on {m}");
                }
            }
        }
    }

    #[test]
    fn mirroring_tracks_model_reversal() {
        for m in corpus() {
            let rev = m.reverse();
            for f in sample_formulas() {
                let mirrored = mirror_simple(&f);
                let vars: Vec<String> = f.free_vars().into_iter().collect();
                let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
                for a in assignments(&m, &var_refs) {
                    let b: Assignment = a
                        .iter()
                        .map(|(v, p)| (v.clone(), m.reverse_position(p)))
                        .collect();
                    assert_eq!(
                        eval_simple(&m, &f, &a).unwrap(),
                        eval_simple(&rev, &mirrored, &b).unwrap(),
                        "{f} at {a:?} on {m}"
                    );
                }
            }
        }
    }

    #[test]
    fn chain_negation_matches_direct_search() {
        let chains: Vec<Vec<TlFormula>> = vec![
            vec![tl::atom("P")],
            vec![tl::atom("P"), tl::atom("Q")],
            vec![tl::atom("Q"), tl::tt()],
            vec![tl::atom("P"), tl::atom("Q"), tl::atom("P")],
        ];
        for m in corpus() {
            for ps in &chains {
                let mut ctx = NegCtx::new();
                let neg = neg_exists_chain(&mut ctx, ps, "u", "v");
                let mut ev = Evaluator::new(&m);
                for a in assignments(&m, &["u", "v"]) {
                    let lo = &a["u"];
                    let hi = &a["v"];
                    let found = search_chain(&m, ps, lo, hi, &mut vec![]);
                    let negated = eval_simple_with(&mut ev, &neg, &a);
                    assert_eq!(found, !negated, "chain {ps:?} at {a:?} on {m}");
                }
            }
        }
    }

    /// Recursive search for an interior chain: each link ranges over the
    /// candidate positions relative to everything pinned so far.
    fn search_chain(
        m: &GappedChain,
        ps: &[TlFormula],
        lo: &Position,
        hi: &Position,
        picked: &mut Vec<Position>,
    ) -> bool {
        if ps.is_empty() {
            return true;
        }
        let mut pinned: Vec<&Position> = vec![lo, hi];
        pinned.extend(picked.iter());
        for c in candidate_positions(m, &pinned) {
            let above = compare(picked.last().unwrap_or(lo), &c) == std::cmp::Ordering::Less;
            let below = compare(&c, hi) == std::cmp::Ordering::Less;
            if above && below && eval_point_predicate(m, &ps[0], &c) {
                picked.push(c);
                if search_chain(m, &ps[1..], lo, hi, picked) {
                    picked.pop();
                    return true;
                }
                picked.pop();
            }
        }
        false
    }

    #[test]
    fn case_conditions_cover_nonempty_interiors() {
        for m in corpus() {
            for pe in some_pes().into_iter().filter(|pe| pe.len() >= 2) {
                let mut ctx = NegCtx::new();
                let cases = neg_part_open_cases(&mut ctx, &pe, "u", "v");
                let gap_pair = s_and2(
                    pointwise(&gamma_plus(&pe.deltas[0]), "u"),
                    pointwise(&gamma_minus(&pe.deltas[pe.len() - 1]), "v"),
                );
                let nonempty = negate_simple(&empty_open("u", "v"));
                let mut ev = Evaluator::new(&m);
                for a in assignments(&m, &["u", "v"]) {
                    if !eval_simple_with(&mut ev, &nonempty, &a) {
                        continue;
                    }
                    let single_sided = cases[..5]
                        .iter()
                        .any(|c| eval_simple_with(&mut ev, &c.cond, &a));
                    let both_gaps = eval_simple_with(&mut ev, &gap_pair, &a);
                    assert!(
                        single_sided || both_gaps,
                        "no scenario covers {pe} at {a:?} on {m}"
                    );
                }
            }
        }
    }
}
