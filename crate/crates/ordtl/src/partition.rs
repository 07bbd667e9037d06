//! Partition formulas and the simple/normal fragments built from them.
//!
//! A partition expression lists point predicates `d1..dn` and a set of
//! marked slots. It holds on an interval when the interval splits into n
//! consecutive nonempty pieces, the j-th piece satisfying `dj` throughout,
//! with every marked piece a single point. One-point pieces do not have to
//! be marked; marking forbids a piece from growing.
//!
//! Simple formulas apply partition expressions to closed variable-bounded
//! intervals, rays and the whole line, and combine them with conjunction,
//! disjunction and variable-order atoms — no negation: the negation module
//! rewrites negated simple formulas back into this fragment.

use crate::logic::tl::{self, TlFormula};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

/// `<d1;..;dn|{marks}>` — predicates per piece plus the marked (singleton)
/// slots, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionExpr {
    pub deltas: Vec<TlFormula>,
    pub marked: BTreeSet<usize>,
}

impl PartitionExpr {
    /// Builds an expression; slots are 1-based and marks must be in range.
    pub fn new(deltas: Vec<TlFormula>, marked: BTreeSet<usize>) -> PartitionExpr {
        assert!(!deltas.is_empty(), "a partition expression needs a slot");
        assert!(
            marked.iter().all(|&j| (1..=deltas.len()).contains(&j)),
            "marked slot out of range"
        );
        PartitionExpr { deltas, marked }
    }

    /// Convenience: marks given as a slice.
    pub fn of(deltas: Vec<TlFormula>, marked: &[usize]) -> PartitionExpr {
        PartitionExpr::new(deltas, marked.iter().copied().collect())
    }

    /// Number of slots.
    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_marked(&self, slot: usize) -> bool {
        self.marked.contains(&slot)
    }

    /// The same pattern read right to left.
    pub fn mirror(&self) -> PartitionExpr {
        let n = self.len();
        PartitionExpr {
            deltas: self.deltas.iter().rev().cloned().collect(),
            marked: self.marked.iter().map(|&j| n + 1 - j).collect(),
        }
    }

    /// A one-slot slice view helper: slots `from..=to`, marks shifted.
    pub fn slice(&self, from: usize, to: usize) -> PartitionExpr {
        assert!(1 <= from && from <= to && to <= self.len());
        PartitionExpr {
            deltas: self.deltas[from - 1..to].to_vec(),
            marked: self
                .marked
                .iter()
                .filter(|&&j| from <= j && j <= to)
                .map(|&j| j - from + 1)
                .collect(),
        }
    }
}

impl fmt::Display for PartitionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, d) in self.deltas.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", d)?;
        }
        write!(f, " |")?;
        for j in &self.marked {
            write!(f, " {}", j)?;
        }
        write!(f, ">")
    }
}

/// Splitting a pattern at a chosen point of its interval: all the ways
/// `Part(pe)` on `[a,b]` with `c` in `[a,b]` decomposes into a left pattern
/// on `[a,c]` and a right pattern on `[c,b]`. The split slot's piece either
/// is the single point `c` (marked slot: marked on both sides) or straddles
/// `c` (unmarked: unmarked on both sides, `c` shared by both halves).
pub fn split_pe(pe: &PartitionExpr) -> Vec<(PartitionExpr, PartitionExpr)> {
    let n = pe.len();
    let mut out = Vec::with_capacity(n);
    for s in 1..=n {
        let left_marks: BTreeSet<usize> = pe
            .marked
            .iter()
            .filter(|&&t| t < s || (t == s && pe.is_marked(s)))
            .copied()
            .collect();
        let mut right_marks: BTreeSet<usize> = pe
            .marked
            .iter()
            .filter(|&&t| t > s)
            .map(|&t| t - s + 1)
            .collect();
        if pe.is_marked(s) {
            right_marks.insert(1);
        }
        out.push((
            PartitionExpr::new(pe.deltas[..s].to_vec(), left_marks),
            PartitionExpr::new(pe.deltas[s - 1..].to_vec(), right_marks),
        ));
    }
    out
}

/// A simple formula: a positive combination of variable-order atoms and
/// partition expressions applied to intervals named by variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimpleFormula {
    /// `a < b` between free variables.
    VarLess(String, String),
    /// `a = b` between free variables.
    VarEq(String, String),
    /// The pattern holds on the whole order.
    OnLine(PartitionExpr),
    /// The pattern holds on `(-inf, z]`.
    OnLeftRay(PartitionExpr, String),
    /// The pattern holds on `[z, +inf)`.
    OnRightRay(PartitionExpr, String),
    /// The pattern holds on `[y, z]` (false unless `y <= z`).
    OnClosed(PartitionExpr, String, String),
    And(Vec<SimpleFormula>),
    Or(Vec<SimpleFormula>),
}

/// A simple formula that always holds: the one-slot unmarked pattern with a
/// trivially true predicate covers any whole (nonempty) order.
pub fn s_true() -> SimpleFormula {
    SimpleFormula::OnLine(PartitionExpr::of(vec![tl::tt()], &[]))
}

/// A simple formula that never holds.
pub fn s_false() -> SimpleFormula {
    SimpleFormula::OnLine(PartitionExpr::of(vec![tl::ff()], &[]))
}

fn is_s_true(f: &SimpleFormula) -> bool {
    matches!(f, SimpleFormula::OnLine(pe)
        if pe.len() == 1 && !pe.is_marked(1) && tl::is_tt(&pe.deltas[0]))
}

fn is_s_false(f: &SimpleFormula) -> bool {
    matches!(f, SimpleFormula::OnLine(pe)
        if pe.len() == 1 && !pe.is_marked(1) && tl::is_ff(&pe.deltas[0]))
}

// Duplicate detection in the n-ary constructors keys small subformulas by
// their rendering; larger ones are kept unconditionally, since rendering
// them at every construction level would dominate the build.
fn small_key(f: &SimpleFormula) -> Option<String> {
    const CUTOFF: usize = 24;
    fn weight(f: &SimpleFormula, budget: &mut usize) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        match f {
            SimpleFormula::And(ps) | SimpleFormula::Or(ps) => {
                ps.iter().all(|p| weight(p, budget))
            }
            _ => true,
        }
    }
    let mut budget = CUTOFF;
    if weight(f, &mut budget) {
        Some(format!("{f}"))
    } else {
        None
    }
}

/// n-ary conjunction; empty input collapses to [`s_true`]. Flattens nested
/// conjunctions, folds constants, and drops repeated small conjuncts.
pub fn s_and(parts: Vec<SimpleFormula>) -> SimpleFormula {
    let mut flat = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |flat: &mut Vec<SimpleFormula>, q: SimpleFormula| -> bool {
        if is_s_false(&q) {
            return false;
        }
        if is_s_true(&q) {
            return true;
        }
        match small_key(&q) {
            Some(key) => {
                if seen.insert(key) {
                    flat.push(q);
                }
            }
            None => flat.push(q),
        }
        true
    };
    for p in parts {
        match p {
            SimpleFormula::And(inner) => {
                for q in inner {
                    if !push(&mut flat, q) {
                        return s_false();
                    }
                }
            }
            other => {
                if !push(&mut flat, other) {
                    return s_false();
                }
            }
        }
    }
    match flat.len() {
        0 => s_true(),
        1 => flat.pop().unwrap(),
        _ => SimpleFormula::And(flat),
    }
}

/// n-ary disjunction; empty input collapses to [`s_false`]. Flattens nested
/// disjunctions, folds constants, and drops repeated small disjuncts.
pub fn s_or(parts: Vec<SimpleFormula>) -> SimpleFormula {
    let mut flat = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |flat: &mut Vec<SimpleFormula>, q: SimpleFormula| -> bool {
        if is_s_true(&q) {
            return false;
        }
        if is_s_false(&q) {
            return true;
        }
        match small_key(&q) {
            Some(key) => {
                if seen.insert(key) {
                    flat.push(q);
                }
            }
            None => flat.push(q),
        }
        true
    };
    for p in parts {
        match p {
            SimpleFormula::Or(inner) => {
                for q in inner {
                    if !push(&mut flat, q) {
                        return s_true();
                    }
                }
            }
            other => {
                if !push(&mut flat, other) {
                    return s_true();
                }
            }
        }
    }
    match flat.len() {
        0 => s_false(),
        1 => flat.pop().unwrap(),
        _ => SimpleFormula::Or(flat),
    }
}

/// Binary conjunction convenience.
pub fn s_and2(a: SimpleFormula, b: SimpleFormula) -> SimpleFormula {
    s_and(vec![a, b])
}

/// Binary disjunction convenience.
pub fn s_or2(a: SimpleFormula, b: SimpleFormula) -> SimpleFormula {
    s_or(vec![a, b])
}

impl SimpleFormula {
    /// Free variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Whether the variable `z` occurs.
    pub fn mentions(&self, z: &str) -> bool {
        match self {
            SimpleFormula::VarLess(a, b) | SimpleFormula::VarEq(a, b) => a == z || b == z,
            SimpleFormula::OnLine(_) => false,
            SimpleFormula::OnLeftRay(_, v) | SimpleFormula::OnRightRay(_, v) => v == z,
            SimpleFormula::OnClosed(_, y, v) => y == z || v == z,
            SimpleFormula::And(ps) | SimpleFormula::Or(ps) => ps.iter().any(|p| p.mentions(z)),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            SimpleFormula::VarLess(a, b) | SimpleFormula::VarEq(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            SimpleFormula::OnLine(_) => {}
            SimpleFormula::OnLeftRay(_, z) | SimpleFormula::OnRightRay(_, z) => {
                out.insert(z.clone());
            }
            SimpleFormula::OnClosed(_, y, z) => {
                out.insert(y.clone());
                out.insert(z.clone());
            }
            SimpleFormula::And(parts) | SimpleFormula::Or(parts) => {
                for p in parts {
                    p.collect_vars(out);
                }
            }
        }
    }

    /// Renames free variables according to the map.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> SimpleFormula {
        let r = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            SimpleFormula::VarLess(a, b) => SimpleFormula::VarLess(r(a), r(b)),
            SimpleFormula::VarEq(a, b) => SimpleFormula::VarEq(r(a), r(b)),
            SimpleFormula::OnLine(pe) => SimpleFormula::OnLine(pe.clone()),
            SimpleFormula::OnLeftRay(pe, z) => SimpleFormula::OnLeftRay(pe.clone(), r(z)),
            SimpleFormula::OnRightRay(pe, z) => SimpleFormula::OnRightRay(pe.clone(), r(z)),
            SimpleFormula::OnClosed(pe, y, z) => SimpleFormula::OnClosed(pe.clone(), r(y), r(z)),
            SimpleFormula::And(parts) => {
                SimpleFormula::And(parts.iter().map(|p| p.rename(map)).collect())
            }
            SimpleFormula::Or(parts) => {
                SimpleFormula::Or(parts.iter().map(|p| p.rename(map)).collect())
            }
        }
    }
}

impl fmt::Display for SimpleFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleFormula::VarLess(a, b) => write!(f, "(< {} {})", a, b),
            SimpleFormula::VarEq(a, b) => write!(f, "(= {} {})", a, b),
            SimpleFormula::OnLine(pe) => write!(f, "line:{}", pe),
            SimpleFormula::OnLeftRay(pe, z) => write!(f, "(*,{}]:{}", z, pe),
            SimpleFormula::OnRightRay(pe, z) => write!(f, "[{},*):{}", z, pe),
            SimpleFormula::OnClosed(pe, y, z) => write!(f, "[{},{}]:{}", y, z, pe),
            SimpleFormula::And(parts) | SimpleFormula::Or(parts) => {
                write!(f, "({}", if matches!(self, SimpleFormula::And(_)) { "&" } else { "|" })?;
                for p in parts {
                    write!(f, " {}", p)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Conjunction of two partition constraints on the same interval, as a
/// disjunction of single partition expressions. A common refinement of an
/// m-piece and a k-piece partition is a monotone staircase of cells through
/// the m-by-k grid from (1,1) to (m,k); each cell contributes the slot
/// `pa and qb`, marked when either source slot is. A marked source slot must
/// stay a single point, so the staircase may not linger in its row or
/// column.
pub fn pe_conjoin(p: &PartitionExpr, q: &PartitionExpr) -> Vec<PartitionExpr> {
    thread_local! {
        static CACHE: std::cell::RefCell<std::collections::HashMap<String, Vec<PartitionExpr>>> =
            std::cell::RefCell::new(std::collections::HashMap::new());
    }
    let key = format!("{p}\u{1}{q}");
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let (m, k) = (p.len(), q.len());
    let mut out: Vec<PartitionExpr> = Vec::new();
    // Cells along the current path as (row, col), always ending at the
    // frontier; extended depth-first.
    let mut stack: Vec<Vec<(usize, usize)>> = vec![vec![(1, 1)]];
    while let Some(path) = stack.pop() {
        let &(a, b) = path.last().unwrap();
        if a == m && b == k {
            let deltas = path
                .iter()
                .map(|&(a, b)| tl::and2(&p.deltas[a - 1], &q.deltas[b - 1]))
                .collect();
            let marked = path
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| p.is_marked(a) || q.is_marked(b))
                .map(|(i, _)| i + 1)
                .collect();
            let pe = PartitionExpr::new(deltas, marked);
            if !out.contains(&pe) {
                out.push(pe);
            }
            continue;
        }
        let mut push = |next: (usize, usize)| {
            let mut longer = path.clone();
            longer.push(next);
            stack.push(longer);
        };
        if a < m && b < k {
            push((a + 1, b + 1));
        }
        // Staying in row a gives its piece another cell: only if unmarked.
        if b < k && !p.is_marked(a) {
            push((a, b + 1));
        }
        if a < m && !q.is_marked(b) {
            push((a + 1, b));
        }
    }
    let out = prune_subsumed(out);
    CACHE.with(|c| c.borrow_mut().insert(key, out.clone()));
    out
}

// A slot-level implication check: every point satisfying `x` satisfies `y`.
// Syntactic but effective here, since slots are built by conjoining: `y` is
// trivially true, equal to `x`, or a subset of `x`'s conjuncts.
fn slot_implies(x: &TlFormula, y: &TlFormula) -> bool {
    if tl::is_tt(y) || x == y {
        return true;
    }
    fn parts(f: &TlFormula) -> &[TlFormula] {
        match f.node() {
            crate::logic::tl::TlNode::And(ps) => ps,
            _ => std::slice::from_ref(f),
        }
    }
    let xs = parts(x);
    parts(y).iter().all(|c| xs.contains(c))
}

/// Whether every interval decomposition matching `a` also matches `b`:
/// `b`'s pieces must be coverable by unions of consecutive `a`-pieces whose
/// slots all imply the covering slot, singleton pieces staying singletons.
pub fn pe_subsumes(a: &PartitionExpr, b: &PartitionExpr) -> bool {
    let (m, k) = (a.len(), b.len());
    if k > m || k >= 64 {
        return false;
    }
    // Bit j of `reach`: the first j slots of b are covered by the a-slots
    // consumed so far. One row per a-slot, rolled forward.
    let mut reach: u64 = 1;
    for i in 1..=m {
        let mut next: u64 = 0;
        for j in 1..=k {
            if !slot_implies(&a.deltas[i - 1], &b.deltas[j - 1]) {
                continue;
            }
            // a-slot i starts b-slot j's span; a marked b-slot is a single
            // point, so its span must be one marked a-slot.
            if reach & (1 << (j - 1)) != 0 && (!b.is_marked(j) || a.is_marked(i)) {
                next |= 1 << j;
            }
            // a-slot i extends b-slot j's span.
            if reach & (1 << j) != 0 && !b.is_marked(j) {
                next |= 1 << j;
            }
        }
        reach = next;
    }
    reach & (1 << k) != 0
}

// Keeps only the maximal patterns of a disjunction: anything implying a
// kept alternative is dropped.
fn prune_subsumed(pes: Vec<PartitionExpr>) -> Vec<PartitionExpr> {
    let mut kept: Vec<PartitionExpr> = Vec::new();
    for pe in pes {
        if kept.iter().any(|k| pe_subsumes(&pe, k)) {
            continue;
        }
        kept.retain(|k| !pe_subsumes(k, &pe));
        kept.push(pe);
    }
    kept
}

/// One disjunct of a normal form: equalities binding dropped variables to
/// their representatives, then partition constraints arranged along a strict
/// chain of the remaining variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalDisjunct {
    /// Each pair `(v, r)` asserts `v = r`; `v` occurs nowhere else.
    pub eqs: Vec<(String, String)>,
    pub shape: DisjunctShape,
}

/// The variable-free or chain-shaped core of a disjunct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DisjunctShape {
    /// A single partition constraint on the whole order.
    Line(PartitionExpr),
    /// `vars = z1 < .. < zn` with constraints on `(*, z1]`, each `[zi,
    /// z(i+1)]`, and `[zn, *)`. `windows` has `n - 1` entries.
    Chain {
        vars: Vec<String>,
        left: PartitionExpr,
        windows: Vec<PartitionExpr>,
        right: PartitionExpr,
    },
}

/// A disjunction of normal disjuncts, equivalent to the simple formula it
/// was computed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub disjuncts: Vec<NormalDisjunct>,
}

fn pe_true() -> PartitionExpr {
    PartitionExpr::of(vec![tl::tt()], &[])
}

/// Renders a normal form back as a simple formula.
pub fn nf_to_simple(nf: &NormalForm) -> SimpleFormula {
    let mut parts = Vec::new();
    for d in &nf.disjuncts {
        let mut conj: Vec<SimpleFormula> = d
            .eqs
            .iter()
            .map(|(v, r)| SimpleFormula::VarEq(v.clone(), r.clone()))
            .collect();
        match &d.shape {
            DisjunctShape::Line(pe) => conj.push(SimpleFormula::OnLine(pe.clone())),
            DisjunctShape::Chain {
                vars,
                left,
                windows,
                right,
            } => {
                conj.push(SimpleFormula::OnLeftRay(left.clone(), vars[0].clone()));
                for (i, w) in windows.iter().enumerate() {
                    conj.push(SimpleFormula::VarLess(vars[i].clone(), vars[i + 1].clone()));
                    conj.push(SimpleFormula::OnClosed(
                        w.clone(),
                        vars[i].clone(),
                        vars[i + 1].clone(),
                    ));
                }
                conj.push(SimpleFormula::OnRightRay(
                    right.clone(),
                    vars.last().unwrap().clone(),
                ));
            }
        }
        parts.push(s_and(conj));
    }
    s_or(parts)
}

/// The always-true leaf produced when an order atom folds away.
fn is_true_leaf(f: &SimpleFormula) -> bool {
    is_s_true(f)
}

// Specializes a formula to one weak order of its variables: order atoms fold
// to constants and interval atoms the order contradicts vanish. None means
// the formula is false everywhere the order holds.
fn specialize(f: &SimpleFormula, level: &BTreeMap<String, usize>) -> Option<SimpleFormula> {
    match f {
        SimpleFormula::VarEq(a, b) => {
            if level[a] == level[b] {
                Some(s_true())
            } else {
                None
            }
        }
        SimpleFormula::VarLess(a, b) => {
            if level[a] < level[b] {
                Some(s_true())
            } else {
                None
            }
        }
        SimpleFormula::OnClosed(pe, a, b) => {
            if level[a] > level[b] || (level[a] == level[b] && pe.len() > 1) {
                None
            } else {
                Some(f.clone())
            }
        }
        SimpleFormula::And(ps) => {
            let mut out = Vec::new();
            for p in ps {
                let s = specialize(p, level)?;
                if !is_true_leaf(&s) {
                    out.push(s);
                }
            }
            Some(s_and(out))
        }
        SimpleFormula::Or(ps) => {
            let mut out = Vec::new();
            for p in ps {
                if let Some(s) = specialize(p, level) {
                    if is_true_leaf(&s) {
                        return Some(s);
                    }
                    out.push(s);
                }
            }
            if out.is_empty() {
                None
            } else {
                Some(s_or(out))
            }
        }
        leaf => Some(leaf.clone()),
    }
}

// All orderings-with-ties of `vars`: lists of disjoint blocks, earlier
// blocks strictly below later ones, variables within a block equal.
fn weak_orders(vars: &[String]) -> Vec<Vec<Vec<String>>> {
    let mut orders: Vec<Vec<Vec<String>>> = vec![Vec::new()];
    for v in vars {
        let mut next = Vec::new();
        for ord in &orders {
            for i in 0..ord.len() {
                let mut o = ord.clone();
                o[i].push(v.clone());
                next.push(o);
            }
            for i in 0..=ord.len() {
                let mut o = ord.clone();
                o.insert(i, vec![v.clone()]);
                next.push(o);
            }
        }
        orders = next;
    }
    orders
}

// All ways to cut `pe` into `parts` consecutive patterns, splitting at
// `parts - 1` interior points left to right.
fn distribute(pe: &PartitionExpr, parts: usize) -> Vec<Vec<PartitionExpr>> {
    if parts == 1 {
        return vec![vec![pe.clone()]];
    }
    let mut out = Vec::new();
    for (l, r) in split_pe(pe) {
        for mut rest in distribute(&r, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(l.clone());
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

// One partially merged disjunct under a fixed variable placement. Buckets:
// 0 is the left ray up to the first block, bucket i in 1..n the window
// between blocks i-1 and i, bucket n the right ray; with no variables there
// is a single whole-line bucket. Point constraints per block are deferred
// and folded in at packaging time.
#[derive(Clone)]
struct BuildState {
    buckets: Vec<PartitionExpr>,
    points: BTreeMap<usize, TlFormula>,
}

fn state_key(st: &BuildState) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for b in &st.buckets {
        let _ = write!(s, "{b};");
    }
    for (j, d) in &st.points {
        let _ = write!(s, "@{j}:{d};");
    }
    s
}

fn dedup_states(states: Vec<BuildState>) -> Vec<BuildState> {
    let mut uniq = Vec::new();
    let mut seen = HashSet::new();
    for st in states {
        if seen.insert(state_key(&st)) {
            uniq.push(st);
        }
    }
    uniq
}

// Drops states whose every bucket and point constraint refines another
// state's. Quadratic in the worst case, so coarse states are tried first
// (sorting by total slots) with a per-bucket length prefilter; `min` sets
// the frontier size below which the pass is not worth its cost.
fn prune_states(states: Vec<BuildState>, min: usize) -> Vec<BuildState> {
    if states.len() < min.max(2) {
        return states;
    }
    let mut order: Vec<(Vec<usize>, BuildState)> = states
        .into_iter()
        .map(|st| {
            let lens: Vec<usize> = st.buckets.iter().map(|b| b.len()).collect();
            (lens, st)
        })
        .collect();
    order.sort_by_key(|(lens, _)| lens.iter().sum::<usize>());
    let mut kept: Vec<(Vec<usize>, BuildState)> = Vec::new();
    'next: for (lens, st) in order {
        for (kl, k) in &kept {
            // A state only refines one whose buckets are all at most as
            // long as its own.
            if kl.iter().zip(&lens).all(|(a, b)| a <= b) && state_subsumes(&st, k) {
                continue 'next;
            }
        }
        kept.push((lens, st));
    }
    kept.into_iter().map(|(_, st)| st).collect()
}

// Whether state `a` describes a subset of what state `b` describes.
fn state_subsumes(a: &BuildState, b: &BuildState) -> bool {
    for (i, bb) in b.buckets.iter().enumerate() {
        if !pe_subsumes(&a.buckets[i], bb) {
            return false;
        }
    }
    b.points.iter().all(|(j, d)| {
        a.points
            .get(j)
            .is_some_and(|ad| slot_implies(ad, d))
    })
}

// Spreads `pe` over buckets `from..=to` of a state, branching over the cuts
// and the refinements of each touched bucket; refinements with an
// unsatisfiable slot are dropped.
fn spread_state(st: &BuildState, pe: &PartitionExpr, from: usize, to: usize) -> Vec<BuildState> {
    let mut out = Vec::new();
    for ch in distribute(pe, to - from + 1) {
        let mut states = vec![st.clone()];
        for (off, part) in ch.iter().enumerate() {
            let mut next = Vec::new();
            for s in &states {
                for r in pe_conjoin(&s.buckets[from + off], part) {
                    if r.deltas.iter().all(|d| !tl::is_ff(d)) {
                        let mut s2 = s.clone();
                        s2.buckets[from + off] = r;
                        next.push(s2);
                    }
                }
            }
            states = next;
            if states.is_empty() {
                break;
            }
        }
        out.extend(states);
    }
    out
}

// Applies a specialized formula to a set of partial states: conjunction
// threads the states through each part, disjunction unions the outcomes,
// and a leaf merges its constraint into the buckets it touches. States are
// deduplicated at every step, which keeps repeated subformulas from
// multiplying the state set.
fn apply_constraints(
    states: Vec<BuildState>,
    f: &SimpleFormula,
    level: &BTreeMap<String, usize>,
    nblocks: usize,
) -> Vec<BuildState> {
    if states.is_empty() {
        return states;
    }
    match f {
        SimpleFormula::And(ps) => {
            let mut acc = states;
            for p in ps {
                acc = apply_constraints(acc, p, level, nblocks);
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        SimpleFormula::Or(ps) => {
            // The union is deduplicated as it accumulates and pruned in
            // geometrically spaced rounds, so a wide disjunction over an
            // already broad frontier cannot pile up an enormous
            // intermediate. Keys of pruned states stay in `seen`: a later
            // duplicate of a dropped state would only be dropped again.
            let mut out: Vec<BuildState> = Vec::new();
            let mut seen = HashSet::new();
            let mut next_prune = 3000;
            for p in ps {
                for st in apply_constraints(states.clone(), p, level, nblocks) {
                    if seen.insert(state_key(&st)) {
                        out.push(st);
                    }
                }
                if out.len() >= next_prune {
                    out = prune_states(out, 2);
                    next_prune = (out.len() * 2).max(3000);
                }
            }
            prune_states(out, 2)
        }
        SimpleFormula::VarEq(a, b) => {
            if level[a] == level[b] {
                states
            } else {
                Vec::new()
            }
        }
        SimpleFormula::VarLess(a, b) => {
            if level[a] < level[b] {
                states
            } else {
                Vec::new()
            }
        }
        leaf => {
            if is_true_leaf(leaf) {
                return states;
            }
            let buckets = if nblocks == 0 { 1 } else { nblocks + 1 };
            let mut out = Vec::new();
            for st in &states {
                match leaf {
                    SimpleFormula::OnLine(pe) => {
                        out.extend(spread_state(st, pe, 0, buckets - 1));
                    }
                    SimpleFormula::OnLeftRay(pe, v) => {
                        out.extend(spread_state(st, pe, 0, level[v]));
                    }
                    SimpleFormula::OnRightRay(pe, v) => {
                        out.extend(spread_state(st, pe, level[v] + 1, nblocks));
                    }
                    SimpleFormula::OnClosed(pe, a, b) => {
                        let (i, j) = (level[a], level[b]);
                        if i > j || (i == j && pe.len() > 1) {
                            continue;
                        }
                        if i == j {
                            let cur = st.points.get(&i).cloned().unwrap_or_else(tl::tt);
                            let merged = tl::and2(&cur, &pe.deltas[0]);
                            if tl::is_ff(&merged) {
                                continue;
                            }
                            let mut s2 = st.clone();
                            s2.points.insert(i, merged);
                            out.push(s2);
                        } else {
                            out.extend(spread_state(st, pe, i + 1, j));
                        }
                    }
                    _ => unreachable!(),
                }
            }
            prune_states(dedup_states(out), 64)
        }
    }
}

// Folds deferred point constraints into an adjacent bucket — a single
// variable has no window, so its right ray is constrained both ways it can
// look — and packages a state as normal disjuncts.
fn finish_state(
    st: &BuildState,
    blocks: &[Vec<String>],
    out: &mut Vec<NormalDisjunct>,
    seen: &mut HashSet<String>,
) {
    let n = blocks.len();
    let reps: Vec<String> = blocks
        .iter()
        .map(|b| b.iter().min().unwrap().clone())
        .collect();
    let mut eqs = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for v in b {
            if *v != reps[i] {
                eqs.push((v.clone(), reps[i].clone()));
            }
        }
    }
    let mut choices: Vec<Vec<PartitionExpr>> = vec![st.buckets.clone()];
    for (&j, d) in &st.points {
        let single = PartitionExpr::of(vec![d.clone()], &[1]);
        let lead = PartitionExpr::of(vec![d.clone(), tl::tt()], &[1]);
        let trail = PartitionExpr::of(vec![tl::tt(), d.clone()], &[2]);
        let opts: Vec<(usize, PartitionExpr)> = if n == 1 {
            vec![(1, lead), (1, single)]
        } else if j < n - 1 {
            vec![(j + 1, lead)]
        } else {
            vec![(n - 1, trail)]
        };
        let mut next = Vec::new();
        for ch in &choices {
            for (bi, opt) in &opts {
                for r in pe_conjoin(&ch[*bi], opt) {
                    if r.deltas.iter().all(|dd| !tl::is_ff(dd)) {
                        let mut c2 = ch.clone();
                        c2[*bi] = r;
                        next.push(c2);
                    }
                }
            }
        }
        choices = next;
    }
    for choice in choices {
        let shape = if n == 0 {
            DisjunctShape::Line(choice[0].clone())
        } else {
            DisjunctShape::Chain {
                vars: reps.clone(),
                left: choice[0].clone(),
                windows: choice[1..n].to_vec(),
                right: choice[n].clone(),
            }
        };
        let d = NormalDisjunct {
            eqs: eqs.clone(),
            shape,
        };
        if seen.insert(disjunct_key(&d)) {
            out.push(d);
        }
    }
}

// A stable text key for dedup of normal disjuncts.
fn disjunct_key(d: &NormalDisjunct) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for (v, r) in &d.eqs {
        let _ = write!(s, "{v}={r};");
    }
    match &d.shape {
        DisjunctShape::Line(pe) => {
            let _ = write!(s, "L{pe}");
        }
        DisjunctShape::Chain {
            vars,
            left,
            windows,
            right,
        } => {
            let _ = write!(s, "C{}|{left}", vars.join(","));
            for w in windows {
                let _ = write!(s, "|{w}");
            }
            let _ = write!(s, "|{right}");
        }
    }
    s
}

/// Rewrites a simple formula as a normal form: a disjunction over variable
/// placements, each with partition constraints split along its chain.
///
/// The weak orders of the free variables are enumerated first and the
/// formula specialized to each before distribution: order atoms turn into
/// constants under a fixed order, which collapses most of the disjunctive
/// structure before it can multiply.
pub fn simple_to_normal(f: &SimpleFormula) -> NormalForm {
    let vars: Vec<String> = f.free_vars().into_iter().collect();
    let mut disjuncts = Vec::new();
    let mut seen = HashSet::new();
    for blocks in weak_orders(&vars) {
        let mut level: BTreeMap<String, usize> = BTreeMap::new();
        for (i, b) in blocks.iter().enumerate() {
            for v in b {
                level.insert(v.clone(), i);
            }
        }
        let Some(residual) = specialize(f, &level) else {
            continue;
        };
        let buckets = if blocks.is_empty() { 1 } else { blocks.len() + 1 };
        let init = BuildState {
            buckets: vec![pe_true(); buckets],
            points: BTreeMap::new(),
        };
        let states = apply_constraints(vec![init], &residual, &level, blocks.len());
        for st in prune_states(states, 2) {
            finish_state(&st, &blocks, &mut disjuncts, &mut seen);
        }
    }
    NormalForm { disjuncts }
}

// Joins the pattern ending at an eliminated point with the one starting
// there. The point becomes an explicit marked singleton `last(pl) and
// first(pr)`; each neighbouring remainder is either dropped (the piece was
// just that point) or kept. A remainder may only be dropped when nothing
// pins the interval end away from the point: `strict_left` says the left
// interval starts at a strictly earlier chain point, so with one slot its
// remainder cannot be empty. Marked end slots force their remainder empty.
fn glue(
    pl: &PartitionExpr,
    pr: &PartitionExpr,
    strict_left: bool,
    strict_right: bool,
) -> Vec<PartitionExpr> {
    let (r, s) = (pl.len(), pr.len());
    let m_l = pl.is_marked(r);
    let m_r = pr.is_marked(1);
    let mid = tl::and2(&pl.deltas[r - 1], &pr.deltas[0]);
    let mut out = Vec::new();
    let mut push = |keep_l: bool, keep_r: bool| {
        let lk = if keep_l { r } else { r - 1 };
        let mut deltas: Vec<TlFormula> = pl.deltas[..lk].to_vec();
        deltas.push(mid.clone());
        let mid_at = lk + 1;
        if keep_r {
            deltas.extend(pr.deltas[..].iter().cloned());
        } else {
            deltas.extend(pr.deltas[1..].iter().cloned());
        }
        let mut marked: BTreeSet<usize> = pl.marked.iter().filter(|&&t| t <= lk).copied().collect();
        marked.insert(mid_at);
        let shift = if keep_r { mid_at } else { mid_at - 1 };
        marked.extend(pr.marked.iter().filter(|&&t| t >= 2).map(|&t| t + shift));
        let pe = PartitionExpr::new(deltas, marked);
        if !out.contains(&pe) {
            out.push(pe);
        }
    };
    let can_drop_l = r >= 2 || !strict_left;
    let can_drop_r = s >= 2 || !strict_right;
    if can_drop_l && can_drop_r {
        push(false, false);
    }
    if can_drop_l && !m_r {
        push(false, true);
    }
    if !m_l && can_drop_r {
        push(true, false);
    }
    if !m_l && !m_r {
        push(true, true);
    }
    out
}

/// Eliminates an existential variable from one normal disjunct, returning
/// disjuncts whose union is equivalent to `exists z` of the input.
pub fn exists_elim(d: &NormalDisjunct, z: &str) -> Vec<NormalDisjunct> {
    // A variable bound by an equality vanishes with its binding.
    if let Some(i) = d.eqs.iter().position(|(v, _)| v == z) {
        let mut e = d.clone();
        e.eqs.remove(i);
        return vec![e];
    }
    // A representative with equality partners hands the role to one of them.
    let partners: Vec<String> = d
        .eqs
        .iter()
        .filter(|(_, r)| r == z)
        .map(|(v, _)| v.clone())
        .collect();
    if let Some(w) = partners.iter().min() {
        let mut e = d.clone();
        e.eqs.retain(|(v, r)| !(v == w && r == z));
        for (_, r) in &mut e.eqs {
            if r == z {
                *r = w.clone();
            }
        }
        if let DisjunctShape::Chain { vars, .. } = &mut e.shape {
            for v in vars {
                if v == z {
                    *v = w.clone();
                }
            }
        }
        return vec![e];
    }
    let DisjunctShape::Chain {
        vars,
        left,
        windows,
        right,
    } = &d.shape
    else {
        return vec![d.clone()];
    };
    let Some(k) = vars.iter().position(|v| v == z) else {
        return vec![d.clone()];
    };
    let n = vars.len();
    let pl = if k == 0 { left } else { &windows[k - 1] };
    let pr = if k == n - 1 { right } else { &windows[k] };
    let mut vars2 = vars.clone();
    vars2.remove(k);
    let mut out = Vec::new();
    for merged in glue(pl, pr, k > 0, k < n - 1) {
        let shape = if n == 1 {
            DisjunctShape::Line(merged)
        } else {
            let mut w2 = windows.clone();
            let (l2, r2) = if k == 0 {
                w2.remove(0);
                (merged, right.clone())
            } else if k == n - 1 {
                w2.pop();
                (left.clone(), merged)
            } else {
                w2.splice(k - 1..=k, [merged]);
                (left.clone(), right.clone())
            };
            DisjunctShape::Chain {
                vars: vars2.clone(),
                left: l2,
                windows: w2,
                right: r2,
            }
        };
        let e = NormalDisjunct {
            eqs: d.eqs.clone(),
            shape,
        };
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

/// Existential quantification inside the simple fragment: the result is a
/// simple formula without `z` equivalent to `exists z. f`.
///
/// The quantifier is first pushed inward — it distributes over disjunction,
/// and conjuncts not mentioning `z` move outside — so only the part that
/// really constrains `z` pays for normalization.
pub fn exists_simple(f: &SimpleFormula, z: &str) -> SimpleFormula {
    if !f.mentions(z) {
        return f.clone();
    }
    match f {
        SimpleFormula::Or(parts) => {
            return s_or(parts.iter().map(|p| exists_simple(p, z)).collect());
        }
        SimpleFormula::And(parts) => {
            let (with_z, without): (Vec<_>, Vec<_>) =
                parts.iter().cloned().partition(|p| p.mentions(z));
            if !without.is_empty() {
                let mut out = without;
                out.push(exists_simple(&s_and(with_z), z));
                return s_and(out);
            }
        }
        _ => {}
    }
    let probe = std::env::var("ORDTL_PROBE").is_ok();
    let t0 = std::time::Instant::now();
    let insize = if probe { format!("{f}").len() } else { 0 };
    let nf = simple_to_normal(f);
    if probe {
        eprintln!(
            "  exists[{z}] in={insize} nf={} t_nf={:?}",
            nf.disjuncts.len(),
            t0.elapsed()
        );
    }
    let mut disjuncts = Vec::new();
    let mut seen = HashSet::new();
    for d in &nf.disjuncts {
        for e in exists_elim(d, z) {
            if seen.insert(disjunct_key(&e)) {
                disjuncts.push(e);
            }
        }
    }
    if probe {
        eprintln!(
            "  exists[{z}] done out={} t={:?}",
            disjuncts.len(),
            t0.elapsed()
        );
    }
    nf_to_simple(&NormalForm { disjuncts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::tl::atom;

    #[test]
    fn mirror_is_involutive() {
        let pe = PartitionExpr::of(vec![atom("P"), atom("Q"), tl::tt()], &[1, 3]);
        assert_eq!(pe.mirror().mirror(), pe);
        assert_eq!(pe.mirror().marked, [1, 3].into_iter().collect());
        assert_eq!(pe.mirror().deltas[0], tl::tt());
    }

    #[test]
    fn split_handles_marks() {
        let pe = PartitionExpr::of(vec![atom("P"), atom("Q")], &[2]);
        let splits = split_pe(&pe);
        assert_eq!(splits.len(), 2);
        // Splitting at the unmarked slot 1 shares the point between halves.
        assert_eq!(splits[0].0, PartitionExpr::of(vec![atom("P")], &[]));
        assert_eq!(splits[0].1, PartitionExpr::of(vec![atom("P"), atom("Q")], &[2]));
        // Splitting at the marked slot 2 pins the point on both sides.
        assert_eq!(splits[1].0, PartitionExpr::of(vec![atom("P"), atom("Q")], &[2]));
        assert_eq!(splits[1].1, PartitionExpr::of(vec![atom("Q")], &[1]));
    }

    #[test]
    fn constants_have_no_free_vars() {
        assert!(s_true().free_vars().is_empty());
        assert!(s_false().free_vars().is_empty());
        let f = s_and2(
            SimpleFormula::VarLess("y".into(), "z".into()),
            SimpleFormula::OnClosed(PartitionExpr::of(vec![tl::tt()], &[]), "y".into(), "z".into()),
        );
        assert_eq!(
            f.free_vars().into_iter().collect::<Vec<_>>(),
            vec!["y".to_string(), "z".to_string()]
        );
    }

    use crate::models::{parse_model, GappedChain, IntervalSpec};
    use crate::semantics::fo_eval::candidate_positions;
    use crate::semantics::{eval_pe, eval_simple, Assignment};

    fn corpus() -> Vec<GappedChain> {
        [
            "pt{} pt{P} pt{Q}",
            "pt{P,Q}",
            "dense{P} gap dense{}",
            "pt{P} dense{P,Q} pt{}",
            "dense{} pt{Q} dense{P} gap dense{Q}",
        ]
        .iter()
        .map(|s| parse_model(s).unwrap())
        .collect()
    }

    fn some_pes() -> Vec<PartitionExpr> {
        vec![
            PartitionExpr::of(vec![tl::tt()], &[]),
            PartitionExpr::of(vec![atom("P")], &[1]),
            PartitionExpr::of(vec![atom("P"), tl::tt()], &[1]),
            PartitionExpr::of(vec![tl::tt(), atom("Q")], &[2]),
            PartitionExpr::of(vec![atom("P"), atom("Q")], &[]),
            PartitionExpr::of(vec![tl::tt(), tl::tt()], &[1, 2]),
        ]
    }

    fn intervals(m: &GappedChain) -> Vec<IntervalSpec> {
        let mut out = vec![IntervalSpec::whole()];
        let pos = m.enumerate_sample_positions(2);
        for a in &pos {
            for b in &pos {
                if crate::models::compare(a, b) != std::cmp::Ordering::Greater {
                    out.push(IntervalSpec::closed(a.clone(), b.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn conjoin_matches_conjunction_on_models() {
        let pes = some_pes();
        for m in &corpus() {
            for iv in &intervals(m) {
                for p in &pes {
                    for q in &pes {
                        let both = eval_pe(m, iv, p) && eval_pe(m, iv, q);
                        let joined = pe_conjoin(p, q).iter().any(|pe| eval_pe(m, iv, pe));
                        assert_eq!(both, joined, "p={} q={} on {}", p, q, m);
                    }
                }
            }
        }
    }

    #[test]
    fn conjoin_respects_marks() {
        // A single marked piece conjoined with two forced pieces: no shape.
        let single = PartitionExpr::of(vec![atom("a")], &[1]);
        let two = PartitionExpr::of(vec![atom("c"), atom("d")], &[]);
        assert!(pe_conjoin(&single, &two).is_empty());
        // Marked head against marked tail: the staircase bends one of two ways.
        let p = PartitionExpr::of(vec![atom("a"), atom("b")], &[1]);
        let q = PartitionExpr::of(vec![atom("c"), atom("d")], &[2]);
        let got = pe_conjoin(&p, &q);
        assert_eq!(got.len(), 2);
        assert!(got.contains(&PartitionExpr::of(
            vec![tl::and2(&atom("a"), &atom("c")), tl::and2(&atom("b"), &atom("d"))],
            &[1, 2]
        )));
        assert!(got.contains(&PartitionExpr::of(
            vec![
                tl::and2(&atom("a"), &atom("c")),
                tl::and2(&atom("b"), &atom("c")),
                tl::and2(&atom("b"), &atom("d"))
            ],
            &[1, 3]
        )));
    }

    fn sample_formulas() -> Vec<SimpleFormula> {
        let p = || atom("P");
        let q = || atom("Q");
        vec![
            s_true(),
            s_false(),
            s_and2(
                SimpleFormula::VarLess("y".into(), "z".into()),
                SimpleFormula::OnClosed(PartitionExpr::of(vec![p()], &[]), "y".into(), "z".into()),
            ),
            s_or2(
                SimpleFormula::OnLine(PartitionExpr::of(vec![tl::tt(), q()], &[2])),
                s_and2(
                    SimpleFormula::OnLeftRay(PartitionExpr::of(vec![p()], &[]), "y".into()),
                    SimpleFormula::OnRightRay(PartitionExpr::of(vec![tl::tt()], &[]), "y".into()),
                ),
            ),
            s_and2(
                SimpleFormula::OnClosed(PartitionExpr::of(vec![p()], &[1]), "y".into(), "y".into()),
                SimpleFormula::OnRightRay(
                    PartitionExpr::of(vec![tl::tt(), q()], &[2]),
                    "y".into(),
                ),
            ),
            s_and2(
                SimpleFormula::VarEq("y".into(), "z".into()),
                SimpleFormula::OnLeftRay(PartitionExpr::of(vec![p(), tl::tt()], &[1]), "z".into()),
            ),
            s_or2(
                SimpleFormula::VarLess("z".into(), "y".into()),
                SimpleFormula::OnClosed(
                    PartitionExpr::of(vec![p(), q()], &[]),
                    "y".into(),
                    "z".into(),
                ),
            ),
            s_and2(
                SimpleFormula::OnClosed(
                    PartitionExpr::of(vec![tl::tt(), p()], &[]),
                    "y".into(),
                    "z".into(),
                ),
                SimpleFormula::OnClosed(
                    PartitionExpr::of(vec![tl::tt(), q()], &[2]),
                    "y".into(),
                    "z".into(),
                ),
            ),
        ]
    }

    #[test]
    fn normal_form_preserves_truth() {
        for f in &sample_formulas() {
            let back = nf_to_simple(&simple_to_normal(f));
            for m in &corpus() {
                let pos = m.enumerate_sample_positions(2);
                for py in &pos {
                    for pz in &pos {
                        let mut a = Assignment::new();
                        a.insert("y".into(), py.clone());
                        a.insert("z".into(), pz.clone());
                        assert_eq!(
                            eval_simple(m, f, &a).unwrap(),
                            eval_simple(m, &back, &a).unwrap(),
                            "formula {} on {} at y={:?} z={:?}",
                            f,
                            m,
                            py,
                            pz
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn exists_simple_matches_candidate_sweep() {
        for f in &sample_formulas() {
            let g = exists_simple(f, "z");
            assert!(!g.free_vars().contains("z"), "z still free in {}", g);
            for m in &corpus() {
                for py in m.enumerate_sample_positions(2) {
                    let mut a = Assignment::new();
                    a.insert("y".into(), py.clone());
                    let expected = candidate_positions(m, &[&py]).into_iter().any(|c| {
                        let mut b = a.clone();
                        b.insert("z".into(), c);
                        eval_simple(m, f, &b).unwrap()
                    });
                    assert_eq!(
                        eval_simple(m, &g, &a).unwrap(),
                        expected,
                        "exists z {} on {} at y={:?}",
                        f,
                        m,
                        py
                    );
                }
            }
        }
    }

    #[test]
    fn exists_simple_eliminates_both_vars() {
        for f in &sample_formulas() {
            let g = exists_simple(&exists_simple(f, "z"), "y");
            assert!(g.free_vars().is_empty());
            for m in &corpus() {
                let expected = candidate_positions(m, &[]).into_iter().any(|cy| {
                    candidate_positions(m, &[&cy]).into_iter().any(|cz| {
                        let mut a = Assignment::new();
                        a.insert("y".into(), cy.clone());
                        a.insert("z".into(), cz);
                        eval_simple(m, f, &a).unwrap()
                    })
                });
                assert_eq!(
                    eval_simple(m, &g, &Assignment::new()).unwrap(),
                    expected,
                    "closed exists of {} on {}",
                    f,
                    m
                );
            }
        }
    }

    #[test]
    fn elimination_variants_respect_marked_ends() {
        // Gluing two one-slot windows between pinned neighbours: the
        // remainders on both sides must stay, plus the isolated point.
        let pl = PartitionExpr::of(vec![atom("P")], &[]);
        let pr = PartitionExpr::of(vec![atom("Q")], &[]);
        let glued = glue(&pl, &pr, true, true);
        assert_eq!(
            glued,
            vec![PartitionExpr::of(
                vec![atom("P"), tl::and2(&atom("P"), &atom("Q")), atom("Q")],
                &[2]
            )]
        );
        // Against rays nothing is pinned, so all four variants appear.
        assert_eq!(glue(&pl, &pr, false, false).len(), 4);
        // A marked left end forces its remainder away.
        let ml = PartitionExpr::of(vec![atom("P")], &[1]);
        let glued = glue(&ml, &pr, false, true);
        assert_eq!(glued.len(), 1);
        assert_eq!(glued[0].len(), 2);
    }
}
