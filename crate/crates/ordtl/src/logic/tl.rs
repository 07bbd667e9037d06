//! Temporal formulas over strict Until/Since and the gap modalities.
//!
//! Formulas are immutable and hash-consed per thread: building a node that is
//! structurally identical to an existing one returns the same allocation.
//! Equality and hashing on [`TlFormula`] are therefore pointer-based and O(1),
//! which is what makes the memoized evaluators and the translation pipeline
//! affordable — translated formulas are huge as trees but small as dags.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

/// A temporal formula. `Until`/`Since` are strict (the witness lies strictly
/// in the future/past and the first operand constrains the open interval in
/// between); `UntilS`/`SinceS` are the gap-referencing modalities. Everything
/// else (BOX, KPLUS, GAMMA+, USTAR, UGAP, ...) is derived and never appears
/// as a primitive node.
#[derive(Clone)]
pub struct TlFormula(Rc<TlNode>);

/// Node shape behind a [`TlFormula`]. `And`/`Or` are n-ary internally (with
/// at least two children); the surface syntax is binary and the printer
/// re-nests to the right.
#[derive(Debug)]
pub enum TlNode {
    True,
    False,
    Atom(String),
    Not(TlFormula),
    And(Vec<TlFormula>),
    Or(Vec<TlFormula>),
    Until(TlFormula, TlFormula),
    Since(TlFormula, TlFormula),
    UntilS(TlFormula, TlFormula),
    SinceS(TlFormula, TlFormula),
}

/// Structural key used by the interner; children are identified by pointer,
/// which is sound because the pool holds them alive.
#[derive(PartialEq, Eq, Hash)]
enum Key {
    True,
    False,
    Atom(String),
    Not(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    Until(usize, usize),
    Since(usize, usize),
    UntilS(usize, usize),
    SinceS(usize, usize),
}

thread_local! {
    static POOL: RefCell<HashMap<Key, TlFormula>> = RefCell::new(HashMap::new());
}

fn intern(key: Key, build: impl FnOnce() -> TlNode) -> TlFormula {
    POOL.with(|pool| {
        let mut pool = pool.borrow_mut();
        if let Some(f) = pool.get(&key) {
            return f.clone();
        }
        let f = TlFormula(Rc::new(build()));
        pool.insert(key, f.clone());
        f
    })
}

/// Number of distinct formulas currently interned on this thread.
pub fn pool_size() -> usize {
    POOL.with(|pool| pool.borrow().len())
}

/// Drops the intern pool. Live formulas stay valid; formulas built afterwards
/// just stop sharing structure with them. Useful between large independent
/// work batches to keep memory bounded.
pub fn clear_pool() {
    POOL.with(|pool| pool.borrow_mut().clear());
}

impl TlFormula {
    /// The node behind this formula.
    pub fn node(&self) -> &TlNode {
        &self.0
    }

    /// Stable per-thread identity; equal iff the formulas are the same object.
    pub fn id(&self) -> usize {
        Rc::as_ptr(&self.0) as usize
    }

    /// Number of distinct nodes in the formula dag.
    pub fn dag_size(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.id()) {
                continue;
            }
            match f.node() {
                TlNode::True | TlNode::False | TlNode::Atom(_) => {}
                TlNode::Not(g) => stack.push(g.clone()),
                TlNode::And(gs) | TlNode::Or(gs) => stack.extend(gs.iter().cloned()),
                TlNode::Until(p, q)
                | TlNode::Since(p, q)
                | TlNode::UntilS(p, q)
                | TlNode::SinceS(p, q) => {
                    stack.push(p.clone());
                    stack.push(q.clone());
                }
            }
        }
        seen.len()
    }

    /// All distinct subformulas, children before parents.
    pub fn postorder(&self) -> Vec<TlFormula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        // Explicit stack with an expanded? flag to avoid recursion on deep dags.
        let mut stack = vec![(self.clone(), false)];
        while let Some((f, expanded)) = stack.pop() {
            if expanded {
                out.push(f);
                continue;
            }
            if !seen.insert(f.id()) {
                continue;
            }
            stack.push((f.clone(), true));
            match f.node() {
                TlNode::True | TlNode::False | TlNode::Atom(_) => {}
                TlNode::Not(g) => stack.push((g.clone(), false)),
                TlNode::And(gs) | TlNode::Or(gs) => {
                    stack.extend(gs.iter().cloned().map(|g| (g, false)))
                }
                TlNode::Until(p, q)
                | TlNode::Since(p, q)
                | TlNode::UntilS(p, q)
                | TlNode::SinceS(p, q) => {
                    stack.push((p.clone(), false));
                    stack.push((q.clone(), false));
                }
            }
        }
        out
    }

    /// Names of all atoms occurring in the formula.
    pub fn atoms(&self) -> std::collections::BTreeSet<String> {
        self.postorder()
            .iter()
            .filter_map(|f| match f.node() {
                TlNode::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }
}

impl PartialEq for TlFormula {
    fn eq(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for TlFormula {}

impl std::hash::Hash for TlFormula {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.id().hash(state);
    }
}

impl fmt::Debug for TlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::logic::parse::print_tl(self))
    }
}

thread_local! {
    static TT: std::cell::OnceCell<TlFormula> = const { std::cell::OnceCell::new() };
    static FF: std::cell::OnceCell<TlFormula> = const { std::cell::OnceCell::new() };
}

/// The formula `TRUE`.
pub fn tt() -> TlFormula {
    TT.with(|c| c.get_or_init(|| intern(Key::True, || TlNode::True)).clone())
}

/// The formula `FALSE`.
pub fn ff() -> TlFormula {
    FF.with(|c| c.get_or_init(|| intern(Key::False, || TlNode::False)).clone())
}

/// Whether this is the constant `TRUE`.
pub fn is_tt(f: &TlFormula) -> bool {
    matches!(f.node(), TlNode::True)
}

/// Whether this is the constant `FALSE`.
pub fn is_ff(f: &TlFormula) -> bool {
    matches!(f.node(), TlNode::False)
}

/// An atom by name.
pub fn atom(name: &str) -> TlFormula {
    intern(Key::Atom(name.to_string()), || {
        TlNode::Atom(name.to_string())
    })
}

/// Negation; folds constants and double negation.
pub fn not(f: &TlFormula) -> TlFormula {
    match f.node() {
        TlNode::True => ff(),
        TlNode::False => tt(),
        TlNode::Not(g) => g.clone(),
        _ => intern(Key::Not(f.id()), || TlNode::Not(f.clone())),
    }
}

fn flatten(parts: Vec<TlFormula>, conj: bool) -> Option<Vec<TlFormula>> {
    // Flattens nested And-in-And (resp. Or-in-Or), drops units, deduplicates
    // id-wise keeping first occurrence. Returns None when a child or a
    // complementary pair annihilates the whole connective.
    let mut out: Vec<TlFormula> = Vec::with_capacity(parts.len());
    let mut seen = HashSet::new();
    let mut plain = HashSet::new();
    let mut negated = HashSet::new();
    let mut stack: Vec<TlFormula> = parts.into_iter().rev().collect();
    while let Some(f) = stack.pop() {
        match (f.node(), conj) {
            (TlNode::True, true) | (TlNode::False, false) => {}
            (TlNode::False, true) | (TlNode::True, false) => return None,
            (TlNode::And(gs), true) | (TlNode::Or(gs), false) => {
                for g in gs.iter().rev() {
                    stack.push(g.clone());
                }
            }
            _ => {
                if let TlNode::Not(g) = f.node() {
                    if plain.contains(&g.id()) {
                        return None;
                    }
                    negated.insert(g.id());
                } else {
                    if negated.contains(&f.id()) {
                        return None;
                    }
                    plain.insert(f.id());
                }
                if seen.insert(f.id()) {
                    out.push(f);
                }
            }
        }
    }
    Some(out)
}

/// n-ary conjunction; flattens, deduplicates and folds constants.
pub fn and(parts: Vec<TlFormula>) -> TlFormula {
    match flatten(parts, true) {
        None => ff(),
        Some(mut out) => match out.len() {
            0 => tt(),
            1 => out.pop().unwrap(),
            _ => {
                let key = Key::And(out.iter().map(|f| f.id()).collect());
                intern(key, || TlNode::And(out))
            }
        },
    }
}

/// n-ary disjunction; flattens, deduplicates and folds constants.
pub fn or(parts: Vec<TlFormula>) -> TlFormula {
    match flatten(parts, false) {
        None => tt(),
        Some(mut out) => match out.len() {
            0 => ff(),
            1 => out.pop().unwrap(),
            _ => {
                let key = Key::Or(out.iter().map(|f| f.id()).collect());
                intern(key, || TlNode::Or(out))
            }
        },
    }
}

/// Binary conjunction convenience.
pub fn and2(a: &TlFormula, b: &TlFormula) -> TlFormula {
    and(vec![a.clone(), b.clone()])
}

/// Binary disjunction convenience.
pub fn or2(a: &TlFormula, b: &TlFormula) -> TlFormula {
    or(vec![a.clone(), b.clone()])
}

/// Strict Until. `until(p, ff())` folds to `FALSE`: no witness can ever
/// satisfy a false second operand.
pub fn until(p: &TlFormula, q: &TlFormula) -> TlFormula {
    if matches!(q.node(), TlNode::False) {
        return ff();
    }
    intern(Key::Until(p.id(), q.id()), || {
        TlNode::Until(p.clone(), q.clone())
    })
}

/// Strict Since; mirror of [`until`].
pub fn since(p: &TlFormula, q: &TlFormula) -> TlFormula {
    if matches!(q.node(), TlNode::False) {
        return ff();
    }
    intern(Key::Since(p.id(), q.id()), || {
        TlNode::Since(p.clone(), q.clone())
    })
}

/// The future gap modality.
pub fn until_s(p: &TlFormula, q: &TlFormula) -> TlFormula {
    if matches!(q.node(), TlNode::False) {
        return ff();
    }
    intern(Key::UntilS(p.id(), q.id()), || {
        TlNode::UntilS(p.clone(), q.clone())
    })
}

/// The past gap modality; mirror of [`until_s`].
pub fn since_s(p: &TlFormula, q: &TlFormula) -> TlFormula {
    if matches!(q.node(), TlNode::False) {
        return ff();
    }
    intern(Key::SinceS(p.id(), q.id()), || {
        TlNode::SinceS(p.clone(), q.clone())
    })
}

/// Swaps future and past: Until <-> Since, UntilS <-> SinceS. Involutive.
pub fn mirror_tl(f: &TlFormula) -> TlFormula {
    let mut memo: HashMap<usize, TlFormula> = HashMap::new();
    for g in f.postorder() {
        let m = match g.node() {
            TlNode::True | TlNode::False | TlNode::Atom(_) => g.clone(),
            TlNode::Not(a) => not(&memo[&a.id()]),
            TlNode::And(gs) => and(gs.iter().map(|a| memo[&a.id()].clone()).collect()),
            TlNode::Or(gs) => or(gs.iter().map(|a| memo[&a.id()].clone()).collect()),
            TlNode::Until(p, q) => since(&memo[&p.id()], &memo[&q.id()]),
            TlNode::Since(p, q) => until(&memo[&p.id()], &memo[&q.id()]),
            TlNode::UntilS(p, q) => since_s(&memo[&p.id()], &memo[&q.id()]),
            TlNode::SinceS(p, q) => until_s(&memo[&p.id()], &memo[&q.id()]),
        };
        memo.insert(g.id(), m);
    }
    memo[&f.id()].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_shares_structure() {
        let a = and2(&atom("P"), &atom("Q"));
        let b = and2(&atom("P"), &atom("Q"));
        assert_eq!(a, b);
        assert_eq!(a.id(), b.id());
    }

    #[test]
    fn constant_folding() {
        assert_eq!(not(&not(&atom("P"))), atom("P"));
        assert_eq!(and2(&atom("P"), &ff()), ff());
        assert_eq!(or2(&atom("P"), &tt()), tt());
        assert_eq!(and2(&atom("P"), &tt()), atom("P"));
        assert_eq!(until(&atom("P"), &ff()), ff());
    }

    #[test]
    fn flattening_and_dedup() {
        let f = and(vec![
            atom("P"),
            and2(&atom("Q"), &atom("P")),
            atom("Q"),
        ]);
        match f.node() {
            TlNode::And(gs) => assert_eq!(gs.len(), 2),
            other => panic!("expected And, got {:?}", other),
        }
    }

    #[test]
    fn mirror_is_involutive() {
        let f = until(&atom("P"), &since_s(&atom("Q"), &atom("P")));
        assert_eq!(mirror_tl(&mirror_tl(&f)), f);
        assert_eq!(
            mirror_tl(&until(&atom("P"), &atom("Q"))),
            since(&atom("P"), &atom("Q"))
        );
    }

    #[test]
    fn dag_size_counts_shared_nodes_once() {
        let p = atom("P");
        let f = and2(&until(&p, &p), &or2(&p, &atom("Q")));
        // nodes: P, Q, Until(P,P), Or(P,Q), And(...)
        assert_eq!(f.dag_size(), 5);
    }
}
