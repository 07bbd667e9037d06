//! Evaluation of temporal, first-order and partition formulas over models.
//!
//! The temporal evaluator works region by region: the truth of a temporal
//! formula is constant across a dense region (all its points look alike to
//! the language, since predicates are uniform there), so a formula denotes
//! one boolean per non-gap region. The gap modalities only ever fire on the
//! explicit gap markers — a cut strictly inside a dense region has the same
//! uniform truths on both sides, so nothing can accumulate differently
//! there, which is also why models may not place two dense regions side by
//! side.

pub mod fo_eval;
pub mod pe_eval;
pub mod simple_eval;

pub use fo_eval::{eval_fo, eval_fo_regions, Assignment};
pub(crate) use fo_eval::rename_binders;
pub use pe_eval::eval_pe;
pub use simple_eval::{eval_simple, eval_simple_with};

use crate::logic::tl::{TlFormula, TlNode};
use crate::models::{GappedChain, Position};
use std::collections::HashMap;

/// Per-region truths of a formula; `None` on gap regions.
pub type TruthMap = Vec<Option<bool>>;

/// Memoizing temporal-formula evaluator for one model. Reusing one evaluator
/// across many formulas lets hash-consed shared subformulas be computed once.
pub struct Evaluator<'m> {
    model: &'m GappedChain,
    memo: HashMap<usize, TruthMap>,
    // Entries are keyed by node address; keeping the formulas alive stops an
    // address from being reused by an unrelated formula after a drop.
    pinned: Vec<TlFormula>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m GappedChain) -> Evaluator<'m> {
        Evaluator {
            model,
            memo: HashMap::new(),
            pinned: Vec::new(),
        }
    }

    pub fn model(&self) -> &'m GappedChain {
        self.model
    }

    /// Truth of `f` on every region.
    pub fn truths(&mut self, f: &TlFormula) -> TruthMap {
        self.compute(f);
        self.memo[&f.id()].clone()
    }

    /// Truth of `f` at one position.
    pub fn truth_at(&mut self, f: &TlFormula, pos: &Position) -> bool {
        self.compute(f);
        self.memo[&f.id()][pos.region()].expect("a position never lies on a gap")
    }

    fn compute(&mut self, f: &TlFormula) {
        if self.memo.contains_key(&f.id()) {
            return;
        }
        for g in f.postorder() {
            if self.memo.contains_key(&g.id()) {
                continue;
            }
            let map = match g.node() {
                TlNode::True => self.constant(true),
                TlNode::False => self.constant(false),
                TlNode::Atom(name) => self
                    .model
                    .regions
                    .iter()
                    .map(|r| r.truth(name))
                    .collect(),
                TlNode::Not(a) => self.memo[&a.id()]
                    .iter()
                    .map(|v| v.map(|b| !b))
                    .collect(),
                TlNode::And(gs) => self.fold(gs, true),
                TlNode::Or(gs) => self.fold(gs, false),
                TlNode::Until(p, q) => {
                    self.until_like(&self.memo[&p.id()], &self.memo[&q.id()], false)
                }
                TlNode::Since(p, q) => {
                    self.until_like(&self.memo[&p.id()], &self.memo[&q.id()], true)
                }
                TlNode::UntilS(p, q) => {
                    self.gap_until(&self.memo[&p.id()], &self.memo[&q.id()], false)
                }
                TlNode::SinceS(p, q) => {
                    self.gap_until(&self.memo[&p.id()], &self.memo[&q.id()], true)
                }
            };
            self.pinned.push(g.clone());
            self.memo.insert(g.id(), map);
        }
    }

    fn constant(&self, b: bool) -> TruthMap {
        self.model
            .regions
            .iter()
            .map(|r| if r.is_gap() { None } else { Some(b) })
            .collect()
    }

    fn fold(&self, gs: &[TlFormula], conj: bool) -> TruthMap {
        let mut out = self.constant(conj);
        for g in gs {
            let m = &self.memo[&g.id()];
            for (slot, v) in out.iter_mut().zip(m.iter()) {
                if let (Some(acc), Some(b)) = (slot.as_mut(), v) {
                    *acc = if conj { *acc && *b } else { *acc || *b };
                }
            }
        }
        out
    }

    /// Regions strictly on the scan side of `r`, nearest first.
    fn scan(&self, r: usize, past: bool) -> Box<dyn Iterator<Item = usize>> {
        if past {
            Box::new((0..r).rev())
        } else {
            Box::new(r + 1..self.model.regions.len())
        }
    }

    // Strict Until (or Since, when `past`). At a point t of region r the
    // formula asks for a strictly later witness point with Q, with P at every
    // point strictly between. Region-wise that means either the witness lies
    // in r itself (possible only when r is dense: then both P and Q must hold
    // on r), or it lies in a later region s, requiring P on everything
    // strictly between — including the tail of r when r is dense and the head
    // of s when s is dense.
    fn until_like(&self, p: &TruthMap, q: &TruthMap, past: bool) -> TruthMap {
        let t = |m: &TruthMap, i: usize| m[i] == Some(true);
        let mut out = vec![None; self.model.regions.len()];
        for (r, reg) in self.model.regions.iter().enumerate() {
            if reg.is_gap() {
                continue;
            }
            let mut val = reg.is_dense() && t(p, r) && t(q, r);
            if !val && !(reg.is_dense() && !t(p, r)) {
                for s in self.scan(r, past) {
                    let sreg = &self.model.regions[s];
                    if sreg.is_gap() {
                        continue;
                    }
                    if t(q, s) && (!sreg.is_dense() || t(p, s)) {
                        val = true;
                        break;
                    }
                    if !t(p, s) {
                        break;
                    }
                }
            }
            out[r] = Some(val);
        }
        out
    }

    // The gap modality. At a point t it asks for a gap g strictly ahead with
    // P at every point of (t, g), not-P accumulating just after g, and Q on
    // some nonempty interval just after g. Only explicit gap markers qualify,
    // and the dense region adjacent to the gap decides the accumulation: it
    // must satisfy both not-P and Q.
    fn gap_until(&self, p: &TruthMap, q: &TruthMap, past: bool) -> TruthMap {
        let t = |m: &TruthMap, i: usize| m[i] == Some(true);
        let mut out = vec![None; self.model.regions.len()];
        for (r, reg) in self.model.regions.iter().enumerate() {
            if reg.is_gap() {
                continue;
            }
            let mut val = false;
            if !(reg.is_dense() && !t(p, r)) {
                for s in self.scan(r, past) {
                    if self.model.regions[s].is_gap() {
                        let beyond = if past { s - 1 } else { s + 1 };
                        if p[beyond] == Some(false) && t(q, beyond) {
                            val = true;
                            break;
                        }
                    } else if !t(p, s) {
                        break;
                    }
                }
            }
            out[r] = Some(val);
        }
        out
    }
}

/// Truth of a temporal formula on every region of the model.
pub fn eval_tl(model: &GappedChain, f: &TlFormula) -> TruthMap {
    Evaluator::new(model).truths(f)
}

/// Truth of a temporal formula at one position of the model.
pub fn eval_point_predicate(model: &GappedChain, f: &TlFormula, pos: &Position) -> bool {
    Evaluator::new(model).truth_at(f, pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_tl;
    use crate::models::parse_model;
    use crate::translate;

    fn truths(model: &str, f: &str) -> TruthMap {
        eval_tl(&parse_model(model).unwrap(), &parse_tl(f).unwrap())
    }

    #[test]
    fn until_on_finite_chains() {
        assert_eq!(truths("pt{P} pt{Q}", "(U P Q)"), vec![Some(true), Some(false)]);
        assert_eq!(
            truths("pt{} pt{P} pt{Q}", "(U P Q)"),
            vec![Some(true), Some(true), Some(false)]
        );
        // Strictness: the witness must be strictly later.
        assert_eq!(truths("pt{P,Q}", "(U P Q)"), vec![Some(false)]);
        // P is not required at the current point, only strictly between.
        assert_eq!(truths("pt{} pt{Q}", "(U P Q)"), vec![Some(true), Some(false)]);
    }

    #[test]
    fn until_inside_and_across_dense_regions() {
        assert_eq!(truths("dense{P}", "(U P P)"), vec![Some(true)]);
        assert_eq!(truths("dense{}", "(U P P)"), vec![Some(false)]);
        // Witness in a later dense region needs P on that region's head.
        assert_eq!(
            truths("pt{} dense{P,Q}", "(U P Q)"),
            vec![Some(true), Some(true)]
        );
        assert_eq!(
            truths("pt{} dense{Q}", "(U P Q)"),
            vec![Some(false), Some(false)]
        );
        // ... but a later point region does not.
        assert_eq!(truths("dense{P} pt{Q}", "(U P Q)"), vec![Some(true), Some(false)]);
    }

    #[test]
    fn gap_modality_matches_worked_examples() {
        assert_eq!(
            truths("dense{P} gap dense{Q}", "(Us P Q)"),
            vec![Some(true), None, Some(false)]
        );
        assert_eq!(truths("pt{P}", "(Us P Q)"), vec![Some(false)]);
        // The region after the gap must drop P; otherwise nothing accumulates.
        assert_eq!(
            truths("dense{P} gap dense{P,Q}", "(Us P Q)"),
            vec![Some(false), None, Some(false)]
        );
        // A point between start and gap breaks nothing if P holds there.
        assert_eq!(
            truths("dense{P} pt{P} dense{P} gap dense{Q}", "(Us P Q)"),
            vec![Some(true), Some(true), Some(true), None, Some(false)]
        );
    }

    #[test]
    fn derived_box_and_gamma() {
        assert_eq!(truths("pt{P} pt{P}", "(BOX P)"), vec![Some(true), Some(true)]);
        assert_eq!(
            truths("pt{P} pt{} pt{P}", "(BOX P)"),
            vec![Some(false), Some(true), Some(true)]
        );
        let m = parse_model("dense{P} gap dense{Q}").unwrap();
        let g = translate::gamma_plus(&crate::logic::tl::atom("P"));
        assert_eq!(eval_tl(&m, &g), vec![Some(true), None, Some(false)]);
        // Without the accumulation of not-P the gap does not witness GAMMA+.
        let m2 = parse_model("dense{P} gap dense{P}").unwrap();
        assert_eq!(eval_tl(&m2, &g), vec![Some(false), None, Some(false)]);
    }

    #[test]
    fn since_mirrors_until() {
        use crate::logic::tl::mirror_tl;
        for (model, f) in [
            ("pt{} pt{P} pt{Q} pt{P,Q} dense{P}", "(U P (| Q (U Q P)))"),
            ("dense{P} gap dense{Q} pt{P}", "(Us P (! Q))"),
            ("dense{Q} gap dense{P,Q} pt{}", "(& (S P Q) (BOXPAST P))"),
        ] {
            let m = parse_model(model).unwrap();
            let f = parse_tl(f).unwrap();
            let fwd = eval_tl(&m, &f);
            let bwd = eval_tl(&m.reverse(), &mirror_tl(&f));
            let n = fwd.len();
            for r in 0..n {
                assert_eq!(fwd[r], bwd[n - 1 - r], "region {} of {}", r, model);
            }
        }
    }
}
