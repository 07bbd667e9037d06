//! First-order evaluation by quantifier recursion over cell representatives.
//!
//! Quantifiers range over all points of the order, including the infinitely
//! many inside dense regions, but finitely many candidates per quantifier
//! suffice: truth under an assignment depends only on which region each
//! variable occupies and how the variables are ordered (and collide) inside
//! their regions, because coordinates within a dense region can be stretched
//! by an automorphism and predicates there are uniform. So each quantifier
//! tries every already-placed point, every point region, and one fresh
//! representative between each pair of neighbouring placed coordinates in
//! each dense region. Results are memoized per quantifier node on the order
//! pattern of its free variables, which keeps the recursion polynomial in
//! practice.
//!
//! No fixed finite grid can replace this: any grid has neighbouring samples
//! with nothing between them, and a formula like "every later point has a
//! point between" would come out false at the grid's edge pairs even though
//! it is true everywhere in a dense order.

use crate::logic::fo::FoFormula;
use crate::models::{compare, GappedChain, Position, Region};
use num::BigRational;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Maps free variables to positions of the model.
pub type Assignment = BTreeMap<String, Position>;

pub(crate) fn check_position(model: &GappedChain, v: &str, p: &Position) -> Result<(), String> {
    let r = p.region();
    if r >= model.regions.len() {
        return Err(format!("variable '{}' assigned to region {} out of range", v, r));
    }
    match (p, &model.regions[r]) {
        (Position::AtPoint(_), Region::Point(_)) => Ok(()),
        (Position::InDense(_, q), Region::Dense(_)) => {
            let zero = BigRational::from_integer(0.into());
            let one = BigRational::from_integer(1.into());
            if *q > zero && *q < one {
                Ok(())
            } else {
                Err(format!(
                    "variable '{}' has dense coordinate {} outside (0,1)",
                    v, q
                ))
            }
        }
        _ => Err(format!(
            "variable '{}' assigned a position of the wrong kind for region {}",
            v, r
        )),
    }
}

// Gives every binder a fresh name so no variable is bound twice and bound
// names never collide with free ones.
pub(crate) fn rename_binders(f: &FoFormula, used: &mut BTreeSet<String>) -> FoFormula {
    fn fresh(used: &mut BTreeSet<String>) -> String {
        let mut i = used.len();
        loop {
            let name = format!("_q{}", i);
            if used.insert(name.clone()) {
                return name;
            }
            i += 1;
        }
    }
    fn walk(
        f: &FoFormula,
        env: &BTreeMap<String, String>,
        used: &mut BTreeSet<String>,
    ) -> FoFormula {
        let look = |v: &String, env: &BTreeMap<String, String>| {
            env.get(v).cloned().unwrap_or_else(|| v.clone())
        };
        match f {
            FoFormula::Less(a, b) => FoFormula::Less(look(a, env), look(b, env)),
            FoFormula::Equal(a, b) => FoFormula::Equal(look(a, env), look(b, env)),
            FoFormula::Pred(p, v) => FoFormula::Pred(p.clone(), look(v, env)),
            FoFormula::Not(g) => FoFormula::Not(Box::new(walk(g, env, used))),
            FoFormula::And(a, b) => {
                FoFormula::And(Box::new(walk(a, env, used)), Box::new(walk(b, env, used)))
            }
            FoFormula::Or(a, b) => {
                FoFormula::Or(Box::new(walk(a, env, used)), Box::new(walk(b, env, used)))
            }
            FoFormula::Exists(v, g) | FoFormula::Forall(v, g) => {
                let name = fresh(used);
                let mut env2 = env.clone();
                env2.insert(v.clone(), name.clone());
                let body = Box::new(walk(g, &env2, used));
                if matches!(f, FoFormula::Exists(_, _)) {
                    FoFormula::Exists(name, body)
                } else {
                    FoFormula::Forall(name, body)
                }
            }
        }
    }
    walk(f, &BTreeMap::new(), used)
}

fn node_id(f: &FoFormula) -> usize {
    f as *const FoFormula as usize
}

/// Every point inequivalent, relative to the pinned positions, from the
/// rest of its surroundings: the pinned points themselves, each point
/// region, and a representative of each open stretch of each dense region
/// delimited by pinned coordinates. A quantifier over the whole order may
/// range over just these.
pub(crate) fn candidate_positions(model: &GappedChain, pinned: &[&Position]) -> Vec<Position> {
    let mut out: BTreeSet<Position> = pinned.iter().map(|p| (*p).clone()).collect();
    let half = BigRational::new(1.into(), 2.into());
    for (r, reg) in model.regions.iter().enumerate() {
        match reg {
            Region::Gap => {}
            Region::Point(_) => {
                out.insert(Position::AtPoint(r));
            }
            Region::Dense(_) => {
                let mut coords: Vec<BigRational> = pinned
                    .iter()
                    .filter_map(|p| match p {
                        Position::InDense(rr, q) if *rr == r => Some(q.clone()),
                        _ => None,
                    })
                    .collect();
                coords.sort();
                coords.dedup();
                let mut edges = vec![BigRational::from_integer(0.into())];
                edges.extend(coords);
                edges.push(BigRational::from_integer(1.into()));
                for w in edges.windows(2) {
                    out.insert(Position::InDense(r, (&w[0] + &w[1]) * &half));
                }
            }
        }
    }
    out.into_iter().collect()
}

// (region, kind, within-region rank) per free variable; assignments with the
// same signature are automorphic, hence give the same truth.
type Sig = Vec<(usize, u8, usize)>;

struct Rec<'a> {
    model: &'a GappedChain,
    free: HashMap<usize, Vec<String>>,
    memo: HashMap<(usize, Sig), bool>,
}

fn collect_free(f: &FoFormula, out: &mut HashMap<usize, Vec<String>>) -> Vec<String> {
    let fv: Vec<String> = match f {
        FoFormula::Less(a, b) | FoFormula::Equal(a, b) => {
            let mut v = vec![a.clone(), b.clone()];
            v.sort();
            v.dedup();
            v
        }
        FoFormula::Pred(_, v) => vec![v.clone()],
        FoFormula::Not(g) => collect_free(g, out),
        FoFormula::And(a, b) | FoFormula::Or(a, b) => {
            let mut v = collect_free(a, out);
            v.extend(collect_free(b, out));
            v.sort();
            v.dedup();
            v
        }
        FoFormula::Exists(v, g) | FoFormula::Forall(v, g) => {
            let mut fv = collect_free(g, out);
            fv.retain(|w| w != v);
            fv
        }
    };
    out.insert(node_id(f), fv.clone());
    fv
}

impl<'a> Rec<'a> {
    fn new(model: &'a GappedChain, f: &FoFormula) -> Rec<'a> {
        let mut free = HashMap::new();
        collect_free(f, &mut free);
        Rec {
            model,
            free,
            memo: HashMap::new(),
        }
    }

    fn sig(&self, node: usize, a: &Assignment) -> Sig {
        let vars = &self.free[&node];
        let mut per_region: BTreeMap<usize, Vec<BigRational>> = BTreeMap::new();
        for v in vars {
            if let Position::InDense(r, q) = &a[v] {
                per_region.entry(*r).or_default().push(q.clone());
            }
        }
        for coords in per_region.values_mut() {
            coords.sort();
            coords.dedup();
        }
        vars.iter()
            .map(|v| match &a[v] {
                Position::AtPoint(r) => (*r, 0u8, 0usize),
                Position::InDense(r, q) => {
                    let rank = per_region[r].iter().position(|c| c == q).unwrap();
                    (*r, 1u8, rank)
                }
            })
            .collect()
    }

    fn candidates(&self, pinned: &[&Position]) -> Vec<Position> {
        candidate_positions(self.model, pinned)
    }

    fn eval(&mut self, f: &FoFormula, a: &mut Assignment) -> bool {
        match f {
            FoFormula::Less(x, y) => compare(&a[x], &a[y]) == Ordering::Less,
            FoFormula::Equal(x, y) => compare(&a[x], &a[y]) == Ordering::Equal,
            FoFormula::Pred(p, v) => self.model.regions[a[v].region()].truth(p) == Some(true),
            FoFormula::Not(g) => !self.eval(g, a),
            FoFormula::And(x, y) => self.eval(x, a) && self.eval(y, a),
            FoFormula::Or(x, y) => self.eval(x, a) || self.eval(y, a),
            FoFormula::Exists(v, body) => self.quantify(f, v, body, a, false),
            FoFormula::Forall(v, body) => self.quantify(f, v, body, a, true),
        }
    }

    fn quantify(
        &mut self,
        whole: &FoFormula,
        v: &str,
        body: &FoFormula,
        a: &mut Assignment,
        forall: bool,
    ) -> bool {
        let key = (node_id(whole), self.sig(node_id(whole), a));
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let relevant = &self.free[&node_id(body)];
        let pinned: Vec<&Position> = relevant
            .iter()
            .filter(|w| w.as_str() != v)
            .map(|w| &a[w])
            .collect();
        let cands = self.candidates(&pinned);
        let mut result = forall;
        for c in cands {
            let saved = a.insert(v.to_string(), c);
            let b = self.eval(body, a);
            match saved {
                Some(old) => {
                    a.insert(v.to_string(), old);
                }
                None => {
                    a.remove(v);
                }
            }
            if b != forall {
                result = !forall;
                break;
            }
        }
        self.memo.insert(key, result);
        result
    }
}

/// Evaluates a first-order formula under an assignment covering all its free
/// variables.
pub fn eval_fo(model: &GappedChain, f: &FoFormula, assign: &Assignment) -> Result<bool, String> {
    for (v, p) in assign {
        check_position(model, v, p)?;
    }
    for v in f.free_vars() {
        if !assign.contains_key(&v) {
            return Err(format!("free variable '{}' is not assigned", v));
        }
    }
    let mut used: BTreeSet<String> = assign.keys().cloned().collect();
    let f = rename_binders(f, &mut used);
    let mut rec = Rec::new(model, &f);
    let mut a = assign.clone();
    Ok(rec.eval(&f, &mut a))
}

/// Evaluates a first-order formula with at most one free variable `x` on
/// every region at once; None on gaps. One representative per region is
/// enough: with nothing else pinned, all points of a dense region are
/// automorphic.
pub fn eval_fo_regions(
    model: &GappedChain,
    f: &FoFormula,
    x: &str,
) -> Result<Vec<Option<bool>>, String> {
    for v in f.free_vars() {
        if v != x {
            return Err(format!(
                "free variable '{}' is not the designated variable '{}'",
                v, x
            ));
        }
    }
    let x_free = f.free_vars().contains(x);
    let mut used: BTreeSet<String> = f.free_vars();
    used.insert(x.to_string());
    let f = rename_binders(f, &mut used);
    let mut rec = Rec::new(model, &f);

    if !x_free {
        let mut a = Assignment::new();
        let b = rec.eval(&f, &mut a);
        return Ok(model
            .regions
            .iter()
            .map(|r| if r.is_gap() { None } else { Some(b) })
            .collect());
    }

    let mut out = Vec::with_capacity(model.regions.len());
    for r in 0..model.regions.len() {
        match model.rep_position(r) {
            None => out.push(None),
            Some(rep) => {
                let mut a = Assignment::new();
                a.insert(x.to_string(), rep);
                out.push(Some(rec.eval(&f, &mut a)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_fo;
    use crate::models::{frac, parse_model};

    fn regions(model: &str, f: &str) -> Vec<Option<bool>> {
        eval_fo_regions(&parse_model(model).unwrap(), &parse_fo(f).unwrap(), "x").unwrap()
    }

    #[test]
    fn finite_chain_basics() {
        assert_eq!(regions("pt{P} pt{}", "(P x)"), vec![Some(true), Some(false)]);
        assert_eq!(
            regions("pt{} pt{}", "(E y (< x y))"),
            vec![Some(true), Some(false)]
        );
        assert_eq!(
            regions("pt{P} pt{} pt{P}", "(A y (| (= y x) (P y)))"),
            vec![Some(false), Some(true), Some(false)]
        );
    }

    #[test]
    fn density_is_visible() {
        // Two strictly later points exist: true on a dense region, depends on
        // the tail length on a finite chain.
        let two_later = "(E y (E z (& (< x y) (< y z))))";
        assert_eq!(regions("dense{}", two_later), vec![Some(true)]);
        assert_eq!(
            regions("pt{} pt{} pt{}", two_later),
            vec![Some(true), Some(false), Some(false)]
        );
        // Every later point has a point strictly between: density to the
        // right. False on finite chains except at the last point (vacuous).
        let squeeze = "(A y (! (& (< x y) (A z (! (& (< x z) (< z y)))))))";
        assert_eq!(regions("dense{}", squeeze), vec![Some(true)]);
        assert_eq!(
            regions("pt{} pt{} pt{}", squeeze),
            vec![Some(false), Some(false), Some(true)]
        );
        // A gap does not interrupt right-density seen from inside a region.
        assert_eq!(regions("dense{} gap dense{}", squeeze), vec![Some(true), None, Some(true)]);
    }

    #[test]
    fn until_truth_table_matches_region_semantics() {
        use crate::logic::parse::parse_tl;
        use crate::semantics::eval_tl;
        let until_fo = "(E y (& (< x y) (& (Q y) (A z (! (& (& (< x z) (< z y)) (! (P z))))))))";
        for model in [
            "pt{P} pt{Q}",
            "pt{} dense{P,Q} pt{}",
            "dense{P} gap dense{Q}",
            "pt{} dense{Q}",
            "dense{P,Q}",
            "pt{P,Q} pt{P} pt{Q}",
        ] {
            let m = parse_model(model).unwrap();
            let fo = regions(model, until_fo);
            let tl = eval_tl(&m, &parse_tl("(U P Q)").unwrap());
            assert_eq!(fo, tl, "mismatch on {}", model);
        }
    }

    #[test]
    fn assignments_pin_positions() {
        let m = parse_model("pt{} dense{P} pt{}").unwrap();
        let f = parse_fo("(E y (& (< x y) (& (< y z) (P y))))").unwrap();
        let mut a = Assignment::new();
        a.insert("x".into(), Position::AtPoint(0));
        a.insert("z".into(), Position::InDense(1, frac(1, 2)));
        // A P-point strictly between p0 and the dense midpoint exists.
        assert!(eval_fo(&m, &f, &a).unwrap());
        a.insert("z".into(), Position::AtPoint(0));
        assert!(!eval_fo(&m, &f, &a).unwrap());
        // Unassigned variable is an error.
        a.remove("z");
        assert!(eval_fo(&m, &f, &a).is_err());
        // Mis-typed position is an error.
        a.insert("z".into(), Position::InDense(0, frac(1, 2)));
        assert!(eval_fo(&m, &f, &a).is_err());
    }

    #[test]
    fn equality_candidates_are_tried() {
        let m = parse_model("pt{P} dense{}").unwrap();
        let mut a = Assignment::new();
        a.insert("x".into(), Position::InDense(1, frac(1, 2)));
        // Some y equals x: needs the pinned position itself as a candidate.
        let f = parse_fo("(E y (& (= y x) (! (P y))))").unwrap();
        assert!(eval_fo(&m, &f, &a).unwrap());
        // The pinned position itself must be tried: x has no P, so the
        // universal fails exactly at y = x.
        let g = parse_fo("(A y (| (P y) (! (= y x))))").unwrap();
        assert!(!eval_fo(&m, &g, &a).unwrap());
    }

    #[test]
    fn shadowed_binders_do_not_leak() {
        assert_eq!(
            regions("pt{} pt{}", "(E y (& (< x y) (E y (< y x))))"),
            vec![Some(false), Some(false)]
        );
    }
}
