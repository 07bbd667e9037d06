//! Independent reference machinery: a brute-force first-order evaluator, a
//! first-order reading of every temporal operator, seeded generators, fixed
//! model corpora, and the semantic law runners built from them.
//!
//! Everything here deliberately avoids the code paths it checks. The brute
//! evaluator quantifies over raw point indices with no candidate filtering;
//! the operator readings go through the first-order evaluator rather than
//! the temporal one; the direct region walks re-derive each derived
//! operator's meaning from the region structure alone.

use crate::logic::fo::{
    fo_and, fo_and_all, fo_equal, fo_exists, fo_forall, fo_less, fo_not, fo_or, fo_or_all,
    fo_pred, FoFormula,
};
use crate::logic::parse::print_fo;
use crate::logic::tl::{self, TlFormula, TlNode};
use crate::models::{
    boundary_compare, compare, print_model, Boundary, GappedChain, IntervalSpec, Position, Region,
};
use crate::negation::negate_simple;
use crate::partition::{
    exists_simple, nf_to_simple, pe_conjoin, s_and, s_or, simple_to_normal, PartitionExpr,
    SimpleFormula,
};
use crate::semantics::fo_eval::candidate_positions;
use crate::semantics::{
    eval_fo, eval_fo_regions, eval_pe, eval_point_predicate, eval_simple, eval_tl, Assignment,
};
use crate::translate::{
    box_future, box_past, build_f, gamma_minus, gamma_plus, kminus, kplus, translate, TerminalMode,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

const PREDS: [&str; 2] = ["P", "Q"];

/// The per-point predicate sets of a finite chain; None if the model has
/// dense regions or gaps.
pub fn chain_valuations(m: &GappedChain) -> Option<Vec<BTreeSet<String>>> {
    m.regions
        .iter()
        .map(|r| match r {
            Region::Point(atoms) => Some(atoms.clone()),
            _ => None,
        })
        .collect()
}

/// Brute-force truth of a first-order formula on a finite chain given as
/// per-point predicate sets; quantifiers try every point index.
pub fn brute_fo(
    chain: &[BTreeSet<String>],
    f: &FoFormula,
    assign: &BTreeMap<String, usize>,
) -> bool {
    match f {
        FoFormula::Less(a, b) => assign[a] < assign[b],
        FoFormula::Equal(a, b) => assign[a] == assign[b],
        FoFormula::Pred(p, v) => chain[assign[v]].contains(p),
        FoFormula::Not(g) => !brute_fo(chain, g, assign),
        FoFormula::And(g, h) => brute_fo(chain, g, assign) && brute_fo(chain, h, assign),
        FoFormula::Or(g, h) => brute_fo(chain, g, assign) || brute_fo(chain, h, assign),
        FoFormula::Exists(v, g) => (0..chain.len()).any(|i| {
            let mut inner = assign.clone();
            inner.insert(v.clone(), i);
            brute_fo(chain, g, &inner)
        }),
        FoFormula::Forall(v, g) => (0..chain.len()).all(|i| {
            let mut inner = assign.clone();
            inner.insert(v.clone(), i);
            brute_fo(chain, g, &inner)
        }),
    }
}

/// First-order reading of a temporal formula at the point named `x`; bound
/// variables are drawn from `_t0, _t1, ...` and never collide with `x`.
pub fn tl_to_fo(f: &TlFormula, x: &str) -> FoFormula {
    let mut counter = 0;
    tl_to_fo_at(f, x, &mut counter)
}

fn fresh_t(counter: &mut usize) -> String {
    let v = format!("_t{counter}");
    *counter += 1;
    v
}

fn tl_to_fo_at(f: &TlFormula, x: &str, c: &mut usize) -> FoFormula {
    match f.node() {
        TlNode::True => fo_equal(x, x),
        TlNode::False => fo_not(fo_equal(x, x)),
        TlNode::Atom(p) => fo_pred(p, x),
        TlNode::Not(g) => fo_not(tl_to_fo_at(g, x, c)),
        TlNode::And(gs) => fo_and_all(gs.iter().map(|g| tl_to_fo_at(g, x, c)).collect()),
        TlNode::Or(gs) => fo_or_all(gs.iter().map(|g| tl_to_fo_at(g, x, c)).collect()),
        TlNode::Until(p, q) => until_fo(p, q, x, false, c),
        TlNode::Since(p, q) => until_fo(p, q, x, true, c),
        TlNode::UntilS(p, q) => gap_until_fo(p, q, x, false, c),
        TlNode::SinceS(p, q) => gap_until_fo(p, q, x, true, c),
    }
}

/// `a` strictly before `b` in reading direction; reversed for past operators.
fn dir_less(a: &str, b: &str, past: bool) -> FoFormula {
    if past {
        fo_less(b, a)
    } else {
        fo_less(a, b)
    }
}

fn dir_le(a: &str, b: &str, past: bool) -> FoFormula {
    fo_or(dir_less(a, b, past), fo_equal(a, b))
}

fn implies(guard: FoFormula, body: FoFormula) -> FoFormula {
    fo_or(fo_not(guard), body)
}

// Some y strictly ahead of x satisfies q, with p at every point strictly
// between.
fn until_fo(p: &TlFormula, q: &TlFormula, x: &str, past: bool, c: &mut usize) -> FoFormula {
    let y = fresh_t(c);
    let u = fresh_t(c);
    let q_y = tl_to_fo_at(q, &y, c);
    let p_u = tl_to_fo_at(p, &u, c);
    fo_exists(
        &y,
        fo_and_all(vec![
            dir_less(x, &y, past),
            q_y,
            fo_forall(
                &u,
                implies(fo_and(dir_less(x, &u, past), dir_less(&u, &y, past)), p_u),
            ),
        ]),
    )
}

// "p holds at every point of the half-open stretch from x (exclusive) to u
// (inclusive)".
fn run_to(p: &TlFormula, x: &str, u: &str, past: bool, c: &mut usize) -> FoFormula {
    let w = fresh_t(c);
    let p_w = tl_to_fo_at(p, &w, past, c);
    fo_forall(
        &w,
        implies(fo_and(dir_less(x, &w, past), dir_le(&w, u, past)), p_w),
    )
}

// The gap reading. Some y ahead splits the stretch up to it into a lower
// part where p has held the whole way and an upper part satisfying not-p
// and q, such that the lower part has no last point and the upper part no
// first point. The split is then a genuine gap, with p before it and not-p
// and q accumulating just past it.
fn gap_until_fo(p: &TlFormula, q: &TlFormula, x: &str, past: bool, c: &mut usize) -> FoFormula {
    let y = fresh_t(c);
    let in_window = |v: &str| fo_and(dir_less(x, v, past), dir_le(v, &y, past));

    let u = fresh_t(c);
    let p_u = tl_to_fo_at(p, &u, c);
    let q_u = tl_to_fo_at(q, &u, c);
    let split = fo_forall(
        &u,
        implies(
            in_window(&u),
            fo_or(run_to(p, x, &u, past, c), fo_and(fo_not(p_u), q_u)),
        ),
    );

    let u1 = fresh_t(c);
    let lower_nonempty = fo_exists(&u1, fo_and(in_window(&u1), run_to(p, x, &u1, past, c)));
    let u2 = fresh_t(c);
    let upper_nonempty = fo_exists(
        &u2,
        fo_and(in_window(&u2), fo_not(run_to(p, x, &u2, past, c))),
    );

    let u3 = fresh_t(c);
    let v3 = fresh_t(c);
    let no_last_lower = fo_forall(
        &u3,
        implies(
            fo_and(in_window(&u3), run_to(p, x, &u3, past, c)),
            fo_exists(
                &v3,
                fo_and_all(vec![
                    dir_less(&u3, &v3, past),
                    in_window(&v3),
                    run_to(p, x, &v3, past, c),
                ]),
            ),
        ),
    );

    let u4 = fresh_t(c);
    let v4 = fresh_t(c);
    let no_first_upper = fo_forall(
        &u4,
        implies(
            fo_and(in_window(&u4), fo_not(run_to(p, x, &u4, past, c))),
            fo_exists(
                &v4,
                fo_and_all(vec![
                    dir_less(&v4, &u4, past),
                    dir_less(x, &v4, past),
                    fo_not(run_to(p, x, &v4, past, c)),
                ]),
            ),
        ),
    );

    fo_exists(
        &y,
        fo_and_all(vec![
            dir_less(x, &y, past),
            split,
            lower_nonempty,
            upper_nonempty,
            no_last_lower,
            no_first_upper,
        ]),
    )
}

/// The deterministic generator behind every seeded check.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gen_valuation(rng: &mut ChaCha8Rng) -> BTreeSet<String> {
    PREDS
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .map(|p| p.to_string())
        .collect()
}

/// Random finite chain with 1 to `max_len` points.
pub fn gen_chain(rng: &mut ChaCha8Rng, max_len: usize) -> GappedChain {
    let len = rng.gen_range(1..=max_len);
    GappedChain::new((0..len).map(|_| Region::Point(gen_valuation(rng))).collect())
        .expect("point chains always validate")
}

/// Random model mixing point and dense regions with explicit gaps: at most
/// `max_regions` regions, always at least one dense region.
pub fn gen_gapped(rng: &mut ChaCha8Rng, max_regions: usize) -> GappedChain {
    loop {
        let len = rng.gen_range(1..=max_regions);
        let regions: Vec<Region> = (0..len)
            .map(|_| match rng.gen_range(0..5) {
                0 | 1 => Region::Point(gen_valuation(rng)),
                2 | 3 => Region::Dense(gen_valuation(rng)),
                _ => Region::Gap,
            })
            .collect();
        if !regions.iter().any(|r| r.is_dense()) {
            continue;
        }
        if let Ok(m) = GappedChain::new(regions) {
            return m;
        }
    }
}

/// Random first-order formula whose free variables are at most `{x}`, with
/// `x` actually occurring and quantifier depth at most `max_qdepth`.
pub fn gen_formula(rng: &mut ChaCha8Rng, max_qdepth: usize) -> FoFormula {
    loop {
        let mut scope = vec!["x".to_string()];
        let budget = rng.gen_range(3..=12);
        let f = gen_fo_node(rng, &mut scope, max_qdepth, budget);
        if f.free_vars().contains("x") {
            return f;
        }
    }
}

fn gen_var(rng: &mut ChaCha8Rng, scope: &[String]) -> String {
    scope[rng.gen_range(0..scope.len())].clone()
}

fn gen_fo_leaf(rng: &mut ChaCha8Rng, scope: &[String]) -> FoFormula {
    match rng.gen_range(0..4) {
        0 | 1 => fo_pred(PREDS[rng.gen_range(0..PREDS.len())], &gen_var(rng, scope)),
        2 => fo_less(&gen_var(rng, scope), &gen_var(rng, scope)),
        _ => fo_equal(&gen_var(rng, scope), &gen_var(rng, scope)),
    }
}

fn gen_fo_node(
    rng: &mut ChaCha8Rng,
    scope: &mut Vec<String>,
    qdepth: usize,
    budget: usize,
) -> FoFormula {
    if budget == 0 {
        return gen_fo_leaf(rng, scope);
    }
    match rng.gen_range(0..10) {
        0 | 1 | 2 => gen_fo_leaf(rng, scope),
        3 => fo_not(gen_fo_node(rng, scope, qdepth, budget - 1)),
        c @ (4 | 5) => {
            let left = gen_fo_node(rng, scope, qdepth, budget / 2);
            let right = gen_fo_node(rng, scope, qdepth, budget / 2);
            if c == 4 {
                fo_and(left, right)
            } else {
                fo_or(left, right)
            }
        }
        _ => {
            if qdepth == 0 {
                return gen_fo_leaf(rng, scope);
            }
            let v = ["y", "z"][rng.gen_range(0..2)].to_string();
            scope.push(v.clone());
            let body = gen_fo_node(rng, scope, qdepth - 1, budget - 1);
            scope.pop();
            if rng.gen_bool(0.5) {
                fo_exists(&v, body)
            } else {
                fo_forall(&v, body)
            }
        }
    }
}

fn gen_slot(rng: &mut ChaCha8Rng) -> TlFormula {
    let p = tl::atom("P");
    let q = tl::atom("Q");
    match rng.gen_range(0..6) {
        0 => p,
        1 => q,
        2 => tl::not(&p),
        3 => tl::not(&q),
        4 => tl::and2(&p, &q),
        _ => tl::tt(),
    }
}

/// Random partition pattern with 1 to `max_slots` slots.
pub fn gen_pe(rng: &mut ChaCha8Rng, max_slots: usize) -> PartitionExpr {
    let n = rng.gen_range(1..=max_slots);
    let deltas = (0..n).map(|_| gen_slot(rng)).collect();
    let marked: BTreeSet<usize> = (1..=n).filter(|_| rng.gen_bool(0.4)).collect();
    PartitionExpr::new(deltas, marked)
}

/// Random simple formula over the free variables `vars`, with patterns of at
/// most `max_slots` slots.
pub fn gen_simple(rng: &mut ChaCha8Rng, vars: &[&str], max_slots: usize) -> SimpleFormula {
    gen_simple_depth(rng, vars, max_slots, 2)
}

fn gen_simple_depth(
    rng: &mut ChaCha8Rng,
    vars: &[&str],
    max_slots: usize,
    depth: usize,
) -> SimpleFormula {
    if depth > 0 && rng.gen_bool(0.35) {
        let k = rng.gen_range(2..=3);
        let parts = (0..k)
            .map(|_| gen_simple_depth(rng, vars, max_slots, depth - 1))
            .collect();
        return if rng.gen_bool(0.5) {
            s_and(parts)
        } else {
            s_or(parts)
        };
    }
    let v = |rng: &mut ChaCha8Rng| vars[rng.gen_range(0..vars.len())].to_string();
    match rng.gen_range(0..6) {
        0 => SimpleFormula::VarLess(v(rng), v(rng)),
        1 => SimpleFormula::VarEq(v(rng), v(rng)),
        2 => SimpleFormula::OnLine(gen_pe(rng, max_slots)),
        3 => SimpleFormula::OnLeftRay(gen_pe(rng, max_slots), v(rng)),
        4 => SimpleFormula::OnRightRay(gen_pe(rng, max_slots), v(rng)),
        _ => SimpleFormula::OnClosed(gen_pe(rng, max_slots), v(rng), v(rng)),
    }
}

/// Every finite chain with 1 to 4 points over `P`, `Q` — 340 models.
pub fn finite_corpus() -> Vec<GappedChain> {
    let vals: Vec<BTreeSet<String>> = (0..4usize)
        .map(|bits| {
            PREDS
                .iter()
                .enumerate()
                .filter(|(i, _)| bits & (1 << i) != 0)
                .map(|(_, p)| p.to_string())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for len in 1..=4u32 {
        for code in 0..4usize.pow(len) {
            let mut c = code;
            let regions = (0..len)
                .map(|_| {
                    let r = Region::Point(vals[c % 4].clone());
                    c /= 4;
                    r
                })
                .collect();
            out.push(GappedChain::new(regions).expect("point chains always validate"));
        }
    }
    out
}

/// `count` distinct seeded models with dense regions and gaps, each at most
/// `max_regions` regions.
pub fn gapped_corpus(seed: u64, count: usize, max_regions: usize) -> Vec<GappedChain> {
    let mut rng = seeded_rng(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let m = gen_gapped(&mut rng, max_regions);
        if seen.insert(print_model(&m)) {
            out.push(m);
        }
    }
    out
}

/// Checks one model against one formula: the first-order evaluation and the
/// temporal evaluation of the translation must agree region by region.
pub fn check_translation(m: &GappedChain, f: &FoFormula, x: &str) -> Result<(), String> {
    let fo = eval_fo_regions(m, f, x)?;
    let g = translate(f, x)?;
    let tv = eval_tl(m, &g);
    if fo != tv {
        return Err(format!(
            "translation mismatch on `{}` for {}: first-order {:?} vs temporal {:?}",
            print_model(m),
            print_fo(f),
            fo,
            tv
        ));
    }
    Ok(())
}

/// Truth of a pointwise predicate combination on each region, straight from
/// the region's atom set; None on gaps.
fn combo_truths(m: &GappedChain, on: fn(&BTreeSet<String>) -> bool) -> Vec<Option<bool>> {
    m.regions.iter().map(|r| r.atoms().map(on)).collect()
}

/// Region truths of "every strictly later point satisfies the operand".
pub fn direct_box(m: &GappedChain, operand: &[Option<bool>]) -> Vec<Option<bool>> {
    let n = m.regions.len();
    let mut out = vec![None; n];
    for r in 0..n {
        if m.regions[r].is_gap() {
            continue;
        }
        // A dense region's own points lie strictly after one another.
        let mut val = !(m.regions[r].is_dense() && operand[r] != Some(true));
        if val {
            for s in r + 1..n {
                if !m.regions[s].is_gap() && operand[s] != Some(true) {
                    val = false;
                    break;
                }
            }
        }
        out[r] = Some(val);
    }
    out
}

/// Mirror of [`direct_box`].
pub fn direct_box_past(m: &GappedChain, operand: &[Option<bool>]) -> Vec<Option<bool>> {
    reversed(m, operand, direct_box)
}

/// Region truths of "points satisfying the operand accumulate immediately
/// after this point".
pub fn direct_kplus(m: &GappedChain, operand: &[Option<bool>]) -> Vec<Option<bool>> {
    let n = m.regions.len();
    let mut out = vec![None; n];
    for r in 0..n {
        match &m.regions[r] {
            Region::Gap => {}
            Region::Dense(_) => out[r] = Some(operand[r] == Some(true)),
            Region::Point(_) => {
                // The next region decides: nothing after means vacuous truth,
                // an adjacent point is an immediate successor with an empty
                // interval before it, and an adjacent dense region supplies
                // the approaching points.
                out[r] = Some(match m.regions.get(r + 1) {
                    None => true,
                    Some(Region::Point(_)) => false,
                    Some(Region::Dense(_)) => operand[r + 1] == Some(true),
                    Some(Region::Gap) => unreachable!("gap directly after a point region"),
                });
            }
        }
    }
    out
}

/// Mirror of [`direct_kplus`].
pub fn direct_kminus(m: &GappedChain, operand: &[Option<bool>]) -> Vec<Option<bool>> {
    reversed(m, operand, direct_kplus)
}

/// Region truths of "the operand holds on a nonempty stretch up to a gap,
/// past which its negation accumulates".
pub fn direct_gamma_plus(m: &GappedChain, operand: &[Option<bool>]) -> Vec<Option<bool>> {
    let n = m.regions.len();
    let mut out = vec![None; n];
    'regions: for r in 0..n {
        if m.regions[r].is_gap() {
            continue;
        }
        if m.regions[r].is_dense() && operand[r] != Some(true) {
            out[r] = Some(false);
            continue;
        }
        for s in r + 1..n {
            match &m.regions[s] {
                Region::Gap => {
                    // A gap region always has a dense neighbour on its right.
                    if operand[s + 1] == Some(false) {
                        out[r] = Some(true);
                        continue 'regions;
                    }
                }
                _ => {
                    if operand[s] != Some(true) {
                        out[r] = Some(false);
                        continue 'regions;
                    }
                }
            }
        }
        out[r] = Some(false);
    }
    out
}

/// Mirror of [`direct_gamma_plus`].
pub fn direct_gamma_minus(m: &GappedChain, operand: &[Option<bool>]) -> Vec<Option<bool>> {
    reversed(m, operand, direct_gamma_plus)
}

fn reversed(
    m: &GappedChain,
    operand: &[Option<bool>],
    forward: fn(&GappedChain, &[Option<bool>]) -> Vec<Option<bool>>,
) -> Vec<Option<bool>> {
    let rev_m = m.reverse();
    let mut rev_op = operand.to_vec();
    rev_op.reverse();
    let mut v = forward(&rev_m, &rev_op);
    v.reverse();
    v
}

/// Outcome of one law run.
#[derive(Debug, Clone)]
pub struct LawReport {
    pub name: String,
    pub trials: usize,
    pub failures: Vec<String>,
    pub millis: u128,
}

impl LawReport {
    fn new(name: &str, trials: usize, failures: Vec<String>, start: Instant) -> LawReport {
        LawReport {
            name: name.to_string(),
            trials,
            failures,
            millis: start.elapsed().as_millis(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One-line summary.
    pub fn line(&self) -> String {
        format!(
            "law {}: {} trials, {} failures, {} ms",
            self.name,
            self.trials,
            self.failures.len(),
            self.millis
        )
    }
}

// Law runs stop collecting after a handful of failures; one mismatch already
// fails the law and full enumeration would drown the report.
const FAILURE_CAP: usize = 8;

/// Checks the full translation pipeline on random formulas over the given
/// models.
pub fn run_translate_law(models: &[GappedChain], seed: u64, trials: usize) -> LawReport {
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for t in 0..trials {
        let f = gen_formula(&mut rng, 3);
        let m = &models[rng.gen_range(0..models.len())];
        if let Err(e) = check_translation(m, &f, "x") {
            failures.push(format!("trial {t}: {e}"));
            if failures.len() >= FAILURE_CAP {
                break;
            }
        }
    }
    LawReport::new("translate", trials, failures, start)
}

/// Cross-checks every operator on every model: temporal evaluation, the
/// first-order reading, and, for derived operators, a direct region walk.
pub fn run_expansions_law(models: &[GappedChain]) -> LawReport {
    let start = Instant::now();
    let p = tl::atom("P");
    let q = tl::atom("Q");
    let notp = tl::not(&p);
    let notq = tl::not(&q);

    type Direct = fn(&GappedChain, &[Option<bool>]) -> Vec<Option<bool>>;
    type Combo = fn(&BTreeSet<String>) -> bool;
    let on_p: Combo = |s| s.contains("P");
    let on_not_p: Combo = |s| !s.contains("P");
    let on_q: Combo = |s| s.contains("Q");
    let on_not_q: Combo = |s| !s.contains("Q");

    let unary: Vec<(String, TlFormula, Direct, Combo)> = vec![
        ("box+ P".into(), box_future(&p), direct_box as Direct, on_p),
        ("box- P".into(), box_past(&p), direct_box_past, on_p),
        ("box+ !Q".into(), box_future(&notq), direct_box, on_not_q),
        ("K+ P".into(), kplus(&p), direct_kplus, on_p),
        ("K+ !P".into(), kplus(&notp), direct_kplus, on_not_p),
        ("K- P".into(), kminus(&p), direct_kminus, on_p),
        ("K- Q".into(), kminus(&q), direct_kminus, on_q),
        ("G+ P".into(), gamma_plus(&p), direct_gamma_plus, on_p),
        ("G+ !P".into(), gamma_plus(&notp), direct_gamma_plus, on_not_p),
        ("G- P".into(), gamma_minus(&p), direct_gamma_minus, on_p),
        ("G- Q".into(), gamma_minus(&q), direct_gamma_minus, on_q),
    ];
    let binary: Vec<(String, TlFormula)> = vec![
        ("P U Q".into(), tl::until(&p, &q)),
        ("P S Q".into(), tl::since(&p, &q)),
        ("P Us Q".into(), tl::until_s(&p, &q)),
        ("P Ss Q".into(), tl::since_s(&p, &q)),
        ("!P U (P & Q)".into(), tl::until(&notp, &tl::and2(&p, &q))),
        ("P Us !Q".into(), tl::until_s(&p, &notq)),
        ("Q Ss !P".into(), tl::since_s(&q, &notp)),
    ];

    let mut trials = 0;
    let mut failures = Vec::new();
    'outer: for m in models {
        for (name, f, direct, on) in &unary {
            trials += 1;
            let tv = eval_tl(m, f);
            let dv = direct(m, &combo_truths(m, *on));
            let fv = eval_fo_regions(m, &tl_to_fo(f, "x"), "x");
            let agree = match &fv {
                Ok(fv) => tv == dv && tv == *fv,
                Err(_) => false,
            };
            if !agree {
                failures.push(format!(
                    "{name} on `{}`: temporal {:?}, direct {:?}, first-order {:?}",
                    print_model(m),
                    tv,
                    dv,
                    fv
                ));
                if failures.len() >= FAILURE_CAP {
                    break 'outer;
                }
            }
        }
        for (name, f) in &binary {
            trials += 1;
            let tv = eval_tl(m, f);
            let fv = eval_fo_regions(m, &tl_to_fo(f, "x"), "x");
            if fv.as_ref() != Ok(&tv) {
                failures.push(format!(
                    "{name} on `{}`: temporal {:?}, first-order {:?}",
                    print_model(m),
                    tv,
                    fv
                ));
                if failures.len() >= FAILURE_CAP {
                    break 'outer;
                }
            }
        }
    }
    LawReport::new("expansions", trials, failures, start)
}

fn sample_assignment(
    rng: &mut ChaCha8Rng,
    m: &GappedChain,
    vars: &[&str],
) -> Option<Assignment> {
    let poss = m.enumerate_sample_positions(2);
    if poss.is_empty() {
        return None;
    }
    let mut a = Assignment::new();
    for v in vars {
        a.insert(v.to_string(), poss[rng.gen_range(0..poss.len())].clone());
    }
    Some(a)
}

/// Checks that negation complements: a random simple formula and its
/// negation disagree at every model and assignment.
pub fn run_negation_law(models: &[GappedChain], seed: u64, trials: usize) -> LawReport {
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for t in 0..trials {
        let f = gen_simple(&mut rng, &["y", "z"], 2);
        let g = negate_simple(&f);
        let m = &models[rng.gen_range(0..models.len())];
        let a = match sample_assignment(&mut rng, m, &["y", "z"]) {
            Some(a) => a,
            None => continue,
        };
        match (eval_simple(m, &f, &a), eval_simple(m, &g, &a)) {
            (Ok(b1), Ok(b2)) => {
                if b1 == b2 {
                    failures.push(format!(
                        "trial {t}: `{f}` and its negation both {b1} on `{}` at y={:?} z={:?}",
                        print_model(m),
                        a["y"],
                        a["z"]
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("trial {t}: {e}")),
        }
        if failures.len() >= FAILURE_CAP {
            break;
        }
    }
    LawReport::new("negate", trials, failures, start)
}

/// Random interval over the model: endpoints among sample positions, gaps
/// and the infinities, in order, with random closedness.
fn gen_interval(rng: &mut ChaCha8Rng, m: &GappedChain) -> IntervalSpec {
    let mut bounds = vec![Boundary::MinusInfinity, Boundary::PlusInfinity];
    bounds.extend(m.enumerate_sample_positions(2).into_iter().map(Boundary::AtPosition));
    bounds.extend(m.gaps_of().into_iter().map(Boundary::AtGap));
    let lo = bounds[rng.gen_range(0..bounds.len())].clone();
    let hi = bounds[rng.gen_range(0..bounds.len())].clone();
    let (lo, hi) = if boundary_compare(&lo, &hi) == Ordering::Greater {
        (hi, lo)
    } else {
        (lo, hi)
    };
    IntervalSpec {
        lo,
        hi,
        lo_closed: rng.gen_bool(0.5),
        hi_closed: rng.gen_bool(0.5),
    }
}

/// Checks that conjoining two patterns matches the conjunction of the
/// patterns on random intervals.
pub fn run_conjoin_law(models: &[GappedChain], seed: u64, trials: usize) -> LawReport {
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for t in 0..trials {
        let p = gen_pe(&mut rng, 3);
        let q = gen_pe(&mut rng, 3);
        let m = &models[rng.gen_range(0..models.len())];
        let iv = gen_interval(&mut rng, m);
        let lhs = eval_pe(m, &iv, &p) && eval_pe(m, &iv, &q);
        let rhs = pe_conjoin(&p, &q).iter().any(|r| eval_pe(m, &iv, r));
        if lhs != rhs {
            failures.push(format!(
                "trial {t}: `{p}` and `{q}` conjoin wrong on `{}` over {:?}: separate {lhs}, joint {rhs}",
                print_model(m),
                iv
            ));
            if failures.len() >= FAILURE_CAP {
                break;
            }
        }
    }
    LawReport::new("conjoin", trials, failures, start)
}

/// Checks that normalization preserves meaning on random simple formulas.
pub fn run_normalize_law(models: &[GappedChain], seed: u64, trials: usize) -> LawReport {
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for t in 0..trials {
        let f = gen_simple(&mut rng, &["y", "z"], 2);
        let g = nf_to_simple(&simple_to_normal(&f));
        let m = &models[rng.gen_range(0..models.len())];
        let a = match sample_assignment(&mut rng, m, &["y", "z"]) {
            Some(a) => a,
            None => continue,
        };
        match (eval_simple(m, &f, &a), eval_simple(m, &g, &a)) {
            (Ok(b1), Ok(b2)) => {
                if b1 != b2 {
                    failures.push(format!(
                        "trial {t}: `{f}` normalizes to a formula worth {b2}, original {b1}, \
                         on `{}` at y={:?} z={:?}",
                        print_model(m),
                        a["y"],
                        a["z"]
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("trial {t}: {e}")),
        }
        if failures.len() >= FAILURE_CAP {
            break;
        }
    }
    LawReport::new("normalize", trials, failures, start)
}

/// Checks existential elimination: the eliminated formula holds exactly when
/// some witness position satisfies the original.
pub fn run_exists_law(models: &[GappedChain], seed: u64, trials: usize) -> LawReport {
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for t in 0..trials {
        let f = gen_simple(&mut rng, &["y", "z"], 2);
        let g = exists_simple(&f, "z");
        if g.free_vars().contains("z") {
            failures.push(format!("trial {t}: elimination left `z` free in `{g}`"));
            if failures.len() >= FAILURE_CAP {
                break;
            }
            continue;
        }
        let m = &models[rng.gen_range(0..models.len())];
        let a = match sample_assignment(&mut rng, m, &["y"]) {
            Some(a) => a,
            None => continue,
        };
        let py = a["y"].clone();
        let lhs = eval_simple(m, &g, &a);
        let rhs = candidate_positions(m, &[&py]).into_iter().try_fold(
            false,
            |acc, pz| -> Result<bool, String> {
                let mut a2 = a.clone();
                a2.insert("z".to_string(), pz);
                Ok(acc || eval_simple(m, &f, &a2)?)
            },
        );
        match (lhs, rhs) {
            (Ok(b1), Ok(b2)) => {
                if b1 != b2 {
                    failures.push(format!(
                        "trial {t}: exists over `{f}` gave {b1}, witness search {b2}, on `{}` \
                         at y={:?}",
                        print_model(m),
                        py
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("trial {t}: {e}")),
        }
        if failures.len() >= FAILURE_CAP {
            break;
        }
    }
    LawReport::new("exists", trials, failures, start)
}

/// Truth of `delta` at the single representative of each non-gap region.
fn region_truth(m: &GappedChain, delta: &TlFormula, region: usize) -> Option<bool> {
    m.rep_position(region)
        .map(|rep| eval_point_predicate(m, delta, &rep))
}

/// Checks the backward-step formulas in all three terminal modes against
/// explicit searches for the window they claim.
pub fn run_buildf_law(models: &[GappedChain], seed: u64, trials: usize) -> LawReport {
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    'trials: for t in 0..trials {
        let pe = gen_pe(&mut rng, 3);
        let k = pe.len();
        let mode = match rng.gen_range(0..3) {
            0 => TerminalMode::Bounded,
            1 => TerminalMode::Ray,
            _ => TerminalMode::ToGap(gen_slot(&mut rng)),
        };
        let fs = build_f(&pe, &mode);
        let i = rng.gen_range(1..=k);
        let slice = pe.slice(i, k);
        let m = &models[rng.gen_range(0..models.len())];
        for tpos in m.enumerate_sample_positions(1) {
            let lhs = eval_point_predicate(m, &fs[i - 1], &tpos);
            let rhs = search_window(m, &slice, &mode, &tpos);
            if lhs != rhs {
                failures.push(format!(
                    "trial {t}: piece {i} of `{pe}` ({mode:?}) at {tpos:?} on `{}`: formula \
                     {lhs}, search {rhs}",
                    print_model(m)
                ));
                if failures.len() >= FAILURE_CAP {
                    break 'trials;
                }
            }
        }
    }
    LawReport::new("buildf", trials, failures, start)
}

// Does the pattern fill a window of the mode's shape starting at `t`?
fn search_window(
    m: &GappedChain,
    slice: &PartitionExpr,
    mode: &TerminalMode,
    t: &Position,
) -> bool {
    match mode {
        TerminalMode::Ray => {
            let iv = IntervalSpec {
                lo: Boundary::AtPosition(t.clone()),
                hi: Boundary::PlusInfinity,
                lo_closed: true,
                hi_closed: false,
            };
            eval_pe(m, &iv, slice)
        }
        TerminalMode::Bounded => candidate_positions(m, &[t])
            .into_iter()
            .filter(|b| compare(b, t) != Ordering::Less)
            .any(|b| eval_pe(m, &IntervalSpec::closed(t.clone(), b), slice)),
        TerminalMode::ToGap(delta) => m.gaps_of().into_iter().any(|g| {
            // The gap must lie ahead of t: its left neighbour region is
            // dense, so it suffices that t's region comes no later.
            if t.region() >= g {
                return false;
            }
            let iv = IntervalSpec {
                lo: Boundary::AtPosition(t.clone()),
                hi: Boundary::AtGap(g),
                lo_closed: true,
                hi_closed: false,
            };
            if !eval_pe(m, &iv, slice) {
                return false;
            }
            // delta holds throughout (t, g): on the rest of t's region if
            // dense, and on every region strictly between.
            if m.regions[t.region()].is_dense()
                && region_truth(m, delta, t.region()) != Some(true)
            {
                return false;
            }
            for s in t.region() + 1..g {
                if !m.regions[s].is_gap() && region_truth(m, delta, s) != Some(true) {
                    return false;
                }
            }
            // Its negation accumulates just past the gap.
            region_truth(m, delta, g + 1) == Some(false)
        }),
    }
}

/// Checks that on finite chains the translation agrees and every gap
/// modality inside it is inert.
pub fn run_degeneration_law(seed: u64, trials: usize) -> LawReport {
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for t in 0..trials {
        let f = gen_formula(&mut rng, 3);
        let m = gen_chain(&mut rng, 5);
        if let Err(e) = check_translation(&m, &f, "x") {
            failures.push(format!("trial {t}: {e}"));
            if failures.len() >= FAILURE_CAP {
                break;
            }
            continue;
        }
        let g = translate(&f, "x").expect("translation succeeded above");
        for sub in g.postorder() {
            if matches!(sub.node(), TlNode::UntilS(..) | TlNode::SinceS(..)) {
                let tv = eval_tl(&m, &sub);
                if tv.iter().any(|b| *b == Some(true)) {
                    failures.push(format!(
                        "trial {t}: gap modality `{sub}` fired on finite chain `{}`",
                        print_model(&m)
                    ));
                    break;
                }
            }
        }
        if failures.len() >= FAILURE_CAP {
            break;
        }
    }
    LawReport::new("degeneration", trials, failures, start)
}

/// Differential test of the first-order evaluator against the brute one on
/// finite chains.
pub fn run_differential_law(seed: u64, trials: usize) -> LawReport {
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for t in 0..trials {
        let m = gen_chain(&mut rng, 6);
        let chain = chain_valuations(&m).expect("generated chains are finite");
        let f = gen_formula(&mut rng, 3);
        let i = rng.gen_range(0..chain.len());
        let brute = brute_fo(&chain, &f, &BTreeMap::from([("x".to_string(), i)]));
        let mut a = Assignment::new();
        a.insert("x".to_string(), Position::AtPoint(i));
        match eval_fo(&m, &f, &a) {
            Ok(b) => {
                if b != brute {
                    failures.push(format!(
                        "trial {t}: {} at point {i} of `{}`: evaluator {b}, brute {brute}",
                        print_fo(&f),
                        print_model(&m)
                    ));
                }
            }
            Err(e) => failures.push(format!("trial {t}: {e}")),
        }
        if failures.len() >= FAILURE_CAP {
            break;
        }
    }
    LawReport::new("differential", trials, failures, start)
}

/// The names [`run_law`] accepts.
pub const LAW_NAMES: [&str; 9] = [
    "translate",
    "expansions",
    "negate",
    "conjoin",
    "normalize",
    "exists",
    "buildf",
    "degeneration",
    "differential",
];

/// Runs one named law over the default corpora.
pub fn run_law(name: &str, seed: u64, trials: usize) -> Result<LawReport, String> {
    let mixed = || {
        let mut ms = finite_corpus();
        ms.extend(gapped_corpus(seed ^ 0x9e3779b97f4a7c15, 200, 7));
        ms
    };
    match name {
        "translate" => Ok(run_translate_law(&mixed(), seed, trials)),
        "expansions" => Ok(run_expansions_law(&mixed())),
        "negate" => Ok(run_negation_law(&mixed(), seed, trials)),
        "conjoin" => Ok(run_conjoin_law(&mixed(), seed, trials)),
        "normalize" => Ok(run_normalize_law(&mixed(), seed, trials)),
        "exists" => Ok(run_exists_law(&mixed(), seed, trials)),
        "buildf" => Ok(run_buildf_law(&mixed(), seed, trials)),
        "degeneration" => Ok(run_degeneration_law(seed, trials)),
        "differential" => Ok(run_differential_law(seed, trials)),
        _ => Err(format!(
            "unknown law '{name}' (expected one of: {})",
            LAW_NAMES.join(", ")
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::{parse_fo, parse_tl};
    use crate::models::parse_model;

    #[test]
    fn brute_matches_hand_computation() {
        let m = parse_model("pt{P} pt{} pt{P,Q}").unwrap();
        let chain = chain_valuations(&m).unwrap();
        let f = parse_fo("(E y (& (< x y) (P y)))").unwrap();
        let at = |i: usize| brute_fo(&chain, &f, &BTreeMap::from([("x".to_string(), i)]));
        assert!(at(0));
        assert!(at(1));
        assert!(!at(2));
    }

    #[test]
    fn corpora_have_the_advertised_shape() {
        let chains = finite_corpus();
        assert_eq!(chains.len(), 340);
        assert!(chains.iter().all(|m| m.is_finite_chain()));
        let gapped = gapped_corpus(7, 40, 7);
        assert_eq!(gapped.len(), 40);
        assert!(gapped.iter().all(|m| m.validate().is_ok()));
        assert!(gapped.iter().all(|m| m.regions.iter().any(|r| r.is_dense())));
    }

    #[test]
    fn generated_formulas_stay_in_the_fragment() {
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let f = gen_formula(&mut rng, 3);
            assert!(f.quantifier_depth() <= 3);
            let fv = f.free_vars();
            assert!(fv.contains("x") && fv.len() == 1, "free vars {fv:?}");
        }
    }

    #[test]
    fn until_reading_matches_evaluator() {
        let f = parse_tl("(U P Q)").unwrap();
        for src in [
            "pt{P} pt{P} pt{Q}",
            "dense{P} gap dense{Q}",
            "pt{} dense{P,Q} pt{}",
        ] {
            let m = parse_model(src).unwrap();
            let fo = tl_to_fo(&f, "x");
            assert_eq!(eval_fo_regions(&m, &fo, "x").unwrap(), eval_tl(&m, &f), "{src}");
        }
    }

    #[test]
    fn gap_reading_matches_evaluator() {
        let f = parse_tl("(Us P Q)").unwrap();
        for src in [
            "dense{P} gap dense{Q}",
            "dense{P} gap dense{P,Q}",
            "pt{P} dense{P} gap dense{Q} pt{}",
            "pt{P} pt{Q}",
        ] {
            let m = parse_model(src).unwrap();
            let fo = tl_to_fo(&f, "x");
            assert_eq!(eval_fo_regions(&m, &fo, "x").unwrap(), eval_tl(&m, &f), "{src}");
        }
    }

    #[test]
    fn small_law_runs_pass() {
        let mut models = finite_corpus();
        models.truncate(60);
        models.extend(gapped_corpus(3, 25, 6));
        for rep in [
            run_translate_law(&models, 5, 40),
            run_negation_law(&models, 5, 60),
            run_conjoin_law(&models, 5, 80),
            run_normalize_law(&models, 5, 60),
            run_exists_law(&models, 5, 60),
            run_buildf_law(&models, 5, 40),
            run_degeneration_law(5, 30),
            run_differential_law(5, 200),
        ] {
            assert!(rep.passed(), "{}\n{}", rep.line(), rep.failures.join("\n"));
        }
    }

    #[test]
    fn expansions_law_passes_on_a_sample() {
        let mut models: Vec<GappedChain> = finite_corpus().into_iter().step_by(9).collect();
        models.extend(gapped_corpus(9, 20, 6));
        let rep = run_expansions_law(&models);
        assert!(rep.passed(), "{}\n{}", rep.line(), rep.failures.join("\n"));
    }
}
