//! Deciding partition expressions on intervals of a model.
//!
//! The points of the interval are collected into cells: single points and
//! clipped dense segments (gap markers hold no points and vanish here —
//! pieces of a partition may freely span a gap). A small nondeterministic
//! machine then threads the slots through the cells. Between cells the state
//! is (next slot, is it already absorbing); inside a dense segment a closure
//! computes every way pieces can carve the segment, using the two facts that
//! drive all of it: a dense set can be cut anywhere, with the cut point going
//! to either side but not both, and a set with no least point cannot start a
//! piece that is required to be a singleton.

use crate::models::{boundary_compare, Boundary, GappedChain, IntervalSpec, Position, Region};
use crate::partition::PartitionExpr;
use crate::semantics::{Evaluator, TruthMap};
use num::BigRational;
use std::cmp::Ordering;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    /// A lone point of the given region (a `pt` region, or a dense region
    /// clipped down to one point).
    Pt(usize),
    /// An infinite densely ordered run of points of one dense region, with
    /// or without its own least and greatest point.
    Seg {
        r: usize,
        has_min: bool,
        has_max: bool,
    },
}

// Where a boundary (known not to lie inside region r) sits relative to it.
fn side_of_region(b: &Boundary, r: usize) -> Ordering {
    match b {
        Boundary::MinusInfinity => Ordering::Less,
        Boundary::PlusInfinity => Ordering::Greater,
        Boundary::AtGap(i) => i.cmp(&r),
        Boundary::AtPosition(p) => p.region().cmp(&r),
    }
}

fn dense_clip(iv: &IntervalSpec, r: usize) -> Option<(Option<(BigRational, bool)>, Option<(BigRational, bool)>)> {
    let lo = match &iv.lo {
        Boundary::AtPosition(Position::InDense(rr, q)) if *rr == r => {
            Some((q.clone(), iv.lo_closed))
        }
        b => match side_of_region(b, r) {
            Ordering::Less => None,
            _ => return None, // lower bound at or beyond the region: empty
        },
    };
    let hi = match &iv.hi {
        Boundary::AtPosition(Position::InDense(rr, q)) if *rr == r => {
            Some((q.clone(), iv.hi_closed))
        }
        b => match side_of_region(b, r) {
            Ordering::Greater => None,
            _ => return None,
        },
    };
    Some((lo, hi))
}

fn cells(model: &GappedChain, iv: &IntervalSpec) -> Vec<Cell> {
    let mut out = Vec::new();
    for (r, reg) in model.regions.iter().enumerate() {
        match reg {
            Region::Gap => {}
            Region::Point(_) => {
                let p = Boundary::AtPosition(Position::AtPoint(r));
                let above_lo = match boundary_compare(&p, &iv.lo) {
                    Ordering::Greater => true,
                    Ordering::Equal => iv.lo_closed,
                    Ordering::Less => false,
                };
                let below_hi = match boundary_compare(&p, &iv.hi) {
                    Ordering::Less => true,
                    Ordering::Equal => iv.hi_closed,
                    Ordering::Greater => false,
                };
                if above_lo && below_hi {
                    out.push(Cell::Pt(r));
                }
            }
            Region::Dense(_) => {
                if let Some((lo, hi)) = dense_clip(iv, r) {
                    match (&lo, &hi) {
                        (Some((a, ca)), Some((b, cb))) => match a.cmp(b) {
                            Ordering::Greater => {}
                            Ordering::Equal => {
                                if *ca && *cb {
                                    out.push(Cell::Pt(r));
                                }
                            }
                            Ordering::Less => out.push(Cell::Seg {
                                r,
                                has_min: *ca,
                                has_max: *cb,
                            }),
                        },
                        _ => out.push(Cell::Seg {
                            r,
                            has_min: lo.map_or(false, |(_, c)| c),
                            has_max: hi.map_or(false, |(_, c)| c),
                        }),
                    }
                }
            }
        }
    }
    out
}

/// Decides the partition expression on the interval, reusing the evaluator's
/// memoized predicate truths.
pub fn eval_pe_with(ev: &mut Evaluator, iv: &IntervalSpec, pe: &PartitionExpr) -> bool {
    let cs = cells(ev.model(), iv);
    if cs.is_empty() {
        return false; // no points, but every slot needs a nonempty piece
    }
    let n = pe.len();
    let tmaps: Vec<TruthMap> = pe.deltas.iter().map(|d| ev.truths(d)).collect();
    let tr = |slot: usize, r: usize| tmaps[slot - 1][r] == Some(true);
    let marked = |slot: usize| pe.is_marked(slot);

    // (next slot j, started): pieces 1..j-1 are complete; piece j is open and
    // absorbing when started (never a marked slot). j ranges over 1..=n+1.
    let mut states: Vec<(usize, bool)> = vec![(1, false)];
    for cell in &cs {
        let mut next: BTreeSet<(usize, bool)> = BTreeSet::new();
        match cell {
            Cell::Pt(r) => {
                for &(j, started) in &states {
                    if started {
                        if tr(j, *r) {
                            next.insert((j, true)); // the point extends piece j
                        }
                        if j + 1 <= n && tr(j + 1, *r) {
                            // piece j closes at the boundary; the point opens j+1
                            if marked(j + 1) {
                                next.insert((j + 2, false));
                            } else {
                                next.insert((j + 1, true));
                            }
                        }
                    } else if j <= n && tr(j, *r) {
                        if marked(j) {
                            next.insert((j + 1, false));
                        } else {
                            next.insert((j, true));
                        }
                    }
                }
            }
            Cell::Seg { r, has_min, has_max } => {
                let r = *r;
                // Absorbing slots reachable inside this cell.
                let mut seen = vec![false; n + 2];
                let mut queue: Vec<usize> = Vec::new();
                let push = |s: usize, seen: &mut Vec<bool>, queue: &mut Vec<usize>| {
                    if s <= n && !seen[s] {
                        seen[s] = true;
                        queue.push(s);
                    }
                };

                let mut fresh: BTreeSet<usize> = BTreeSet::new();
                for &(j, started) in &states {
                    if started {
                        fresh.insert(j + 1); // close j at the boundary
                        if tr(j, r) {
                            push(j, &mut seen, &mut queue); // j absorbs a prefix
                        }
                    } else {
                        fresh.insert(j);
                    }
                }
                for j in fresh {
                    if j > n {
                        continue; // points remain but no slots do
                    }
                    if *has_min {
                        if tr(j, r) {
                            // piece j = {min}: the min-less rest falls to j+1,
                            // which therefore cannot be a singleton slot
                            if j + 1 <= n && tr(j + 1, r) && !marked(j + 1) {
                                push(j + 1, &mut seen, &mut queue);
                            }
                            if !marked(j) {
                                push(j, &mut seen, &mut queue);
                            }
                        }
                    } else if tr(j, r) && !marked(j) {
                        // an open start has no first point to pin down
                        push(j, &mut seen, &mut queue);
                    }
                }
                while let Some(s) = queue.pop() {
                    // absorbing to the cell's end: stay open, or close there
                    next.insert((s, true));
                    next.insert((s + 1, false));
                    // or close at an interior cut and hand over
                    if s + 1 <= n && tr(s + 1, r) {
                        if !marked(s + 1) {
                            push(s + 1, &mut seen, &mut queue);
                        } else {
                            // singleton {c}: interior c leaves a min-less rest,
                            // c = max exhausts the cell
                            if s + 2 <= n && tr(s + 2, r) && !marked(s + 2) {
                                push(s + 2, &mut seen, &mut queue);
                            }
                            if *has_max {
                                next.insert((s + 2, false));
                            }
                        }
                    }
                }
            }
        }
        states = next.into_iter().collect();
        if states.is_empty() {
            return false;
        }
    }
    states
        .iter()
        .any(|&(j, started)| (j == n + 1 && !started) || (j == n && started))
}

/// Decides the partition expression on an interval of the model.
pub fn eval_pe(model: &GappedChain, iv: &IntervalSpec, pe: &PartitionExpr) -> bool {
    eval_pe_with(&mut Evaluator::new(model), iv, pe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::tl::{atom, tt};
    use crate::models::{frac, parse_model};

    fn pe(deltas: Vec<crate::logic::tl::TlFormula>, marks: &[usize]) -> PartitionExpr {
        PartitionExpr::of(deltas, marks)
    }

    #[test]
    fn two_marked_slots_mean_exactly_two_points() {
        let m = parse_model("pt{} pt{} pt{}").unwrap();
        let succ = pe(vec![tt(), tt()], &[1, 2]);
        let iv01 = IntervalSpec::closed(Position::AtPoint(0), Position::AtPoint(1));
        let iv02 = IntervalSpec::closed(Position::AtPoint(0), Position::AtPoint(2));
        assert!(eval_pe(&m, &iv01, &succ));
        assert!(!eval_pe(&m, &iv02, &succ), "an extra point fits no slot");
    }

    #[test]
    fn empty_intervals_reject_everything() {
        let m = parse_model("pt{} pt{}").unwrap();
        let one = pe(vec![tt()], &[]);
        let back = IntervalSpec::closed(Position::AtPoint(1), Position::AtPoint(0));
        assert!(!eval_pe(&m, &back, &one));
        let open = IntervalSpec::open(
            Boundary::AtPosition(Position::AtPoint(0)),
            Boundary::AtPosition(Position::AtPoint(1)),
        );
        assert!(!eval_pe(&m, &open, &one), "open pair interval has no points");
    }

    #[test]
    fn dense_open_start_cannot_open_with_a_singleton() {
        let m = parse_model("dense{}").unwrap();
        let iv = IntervalSpec::whole();
        assert!(!eval_pe(&m, &iv, &pe(vec![tt(), tt()], &[1])));
        assert!(eval_pe(&m, &iv, &pe(vec![tt(), tt()], &[])));
        // With a closed left end the first point exists and can be pinned.
        let iv2 = IntervalSpec::left_closed(
            Position::InDense(0, frac(1, 2)),
            Boundary::PlusInfinity,
        );
        assert!(eval_pe(&m, &iv2, &pe(vec![tt(), tt()], &[1])));
        assert!(!eval_pe(&m, &iv2, &pe(vec![tt(), tt()], &[1, 2])));
    }

    #[test]
    fn pieces_span_gaps() {
        let m = parse_model("dense{P} gap dense{Q}").unwrap();
        let iv = IntervalSpec::whole();
        assert!(eval_pe(&m, &iv, &pe(vec![atom("P"), atom("Q")], &[])));
        assert!(eval_pe(&m, &iv, &pe(vec![tt()], &[])));
        assert!(!eval_pe(&m, &iv, &pe(vec![atom("P")], &[])));
        assert!(!eval_pe(&m, &iv, &pe(vec![atom("P"), atom("Q")], &[1])));
    }

    #[test]
    fn interior_singleton_inside_a_dense_segment() {
        let m = parse_model("dense{P}").unwrap();
        let iv = IntervalSpec::whole();
        // True; {c}; True — the cut point can be pinned anywhere inside.
        assert!(eval_pe(&m, &iv, &pe(vec![tt(), atom("P"), tt()], &[2])));
        // ... but two pinned points in a row leave a min-less set unservable.
        assert!(!eval_pe(&m, &iv, &pe(vec![tt(), atom("P"), atom("P"), tt()], &[2, 3])));
        // With an unmarked spacer between them it works again.
        assert!(eval_pe(
            &m,
            &iv,
            &pe(vec![tt(), atom("P"), atom("P"), atom("P"), tt()], &[2, 4])
        ));
    }

    #[test]
    fn clipping_by_positions_works() {
        let m = parse_model("pt{P} dense{Q} pt{R}").unwrap();
        // [p0, mid]: point P then a Q-segment ending at a closed max.
        let iv = IntervalSpec::closed(Position::AtPoint(0), Position::InDense(1, frac(1, 2)));
        assert!(eval_pe(&m, &iv, &pe(vec![atom("P"), atom("Q")], &[1])));
        assert!(eval_pe(&m, &iv, &pe(vec![atom("P"), atom("Q"), atom("Q")], &[1, 3])));
        assert!(!eval_pe(&m, &iv, &pe(vec![atom("P"), atom("Q"), atom("R")], &[1])));
        // Degenerate [q, q] single dense point.
        let single =
            IntervalSpec::closed(Position::InDense(1, frac(1, 3)), Position::InDense(1, frac(1, 3)));
        assert!(eval_pe(&m, &single, &pe(vec![atom("Q")], &[1])));
        assert!(!eval_pe(&m, &single, &pe(vec![atom("R")], &[1])));
    }

    #[test]
    fn mirror_law_on_reversed_models() {
        let m = parse_model("pt{P} dense{Q} gap dense{P,Q} pt{}").unwrap();
        let cases = vec![
            (IntervalSpec::whole(), pe(vec![atom("P"), atom("Q"), tt()], &[1])),
            (
                IntervalSpec::closed(Position::AtPoint(0), Position::InDense(3, frac(2, 3))),
                pe(vec![tt(), atom("Q")], &[]),
            ),
            (
                IntervalSpec::left_closed(Position::AtPoint(0), Boundary::AtGap(2)),
                pe(vec![atom("P"), atom("Q")], &[1]),
            ),
        ];
        for (iv, p) in cases {
            assert_eq!(
                eval_pe(&m, &iv, &p),
                eval_pe(&m.reverse(), &m.reverse_interval(&iv), &p.mirror()),
                "mirror disagreed for {} on {}",
                p,
                m
            );
        }
    }
}
