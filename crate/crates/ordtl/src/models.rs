//! Finitely presented linear orders: point and dense regions with explicit gaps.
//!
//! A model is a finite left-to-right sequence of regions. A `pt` region is a
//! single point; a `dense` region stands for a densely ordered set of points
//! (think an open rational interval) on which every predicate is constant; a
//! `gap` region marks a Dedekind cut with no point in it sitting between its
//! two dense neighbours. Finite chains are exactly the models made of `pt`
//! regions only.
//!
//! Text form, whitespace separated: `pt{P,Q} dense{P} gap dense{} pt{}`.

use num::BigRational;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// One region of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    /// A single point and the predicates true at it.
    Point(BTreeSet<String>),
    /// A dense stretch of points sharing one predicate valuation.
    Dense(BTreeSet<String>),
    /// A cut with no point in it; must sit between two dense regions.
    Gap,
}

impl Region {
    /// Truth of a predicate on the region; None on gaps.
    pub fn truth(&self, pred: &str) -> Option<bool> {
        match self {
            Region::Point(atoms) | Region::Dense(atoms) => Some(atoms.contains(pred)),
            Region::Gap => None,
        }
    }

    /// The predicate set, if the region carries points.
    pub fn atoms(&self) -> Option<&BTreeSet<String>> {
        match self {
            Region::Point(atoms) | Region::Dense(atoms) => Some(atoms),
            Region::Gap => None,
        }
    }

    pub fn is_gap(&self) -> bool {
        matches!(self, Region::Gap)
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Region::Dense(_))
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Region::Point(_))
    }
}

/// A model: a non-empty sequence of regions satisfying [`GappedChain::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GappedChain {
    pub regions: Vec<Region>,
}

impl GappedChain {
    /// Builds and validates a model.
    pub fn new(regions: Vec<Region>) -> Result<GappedChain, String> {
        let m = GappedChain { regions };
        m.validate()?;
        Ok(m)
    }

    /// Checks the structural invariants:
    /// - at least one region, at least one of them not a gap;
    /// - every gap has a dense region on both sides (so never at the ends);
    /// - no two dense regions are adjacent. Two abutting dense regions would
    ///   hide an unmarked cut between them, and the gap-sensitive operators
    ///   would then disagree with the order the model claims to present.
    pub fn validate(&self) -> Result<(), String> {
        if self.regions.is_empty() {
            return Err("model has no regions".to_string());
        }
        if self.regions.iter().all(|r| r.is_gap()) {
            return Err("model has no points".to_string());
        }
        for (i, r) in self.regions.iter().enumerate() {
            match r {
                Region::Gap => {
                    let left_dense = i > 0 && self.regions[i - 1].is_dense();
                    let right_dense =
                        i + 1 < self.regions.len() && self.regions[i + 1].is_dense();
                    if !left_dense || !right_dense {
                        return Err(format!(
                            "gap at region {} is not flanked by dense regions on both sides",
                            i
                        ));
                    }
                }
                Region::Dense(_) => {
                    if i + 1 < self.regions.len() && self.regions[i + 1].is_dense() {
                        return Err(format!(
                            "dense regions {} and {} are adjacent; separate them with a \
                             point or an explicit gap",
                            i,
                            i + 1
                        ));
                    }
                }
                Region::Point(_) => {}
            }
        }
        Ok(())
    }

    /// Number of regions.
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// True when the model is a finite chain: points only.
    pub fn is_finite_chain(&self) -> bool {
        self.regions.iter().all(|r| r.is_point())
    }

    /// Indices of the gap regions, left to right.
    pub fn gaps_of(&self) -> Vec<usize> {
        self.regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_gap())
            .map(|(i, _)| i)
            .collect()
    }

    /// The same order read right to left.
    pub fn reverse(&self) -> GappedChain {
        GappedChain {
            regions: self.regions.iter().rev().cloned().collect(),
        }
    }

    /// Where a position lands after [`GappedChain::reverse`].
    pub fn reverse_position(&self, p: &Position) -> Position {
        let n = self.regions.len();
        match p {
            Position::AtPoint(i) => Position::AtPoint(n - 1 - i),
            Position::InDense(i, q) => {
                Position::InDense(n - 1 - i, BigRational::from_integer(1.into()) - q)
            }
        }
    }

    /// Where a boundary lands after [`GappedChain::reverse`].
    pub fn reverse_boundary(&self, b: &Boundary) -> Boundary {
        match b {
            Boundary::MinusInfinity => Boundary::PlusInfinity,
            Boundary::PlusInfinity => Boundary::MinusInfinity,
            Boundary::AtGap(i) => Boundary::AtGap(self.regions.len() - 1 - i),
            Boundary::AtPosition(p) => Boundary::AtPosition(self.reverse_position(p)),
        }
    }

    /// Where an interval lands after [`GappedChain::reverse`].
    pub fn reverse_interval(&self, iv: &IntervalSpec) -> IntervalSpec {
        IntervalSpec {
            lo: self.reverse_boundary(&iv.hi),
            hi: self.reverse_boundary(&iv.lo),
            lo_closed: iv.hi_closed,
            hi_closed: iv.lo_closed,
        }
    }

    /// A canonical position inside a region; None for gaps.
    pub fn rep_position(&self, region: usize) -> Option<Position> {
        match &self.regions[region] {
            Region::Point(_) => Some(Position::AtPoint(region)),
            Region::Dense(_) => Some(Position::InDense(region, frac(1, 2))),
            Region::Gap => None,
        }
    }

    /// Deterministic sample of positions: each point region contributes its
    /// point, each dense region `per_dense` equally spaced interior positions.
    pub fn enumerate_sample_positions(&self, per_dense: usize) -> Vec<Position> {
        let mut out = Vec::new();
        for (i, r) in self.regions.iter().enumerate() {
            match r {
                Region::Point(_) => out.push(Position::AtPoint(i)),
                Region::Dense(_) => {
                    for j in 1..=per_dense {
                        out.push(Position::InDense(
                            i,
                            frac(j as i64, per_dense as i64 + 1),
                        ));
                    }
                }
                Region::Gap => {}
            }
        }
        out
    }
}

/// A point of a model: either the point of a `pt` region, or a point of a
/// dense region named by a local coordinate strictly between 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Position {
    AtPoint(usize),
    InDense(usize, BigRational),
}

impl Position {
    /// Index of the region the position lies in.
    pub fn region(&self) -> usize {
        match self {
            Position::AtPoint(i) | Position::InDense(i, _) => *i,
        }
    }
}

/// Order on positions of one model: by region, then by local coordinate.
pub fn compare(a: &Position, b: &Position) -> Ordering {
    a.region().cmp(&b.region()).then_with(|| match (a, b) {
        (Position::InDense(_, p), Position::InDense(_, q)) => p.cmp(q),
        (Position::AtPoint(_), Position::AtPoint(_)) => Ordering::Equal,
        // Distinct variants never share a region in a well-formed model.
        (Position::AtPoint(_), Position::InDense(_, _)) => Ordering::Less,
        (Position::InDense(_, _), Position::AtPoint(_)) => Ordering::Greater,
    })
}

impl PartialOrd for Position {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(compare(self, other))
    }
}

impl Ord for Position {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

/// One end of an interval of a model. Gaps and infinities are never points,
/// so only `AtPosition` bounds distinguish closed from open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Boundary {
    MinusInfinity,
    PlusInfinity,
    AtPosition(Position),
    AtGap(usize),
}

/// Order on boundaries of one model.
pub fn boundary_compare(a: &Boundary, b: &Boundary) -> Ordering {
    use Boundary::*;
    match (a, b) {
        (MinusInfinity, MinusInfinity) | (PlusInfinity, PlusInfinity) => Ordering::Equal,
        (MinusInfinity, _) | (_, PlusInfinity) => Ordering::Less,
        (_, MinusInfinity) | (PlusInfinity, _) => Ordering::Greater,
        (AtPosition(p), AtPosition(q)) => compare(p, q),
        (AtGap(i), AtGap(j)) => i.cmp(j),
        // A gap region holds no positions, so region order decides.
        (AtPosition(p), AtGap(j)) => p.region().cmp(j),
        (AtGap(i), AtPosition(q)) => i.cmp(&q.region()),
    }
}

/// An interval of a model, given by two boundaries and closedness flags.
/// The flags are only meaningful on `AtPosition` bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSpec {
    pub lo: Boundary,
    pub hi: Boundary,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl IntervalSpec {
    /// `[lo, hi]`.
    pub fn closed(lo: Position, hi: Position) -> IntervalSpec {
        IntervalSpec {
            lo: Boundary::AtPosition(lo),
            hi: Boundary::AtPosition(hi),
            lo_closed: true,
            hi_closed: true,
        }
    }

    /// `(lo, hi)`.
    pub fn open(lo: Boundary, hi: Boundary) -> IntervalSpec {
        IntervalSpec {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    /// `[lo, hi)`.
    pub fn left_closed(lo: Position, hi: Boundary) -> IntervalSpec {
        IntervalSpec {
            lo: Boundary::AtPosition(lo),
            hi,
            lo_closed: true,
            hi_closed: false,
        }
    }

    /// `(lo, hi]`.
    pub fn right_closed(lo: Boundary, hi: Position) -> IntervalSpec {
        IntervalSpec {
            lo,
            hi: Boundary::AtPosition(hi),
            lo_closed: false,
            hi_closed: true,
        }
    }

    /// The whole order.
    pub fn whole() -> IntervalSpec {
        IntervalSpec::open(Boundary::MinusInfinity, Boundary::PlusInfinity)
    }
}

/// Rational `n / d` as a dense-region coordinate.
pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn parse_atoms(inner: &str) -> Result<BTreeSet<String>, String> {
    let mut atoms = BTreeSet::new();
    if inner.is_empty() {
        return Ok(atoms);
    }
    for name in inner.split(',') {
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(format!("bad predicate name '{}'", name));
        }
        atoms.insert(name.to_string());
    }
    Ok(atoms)
}

/// Parses the text form of a model and validates it.
pub fn parse_model(src: &str) -> Result<GappedChain, String> {
    let mut regions = Vec::new();
    for tok in src.split_whitespace() {
        if tok == "gap" {
            regions.push(Region::Gap);
        } else if let Some(inner) = tok.strip_prefix("pt{").and_then(|s| s.strip_suffix('}')) {
            regions.push(Region::Point(parse_atoms(inner)?));
        } else if let Some(inner) = tok
            .strip_prefix("dense{")
            .and_then(|s| s.strip_suffix('}'))
        {
            regions.push(Region::Dense(parse_atoms(inner)?));
        } else {
            return Err(format!("bad region token '{}'", tok));
        }
    }
    GappedChain::new(regions)
}

/// Renders a model in the text form accepted by [`parse_model`].
pub fn print_model(m: &GappedChain) -> String {
    let mut parts = Vec::with_capacity(m.regions.len());
    for r in &m.regions {
        match r {
            Region::Gap => parts.push("gap".to_string()),
            Region::Point(atoms) => {
                parts.push(format!("pt{{{}}}", atoms.iter().cloned().collect::<Vec<_>>().join(",")))
            }
            Region::Dense(atoms) => parts.push(format!(
                "dense{{{}}}",
                atoms.iter().cloned().collect::<Vec<_>>().join(",")
            )),
        }
    }
    parts.join(" ")
}

impl fmt::Display for GappedChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_model(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for src in [
            "pt{P} pt{Q}",
            "dense{P} gap dense{Q}",
            "pt{} dense{P,Q} pt{Q}",
            "dense{}",
        ] {
            let m = parse_model(src).unwrap();
            assert_eq!(print_model(&m), src);
            assert_eq!(parse_model(&print_model(&m)).unwrap(), m);
        }
    }

    #[test]
    fn validation_rejects_malformed_models() {
        assert!(parse_model("").is_err());
        assert!(parse_model("gap").is_err());
        assert!(parse_model("gap dense{P}").is_err(), "gap at left end");
        assert!(parse_model("dense{P} gap").is_err(), "gap at right end");
        assert!(parse_model("pt{P} gap dense{Q}").is_err(), "gap next to a point");
        assert!(parse_model("dense{P} gap gap dense{Q}").is_err());
        assert!(parse_model("dense{P} dense{Q}").is_err(), "adjacent dense");
        assert!(parse_model("pt{P Q}").is_err(), "space inside braces");
    }

    #[test]
    fn sample_positions_are_frozen() {
        let m = parse_model("pt{P}").unwrap();
        assert_eq!(m.enumerate_sample_positions(3), vec![Position::AtPoint(0)]);

        let m = parse_model("dense{P}").unwrap();
        assert_eq!(
            m.enumerate_sample_positions(2),
            vec![
                Position::InDense(0, frac(1, 3)),
                Position::InDense(0, frac(2, 3))
            ]
        );

        let m = parse_model("dense{} gap dense{}").unwrap();
        assert_eq!(
            m.enumerate_sample_positions(1),
            vec![
                Position::InDense(0, frac(1, 2)),
                Position::InDense(2, frac(1, 2))
            ]
        );
    }

    #[test]
    fn reverse_is_involutive_on_positions() {
        let m = parse_model("pt{P} dense{Q} gap dense{}").unwrap();
        assert_eq!(m.reverse().reverse(), m);
        for p in m.enumerate_sample_positions(2) {
            let q = m.reverse_position(&p);
            assert_eq!(m.reverse().reverse_position(&q), p);
        }
        assert_eq!(
            m.reverse_position(&Position::InDense(1, frac(1, 3))),
            Position::InDense(2, frac(2, 3))
        );
    }

    #[test]
    fn boundary_order_is_sane() {
        use Boundary::*;
        let cmp = boundary_compare;
        assert_eq!(cmp(&MinusInfinity, &AtGap(1)), Ordering::Less);
        assert_eq!(cmp(&AtGap(1), &AtPosition(Position::InDense(2, frac(1, 2)))), Ordering::Less);
        assert_eq!(
            cmp(
                &AtPosition(Position::InDense(0, frac(1, 3))),
                &AtPosition(Position::InDense(0, frac(2, 3)))
            ),
            Ordering::Less
        );
        assert_eq!(cmp(&AtPosition(Position::AtPoint(3)), &PlusInfinity), Ordering::Less);
    }
}
