//! Exact geometric model: points, open unit squares, lattice assignment,
//! genericity checks, and coverage queries.
//!
//! A unit square is stored by its lower-left corner and occupies the open
//! region (lx, lx+1) x (ly, ly+1); its boundary is excluded. In a generic
//! instance every square corner is non-integral, so each square contains
//! exactly one integer lattice point, and no two squares share an x (or y)
//! corner coordinate or even the fractional part of one. The extra
//! fractional-part requirement makes every sweep event in the block solver
//! unique.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::coord::Coord;
use crate::error::Error;
use crate::rng::Rng;

/// A plane point with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    pub x: Coord,
    pub y: Coord,
}

impl Point {
    pub fn new(x: Coord, y: Coord) -> Self {
        Point { x, y }
    }
}

/// An open axis-aligned unit square identified by its index in the instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSquare {
    pub id: usize,
    pub lx: Coord,
    pub ly: Coord,
}

impl UnitSquare {
    pub fn new(id: usize, lx: Coord, ly: Coord) -> Self {
        UnitSquare { id, lx, ly }
    }

    /// x-coordinate of the right boundary.
    pub fn right_x(&self) -> Coord {
        self.lx.plus_one()
    }

    /// y-coordinate of the upper boundary.
    pub fn top_y(&self) -> Coord {
        self.ly.plus_one()
    }

    /// The unique lattice point strictly inside the open square.
    pub fn grid_point(&self) -> Result<GridPoint, Error> {
        if self.lx.is_integer() || self.ly.is_integer() {
            return Err(Error::NotGeneric { square: self.id });
        }
        Ok(GridPoint {
            gx: self.lx.ceil_i64(),
            gy: self.ly.ceil_i64(),
        })
    }

    /// Strict containment in the open region.
    pub fn contains(&self, p: &Point) -> bool {
        self.lx < p.x && p.x < self.right_x() && self.ly < p.y && p.y < self.top_y()
    }
}

/// The integer lattice point owned by a square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPoint {
    pub gx: i64,
    pub gy: i64,
}

/// A closed axis-aligned box with integer corners and side `side`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockBox {
    pub x0: i64,
    pub y0: i64,
    pub side: i64,
}

impl BlockBox {
    pub fn x1(&self) -> i64 {
        self.x0 + self.side
    }

    pub fn y1(&self) -> i64 {
        self.y0 + self.side
    }

    /// Whether the open square intersects this closed box.
    pub fn intersects_square(&self, s: &UnitSquare) -> bool {
        // Open interval (l, l+1) meets closed [c0, c1] iff l < c1 and l+1 > c0.
        s.lx.cmp_i64(self.x1()).is_lt()
            && s.right_x().cmp_i64(self.x0).is_gt()
            && s.ly.cmp_i64(self.y1()).is_lt()
            && s.top_y().cmp_i64(self.y0).is_gt()
    }

    /// Whether the grid point lies in the closed box.
    pub fn contains_grid_point(&self, g: GridPoint) -> bool {
        self.x0 <= g.gx && g.gx <= self.x1() && self.y0 <= g.gy && g.gy <= self.y1()
    }
}

/// The shared input of every solver. Indices into `points` and `squares`
/// are the stable identities that solutions refer to.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Instance {
    pub points: Vec<Point>,
    pub squares: Vec<UnitSquare>,
}

impl Instance {
    pub fn new(points: Vec<Point>, squares: Vec<UnitSquare>) -> Self {
        let squares = squares
            .into_iter()
            .enumerate()
            .map(|(id, s)| UnitSquare { id, ..s })
            .collect();
        Instance { points, squares }
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_squares(&self) -> usize {
        self.squares.len()
    }

    /// Point indices contained in at least one of the listed squares.
    pub fn covered_points<'a, I>(&self, square_ids: I) -> Result<BTreeSet<usize>, Error>
    where
        I: IntoIterator<Item = &'a usize>,
    {
        let mut covered = BTreeSet::new();
        for &id in square_ids {
            let square = self.squares.get(id).ok_or(Error::IndexOutOfRange {
                index: id,
                len: self.squares.len(),
            })?;
            for (pi, p) in self.points.iter().enumerate() {
                if square.contains(p) {
                    covered.insert(pi);
                }
            }
        }
        Ok(covered)
    }

    /// Indices of squares whose open region meets the closed block.
    pub fn squares_intersecting_block(&self, block: BlockBox) -> BTreeSet<usize> {
        self.squares
            .iter()
            .filter(|s| block.intersects_square(s))
            .map(|s| s.id)
            .collect()
    }
}

/// One failed genericity requirement, with the offending indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PointOnBoundary { point: usize, square: usize },
    IntegerSquareCoordinate { square: usize },
    DuplicateSquareX { first: usize, second: usize },
    DuplicateSquareY { first: usize, second: usize },
    DuplicateSquareXFraction { first: usize, second: usize },
    DuplicateSquareYFraction { first: usize, second: usize },
}

/// Outcome of `check_genericity`: a report, never a failure.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GenericityReport {
    pub violations: Vec<Violation>,
}

impl GenericityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the instance is in generic position: no integer square
/// corners, pairwise-distinct square corner coordinates and fractional
/// parts per axis, and no point on any square boundary line.
pub fn check_genericity(instance: &Instance) -> GenericityReport {
    let mut violations = Vec::new();

    for s in &instance.squares {
        if s.lx.is_integer() || s.ly.is_integer() {
            violations.push(Violation::IntegerSquareCoordinate { square: s.id });
        }
    }

    let axis = |pick: fn(&UnitSquare) -> &Coord,
                dup: fn(usize, usize) -> Violation,
                dup_fract: fn(usize, usize) -> Violation,
                violations: &mut Vec<Violation>| {
        let mut by_value: BTreeMap<Coord, usize> = BTreeMap::new();
        let mut by_fract: BTreeMap<Coord, usize> = BTreeMap::new();
        for s in &instance.squares {
            let v = pick(s).clone();
            if let Some(&first) = by_value.get(&v) {
                violations.push(dup(first, s.id));
            } else {
                by_value.insert(v.clone(), s.id);
                // Equal values are reported once, as the stronger kind.
                let f = v.fract();
                if let Some(&first) = by_fract.get(&f) {
                    violations.push(dup_fract(first, s.id));
                } else {
                    by_fract.insert(f, s.id);
                }
            }
        }
    };
    axis(
        |s| &s.lx,
        |first, second| Violation::DuplicateSquareX { first, second },
        |first, second| Violation::DuplicateSquareXFraction { first, second },
        &mut violations,
    );
    axis(
        |s| &s.ly,
        |first, second| Violation::DuplicateSquareY { first, second },
        |first, second| Violation::DuplicateSquareYFraction { first, second },
        &mut violations,
    );

    for (pi, p) in instance.points.iter().enumerate() {
        for s in &instance.squares {
            let on_x = p.x == s.lx || p.x == s.right_x();
            let on_y = p.y == s.ly || p.y == s.top_y();
            if on_x || on_y {
                violations.push(Violation::PointOnBoundary {
                    point: pi,
                    square: s.id,
                });
            }
        }
    }

    GenericityReport { violations }
}

const PERTURB_RETRIES: u32 = 32;

/// Repairs a non-generic instance by jittering exactly the violating
/// coordinates with small seed-derived decimal offsets. Generic instances
/// come back unchanged; repair is opt-in, solvers never perturb silently.
pub fn perturb(instance: &Instance, seed: u64) -> Result<Instance, Error> {
    if check_genericity(instance).ok() {
        return Ok(instance.clone());
    }
    let mut rng = Rng::from_seed(seed);
    let mut current = instance.clone();
    for _ in 0..PERTURB_RETRIES {
        let report = check_genericity(&current);
        if report.ok() {
            return Ok(current);
        }
        let slots = violating_slots(&current, &report);
        let bound = jitter_bound(&current);
        for slot in slots {
            let delta = draw_jitter(&mut rng, &bound);
            apply_jitter(&mut current, slot, &delta);
        }
    }
    if check_genericity(&current).ok() {
        Ok(current)
    } else {
        Err(Error::PerturbationFailed {
            attempts: PERTURB_RETRIES,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    PointX(usize),
    PointY(usize),
    SquareX(usize),
    SquareY(usize),
}

fn violating_slots(instance: &Instance, report: &GenericityReport) -> BTreeSet<Slot> {
    let mut slots = BTreeSet::new();
    for v in &report.violations {
        match *v {
            Violation::IntegerSquareCoordinate { square } => {
                let s = &instance.squares[square];
                if s.lx.is_integer() {
                    slots.insert(Slot::SquareX(square));
                }
                if s.ly.is_integer() {
                    slots.insert(Slot::SquareY(square));
                }
            }
            Violation::DuplicateSquareX { second, .. }
            | Violation::DuplicateSquareXFraction { second, .. } => {
                slots.insert(Slot::SquareX(second));
            }
            Violation::DuplicateSquareY { second, .. }
            | Violation::DuplicateSquareYFraction { second, .. } => {
                slots.insert(Slot::SquareY(second));
            }
            Violation::PointOnBoundary { point, square } => {
                let p = &instance.points[point];
                let s = &instance.squares[square];
                if p.x == s.lx || p.x == s.right_x() {
                    slots.insert(Slot::PointX(point));
                }
                if p.y == s.ly || p.y == s.top_y() {
                    slots.insert(Slot::PointY(point));
                }
            }
        }
    }
    slots
}

/// Half the minimum nonzero pairwise gap over all coordinate values in play,
/// capped at 1/4 so jitters never move a square past a lattice line.
fn jitter_bound(instance: &Instance) -> Coord {
    let mut values: Vec<Coord> = Vec::new();
    for p in &instance.points {
        values.push(p.x.clone());
        values.push(p.y.clone());
    }
    for s in &instance.squares {
        values.push(s.lx.clone());
        values.push(s.right_x());
        values.push(s.ly.clone());
        values.push(s.top_y());
    }
    values.sort();
    let mut min_gap: Option<Coord> = None;
    for w in values.windows(2) {
        let gap = &w[1] - &w[0];
        if gap > Coord::zero() && min_gap.as_ref().map_or(true, |m| gap < *m) {
            min_gap = Some(gap);
        }
    }
    let quarter = Coord::from_ratio(1, 4);
    match min_gap {
        Some(gap) => {
            let half = Coord::from_rational(gap.into_rational() / num_bigint::BigInt::from(2));
            if half < quarter {
                half
            } else {
                quarter
            }
        }
        None => quarter,
    }
}

/// A signed decimal jitter with 0 < |delta| < bound.
fn draw_jitter(rng: &mut Rng, bound: &Coord) -> Coord {
    // Find d with 16/10^d < bound, then draw r in 1..=15 digits at 10^-d.
    let mut d = 1u32;
    while Coord::from_ratio(16, 10i64.pow(d)) >= *bound && d < 17 {
        d += 1;
    }
    let r = rng.below(15) as i64 + 1;
    let sign = if rng.coin() { 1 } else { -1 };
    Coord::from_ratio(sign * r, 10i64.pow(d))
}

fn apply_jitter(instance: &mut Instance, slot: Slot, delta: &Coord) {
    match slot {
        Slot::PointX(i) => instance.points[i].x = &instance.points[i].x + delta,
        Slot::PointY(i) => instance.points[i].y = &instance.points[i].y + delta,
        Slot::SquareX(i) => instance.squares[i].lx = &instance.squares[i].lx + delta,
        Slot::SquareY(i) => instance.squares[i].ly = &instance.squares[i].ly + delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(s: &str) -> Coord {
        Coord::from_decimal_str(s).unwrap()
    }

    fn sq(id: usize, lx: &str, ly: &str) -> UnitSquare {
        UnitSquare::new(id, c(lx), c(ly))
    }

    fn pt(x: &str, y: &str) -> Point {
        Point::new(c(x), c(y))
    }

    #[test]
    fn genericity_accepts_distinct_fractions() {
        let inst = Instance::new(vec![pt("0.5", "0.5")], vec![sq(0, "0.25", "0.25")]);
        assert!(check_genericity(&inst).ok());
    }

    #[test]
    fn genericity_rejects_integer_corner() {
        let inst = Instance::new(vec![], vec![sq(0, "1", "0.3")]);
        let report = check_genericity(&inst);
        assert_eq!(
            report.violations,
            vec![Violation::IntegerSquareCoordinate { square: 0 }]
        );
    }

    #[test]
    fn genericity_rejects_shared_x_fraction() {
        let inst = Instance::new(vec![], vec![sq(0, "0.2", "0.1"), sq(1, "1.2", "0.7")]);
        let report = check_genericity(&inst);
        assert_eq!(
            report.violations,
            vec![Violation::DuplicateSquareXFraction { first: 0, second: 1 }]
        );
    }

    #[test]
    fn genericity_rejects_equal_x_as_duplicate() {
        let inst = Instance::new(vec![], vec![sq(0, "0.2", "0.1"), sq(1, "0.2", "0.7")]);
        let report = check_genericity(&inst);
        assert_eq!(
            report.violations,
            vec![Violation::DuplicateSquareX { first: 0, second: 1 }]
        );
    }

    #[test]
    fn genericity_rejects_point_on_boundary() {
        let inst = Instance::new(vec![pt("0.3", "0.8")], vec![sq(0, "0.3", "0.1")]);
        let report = check_genericity(&inst);
        assert_eq!(
            report.violations,
            vec![Violation::PointOnBoundary { point: 0, square: 0 }]
        );
    }

    #[test]
    fn grid_point_examples() {
        assert_eq!(
            sq(0, "0.25", "0.75").grid_point().unwrap(),
            GridPoint { gx: 1, gy: 1 }
        );
        assert_eq!(
            sq(0, "-0.5", "0.5").grid_point().unwrap(),
            GridPoint { gx: 0, gy: 1 }
        );
        assert_eq!(
            sq(0, "3.2", "2.9").grid_point().unwrap(),
            GridPoint { gx: 4, gy: 3 }
        );
        assert!(sq(7, "1", "0.3").grid_point().is_err());
    }

    #[test]
    fn contains_is_open() {
        let s = sq(0, "0.1", "0.1");
        assert!(s.contains(&pt("0.5", "0.5")));
        assert!(!s.contains(&pt("1.1", "0.5"))); // on the right boundary
        assert!(!s.contains(&pt("5", "5")));
    }

    #[test]
    fn covered_points_scans_and_dedups() {
        let inst = Instance::new(
            vec![pt("0.5", "0.5"), pt("3.5", "3.5"), pt("0.9", "0.9")],
            vec![sq(0, "0.1", "0.1"), sq(1, "0.3", "0.2")],
        );
        assert_eq!(inst.covered_points([].iter()).unwrap(), BTreeSet::new());
        assert_eq!(
            inst.covered_points([0].iter()).unwrap(),
            BTreeSet::from([0, 2])
        );
        // Overlapping squares share point 0; it appears once.
        assert_eq!(
            inst.covered_points([0, 1].iter()).unwrap(),
            BTreeSet::from([0, 2])
        );
        assert!(inst.covered_points([9].iter()).is_err());
    }

    #[test]
    fn block_intersection_is_open_vs_closed() {
        let block = BlockBox { x0: 0, y0: 0, side: 2 };
        let inside = sq(0, "0.3", "0.3");
        assert!(block.intersects_square(&inside));
        // Square starting exactly at the right edge only touches at measure
        // zero; its open region lies strictly outside.
        let at_edge = sq(1, "2", "0.5");
        assert!(!block.intersects_square(&at_edge));
        let straddling = sq(2, "-0.5", "0.5");
        assert!(block.intersects_square(&straddling));
    }

    #[test]
    fn perturb_is_identity_on_generic_input() {
        let inst = Instance::new(vec![pt("0.5", "0.5")], vec![sq(0, "0.25", "0.25")]);
        assert_eq!(perturb(&inst, 7).unwrap(), inst);
    }

    #[test]
    fn perturb_fixes_integer_corner() {
        let inst = Instance::new(vec![], vec![sq(0, "1", "0.3")]);
        let fixed = perturb(&inst, 7).unwrap();
        assert!(check_genericity(&fixed).ok());
        assert_ne!(fixed.squares[0].lx, c("1"));
        assert_eq!(fixed.squares[0].ly, c("0.3"));
    }

    #[test]
    fn perturb_separates_equal_lx() {
        let inst = Instance::new(vec![], vec![sq(0, "0.4", "0.1"), sq(1, "0.4", "0.7")]);
        let fixed = perturb(&inst, 7).unwrap();
        assert!(check_genericity(&fixed).ok());
        assert_ne!(fixed.squares[0].lx, fixed.squares[1].lx);
        // The first of the pair keeps its coordinate.
        assert_eq!(fixed.squares[0].lx, c("0.4"));
    }

    #[test]
    fn perturb_is_deterministic() {
        let inst = Instance::new(vec![], vec![sq(0, "1", "0.3"), sq(1, "0.4", "0.3")]);
        assert_eq!(perturb(&inst, 42).unwrap(), perturb(&inst, 42).unwrap());
    }
}
