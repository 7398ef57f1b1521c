//! Brute-force exact solvers used as ground truth.
//!
//! These enumerate subsets outright and are kept deliberately simple: no
//! pruning, no cleverness, so that they are obviously correct. A guard on
//! the number of enumerated subsets keeps them desk-scale tools.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::Error;
use crate::geom::Instance;

/// Default cap on enumerated subsets.
pub const DEFAULT_ENUMERATION_GUARD: u128 = 10_000_000;

/// A brute-force answer: the selected square indices and the objective
/// value (covered-point count for min-p-union, selected-square count for
/// the densest-subhypergraph direction).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub selected: BTreeSet<usize>,
    pub objective: usize,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Selects exactly `p` squares covering the fewest points. Ties go to the
/// lexicographically smallest index set.
pub fn brute_minpu(instance: &Instance, p: usize, guard: u128) -> Result<OracleResult, Error> {
    let m = instance.num_squares();
    if p < 1 || p > m {
        return Err(Error::InfeasibleParameter {
            name: "p",
            value: p as i64,
        });
    }
    let needed = binomial(m, p);
    if needed > guard {
        return Err(Error::EnumerationBudgetExceeded { needed, guard });
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    // Combinations in lexicographic order, so the first optimum seen is the
    // lexicographically smallest.
    let mut combo: Vec<usize> = (0..p).collect();
    loop {
        let covered = instance.covered_points(combo.iter())?.len();
        let better = match &best {
            None => true,
            Some((obj, _)) => covered < *obj,
        };
        if better {
            best = Some((covered, combo.clone()));
        }
        if !next_combination(&mut combo, m) {
            break;
        }
    }
    let (objective, selected) = best.expect("p >= 1 and p <= m leaves at least one subset");
    Ok(OracleResult {
        selected: selected.into_iter().collect(),
        objective,
    })
}

/// Advances `combo` to the next p-combination of 0..m in lexicographic
/// order; returns false when exhausted.
fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let p = combo.len();
    if p == 0 {
        return false;
    }
    let mut i = p;
    while i > 0 {
        i -= 1;
        if combo[i] < m - (p - i) {
            combo[i] += 1;
            for j in i + 1..p {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Selects the most squares whose union covers at most `k` points. Ties go
/// to the lexicographically smallest index set. Squares covering nothing
/// are always free to take, so every optimal answer contains them.
pub fn brute_dksh(instance: &Instance, k: usize, guard: u128) -> Result<OracleResult, Error> {
    let m = instance.num_squares();
    let needed = (1u128) << m.min(127);
    if m >= 127 || needed > guard {
        return Err(Error::EnumerationBudgetExceeded { needed, guard });
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    for mask in 0u64..(1u64 << m) {
        let subset = mask_to_indices(mask, m);
        let covered = instance.covered_points(subset.iter())?.len();
        if covered > k {
            continue;
        }
        if is_better_max(&best, subset.len(), &subset) {
            best = Some((subset.len(), subset));
        }
    }
    let (objective, selected) = best.expect("the empty subset is always feasible");
    Ok(OracleResult {
        selected: selected.into_iter().collect(),
        objective,
    })
}

/// Selects the most squares among `block_squares` whose union covers
/// exactly `k_exact` points of the whole instance (points outside the block
/// count too). Returns None when no subset attains that exact coverage.
pub fn brute_block(
    instance: &Instance,
    block_squares: &BTreeSet<usize>,
    k_exact: usize,
    guard: u128,
) -> Result<Option<OracleResult>, Error> {
    let squares: Vec<usize> = block_squares.iter().copied().collect();
    let q = squares.len();
    let needed = (1u128) << q.min(127);
    if q >= 127 || needed > guard {
        return Err(Error::EnumerationBudgetExceeded { needed, guard });
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    for mask in 0u64..(1u64 << q) {
        let subset: Vec<usize> = (0..q)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| squares[i])
            .collect();
        let covered = instance.covered_points(subset.iter())?.len();
        if covered != k_exact {
            continue;
        }
        if is_better_max(&best, subset.len(), &subset) {
            best = Some((subset.len(), subset));
        }
    }
    Ok(best.map(|(objective, selected)| OracleResult {
        selected: selected.into_iter().collect(),
        objective,
    }))
}

fn mask_to_indices(mask: u64, m: usize) -> Vec<usize> {
    (0..m).filter(|i| mask >> i & 1 == 1).collect()
}

fn is_better_max(best: &Option<(usize, Vec<usize>)>, size: usize, subset: &[usize]) -> bool {
    match best {
        None => true,
        Some((obj, sel)) => size > *obj || (size == *obj && subset < sel.as_slice()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::Coord;
    use crate::geom::{Point, UnitSquare};
    use crate::rng::Rng;
    use alloc::vec;

    fn c(s: &str) -> Coord {
        Coord::from_decimal_str(s).unwrap()
    }

    fn sq(lx: &str, ly: &str) -> UnitSquare {
        UnitSquare::new(0, c(lx), c(ly))
    }

    fn pt(x: &str, y: &str) -> Point {
        Point::new(c(x), c(y))
    }

    const GUARD: u128 = DEFAULT_ENUMERATION_GUARD;

    /// Two clusters: square 0 covers points {0, 1}; square 1 covers {2}.
    fn two_disjoint() -> Instance {
        Instance::new(
            vec![pt("0.5", "0.5"), pt("0.6", "0.6"), pt("5.5", "5.5")],
            vec![sq("0.1", "0.1"), sq("5.2", "5.2")],
        )
    }

    /// A deterministic random instance in [0, extent)^2.
    fn random_instance(n: usize, m: usize, extent: u64, seed: u64) -> Instance {
        let mut rng = Rng::from_seed(seed);
        let mut coord = |span: u64| {
            let int = rng.below(span);
            let frac = rng.below(9999) + 1;
            Coord::from_decimal_str(&alloc::format!("{}.{:04}", int, frac)).unwrap()
        };
        let points = (0..n).map(|_| Point::new(coord(extent), coord(extent))).collect();
        let squares = (0..m)
            .map(|i| UnitSquare::new(i, coord(extent), coord(extent)))
            .collect();
        Instance::new(points, squares)
    }

    #[test]
    fn minpu_single_square() {
        let inst = Instance::new(
            vec![pt("0.5", "0.5"), pt("0.6", "0.6")],
            vec![sq("0.1", "0.1")],
        );
        let r = brute_minpu(&inst, 1, GUARD).unwrap();
        assert_eq!(r.objective, 2);
        assert_eq!(r.selected, BTreeSet::from([0]));
    }

    #[test]
    fn minpu_prefers_lighter_square() {
        let inst = Instance::new(
            vec![
                pt("0.5", "0.5"),
                pt("5.5", "5.5"),
                pt("5.6", "5.6"),
                pt("5.7", "5.7"),
            ],
            vec![sq("5.2", "5.2"), sq("0.1", "0.1")],
        );
        let r = brute_minpu(&inst, 1, GUARD).unwrap();
        assert_eq!(r.objective, 1);
        assert_eq!(r.selected, BTreeSet::from([1]));
    }

    #[test]
    fn minpu_rejects_bad_p() {
        let inst = two_disjoint();
        assert!(matches!(
            brute_minpu(&inst, 0, GUARD),
            Err(Error::InfeasibleParameter { .. })
        ));
        assert!(matches!(
            brute_minpu(&inst, 3, GUARD),
            Err(Error::InfeasibleParameter { .. })
        ));
    }

    #[test]
    fn minpu_matches_second_enumeration_order() {
        // Independent re-enumeration: walk all p-subsets via bitmasks
        // (a different order than the combination walker) and compare.
        let inst = random_instance(12, 8, 4, 1234);
        for p in 1..=8 {
            let primary = brute_minpu(&inst, p, GUARD).unwrap();
            let mut best: Option<(usize, Vec<usize>)> = None;
            for mask in 0u64..(1 << 8) {
                if (mask.count_ones() as usize) != p {
                    continue;
                }
                let subset = mask_to_indices(mask, 8);
                let covered = inst.covered_points(subset.iter()).unwrap().len();
                let better = match &best {
                    None => true,
                    Some((obj, sel)) => {
                        covered < *obj || (covered == *obj && subset < *sel)
                    }
                };
                if better {
                    best = Some((covered, subset));
                }
            }
            let (objective, selected) = best.unwrap();
            assert_eq!(primary.objective, objective, "p = {}", p);
            assert_eq!(primary.selected, selected.into_iter().collect(), "p = {}", p);
        }
    }

    #[test]
    fn dksh_zero_budget_keeps_only_free_squares() {
        let inst = two_disjoint();
        let r = brute_dksh(&inst, 0, GUARD).unwrap();
        assert_eq!(r.objective, 0);
        assert!(r.selected.is_empty());
    }

    #[test]
    fn dksh_full_budget_takes_everything() {
        let inst = two_disjoint();
        let r = brute_dksh(&inst, 3, GUARD).unwrap();
        assert_eq!(r.objective, 2);
        assert_eq!(r.selected, BTreeSet::from([0, 1]));
    }

    #[test]
    fn dksh_always_includes_empty_hyperedges() {
        // Square 1 covers nothing; it must appear in every optimum.
        let inst = Instance::new(
            vec![pt("0.5", "0.5")],
            vec![sq("0.1", "0.1"), sq("9.3", "9.3")],
        );
        for k in 0..=1 {
            let r = brute_dksh(&inst, k, GUARD).unwrap();
            assert!(r.selected.contains(&1), "k = {}", k);
        }
    }

    #[test]
    fn block_exact_coverage_examples() {
        let inst = Instance::new(
            vec![pt("0.5", "0.5"), pt("0.6", "0.6")],
            vec![sq("0.1", "0.1")],
        );
        let all = BTreeSet::from([0]);
        assert_eq!(brute_block(&inst, &all, 1, GUARD).unwrap(), None);
        let r = brute_block(&inst, &all, 0, GUARD).unwrap().unwrap();
        assert_eq!(r.objective, 0);
        assert!(r.selected.is_empty());
        let r = brute_block(&inst, &all, 2, GUARD).unwrap().unwrap();
        assert_eq!(r.objective, 1);
    }

    #[test]
    fn monotonicity_and_duality() {
        let inst = random_instance(12, 8, 3, 99);
        let n = inst.num_points();
        let mut prev = 0;
        for p in 1..=8 {
            let obj = brute_minpu(&inst, p, GUARD).unwrap().objective;
            assert!(obj >= prev, "min-p-union objective must not decrease in p");
            prev = obj;
        }
        let mut prev = 0;
        for k in 0..=n {
            let obj = brute_dksh(&inst, k, GUARD).unwrap().objective;
            assert!(obj >= prev, "densest objective must not decrease in k");
            prev = obj;
        }
        // If k points admit p squares, then p squares need at most k points.
        for k in 0..=n {
            let dksh = brute_dksh(&inst, k, GUARD).unwrap().objective;
            for p in 1..=dksh {
                let minpu = brute_minpu(&inst, p, GUARD).unwrap().objective;
                assert!(minpu <= k, "duality violated at k={}, p={}", k, p);
            }
        }
    }

    #[test]
    fn dksh_equals_best_exact_block_over_all_budgets() {
        let inst = random_instance(10, 6, 2, 5);
        let all: BTreeSet<usize> = (0..6).collect();
        let n = inst.num_points();
        for k in 0..=n {
            let via_exact = (0..=k)
                .filter_map(|ke| brute_block(&inst, &all, ke, GUARD).unwrap())
                .map(|r| r.objective)
                .max()
                .unwrap_or(0);
            let direct = brute_dksh(&inst, k, GUARD).unwrap().objective;
            assert_eq!(direct, via_exact, "k = {}", k);
        }
    }

    #[test]
    fn guard_trips() {
        let inst = random_instance(2, 8, 2, 3);
        assert!(matches!(
            brute_dksh(&inst, 1, 100),
            Err(Error::EnumerationBudgetExceeded { .. })
        ));
    }
}
