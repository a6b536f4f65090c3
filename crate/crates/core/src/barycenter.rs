//! Barycenter solvers and desk-scale decision procedures.
//!
//! `solve_exact` builds the full linear program over all tuples (capped
//! enumeration) and returns a vertex solution, which is sparse by the
//! standard support bound. `solve_1d` and `solve_two_measures` are the
//! special cases with faster structure; both must agree with `solve_exact`
//! exactly, which the tests enforce. The decision procedures are exact and
//! exponential by design, behind explicit guards.

use crate::cost::{transport_cost, tuple_cost_pairwise};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, solve_transportation, LinearProgram, Status};
use crate::measures::{
    enumerate_tuples, CombinationEntry, CombinationMeasure, ProblemInstance, Tuple,
};
use crate::rational::{rat, Rational};
use num::bigint::BigInt;
use num::{BigUint, One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub struct BarycenterResult {
    pub measure: CombinationMeasure,
    pub value: Rational,
    pub support_size: usize,
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub yes: bool,
    pub witness: Option<CombinationMeasure>,
}

impl Decision {
    fn no() -> Self {
        Decision {
            yes: false,
            witness: None,
        }
    }

    fn yes(witness: CombinationMeasure) -> Self {
        Decision {
            yes: true,
            witness: Some(witness),
        }
    }
}

fn check_valid(inst: &ProblemInstance) -> Result<()> {
    let report = inst.validate();
    if !report.is_valid() {
        return Err(Error::InvalidInstance(report.issues.join("; ")));
    }
    Ok(())
}

/// The sparsity bound sum |P_i| - m + 1 that vertex solutions satisfy.
pub fn support_bound(inst: &ProblemInstance) -> usize {
    let total: usize = inst.measures.iter().map(|m| m.len()).sum();
    total + 1 - inst.num_measures()
}

/// Builds the barycenter LP over the given tuples: one variable per tuple,
/// one equality row per support slot of every measure.
fn barycenter_lp(inst: &ProblemInstance, tuples: &[Tuple]) -> Result<LinearProgram> {
    let num_rows: usize = inst.measures.iter().map(|m| m.len()).sum();
    let mut objective = Vec::with_capacity(tuples.len());
    for t in tuples {
        objective.push(tuple_cost_pairwise(t, inst)?);
    }
    let mut rows = vec![vec![Rational::zero(); tuples.len()]; num_rows];
    let mut rhs = Vec::with_capacity(num_rows);
    let mut row_offset = 0;
    for (i, measure) in inst.measures.iter().enumerate() {
        for (j, t) in tuples.iter().enumerate() {
            rows[row_offset + t.0[i]][j] = Rational::one();
        }
        for slot in &measure.slots {
            rhs.push(slot.mass.clone());
        }
        row_offset += measure.len();
    }
    Ok(LinearProgram {
        objective,
        rows,
        rhs,
    })
}

fn solution_to_measure(
    tuples: &[Tuple],
    values: &[Rational],
) -> CombinationMeasure {
    let entries = tuples
        .iter()
        .zip(values)
        .filter(|(_, v)| v.is_positive())
        .map(|(t, v)| CombinationEntry {
            tuple: t.clone(),
            mass: v.clone(),
        })
        .collect();
    CombinationMeasure::new(entries)
}

/// Exact barycenter over the full tuple set. The result is a vertex of the
/// marginal polytope, so its support obeys the sparsity bound.
pub fn solve_exact(inst: &ProblemInstance, cap: u64) -> Result<BarycenterResult> {
    check_valid(inst)?;
    let tuples: Vec<Tuple> = enumerate_tuples(inst, cap)?.collect();
    let lp = barycenter_lp(inst, &tuples)?;
    let sol = solve_lp(&lp)?;
    debug_assert_eq!(sol.status, Status::Optimal, "marginal polytope is nonempty");
    let measure = solution_to_measure(&tuples, &sol.values);
    let support_size = measure.support_size();
    debug_assert!(support_size <= support_bound(inst));
    Ok(BarycenterResult {
        value: sol.objective_value,
        support_size,
        measure,
    })
}

/// One-dimensional barycenter by the sorted sweep. Sorting is ascending in
/// every measure; cumulative-mass breakpoints that coincide across measures
/// yield a single tuple, so zero-mass entries are never emitted.
pub fn solve_1d(inst: &ProblemInstance) -> Result<BarycenterResult> {
    check_valid(inst)?;
    if inst.dim() != 1 {
        return Err(Error::Precondition(format!(
            "solve_1d needs d = 1, got d = {}",
            inst.dim()
        )));
    }
    let m = inst.num_measures();
    // slot indices sorted by coordinate, ties by slot index
    let orders: Vec<Vec<usize>> = inst
        .measures
        .iter()
        .map(|measure| {
            let mut idx: Vec<usize> = (0..measure.len()).collect();
            idx.sort_by(|&a, &b| {
                measure.slots[a]
                    .point
                    .coords[0]
                    .cmp(&measure.slots[b].point.coords[0])
                    .then(a.cmp(&b))
            });
            idx
        })
        .collect();
    let mut cursor = vec![0usize; m];
    let mut remaining: Vec<Rational> = (0..m)
        .map(|i| inst.measures[i].slots[orders[i][0]].mass.clone())
        .collect();
    let mut entries = Vec::new();
    loop {
        let delta = remaining
            .iter()
            .min()
            .expect("at least one measure")
            .clone();
        let tuple = Tuple(
            (0..m)
                .map(|i| orders[i][cursor[i]])
                .collect(),
        );
        entries.push(CombinationEntry {
            tuple,
            mass: delta.clone(),
        });
        let mut exhausted = false;
        for i in 0..m {
            remaining[i] -= &delta;
            if remaining[i].is_zero() {
                cursor[i] += 1;
                if cursor[i] == orders[i].len() {
                    exhausted = true;
                } else {
                    remaining[i] = inst.measures[i].slots[orders[i][cursor[i]]].mass.clone();
                }
            }
        }
        if exhausted {
            break;
        }
    }
    let measure = CombinationMeasure::new(entries);
    let value = transport_cost(&measure, inst)?;
    Ok(BarycenterResult {
        support_size: measure.support_size(),
        value,
        measure,
    })
}

/// Two-measure barycenter as a classical transportation problem. The plan
/// support is a forest, so at most |P1| + |P2| - 1 tuples carry mass.
pub fn solve_two_measures(inst: &ProblemInstance) -> Result<BarycenterResult> {
    check_valid(inst)?;
    if inst.num_measures() != 2 {
        return Err(Error::Precondition(format!(
            "solve_two_measures needs m = 2, got m = {}",
            inst.num_measures()
        )));
    }
    let p1 = &inst.measures[0];
    let p2 = &inst.measures[1];
    let supplies: Vec<Rational> = p1.slots.iter().map(|s| s.mass.clone()).collect();
    let demands: Vec<Rational> = p2.slots.iter().map(|s| s.mass.clone()).collect();
    let factor = &inst.weights[0] * &inst.weights[1];
    let costs: Vec<Vec<Rational>> = p1
        .slots
        .iter()
        .map(|a| {
            p2.slots
                .iter()
                .map(|b| &factor * a.point.squared_distance(&b.point))
                .collect()
        })
        .collect();
    let sol = solve_transportation(&supplies, &demands, &costs)?;
    let entries = sol
        .flows
        .into_iter()
        .map(|(k1, k2, mass)| CombinationEntry {
            tuple: Tuple(vec![k1, k2]),
            mass,
        })
        .collect();
    let measure = CombinationMeasure::new(entries);
    Ok(BarycenterResult {
        support_size: measure.support_size(),
        value: sol.value,
        measure,
    })
}

const SUBSET_GUARD: u64 = 2_000_000;

/// Decides whether a combination measure with at most `n_bound` tuples and
/// cost at most `phi` exists. Tries the vertex solution first, then falls
/// back to exhaustive subset search (exponential by design, guarded).
pub fn decide_scmp(
    inst: &ProblemInstance,
    n_bound: usize,
    phi: &Rational,
    cap: u64,
) -> Result<Decision> {
    check_valid(inst)?;
    if n_bound == 0 {
        return Ok(Decision::no());
    }
    let full = solve_exact(inst, cap)?;
    if full.value > *phi {
        // no combination measure of any support beats the LP optimum
        return Ok(Decision::no());
    }
    if full.support_size <= n_bound {
        return Ok(Decision::yes(full.measure));
    }
    let tuples: Vec<Tuple> = enumerate_tuples(inst, cap)?.collect();
    let size = n_bound.min(tuples.len());
    let count = binomial(tuples.len(), size);
    if count > BigUint::from(SUBSET_GUARD) {
        return Err(Error::SearchGuardExceeded {
            count,
            guard: SUBSET_GUARD,
        });
    }
    let mut subset: Vec<usize> = (0..size).collect();
    loop {
        let chosen: Vec<Tuple> = subset.iter().map(|&j| tuples[j].clone()).collect();
        let lp = barycenter_lp(inst, &chosen)?;
        let sol = solve_lp(&lp)?;
        if sol.status == Status::Optimal && sol.objective_value <= *phi {
            return Ok(Decision::yes(solution_to_measure(&chosen, &sol.values)));
        }
        // next lexicographic subset
        let mut i = size;
        loop {
            if i == 0 {
                return Ok(Decision::no());
            }
            i -= 1;
            if subset[i] != i + tuples.len() - size {
                subset[i] += 1;
                for k in (i + 1)..size {
                    subset[k] = subset[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k.min(n));
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

const UC3P_NODE_BUDGET: u64 = 50_000_000;

struct Uc3pPre {
    n: usize,
    bound9n: Rational,
}

fn uc3p_precheck(inst: &ProblemInstance, phi: &Rational) -> Result<Uc3pPre> {
    check_valid(inst)?;
    if inst.num_measures() != 3 {
        return Err(Error::Precondition("uc3p needs exactly 3 measures".into()));
    }
    let third = rat(1, 3);
    if inst.weights.iter().any(|w| *w != third) {
        return Err(Error::Precondition("uc3p needs weights (1/3, 1/3, 1/3)".into()));
    }
    let n = inst.measures[0].len();
    if inst.measures.iter().any(|m| m.len() != n) {
        return Err(Error::Precondition(
            "uc3p needs equal support sizes".into(),
        ));
    }
    let unit = Rational::new(BigInt::one(), BigInt::from(n));
    for m in &inst.measures {
        if m.slots.iter().any(|s| s.mass != unit) {
            return Err(Error::Precondition(format!(
                "uc3p needs uniform masses 1/{n}"
            )));
        }
    }
    // total cost <= phi  <=>  sum of (9 * triple costs) <= 9 n phi
    let bound9n = phi * rat(9, 1) * Rational::from_integer(BigInt::from(n));
    Ok(Uc3pPre { n, bound9n })
}

/// Exact search over perfect tripartite matchings of the support slots.
/// A combination measure with at most n tuples on a uniform instance is
/// exactly such a matching, so this decides the uniform problem at N = n.
/// Guarded by a node budget rather than an input-size cutoff so compiled
/// gadget instances (tight cost bounds, large n) stay within reach.
pub fn uc3p_bruteforce(inst: &ProblemInstance, phi: &Rational) -> Result<Decision> {
    let pre = uc3p_precheck(inst, phi)?;
    let mut found = None;
    uc3p_search(inst, &pre, UC3P_NODE_BUDGET, &mut |matching| {
        found = Some(matching.to_vec());
        true
    })?;
    match found {
        Some(matching) => Ok(Decision::yes(matching_measure(&matching, pre.n))),
        None => Ok(Decision::no()),
    }
}

/// All matchings within the bound, as combination measures, up to `limit`.
/// This is the exhaustive oracle used to cross-check certificates.
pub fn uc3p_matchings_within(
    inst: &ProblemInstance,
    phi: &Rational,
    limit: usize,
) -> Result<Vec<CombinationMeasure>> {
    let pre = uc3p_precheck(inst, phi)?;
    let mut result = Vec::new();
    uc3p_search(inst, &pre, UC3P_NODE_BUDGET, &mut |matching| {
        result.push(matching_measure(matching, pre.n));
        result.len() >= limit
    })?;
    Ok(result)
}

fn matching_measure(matching: &[(usize, usize)], n: usize) -> CombinationMeasure {
    let unit = Rational::new(BigInt::one(), BigInt::from(n));
    CombinationMeasure::new(
        matching
            .iter()
            .enumerate()
            .map(|(k, &(b, c))| CombinationEntry {
                tuple: Tuple(vec![k, b, c]),
                mass: unit.clone(),
            })
            .collect(),
    )
}

/// Backtracking over assignments of P1 slots to (P2, P3) slot pairs with a
/// per-slot lower-bound prune. `report` receives each matching whose total
/// cost stays within the bound; returning true stops the search.
fn uc3p_search(
    inst: &ProblemInstance,
    pre: &Uc3pPre,
    budget: u64,
    report: &mut dyn FnMut(&[(usize, usize)]) -> bool,
) -> Result<()> {
    let n = pre.n;
    if n == 0 {
        return Ok(());
    }
    // squared-distance tables, times 9 they become the triple costs
    let d12 = distance_table(inst, 0, 1);
    let d13 = distance_table(inst, 0, 2);
    let d23 = distance_table(inst, 1, 2);
    // lower bound: cheapest completion per P1 slot
    let mut row_min = vec![Rational::zero(); n];
    for a in 0..n {
        let mut best: Option<Rational> = None;
        for b in 0..n {
            for c in 0..n {
                let cost = &d12[a][b] + &d13[a][c] + &d23[b][c];
                if best.as_ref().map_or(true, |cur| cost < *cur) {
                    best = Some(cost);
                }
            }
        }
        row_min[a] = best.expect("n > 0");
    }
    let mut suffix = vec![Rational::zero(); n + 1];
    for a in (0..n).rev() {
        suffix[a] = &suffix[a + 1] + &row_min[a];
    }
    let mut used2 = vec![false; n];
    let mut used3 = vec![false; n];
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut nodes: u64 = 0;

    struct Frame<'a> {
        d12: &'a [Vec<Rational>],
        d13: &'a [Vec<Rational>],
        d23: &'a [Vec<Rational>],
        suffix: &'a [Rational],
        bound: &'a Rational,
        n: usize,
        budget: u64,
    }

    fn recurse(
        f: &Frame,
        a: usize,
        partial: &Rational,
        used2: &mut [bool],
        used3: &mut [bool],
        chosen: &mut Vec<(usize, usize)>,
        nodes: &mut u64,
        report: &mut dyn FnMut(&[(usize, usize)]) -> bool,
    ) -> Result<bool> {
        if a == f.n {
            return Ok(report(chosen));
        }
        for b in 0..f.n {
            if used2[b] {
                continue;
            }
            for c in 0..f.n {
                if used3[c] {
                    continue;
                }
                *nodes += 1;
                if *nodes > f.budget {
                    return Err(Error::BudgetExhausted { budget: f.budget });
                }
                let cost = &f.d12[a][b] + &f.d13[a][c] + &f.d23[b][c];
                let lower = partial + &cost + &f.suffix[a + 1];
                if lower > *f.bound {
                    continue;
                }
                used2[b] = true;
                used3[c] = true;
                chosen.push((b, c));
                let next = partial + &cost;
                let stop = recurse(f, a + 1, &next, used2, used3, chosen, nodes, report)?;
                chosen.pop();
                used2[b] = false;
                used3[c] = false;
                if stop {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    let frame = Frame {
        d12: &d12,
        d13: &d13,
        d23: &d23,
        suffix: &suffix,
        bound: &pre.bound9n,
        n,
        budget,
    };
    recurse(
        &frame,
        0,
        &Rational::zero(),
        &mut used2,
        &mut used3,
        &mut chosen,
        &mut nodes,
        report,
    )?;
    Ok(())
}

fn distance_table(inst: &ProblemInstance, i: usize, k: usize) -> Vec<Vec<Rational>> {
    inst.measures[i]
        .slots
        .iter()
        .map(|a| {
            inst.measures[k]
                .slots
                .iter()
                .map(|b| a.point.squared_distance(&b.point))
                .collect()
        })
        .collect()
}

/// Convenience used by callers that must display the number of matchings a
/// small instance has; (n!)^2 overall.
pub fn matching_count(n: usize) -> BigUint {
    let mut f = BigUint::one();
    for i in 1..=n {
        f *= BigUint::from(i);
    }
    &f * &f
}

#[allow(dead_code)]
fn to_u64(b: &BigUint) -> Option<u64> {
    b.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{random_instance, square_instance, DiscreteMeasure, Point};
    use crate::rational::int;

    #[test]
    fn square_example_value_and_sparsity() {
        let inst = square_instance(&int(6), &rat(1, 2)).unwrap();
        let result = solve_exact(&inst, 1000).unwrap();
        assert_eq!(result.value, int(9));
        assert!(result.support_size <= 3);
        assert!(result.support_size >= 2);
        result.measure.validate(&inst).unwrap();
        assert_eq!(transport_cost(&result.measure, &inst).unwrap(), int(9));
    }

    #[test]
    fn small_square_costs_one() {
        let inst = square_instance(&int(2), &rat(1, 2)).unwrap();
        assert_eq!(solve_exact(&inst, 1000).unwrap().value, int(1));
    }

    #[test]
    fn identical_singletons_cost_zero() {
        let m = DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[4, 4]), int(1))]);
        let inst = ProblemInstance::new(
            vec![m.clone(), m.clone(), m],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        );
        let result = solve_exact(&inst, 100).unwrap();
        assert_eq!(result.value, int(0));
        assert_eq!(result.support_size, 1);
    }

    #[test]
    fn one_dimensional_sweep_matches_lp() {
        let inst = ProblemInstance::new(
            vec![
                DiscreteMeasure::from_pairs(vec![
                    (Point::from_ints(&[0]), rat(1, 2)),
                    (Point::from_ints(&[2]), rat(1, 2)),
                ]),
                DiscreteMeasure::from_pairs(vec![
                    (Point::from_ints(&[1]), rat(1, 2)),
                    (Point::from_ints(&[3]), rat(1, 2)),
                ]),
            ],
            vec![rat(1, 2), rat(1, 2)],
        );
        let sweep = solve_1d(&inst).unwrap();
        assert_eq!(sweep.value, rat(1, 4));
        assert_eq!(
            sweep.measure.entries[0].tuple,
            Tuple(vec![0, 0])
        );
        assert_eq!(
            sweep.measure.entries[1].tuple,
            Tuple(vec![1, 1])
        );
        let lp = solve_exact(&inst, 100).unwrap();
        assert_eq!(sweep.value, lp.value);
    }

    #[test]
    fn one_dimensional_forced_pairing() {
        let inst = ProblemInstance::new(
            vec![
                DiscreteMeasure::from_pairs(vec![
                    (Point::from_ints(&[0]), rat(1, 2)),
                    (Point::from_ints(&[1]), rat(1, 2)),
                ]),
                DiscreteMeasure::from_pairs(vec![(
                    Point::new(vec![rat(1, 2)]),
                    int(1),
                )]),
            ],
            vec![rat(1, 2), rat(1, 2)],
        );
        let sweep = solve_1d(&inst).unwrap();
        let lp = solve_exact(&inst, 100).unwrap();
        assert_eq!(sweep.value, lp.value);
        // both tuples pair across distance 1/2 at weight product 1/4
        assert_eq!(sweep.value, rat(1, 16));
    }

    #[test]
    fn identical_measures_1d_cost_zero() {
        let m = DiscreteMeasure::from_pairs(vec![
            (Point::from_ints(&[1]), rat(1, 3)),
            (Point::from_ints(&[5]), rat(2, 3)),
        ]);
        let inst = ProblemInstance::new(vec![m.clone(), m], vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(solve_1d(&inst).unwrap().value, int(0));
    }

    #[test]
    fn two_measure_solver_matches_exact() {
        let inst = square_instance(&int(6), &rat(1, 2)).unwrap();
        let tp = solve_two_measures(&inst).unwrap();
        assert_eq!(tp.value, int(9));
        assert!(tp.support_size <= inst.measures[0].len() + inst.measures[1].len() - 1);
        tp.measure.validate(&inst).unwrap();
    }

    #[test]
    fn identical_two_measures_pair_identically() {
        let m = DiscreteMeasure::from_pairs(vec![
            (Point::from_ints(&[0, 0]), rat(1, 3)),
            (Point::from_ints(&[2, 1]), rat(2, 3)),
        ]);
        let inst = ProblemInstance::new(vec![m.clone(), m], vec![rat(1, 2), rat(1, 2)]);
        let r = solve_two_measures(&inst).unwrap();
        assert_eq!(r.value, int(0));
        assert_eq!(
            r.measure.entries.iter().map(|e| e.tuple.clone()).collect::<Vec<_>>(),
            vec![Tuple(vec![0, 0]), Tuple(vec![1, 1])]
        );
    }

    #[test]
    fn random_two_measure_instances_agree_with_lp() {
        for seed in 0..10 {
            let inst = random_instance(&[3, 3], 2, 8, seed);
            let a = solve_two_measures(&inst).unwrap();
            let b = solve_exact(&inst, 1000).unwrap();
            assert_eq!(a.value, b.value, "seed {seed}");
        }
    }

    #[test]
    fn scmp_decision_on_square() {
        let inst = square_instance(&int(6), &rat(1, 2)).unwrap();
        let yes = decide_scmp(&inst, 3, &int(9), 1000).unwrap();
        assert!(yes.yes);
        yes.witness.unwrap().validate(&inst).unwrap();
        let no = decide_scmp(&inst, 3, &int(8), 1000).unwrap();
        assert!(!no.yes);
        // vertex solution qualifies at the sparsity bound with its own value
        let full = solve_exact(&inst, 1000).unwrap();
        let d = decide_scmp(&inst, support_bound(&inst), &full.value, 1000).unwrap();
        assert!(d.yes);
    }

    #[test]
    fn scmp_forces_subset_search() {
        // single shared far point keeps the optimum on the square; asking for
        // N = 2 forces the fallback since the vertex uses 3 tuples
        let inst = square_instance(&int(6), &rat(1, 4)).unwrap();
        let full = solve_exact(&inst, 1000).unwrap();
        assert!(full.support_size >= 3);
        let d = decide_scmp(&inst, 2, &full.value, 1000).unwrap();
        // two tuples cannot satisfy five independent marginal rows
        assert!(!d.yes);
    }

    #[test]
    fn scmp_monotone_in_both_bounds() {
        let inst = square_instance(&int(6), &rat(1, 2)).unwrap();
        let base = decide_scmp(&inst, 3, &int(9), 1000).unwrap();
        assert!(base.yes);
        for (n, phi) in [(3usize, int(10)), (4, int(9)), (4, int(12))] {
            assert!(decide_scmp(&inst, n, &phi, 1000).unwrap().yes);
        }
    }

    #[test]
    fn uc3p_single_triple() {
        let inst = ProblemInstance::new(
            vec![
                DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[0, 0]), int(1))]),
                DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[3, 0]), int(1))]),
                DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[3, 4]), int(1))]),
            ],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        );
        assert!(uc3p_bruteforce(&inst, &rat(50, 9)).unwrap().yes);
        assert!(!uc3p_bruteforce(&inst, &rat(49, 9)).unwrap().yes);
    }

    #[test]
    fn uc3p_enumerates_four_matchings_at_n_two() {
        let inst = random_instance(&[2, 2, 2], 2, 5, 3);
        let all = uc3p_matchings_within(&inst, &int(1_000_000), 100).unwrap();
        assert_eq!(all.len(), 4);
        assert_eq!(matching_count(2), BigUint::from(4u32));
        for m in &all {
            m.validate(&inst).unwrap();
        }
    }

    #[test]
    fn uc3p_agrees_with_exact_solver_on_small_instances() {
        for seed in 0..6 {
            let inst = random_instance(&[3, 3, 3], 2, 6, seed);
            let opt = solve_exact(&inst, 1000).unwrap();
            // the optimum over matchings is at least the LP optimum
            let d = uc3p_bruteforce(&inst, &opt.value).unwrap();
            if d.yes {
                let w = d.witness.unwrap();
                assert_eq!(transport_cost(&w, &inst).unwrap(), opt.value);
            }
            // and some matching always exists within the worst matching bound
            let loose = uc3p_bruteforce(&inst, &int(10_000)).unwrap();
            assert!(loose.yes);
        }
    }

    #[test]
    fn support_bounds_on_random_instances() {
        for seed in 0..10 {
            let inst = random_instance(&[2, 3, 2], 2, 6, seed + 100);
            let r = solve_exact(&inst, 1000).unwrap();
            let max_size = inst.measures.iter().map(|m| m.len()).max().unwrap();
            assert!(r.support_size <= support_bound(&inst), "seed {seed}");
            assert!(r.support_size >= max_size, "seed {seed}");
        }
    }
}
