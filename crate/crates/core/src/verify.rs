//! Certificate verification and representation transforms.
//!
//! Everything is recomputed from raw input; cost or sparsity fields supplied
//! in files are never trusted. The fixed-support transport plan comes from
//! an exact LP whose variables are the per-measure flows of every candidate
//! support point.

use crate::cost::tuple_cost_pairwise;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, Status};
use crate::measures::{
    weighted_mean, CombinationEntry, CombinationMeasure, DiscreteMeasure, Flow, Point,
    ProblemInstance, TransportPlan, Tuple,
};
use crate::rational::{format_rational, Rational};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub sparsity_ok: bool,
    pub cost: Rational,
    pub cost_ok: bool,
    pub non_mass_splitting: Option<bool>,
    pub details: String,
}

impl VerificationReport {
    pub fn accepted(&self) -> bool {
        self.sparsity_ok && self.cost_ok && self.non_mass_splitting.unwrap_or(true)
    }
}

/// Checks a combination measure against sparsity bound `n_bound` and cost
/// bound `phi`. The cost is recomputed exactly with the pairwise kernel;
/// marginal violations reject the certificate outright.
pub fn verify_scmp_certificate(
    p: &CombinationMeasure,
    inst: &ProblemInstance,
    n_bound: usize,
    phi: &Rational,
) -> Result<VerificationReport> {
    p.validate(inst)?;
    let sparsity_ok = p.support_size() <= n_bound;
    let mut cost = Rational::zero();
    for e in &p.entries {
        cost += tuple_cost_pairwise(&e.tuple, inst)? * &e.mass;
    }
    let cost_ok = cost <= *phi;
    let details = format!(
        "support {} vs bound {n_bound}; cost {} vs bound {}",
        p.support_size(),
        format_rational(&cost),
        format_rational(phi),
    );
    Ok(VerificationReport {
        sparsity_ok,
        cost,
        cost_ok,
        // a combination measure encodes a non-mass-splitting transport
        non_mass_splitting: Some(true),
        details,
    })
}

/// Optimal transport plan for a fixed candidate support, by exact LP.
/// Variables: one flow per (candidate slot, measure, input slot); the
/// number of variables is |P| times the total input support size.
pub fn optimal_plan_for_support(
    p: &DiscreteMeasure,
    inst: &ProblemInstance,
) -> Result<(TransportPlan, Rational)> {
    let report = inst.validate();
    if !report.is_valid() {
        return Err(Error::InvalidInstance(report.issues.join("; ")));
    }
    if p.is_empty() {
        return Err(Error::Precondition("empty candidate measure".into()));
    }
    if !p.total_mass().is_one() {
        return Err(Error::Precondition(format!(
            "candidate masses sum to {}, not 1",
            format_rational(&p.total_mass())
        )));
    }
    let d = inst.dim();
    if p.slots.iter().any(|s| s.point.dim() != d) {
        return Err(Error::DimensionMismatch(format!(
            "candidate dimension differs from instance dimension {d}"
        )));
    }
    let m = inst.num_measures();
    let sizes: Vec<usize> = inst.measures.iter().map(|mm| mm.len()).collect();
    let total_slots: usize = sizes.iter().sum();
    let num_vars = p.len() * total_slots;

    // variable layout: for candidate j, measure i, slot k:
    // j * total_slots + offset[i] + k
    let mut offset = vec![0usize; m];
    for i in 1..m {
        offset[i] = offset[i - 1] + sizes[i - 1];
    }
    let var = |j: usize, i: usize, k: usize| j * total_slots + offset[i] + k;

    let mut objective = vec![Rational::zero(); num_vars];
    for (j, slot) in p.slots.iter().enumerate() {
        for (i, measure) in inst.measures.iter().enumerate() {
            for (k, input) in measure.slots.iter().enumerate() {
                objective[var(j, i, k)] =
                    &inst.weights[i] * slot.point.squared_distance(&input.point);
            }
        }
    }

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    // each candidate slot ships its mass to every measure
    for (j, slot) in p.slots.iter().enumerate() {
        for i in 0..m {
            let mut row = vec![Rational::zero(); num_vars];
            for k in 0..sizes[i] {
                row[var(j, i, k)] = Rational::one();
            }
            rows.push(row);
            rhs.push(slot.mass.clone());
        }
    }
    // each input slot receives exactly its mass
    for (i, measure) in inst.measures.iter().enumerate() {
        for (k, input) in measure.slots.iter().enumerate() {
            let mut row = vec![Rational::zero(); num_vars];
            for j in 0..p.len() {
                row[var(j, i, k)] = Rational::one();
            }
            rows.push(row);
            rhs.push(input.mass.clone());
        }
    }

    let lp = LinearProgram {
        objective,
        rows,
        rhs,
    };
    let sol = solve_lp(&lp)?;
    debug_assert_eq!(sol.status, Status::Optimal, "balanced transport is feasible");
    let mut flows = Vec::new();
    for (j, _) in p.slots.iter().enumerate() {
        for (i, measure) in inst.measures.iter().enumerate() {
            for k in 0..measure.len() {
                let v = &sol.values[var(j, i, k)];
                if v.is_positive() {
                    flows.push(Flow {
                        candidate: j,
                        measure: i,
                        slot: k,
                        mass: v.clone(),
                    });
                }
            }
        }
    }
    Ok((TransportPlan { flows }, sol.objective_value))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitViolation {
    pub candidate: usize,
    pub measure: usize,
}

/// True iff every candidate slot sends, for each measure, all of its mass
/// to a single input slot. Violating (candidate, measure) pairs are listed.
pub fn is_non_mass_splitting(plan: &TransportPlan) -> (bool, Vec<SplitViolation>) {
    let mut groups: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for f in &plan.flows {
        if f.mass.is_positive() {
            *groups.entry((f.candidate, f.measure)).or_insert(0) += 1;
        }
    }
    let violations: Vec<SplitViolation> = groups
        .into_iter()
        .filter(|&(_, count)| count > 1)
        .map(|((candidate, measure), _)| SplitViolation { candidate, measure })
        .collect();
    (violations.is_empty(), violations)
}

/// Result of attempting to rewrite a plain measure as a combination measure.
#[derive(Clone, Debug)]
pub enum ToCombination {
    Combination(CombinationMeasure),
    /// The computed optimal plan splits mass; per the theory this rules the
    /// measure out as a barycenter, but other optimal plans are not searched.
    MassSplitting {
        plan: TransportPlan,
        value: Rational,
        violations: Vec<SplitViolation>,
    },
    /// The plan is non-mass-splitting but some support point is not the
    /// weighted mean of its destination tuple.
    OffMean {
        candidate: usize,
        expected: Point,
        actual: Point,
        plan: TransportPlan,
        value: Rational,
    },
}

/// Computes an optimal plan for the support of `p` and, when it is
/// non-mass-splitting and every support point sits on the weighted mean of
/// its tuple, returns the combination measure. Fails structurally otherwise.
pub fn to_combination(p: &DiscreteMeasure, inst: &ProblemInstance) -> Result<ToCombination> {
    let (plan, value) = optimal_plan_for_support(p, inst)?;
    let (ok, violations) = is_non_mass_splitting(&plan);
    if !ok {
        return Ok(ToCombination::MassSplitting {
            plan,
            value,
            violations,
        });
    }
    let m = inst.num_measures();
    let mut entries = Vec::new();
    for (j, slot) in p.slots.iter().enumerate() {
        let mut indices = vec![usize::MAX; m];
        for f in plan.flows.iter().filter(|f| f.candidate == j) {
            indices[f.measure] = f.slot;
        }
        debug_assert!(indices.iter().all(|&k| k != usize::MAX));
        let tuple = Tuple(indices);
        let mean = weighted_mean(&tuple, inst)?;
        if mean != slot.point {
            return Ok(ToCombination::OffMean {
                candidate: j,
                expected: mean,
                actual: slot.point.clone(),
                plan,
                value,
            });
        }
        entries.push(CombinationEntry {
            tuple,
            mass: slot.mass.clone(),
        });
    }
    // distinct support points have distinct tuples here, since each point
    // equals its tuple's weighted mean
    Ok(ToCombination::Combination(CombinationMeasure::new(entries)))
}

/// Expands a combination measure into a plain measure on the weighted means,
/// merging coincident means by summing masses.
pub fn from_combination(
    p: &CombinationMeasure,
    inst: &ProblemInstance,
) -> Result<DiscreteMeasure> {
    let mut by_point: BTreeMap<Point, Rational> = BTreeMap::new();
    for e in &p.entries {
        let mean = weighted_mean(&e.tuple, inst)?;
        let entry = by_point.entry(mean).or_insert_with(Rational::zero);
        *entry += &e.mass;
    }
    Ok(DiscreteMeasure::from_pairs(by_point.into_iter().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barycenter::solve_exact;
    use crate::cost::{plan_cost, transport_cost};
    use crate::measures::{square_instance, SupportSlot};
    use crate::rational::{int, rat};

    fn square() -> ProblemInstance {
        square_instance(&int(6), &rat(1, 2)).unwrap()
    }

    #[test]
    fn accepts_good_certificate() {
        let inst = square();
        let bary = solve_exact(&inst, 100).unwrap();
        let report = verify_scmp_certificate(&bary.measure, &inst, 3, &int(9)).unwrap();
        assert!(report.accepted());
        assert_eq!(report.cost, int(9));
    }

    #[test]
    fn rejects_on_cost() {
        let inst = square();
        let bary = solve_exact(&inst, 100).unwrap();
        let report = verify_scmp_certificate(&bary.measure, &inst, 3, &rat(17, 2)).unwrap();
        assert!(!report.cost_ok);
        assert!(!report.accepted());
    }

    #[test]
    fn rejects_duplicate_tuples() {
        let inst = square();
        let mut bad = CombinationMeasure::new(vec![
            CombinationEntry {
                tuple: Tuple(vec![0, 0]),
                mass: rat(1, 4),
            },
            CombinationEntry {
                tuple: Tuple(vec![1, 1]),
                mass: rat(1, 2),
            },
        ]);
        bad.entries.push(CombinationEntry {
            tuple: Tuple(vec![0, 0]),
            mass: rat(1, 4),
        });
        bad.entries.sort_by(|a, b| a.tuple.cmp(&b.tuple));
        assert!(verify_scmp_certificate(&bad, &inst, 3, &int(9)).is_err());
    }

    #[test]
    fn rejects_marginal_corruption_with_location() {
        let inst = square();
        let bad = CombinationMeasure::new(vec![
            CombinationEntry {
                tuple: Tuple(vec![0, 0]),
                mass: rat(3, 4),
            },
            CombinationEntry {
                tuple: Tuple(vec![1, 1]),
                mass: rat(1, 4),
            },
        ]);
        match verify_scmp_certificate(&bad, &inst, 3, &int(9)) {
            Err(Error::MarginalViolation { measure, slot, .. }) => {
                assert_eq!((measure, slot), (0, 0));
            }
            other => panic!("expected marginal violation, got {other:?}"),
        }
    }

    #[test]
    fn optimal_plan_for_midpoint_support() {
        let inst = square();
        let candidate = DiscreteMeasure::from_pairs(vec![
            (Point::from_ints(&[3, 0]), rat(1, 2)),
            (Point::from_ints(&[3, 6]), rat(1, 2)),
        ]);
        let (plan, value) = optimal_plan_for_support(&candidate, &inst).unwrap();
        assert_eq!(value, int(9));
        plan.validate(&candidate, &inst).unwrap();
        assert_eq!(plan_cost(&candidate, &plan, &inst).unwrap(), int(9));
    }

    #[test]
    fn grand_mean_plan_value_matches_direct_sum() {
        let inst = square();
        // the lambda-weighted grand mean of all mass
        let mean = Point::from_ints(&[3, 3]);
        let candidate = DiscreteMeasure::new(vec![SupportSlot {
            point: mean.clone(),
            mass: int(1),
        }]);
        let (_, value) = optimal_plan_for_support(&candidate, &inst).unwrap();
        let mut direct = Rational::zero();
        for (i, measure) in inst.measures.iter().enumerate() {
            for s in &measure.slots {
                direct += &inst.weights[i] * mean.squared_distance(&s.point) * &s.mass;
            }
        }
        assert_eq!(value, direct);
        assert_eq!(value, int(18));
    }

    #[test]
    fn combination_induced_plans_never_split() {
        let inst = square();
        let bary = solve_exact(&inst, 100).unwrap();
        let plan = bary.measure.to_plan();
        let (ok, violations) = is_non_mass_splitting(&plan);
        assert!(ok, "violations: {violations:?}");
    }

    #[test]
    fn split_detection_names_the_pair() {
        let plan = TransportPlan {
            flows: vec![
                Flow {
                    candidate: 0,
                    measure: 1,
                    slot: 0,
                    mass: rat(1, 2),
                },
                Flow {
                    candidate: 0,
                    measure: 1,
                    slot: 1,
                    mass: rat(1, 2),
                },
            ],
        };
        let (ok, violations) = is_non_mass_splitting(&plan);
        assert!(!ok);
        assert_eq!(
            violations,
            vec![SplitViolation {
                candidate: 0,
                measure: 1
            }]
        );
    }

    #[test]
    fn balanced_square_plan_is_non_mass_splitting() {
        // all four midpoints at mass 1/4: each sends full mass to one corner
        // per measure
        let inst = square();
        let candidate = DiscreteMeasure::from_pairs(vec![
            (Point::from_ints(&[3, 0]), rat(1, 4)),
            (Point::from_ints(&[0, 3]), rat(1, 4)),
            (Point::from_ints(&[6, 3]), rat(1, 4)),
            (Point::from_ints(&[3, 6]), rat(1, 4)),
        ]);
        let (plan, value) = optimal_plan_for_support(&candidate, &inst).unwrap();
        assert_eq!(value, int(9));
        let (ok, _) = is_non_mass_splitting(&plan);
        assert!(ok);
    }

    #[test]
    fn round_trip_through_representations() {
        let inst = square();
        let bary = solve_exact(&inst, 100).unwrap();
        let plain = from_combination(&bary.measure, &inst).unwrap();
        match to_combination(&plain, &inst).unwrap() {
            ToCombination::Combination(back) => {
                assert_eq!(
                    transport_cost(&back, &inst).unwrap(),
                    transport_cost(&bary.measure, &inst).unwrap()
                );
            }
            other => panic!("round trip failed: {other:?}"),
        }
    }

    #[test]
    fn off_mean_support_point_fails() {
        let inst = square();
        let candidate = DiscreteMeasure::from_pairs(vec![
            (Point::from_ints(&[2, 0]), rat(1, 2)),
            (Point::from_ints(&[3, 6]), rat(1, 2)),
        ]);
        match to_combination(&candidate, &inst).unwrap() {
            ToCombination::OffMean { candidate: j, .. } => assert_eq!(j, 0),
            other => panic!("expected off-mean failure, got {other:?}"),
        }
    }

    #[test]
    fn single_point_off_grand_mean_fails() {
        let inst = square();
        let candidate = DiscreteMeasure::new(vec![SupportSlot {
            point: Point::from_ints(&[0, 0]),
            mass: int(1),
        }]);
        match to_combination(&candidate, &inst).unwrap() {
            ToCombination::OffMean { .. } => {}
            other => panic!("expected off-mean failure, got {other:?}"),
        }
    }

    #[test]
    fn coincident_means_merge() {
        // two tuples with the same weighted mean
        let inst = ProblemInstance::new(
            vec![
                DiscreteMeasure::from_pairs(vec![
                    (Point::from_ints(&[0]), rat(1, 2)),
                    (Point::from_ints(&[2]), rat(1, 2)),
                ]),
                DiscreteMeasure::from_pairs(vec![
                    (Point::from_ints(&[2]), rat(1, 2)),
                    (Point::from_ints(&[0]), rat(1, 2)),
                ]),
            ],
            vec![rat(1, 2), rat(1, 2)],
        );
        let cm = CombinationMeasure::new(vec![
            CombinationEntry {
                tuple: Tuple(vec![0, 0]),
                mass: rat(1, 2),
            },
            CombinationEntry {
                tuple: Tuple(vec![1, 1]),
                mass: rat(1, 2),
            },
        ]);
        let plain = from_combination(&cm, &inst).unwrap();
        assert_eq!(plain.len(), 1);
        assert_eq!(plain.slots[0].point, Point::from_ints(&[1]));
        assert_eq!(plain.slots[0].mass, int(1));
    }
}
