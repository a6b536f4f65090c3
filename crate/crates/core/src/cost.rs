//! Exact transport-cost kernels.
//!
//! Two equivalent formulas compute the per-unit cost of a tuple: one through
//! the weighted mean, one purely from pairwise distances between the tuple's
//! points. The pairwise form is the default kernel; the mean form is kept as
//! a cross-check oracle. Squared Euclidean distances only, so everything
//! stays rational.

use crate::error::{Error, Result};
use crate::measures::{weighted_mean, CombinationMeasure, DiscreteMeasure, ProblemInstance, TransportPlan, Tuple};
use crate::rational::{rat, Rational};
use num::Zero;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TupleCost {
    pub tuple: Tuple,
    pub cost: Rational,
}

/// Per-unit cost via the weighted mean: sum_i lambda_i ||x - x_i||^2.
pub fn tuple_cost_mean(t: &Tuple, inst: &ProblemInstance) -> Result<Rational> {
    let mean = weighted_mean(t, inst)?;
    let mut acc = Rational::zero();
    for (i, &k) in t.0.iter().enumerate() {
        let p = inst.slot_point(i, k)?;
        acc += &inst.weights[i] * mean.squared_distance(p);
    }
    Ok(acc)
}

/// Per-unit cost from pairwise distances:
/// sum_{i<k} lambda_i lambda_k ||x_k - x_i||^2. Never touches the mean.
pub fn tuple_cost_pairwise(t: &Tuple, inst: &ProblemInstance) -> Result<Rational> {
    t.check(inst)?;
    let mut acc = Rational::zero();
    for i in 0..t.0.len() {
        let pi = inst.slot_point(i, t.0[i])?;
        for k in (i + 1)..t.0.len() {
            let pk = inst.slot_point(k, t.0[k])?;
            acc += &inst.weights[i] * &inst.weights[k] * pi.squared_distance(pk);
        }
    }
    Ok(acc)
}

/// m = 3 specialization with uniform weights:
/// (1/9)(||x2-x1||^2 + ||x3-x1||^2 + ||x3-x2||^2).
pub fn triple_cost(t: &Tuple, inst: &ProblemInstance) -> Result<Rational> {
    if inst.num_measures() != 3 {
        return Err(Error::Precondition(format!(
            "triple_cost needs exactly 3 measures, got {}",
            inst.num_measures()
        )));
    }
    let third = rat(1, 3);
    if inst.weights.iter().any(|w| *w != third) {
        return Err(Error::Precondition(
            "triple_cost needs uniform weights (1/3, 1/3, 1/3)".into(),
        ));
    }
    t.check(inst)?;
    let a = inst.slot_point(0, t.0[0])?;
    let b = inst.slot_point(1, t.0[1])?;
    let c = inst.slot_point(2, t.0[2])?;
    let sum = a.squared_distance(b) + a.squared_distance(c) + b.squared_distance(c);
    Ok(sum * rat(1, 9))
}

/// Total cost of a combination measure: sum_j c(s_j) w_j, with c from the
/// pairwise kernel. Rejects measures with invalid marginals.
pub fn transport_cost(p: &CombinationMeasure, inst: &ProblemInstance) -> Result<Rational> {
    p.validate(inst)?;
    let mut acc = Rational::zero();
    for e in &p.entries {
        acc += tuple_cost_pairwise(&e.tuple, inst)? * &e.mass;
    }
    Ok(acc)
}

/// Cost of an explicit plan: sum over flows of lambda_i ||x_j - x_{i,k}||^2
/// times the flow mass. Defined for mass-splitting plans.
pub fn plan_cost(
    candidate: &DiscreteMeasure,
    plan: &TransportPlan,
    inst: &ProblemInstance,
) -> Result<Rational> {
    plan.validate(candidate, inst)?;
    let mut acc = Rational::zero();
    for f in &plan.flows {
        let from = &candidate.slots[f.candidate].point;
        let to = inst.slot_point(f.measure, f.slot)?;
        acc += &inst.weights[f.measure] * from.squared_distance(to) * &f.mass;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{CombinationEntry, Point, SupportSlot};
    use crate::rational::int;
    use proptest::prelude::*;

    fn singleton(p: &[i64]) -> DiscreteMeasure {
        DiscreteMeasure::new(vec![SupportSlot {
            point: Point::from_ints(p),
            mass: int(1),
        }])
    }

    fn triangle_345() -> ProblemInstance {
        ProblemInstance::new(
            vec![
                singleton(&[0, 0]),
                singleton(&[3, 0]),
                singleton(&[3, 4]),
            ],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        )
    }

    #[test]
    fn mean_cost_of_345_triangle_is_50_over_9() {
        let inst = triangle_345();
        let t = Tuple(vec![0, 0, 0]);
        assert_eq!(tuple_cost_mean(&t, &inst).unwrap(), rat(50, 9));
    }

    #[test]
    fn pairwise_cost_of_345_triangle_is_50_over_9() {
        let inst = triangle_345();
        let t = Tuple(vec![0, 0, 0]);
        assert_eq!(tuple_cost_pairwise(&t, &inst).unwrap(), rat(50, 9));
        assert_eq!(triple_cost(&t, &inst).unwrap(), rat(50, 9));
    }

    #[test]
    fn improper_336_triangle_costs_6() {
        let inst = ProblemInstance::new(
            vec![
                singleton(&[0, 0]),
                singleton(&[3, 0]),
                singleton(&[-3, 0]),
            ],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        );
        let t = Tuple(vec![0, 0, 0]);
        assert_eq!(tuple_cost_pairwise(&t, &inst).unwrap(), int(6));
        assert_eq!(triple_cost(&t, &inst).unwrap(), rat(54, 9));
    }

    #[test]
    fn coincident_points_cost_zero() {
        let inst = ProblemInstance::new(
            vec![singleton(&[5, 7]), singleton(&[5, 7]), singleton(&[5, 7])],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        );
        let t = Tuple(vec![0, 0, 0]);
        assert_eq!(tuple_cost_mean(&t, &inst).unwrap(), int(0));
        assert_eq!(tuple_cost_pairwise(&t, &inst).unwrap(), int(0));
        assert_eq!(triple_cost(&t, &inst).unwrap(), int(0));
    }

    #[test]
    fn midpoint_pair_costs_nine() {
        let inst = ProblemInstance::new(
            vec![singleton(&[0, 0]), singleton(&[6, 0])],
            vec![rat(1, 2), rat(1, 2)],
        );
        let t = Tuple(vec![0, 0]);
        assert_eq!(tuple_cost_mean(&t, &inst).unwrap(), int(9));
        assert_eq!(tuple_cost_pairwise(&t, &inst).unwrap(), int(9));
    }

    #[test]
    fn single_measure_pairwise_cost_is_empty_sum() {
        let inst = ProblemInstance::new(vec![singleton(&[2, 3])], vec![int(1)]);
        assert_eq!(
            tuple_cost_pairwise(&Tuple(vec![0]), &inst).unwrap(),
            int(0)
        );
    }

    #[test]
    fn triple_cost_rejects_wrong_shape() {
        let two = ProblemInstance::new(
            vec![singleton(&[0, 0]), singleton(&[1, 0])],
            vec![rat(1, 2), rat(1, 2)],
        );
        assert!(triple_cost(&Tuple(vec![0, 0]), &two).is_err());
        let skewed = ProblemInstance::new(
            vec![singleton(&[0, 0]), singleton(&[1, 0]), singleton(&[0, 1])],
            vec![rat(1, 2), rat(1, 4), rat(1, 4)],
        );
        assert!(triple_cost(&Tuple(vec![0, 0, 0]), &skewed).is_err());
    }

    #[test]
    fn transport_cost_of_single_tuple_is_its_cost() {
        let inst = triangle_345();
        let cm = CombinationMeasure::new(vec![CombinationEntry {
            tuple: Tuple(vec![0, 0, 0]),
            mass: int(1),
        }]);
        assert_eq!(transport_cost(&cm, &inst).unwrap(), rat(50, 9));
    }

    #[test]
    fn plan_cost_matches_combination_cost() {
        let inst = crate::measures::square_instance(&int(6), &rat(1, 2)).unwrap();
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
        let expected = transport_cost(&cm, &inst).unwrap();
        // explicit plan induced by the combination measure
        let candidate = DiscreteMeasure::from_pairs(
            cm.entries
                .iter()
                .map(|e| {
                    (
                        weighted_mean(&e.tuple, &inst).unwrap(),
                        e.mass.clone(),
                    )
                })
                .collect(),
        );
        let plan = cm.to_plan();
        assert_eq!(plan_cost(&candidate, &plan, &inst).unwrap(), expected);
        assert_eq!(expected, int(9));
    }

    #[test]
    fn zero_distance_plan_costs_zero() {
        let m = DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[1, 2]), int(1))]);
        let inst = ProblemInstance::new(
            vec![m.clone(), m.clone()],
            vec![rat(1, 2), rat(1, 2)],
        );
        let cm = CombinationMeasure::new(vec![CombinationEntry {
            tuple: Tuple(vec![0, 0]),
            mass: int(1),
        }]);
        let plan = cm.to_plan();
        assert_eq!(plan_cost(&m, &plan, &inst).unwrap(), int(0));
    }

    // random rational instances for the algebraic identity and the scaling laws
    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-20i64..20, 1i64..8).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_instance(m: usize, d: usize) -> impl Strategy<Value = ProblemInstance> {
        let weights = proptest::collection::vec(1i64..6, m).prop_map(move |ws| {
            let total: i64 = ws.iter().sum();
            ws.iter().map(|&w| rat(w, total)).collect::<Vec<_>>()
        });
        let points = proptest::collection::vec(
            proptest::collection::vec(arb_rational(), d),
            m,
        );
        (weights, points).prop_map(move |(weights, points)| {
            ProblemInstance::new(
                points
                    .into_iter()
                    .map(|coords| {
                        DiscreteMeasure::new(vec![SupportSlot {
                            point: Point::new(coords),
                            mass: int(1),
                        }])
                    })
                    .collect(),
                weights,
            )
        })
    }

    fn arb_any_instance() -> impl Strategy<Value = ProblemInstance> {
        (2usize..6, 1usize..4).prop_flat_map(|(m, d)| arb_instance(m, d))
    }

    proptest! {
        #[test]
        fn mean_and_pairwise_kernels_agree(inst in arb_any_instance()) {
            let t = Tuple(vec![0; inst.num_measures()]);
            prop_assert_eq!(
                tuple_cost_mean(&t, &inst).unwrap(),
                tuple_cost_pairwise(&t, &inst).unwrap()
            );
        }

        #[test]
        fn costs_are_translation_invariant(
            inst in (2usize..5).prop_flat_map(|m| arb_instance(m, 2)),
            shift in proptest::collection::vec(-10i64..10, 2),
        ) {
            let t = Tuple(vec![0; inst.num_measures()]);
            let base = tuple_cost_pairwise(&t, &inst).unwrap();
            let shift: Vec<Rational> = shift.iter().map(|&s| int(s)).collect();
            let translated = ProblemInstance::new(
                inst.measures
                    .iter()
                    .map(|meas| {
                        DiscreteMeasure::from_pairs(
                            meas.slots
                                .iter()
                                .map(|s| (s.point.translate(&shift), s.mass.clone()))
                                .collect(),
                        )
                    })
                    .collect(),
                inst.weights.clone(),
            );
            prop_assert_eq!(tuple_cost_pairwise(&t, &translated).unwrap(), base);
        }

        #[test]
        fn costs_scale_quadratically(
            inst in arb_instance(3, 2),
            num in -6i64..7,
            den in 1i64..5,
        ) {
            prop_assume!(num != 0);
            let alpha = rat(num, den);
            let t = Tuple(vec![0, 0, 0]);
            let base = tuple_cost_pairwise(&t, &inst).unwrap();
            let scaled = ProblemInstance::new(
                inst.measures
                    .iter()
                    .map(|meas| {
                        DiscreteMeasure::from_pairs(
                            meas.slots
                                .iter()
                                .map(|s| (s.point.scale(&alpha), s.mass.clone()))
                                .collect(),
                        )
                    })
                    .collect(),
                inst.weights.clone(),
            );
            prop_assert_eq!(
                tuple_cost_pairwise(&t, &scaled).unwrap(),
                base * &alpha * &alpha
            );
        }
    }
}
