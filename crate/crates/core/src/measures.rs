//! Core data model: points, discrete measures, problem instances, tuples,
//! combination measures and explicit transport plans, plus instance
//! generators.
//!
//! All types are immutable values; every operation here is a pure function.

use crate::error::{Error, Result};
use crate::rational::{int, rat, Rational};
use num::bigint::BigInt;
use num::{BigUint, One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub coords: Vec<Rational>,
}

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point {
            coords: coords.iter().map(|&c| int(c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn squared_distance(&self, other: &Point) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let mut acc = Rational::zero();
        for (a, b) in self.coords.iter().zip(&other.coords) {
            let d = a - b;
            acc += &d * &d;
        }
        acc
    }

    pub fn translate(&self, shift: &[Rational]) -> Point {
        Point {
            coords: self
                .coords
                .iter()
                .zip(shift)
                .map(|(c, s)| c + s)
                .collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Point {
        Point {
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", crate::rational::format_rational(c))?;
        }
        write!(f, ")")
    }
}

/// One support slot of a measure. Distinct slots may carry identical
/// coordinates; each slot keeps its own mass.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SupportSlot {
    pub point: Point,
    pub mass: Rational,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiscreteMeasure {
    pub slots: Vec<SupportSlot>,
}

impl DiscreteMeasure {
    pub fn new(slots: Vec<SupportSlot>) -> Self {
        DiscreteMeasure { slots }
    }

    pub fn from_pairs(pairs: Vec<(Point, Rational)>) -> Self {
        DiscreteMeasure {
            slots: pairs
                .into_iter()
                .map(|(point, mass)| SupportSlot { point, mass })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn total_mass(&self) -> Rational {
        self.slots
            .iter()
            .fold(Rational::zero(), |acc, s| acc + &s.mass)
    }

    /// Merges slots with coinciding coordinates, summing masses. Slot order
    /// of the result is sorted by coordinates.
    pub fn merged(&self) -> DiscreteMeasure {
        let mut by_point: BTreeMap<Point, Rational> = BTreeMap::new();
        for s in &self.slots {
            let entry = by_point.entry(s.point.clone()).or_insert_with(Rational::zero);
            *entry += &s.mass;
        }
        DiscreteMeasure {
            slots: by_point
                .into_iter()
                .map(|(point, mass)| SupportSlot { point, mass })
                .collect(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProblemInstance {
    pub measures: Vec<DiscreteMeasure>,
    pub weights: Vec<Rational>,
}

impl ProblemInstance {
    pub fn new(measures: Vec<DiscreteMeasure>, weights: Vec<Rational>) -> Self {
        ProblemInstance { measures, weights }
    }

    pub fn num_measures(&self) -> usize {
        self.measures.len()
    }

    /// Dimension of the first support point; `validate` checks the rest agree.
    pub fn dim(&self) -> usize {
        self.measures
            .iter()
            .flat_map(|m| m.slots.first())
            .map(|s| s.point.dim())
            .next()
            .unwrap_or(0)
    }

    pub fn slot_point(&self, measure: usize, slot: usize) -> Result<&Point> {
        self.measures
            .get(measure)
            .and_then(|m| m.slots.get(slot))
            .map(|s| &s.point)
            .ok_or_else(|| {
                Error::IndexOutOfRange(format!("measure {measure}, slot {slot}"))
            })
    }

    pub fn slot_mass(&self, measure: usize, slot: usize) -> Result<&Rational> {
        self.measures
            .get(measure)
            .and_then(|m| m.slots.get(slot))
            .map(|s| &s.mass)
            .ok_or_else(|| {
                Error::IndexOutOfRange(format!("measure {measure}, slot {slot}"))
            })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        if self.measures.is_empty() {
            issues.push("instance has no measures".to_string());
        }
        if self.weights.len() != self.measures.len() {
            issues.push(format!(
                "{} weights for {} measures",
                self.weights.len(),
                self.measures.len()
            ));
        }
        for (i, w) in self.weights.iter().enumerate() {
            if !w.is_positive() {
                issues.push(format!("weight {i} is not positive"));
            }
        }
        let weight_sum = self
            .weights
            .iter()
            .fold(Rational::zero(), |acc, w| acc + w);
        if !weight_sum.is_one() {
            issues.push(format!(
                "weights sum to {}, not 1",
                crate::rational::format_rational(&weight_sum)
            ));
        }
        let d = self.dim();
        for (i, m) in self.measures.iter().enumerate() {
            if m.is_empty() {
                issues.push(format!("measure {i} has no support points"));
                continue;
            }
            for (k, s) in m.slots.iter().enumerate() {
                if !s.mass.is_positive() {
                    issues.push(format!("measure {i}, slot {k}: mass is not positive"));
                }
                if s.point.dim() != d {
                    issues.push(format!(
                        "measure {i}, slot {k}: dimension {} differs from {d}",
                        s.point.dim()
                    ));
                }
            }
            let total = m.total_mass();
            if !total.is_one() {
                issues.push(format!(
                    "measure {i}: masses sum to {}, not 1",
                    crate::rational::format_rational(&total)
                ));
            }
        }
        ValidationReport { issues }
    }

    /// Product of support sizes, i.e. the number of tuples in the full set.
    pub fn tuple_count(&self) -> BigUint {
        self.measures
            .iter()
            .fold(BigUint::one(), |acc, m| acc * BigUint::from(m.len()))
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            write!(f, "valid")
        } else {
            for issue in &self.issues {
                writeln!(f, "invalid: {issue}")?;
            }
            Ok(())
        }
    }
}

/// Index tuple selecting one support slot per measure.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Tuple(pub Vec<usize>);

impl Tuple {
    pub fn check(&self, inst: &ProblemInstance) -> Result<()> {
        if self.0.len() != inst.num_measures() {
            return Err(Error::IndexOutOfRange(format!(
                "tuple has {} entries for {} measures",
                self.0.len(),
                inst.num_measures()
            )));
        }
        for (i, &k) in self.0.iter().enumerate() {
            if k >= inst.measures[i].len() {
                return Err(Error::IndexOutOfRange(format!(
                    "tuple selects slot {k} of measure {i} (size {})",
                    inst.measures[i].len()
                )));
            }
        }
        Ok(())
    }
}

/// The optimal placement for a tuple's mass: x = sum_i lambda_i x_i.
pub fn weighted_mean(t: &Tuple, inst: &ProblemInstance) -> Result<Point> {
    t.check(inst)?;
    let d = inst.dim();
    let mut coords = vec![Rational::zero(); d];
    for (i, &k) in t.0.iter().enumerate() {
        let p = inst.slot_point(i, k)?;
        for (c, x) in coords.iter_mut().zip(&p.coords) {
            *c += &inst.weights[i] * x;
        }
    }
    Ok(Point { coords })
}

/// All tuples in lexicographic index order. Refuses to start when the
/// product of support sizes exceeds `cap`.
pub fn enumerate_tuples(inst: &ProblemInstance, cap: u64) -> Result<TupleIter> {
    let product = inst.tuple_count();
    if product > BigUint::from(cap) {
        return Err(Error::TupleCapExceeded { product, cap });
    }
    Ok(TupleIter {
        sizes: inst.measures.iter().map(|m| m.len()).collect(),
        current: vec![0; inst.num_measures()],
        done: inst.measures.iter().any(|m| m.is_empty()),
    })
}

#[derive(Debug)]
pub struct TupleIter {
    sizes: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for TupleIter {
    type Item = Tuple;

    fn next(&mut self) -> Option<Tuple> {
        if self.done {
            return None;
        }
        let out = Tuple(self.current.clone());
        // odometer increment, last index fastest
        let mut i = self.sizes.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.current[i] += 1;
            if self.current[i] < self.sizes[i] {
                break;
            }
            self.current[i] = 0;
        }
        Some(out)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CombinationEntry {
    pub tuple: Tuple,
    pub mass: Rational,
}

/// A measure given as tuples with masses. Encodes a non-mass-splitting
/// transport implicitly: each entry ships its whole mass to the selected
/// slot of every input measure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CombinationMeasure {
    pub entries: Vec<CombinationEntry>,
}

impl CombinationMeasure {
    pub fn new(mut entries: Vec<CombinationEntry>) -> Self {
        entries.sort_by(|a, b| a.tuple.cmp(&b.tuple));
        CombinationMeasure { entries }
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn total_mass(&self) -> Rational {
        self.entries
            .iter()
            .fold(Rational::zero(), |acc, e| acc + &e.mass)
    }

    /// Checks all invariants against an instance: positive masses, distinct
    /// tuples, and exact marginal feasibility for every slot of every
    /// measure (this is the implicit non-mass-splitting transport).
    pub fn validate(&self, inst: &ProblemInstance) -> Result<()> {
        for (e_idx, e) in self.entries.iter().enumerate() {
            e.tuple.check(inst)?;
            if !e.mass.is_positive() {
                return Err(Error::InvalidCombination(format!(
                    "entry {e_idx} has non-positive mass"
                )));
            }
        }
        for w in self.entries.windows(2) {
            if w[0].tuple == w[1].tuple {
                return Err(Error::InvalidCombination(format!(
                    "duplicate tuple {:?}",
                    w[0].tuple.0
                )));
            }
        }
        let total = self.total_mass();
        if !total.is_one() {
            return Err(Error::InvalidCombination(format!(
                "masses sum to {}, not 1",
                crate::rational::format_rational(&total)
            )));
        }
        // marginal per (measure, slot)
        for (i, m) in inst.measures.iter().enumerate() {
            let mut sums = vec![Rational::zero(); m.len()];
            for e in &self.entries {
                sums[e.tuple.0[i]] += &e.mass;
            }
            for (k, s) in sums.iter().enumerate() {
                if *s != m.slots[k].mass {
                    return Err(Error::MarginalViolation {
                        measure: i,
                        slot: k,
                        detail: format!(
                            "entries carry {}, slot holds {}",
                            crate::rational::format_rational(s),
                            crate::rational::format_rational(&m.slots[k].mass)
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// The explicit flow form of the implicit plan.
    pub fn to_plan(&self) -> TransportPlan {
        let mut flows = Vec::new();
        for (j, e) in self.entries.iter().enumerate() {
            for (i, &k) in e.tuple.0.iter().enumerate() {
                flows.push(Flow {
                    candidate: j,
                    measure: i,
                    slot: k,
                    mass: e.mass.clone(),
                });
            }
        }
        TransportPlan { flows }
    }
}

/// One flow of an explicit plan: candidate slot j ships `mass` to slot
/// `slot` of measure `measure`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Flow {
    pub candidate: usize,
    pub measure: usize,
    pub slot: usize,
    pub mass: Rational,
}

/// Explicit, possibly mass-splitting transport between a candidate measure
/// and the input measures.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TransportPlan {
    pub flows: Vec<Flow>,
}

impl TransportPlan {
    /// Checks both marginal families exactly.
    pub fn validate(&self, candidate: &DiscreteMeasure, inst: &ProblemInstance) -> Result<()> {
        let m = inst.num_measures();
        for (f_idx, f) in self.flows.iter().enumerate() {
            if !f.mass.is_positive() {
                return Err(Error::InvalidPlan(format!(
                    "flow {f_idx} has non-positive mass"
                )));
            }
            if f.candidate >= candidate.len() || f.measure >= m {
                return Err(Error::InvalidPlan(format!("flow {f_idx} out of range")));
            }
            inst.slot_point(f.measure, f.slot)?;
        }
        // candidate side: for each (j, i) the flows must total the mass of j
        for j in 0..candidate.len() {
            for i in 0..m {
                let sum = self
                    .flows
                    .iter()
                    .filter(|f| f.candidate == j && f.measure == i)
                    .fold(Rational::zero(), |acc, f| acc + &f.mass);
                if sum != candidate.slots[j].mass {
                    return Err(Error::InvalidPlan(format!(
                        "candidate slot {j} ships {} to measure {i}, holds {}",
                        crate::rational::format_rational(&sum),
                        crate::rational::format_rational(&candidate.slots[j].mass)
                    )));
                }
            }
        }
        // input side: for each (i, k) the flows must total the slot mass
        for (i, measure) in inst.measures.iter().enumerate() {
            let mut sums = vec![Rational::zero(); measure.len()];
            for f in &self.flows {
                if f.measure == i {
                    sums[f.slot] += &f.mass;
                }
            }
            for (k, s) in sums.iter().enumerate() {
                if *s != measure.slots[k].mass {
                    return Err(Error::MarginalViolation {
                        measure: i,
                        slot: k,
                        detail: format!(
                            "plan delivers {}, slot holds {}",
                            crate::rational::format_rational(s),
                            crate::rational::format_rational(&measure.slots[k].mass)
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Two-measure square instance: P1 on two opposite corners of a square with
/// the given side, P2 on the other two, corner mass `corner_mass` each, and
/// the remaining mass (if any) on a shared far-away point. Weights (1/2, 1/2).
pub fn square_instance(side: &Rational, corner_mass: &Rational) -> Result<ProblemInstance> {
    if !side.is_positive() {
        return Err(Error::Precondition("side must be positive".into()));
    }
    let half = rat(1, 2);
    if !corner_mass.is_positive() || corner_mass > &half {
        return Err(Error::Precondition(
            "corner mass must lie in (0, 1/2]".into(),
        ));
    }
    let zero = Rational::zero();
    let rest = int(1) - corner_mass - corner_mass;
    let mut p1 = vec![
        (Point::new(vec![zero.clone(), zero.clone()]), corner_mass.clone()),
        (Point::new(vec![side.clone(), side.clone()]), corner_mass.clone()),
    ];
    let mut p2 = vec![
        (Point::new(vec![side.clone(), zero.clone()]), corner_mass.clone()),
        (Point::new(vec![zero.clone(), side.clone()]), corner_mass.clone()),
    ];
    if rest.is_positive() {
        // shared far point so the leftover mass transports at zero cost and
        // never interferes with the square pairing
        let far = side * int(100);
        let far_point = Point::new(vec![far.clone(), far]);
        p1.push((far_point.clone(), rest.clone()));
        p2.push((far_point, rest));
    }
    Ok(ProblemInstance::new(
        vec![
            DiscreteMeasure::from_pairs(p1),
            DiscreteMeasure::from_pairs(p2),
        ],
        vec![half.clone(), half],
    ))
}

/// Deterministic random instance: uniform masses 1/n_i, integer coordinates
/// in [0, coord_bound], uniform weights.
pub fn random_instance(sizes: &[usize], dim: usize, coord_bound: u64, seed: u64) -> ProblemInstance {
    assert!(!sizes.is_empty() && sizes.iter().all(|&n| n >= 1));
    assert!(dim >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = sizes.len();
    let weight = Rational::new(BigInt::one(), BigInt::from(m));
    let measures = sizes
        .iter()
        .map(|&n| {
            let mass = Rational::new(BigInt::one(), BigInt::from(n));
            let slots = (0..n)
                .map(|_| {
                    let coords = (0..dim)
                        .map(|_| int(rng.gen_range(0..=coord_bound) as i64))
                        .collect();
                    SupportSlot {
                        point: Point::new(coords),
                        mass: mass.clone(),
                    }
                })
                .collect();
            DiscreteMeasure::new(slots)
        })
        .collect();
    ProblemInstance::new(measures, vec![weight; m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn two_point_instance() -> ProblemInstance {
        ProblemInstance::new(
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
        )
    }

    #[test]
    fn validate_accepts_exact_instance() {
        assert!(two_point_instance().validate().is_valid());
    }

    #[test]
    fn validate_flags_bad_weight_sum() {
        let mut inst = two_point_instance();
        inst.weights = vec![rat(1, 3), rat(1, 3)];
        let report = inst.validate();
        assert!(!report.is_valid());
        assert!(report.issues.iter().any(|s| s.contains("weights sum")));
    }

    #[test]
    fn validate_flags_bad_mass_sum() {
        let mut inst = two_point_instance();
        inst.measures[0].slots[0].mass = rat(1, 3);
        let report = inst.validate();
        assert!(report.issues.iter().any(|s| s.contains("masses sum")));
    }

    #[test]
    fn weighted_mean_of_triangle() {
        let inst = ProblemInstance::new(
            vec![
                DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[0, 0]), int(1))]),
                DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[3, 0]), int(1))]),
                DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[3, 4]), int(1))]),
            ],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        );
        let mean = weighted_mean(&Tuple(vec![0, 0, 0]), &inst).unwrap();
        assert_eq!(mean.coords[0], int(2));
        assert_eq!(mean.coords[1], rat(4, 3));
    }

    #[test]
    fn weighted_mean_of_midpoint() {
        let inst = ProblemInstance::new(
            vec![
                DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[0, 0]), int(1))]),
                DiscreteMeasure::from_pairs(vec![(Point::from_ints(&[6, 0]), int(1))]),
            ],
            vec![rat(1, 2), rat(1, 2)],
        );
        let mean = weighted_mean(&Tuple(vec![0, 0]), &inst).unwrap();
        assert_eq!(mean, Point::from_ints(&[3, 0]));
    }

    #[test]
    fn weighted_mean_identity_when_points_coincide() {
        let p = Point::new(vec![parse_rational("7/3").unwrap(), int(-2)]);
        let inst = ProblemInstance::new(
            vec![
                DiscreteMeasure::from_pairs(vec![(p.clone(), int(1))]),
                DiscreteMeasure::from_pairs(vec![(p.clone(), int(1))]),
                DiscreteMeasure::from_pairs(vec![(p.clone(), int(1))]),
            ],
            vec![rat(1, 5), rat(2, 5), rat(2, 5)],
        );
        assert_eq!(weighted_mean(&Tuple(vec![0, 0, 0]), &inst).unwrap(), p);
    }

    #[test]
    fn tuples_enumerate_in_lexicographic_order() {
        let inst = two_point_instance();
        let tuples: Vec<_> = enumerate_tuples(&inst, 10).unwrap().collect();
        assert_eq!(
            tuples,
            vec![
                Tuple(vec![0, 0]),
                Tuple(vec![0, 1]),
                Tuple(vec![1, 0]),
                Tuple(vec![1, 1]),
            ]
        );
    }

    #[test]
    fn tuple_enumeration_respects_cap() {
        let inst = random_instance(&[100, 100, 100], 2, 10, 1);
        match enumerate_tuples(&inst, 100_000) {
            Err(Error::TupleCapExceeded { product, .. }) => {
                assert_eq!(product, BigUint::from(1_000_000u64));
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn twenty_seven_tuples_for_three_cubed() {
        let inst = random_instance(&[3, 3, 3], 2, 5, 7);
        assert_eq!(enumerate_tuples(&inst, 100).unwrap().count(), 27);
    }

    #[test]
    fn square_instance_matches_example() {
        let inst = square_instance(&int(6), &rat(1, 2)).unwrap();
        assert!(inst.validate().is_valid());
        assert_eq!(inst.measures[0].slots[0].point, Point::from_ints(&[0, 0]));
        assert_eq!(inst.measures[0].slots[1].point, Point::from_ints(&[6, 6]));
        assert_eq!(inst.measures[1].slots[0].point, Point::from_ints(&[6, 0]));
        assert_eq!(inst.measures[1].slots[1].point, Point::from_ints(&[0, 6]));
        // the four weighted means are the side midpoints
        let mut means = Vec::new();
        for t in enumerate_tuples(&inst, 10).unwrap() {
            means.push(weighted_mean(&t, &inst).unwrap());
        }
        let expect: Vec<Point> = [[3, 0], [0, 3], [6, 3], [3, 6]]
            .iter()
            .map(|c| Point::from_ints(c))
            .collect();
        for e in &expect {
            assert!(means.contains(e), "missing mean {e:?}");
        }
    }

    #[test]
    fn random_instance_is_deterministic() {
        let a = random_instance(&[2, 3], 2, 9, 42);
        let b = random_instance(&[2, 3], 2, 9, 42);
        assert_eq!(a, b);
        let c = random_instance(&[2, 3], 2, 11, 42);
        assert_ne!(a, c);
        assert_eq!(a.measures[0].slots[0].mass, rat(1, 2));
        assert_eq!(a.measures[1].slots[0].mass, rat(1, 3));
        assert!(a.validate().is_valid());
    }

    #[test]
    fn combination_measure_marginals() {
        let inst = two_point_instance();
        let good = CombinationMeasure::new(vec![
            CombinationEntry {
                tuple: Tuple(vec![0, 0]),
                mass: rat(1, 2),
            },
            CombinationEntry {
                tuple: Tuple(vec![1, 1]),
                mass: rat(1, 2),
            },
        ]);
        good.validate(&inst).unwrap();

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
        assert!(matches!(
            bad.validate(&inst),
            Err(Error::MarginalViolation { .. })
        ));
    }

    #[test]
    fn merged_sums_coincident_slots() {
        let m = DiscreteMeasure::from_pairs(vec![
            (Point::from_ints(&[1, 1]), rat(1, 4)),
            (Point::from_ints(&[1, 1]), rat(1, 4)),
            (Point::from_ints(&[0, 0]), rat(1, 2)),
        ]);
        let merged = m.merged();
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.slots[1].mass, rat(1, 2));
    }
}
