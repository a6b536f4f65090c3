//! Alternating-triangle pattern detection, decoding combination measures
//! back to matchings, and circumference bookkeeping.
//!
//! A valid selection puts mass on exactly one triangle of every rectangle
//! pair, with a constant phase along each path: the near triangles when the
//! path leads to a selected triple, the far triangles otherwise. Triangle
//! identification is by exact corner coordinates against the gadget, never
//! by cost.

use crate::error::{Error, Result};
use crate::measures::{CombinationMeasure, ProblemInstance, Tuple};
use crate::rational::Rational;
use crate::reduction::{check_cover, emit_uc3p, GadgetGraph, GridPoint, P3dmInstance};
use num::bigint::BigInt;
use num::{BigUint, One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, Debug)]
pub struct AlternatingPattern {
    /// Per path: selection bits over the triangle sequence
    /// [near 0, far 0, near 1, far 1, ...]; strictly alternating.
    pub path_bits: Vec<Vec<bool>>,
    /// Per path: true when the near triangles carry the mass.
    pub toward_triple: Vec<bool>,
    /// Triples whose triple triangle is selected, ascending.
    pub selected_triples: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternViolation {
    InvalidMeasure(String),
    WrongMass { entry: usize },
    NotAGadgetTriangle { entry: usize },
    OffPathTriangle { entry: usize, element: String },
    PairSelection { path: usize, pair: usize, count: usize },
    AlternationBreak { path: usize },
    ElementCoverage { element: String, count: usize },
    TripleMismatch { triple: usize },
}

impl fmt::Display for PatternViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternViolation::InvalidMeasure(msg) => write!(f, "invalid measure: {msg}"),
            PatternViolation::WrongMass { entry } => {
                write!(f, "entry {entry} does not carry mass 1/n")
            }
            PatternViolation::NotAGadgetTriangle { entry } => {
                write!(f, "entry {entry} is not a gadget triangle")
            }
            PatternViolation::OffPathTriangle { entry, element } => {
                write!(f, "entry {entry} selects an off-path triangle at element {element}")
            }
            PatternViolation::PairSelection { path, pair, count } => {
                write!(f, "path {path}, pair {pair}: {count} triangles selected, want 1")
            }
            PatternViolation::AlternationBreak { path } => {
                write!(f, "path {path}: selection does not alternate")
            }
            PatternViolation::ElementCoverage { element, count } => {
                write!(f, "element {element}: covered by {count} first triangles, want 1")
            }
            PatternViolation::TripleMismatch { triple } => {
                write!(f, "triple {triple}: triangle selection conflicts with arriving paths")
            }
        }
    }
}

impl From<PatternViolation> for Error {
    fn from(v: PatternViolation) -> Error {
        Error::InvalidCombination(v.to_string())
    }
}

fn element_name(element: (usize, usize)) -> String {
    let prefix = ["x", "y", "z"][element.0];
    format!("{prefix}{}", element.1 + 1)
}

/// Maps each entry of the measure to a gadget triangle and verifies the
/// alternating structure. Returns the first violation found.
pub fn detect_alternating(
    g: &GadgetGraph,
    p: &CombinationMeasure,
) -> std::result::Result<AlternatingPattern, PatternViolation> {
    let inst = emit_uc3p(g).map_err(|e| PatternViolation::InvalidMeasure(e.to_string()))?;
    p.validate(&inst)
        .map_err(|e| PatternViolation::InvalidMeasure(e.to_string()))?;
    let unit = Rational::new(BigInt::one(), BigInt::from(g.n));
    let registry = g.triangle_index();
    let element_coords: Vec<((usize, usize), GridPoint)> = g.element_points.clone();

    let mut counts = vec![0usize; g.triangles.len()];
    for (ei, entry) in p.entries.iter().enumerate() {
        if entry.mass != unit {
            return Err(PatternViolation::WrongMass { entry: ei });
        }
        let corners: [GridPoint; 3] = [
            g.listings[0][entry.tuple.0[0]],
            g.listings[1][entry.tuple.0[1]],
            g.listings[2][entry.tuple.0[2]],
        ];
        match registry.get(&corners) {
            Some(&t) => counts[t] += 1,
            None => {
                // a 3-4-5 triangle through an element point that is not in
                // the registry is an off-path triangle
                let mut d = [
                    dist2(corners[0], corners[1]),
                    dist2(corners[0], corners[2]),
                    dist2(corners[1], corners[2]),
                ];
                d.sort_unstable();
                if d == [9, 16, 25] {
                    if let Some((element, _)) = element_coords
                        .iter()
                        .find(|(_, pos)| corners.contains(pos))
                    {
                        return Err(PatternViolation::OffPathTriangle {
                            entry: ei,
                            element: element_name(*element),
                        });
                    }
                }
                return Err(PatternViolation::NotAGadgetTriangle { entry: ei });
            }
        }
    }

    let mut path_bits = Vec::with_capacity(g.paths.len());
    let mut toward_triple = Vec::with_capacity(g.paths.len());
    for (pi, path) in g.paths.iter().enumerate() {
        let mut bits = Vec::with_capacity(2 * path.pairs.len());
        let mut phase: Option<bool> = None;
        for (ji, pair) in path.pairs.iter().enumerate() {
            let near = counts[pair.near_triangle];
            let far = counts[pair.far_triangle];
            if near + far != 1 || near > 1 || far > 1 {
                return Err(PatternViolation::PairSelection {
                    path: pi,
                    pair: ji,
                    count: near + far,
                });
            }
            let this = near == 1;
            match phase {
                None => phase = Some(this),
                Some(ph) if ph != this => {
                    return Err(PatternViolation::AlternationBreak { path: pi })
                }
                _ => {}
            }
            bits.push(near == 1);
            bits.push(far == 1);
        }
        path_bits.push(bits);
        toward_triple.push(phase.unwrap_or(false));
    }

    // each element is covered by the first triangle of exactly one path
    for &(element, _) in &g.element_points {
        let count = g
            .paths
            .iter()
            .enumerate()
            .filter(|(pi, path)| path.element == element && toward_triple[*pi])
            .count();
        if count != 1 {
            return Err(PatternViolation::ElementCoverage {
                element: element_name(element),
                count,
            });
        }
    }

    // a triple triangle is selected exactly when all its paths run near
    let mut selected_triples = Vec::new();
    for &(triple, tri) in &g.triple_triangles {
        let tt_selected = counts[tri] == 1;
        let all_near = g
            .paths
            .iter()
            .enumerate()
            .filter(|(_, path)| path.triple == triple)
            .all(|(pi, _)| toward_triple[pi]);
        if tt_selected != all_near {
            return Err(PatternViolation::TripleMismatch { triple });
        }
        if tt_selected {
            selected_triples.push(triple);
        }
    }
    selected_triples.sort_unstable();

    Ok(AlternatingPattern {
        path_bits,
        toward_triple,
        selected_triples,
    })
}

/// Reads the cover off a pattern and re-checks it is an exact cover. A
/// failure here indicates a gadget or pattern bug, not user error.
pub fn decode_matching(pattern: &AlternatingPattern, p: &P3dmInstance) -> Result<Vec<usize>> {
    let cover = pattern.selected_triples.clone();
    check_cover(p, &cover)?;
    Ok(cover)
}

fn dist2(a: GridPoint, b: GridPoint) -> i64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Exhaustive scan over all triples of a 3-measure instance: the minimum
/// per-unit cost and every tuple attaining it, in lexicographic order.
pub fn min_triple_scan(
    inst: &ProblemInstance,
    cap: u64,
) -> Result<(Rational, Vec<Tuple>)> {
    if inst.num_measures() != 3 {
        return Err(Error::Precondition(format!(
            "triple scan needs exactly 3 measures, got {}",
            inst.num_measures()
        )));
    }
    let report = inst.validate();
    if !report.is_valid() {
        return Err(Error::InvalidInstance(report.issues.join("; ")));
    }
    let count = inst.tuple_count();
    if count > BigUint::from(cap) {
        return Err(Error::ScanCapExceeded { count, cap });
    }
    let (n0, n1, n2) = (
        inst.measures[0].len(),
        inst.measures[1].len(),
        inst.measures[2].len(),
    );
    // weighted pairwise distance tables
    let table = |i: usize, k: usize| -> Vec<Vec<Rational>> {
        let factor = &inst.weights[i] * &inst.weights[k];
        inst.measures[i]
            .slots
            .iter()
            .map(|a| {
                inst.measures[k]
                    .slots
                    .iter()
                    .map(|b| &factor * a.point.squared_distance(&b.point))
                    .collect()
            })
            .collect()
    };
    let t01 = table(0, 1);
    let t02 = table(0, 2);
    let t12 = table(1, 2);
    let mut best: Option<Rational> = None;
    let mut argmin: Vec<Tuple> = Vec::new();
    for k0 in 0..n0 {
        for k1 in 0..n1 {
            let partial = &t01[k0][k1];
            for k2 in 0..n2 {
                let cost = partial + &t02[k0][k2] + &t12[k1][k2];
                match &best {
                    Some(b) if cost > *b => {}
                    Some(b) if cost == *b => argmin.push(Tuple(vec![k0, k1, k2])),
                    _ => {
                        best = Some(cost);
                        argmin = vec![Tuple(vec![k0, k1, k2])];
                    }
                }
            }
        }
    }
    let best = best.ok_or_else(|| Error::InvalidInstance("no tuples to scan".into()))?;
    Ok((best, argmin))
}

/// Perimeter of the triangle on three points: an exact rational when every
/// side length is rational (true for all axis-aligned 3-4-5 triangles),
/// otherwise a floating-point approximation flagged by `None`.
pub fn circumference_cost(
    a: &crate::measures::Point,
    b: &crate::measures::Point,
    c: &crate::measures::Point,
) -> Result<(Option<Rational>, f64)> {
    for p in [a, b, c] {
        if p.dim() != 2 {
            return Err(Error::Precondition(format!(
                "circumference is defined in the plane, got dimension {}",
                p.dim()
            )));
        }
    }
    let sides = [
        a.squared_distance(b),
        a.squared_distance(c),
        b.squared_distance(c),
    ];
    let mut exact = Some(Rational::zero());
    let mut approx = 0.0f64;
    for s in &sides {
        approx += s.to_f64().unwrap_or(f64::NAN).sqrt();
        exact = match (exact, rational_sqrt(s)) {
            (Some(acc), Some(root)) => Some(acc + root),
            _ => None,
        };
    }
    Ok((exact, approx))
}

/// Exact square root of a nonnegative rational in lowest terms, when it
/// exists. A sum of square roots of rationals is rational only when each
/// root is, so the per-side test decides exactness of the perimeter.
fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let numer = r.numer().sqrt();
    let denom = r.denom().sqrt();
    if &(&numer * &numer) == r.numer() && &(&denom * &denom) == r.denom() {
        Some(Rational::new(numer, denom))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Point;
    use crate::rational::{int, rat};

    #[test]
    fn circumference_of_345_triangle_is_exactly_12() {
        let (exact, approx) = circumference_cost(
            &Point::from_ints(&[0, 0]),
            &Point::from_ints(&[3, 0]),
            &Point::from_ints(&[0, 4]),
        )
        .unwrap();
        assert_eq!(exact, Some(int(12)));
        assert!((approx - 12.0).abs() < 1e-9);
    }

    #[test]
    fn unit_isoceles_is_inexact() {
        let (exact, approx) = circumference_cost(
            &Point::from_ints(&[0, 0]),
            &Point::from_ints(&[1, 0]),
            &Point::from_ints(&[0, 1]),
        )
        .unwrap();
        assert_eq!(exact, None);
        assert!((approx - (2.0 + std::f64::consts::SQRT_2)).abs() < 1e-9);
    }

    #[test]
    fn fractional_square_side_is_exact() {
        // sides 3/2, 2, 5/2: a scaled 3-4-5
        let (exact, _) = circumference_cost(
            &Point::new(vec![int(0), int(0)]),
            &Point::new(vec![rat(3, 2), int(0)]),
            &Point::new(vec![int(0), int(2)]),
        )
        .unwrap();
        assert_eq!(exact, Some(int(6)));
    }

    #[test]
    fn min_scan_on_coincident_singletons() {
        let m = crate::measures::DiscreteMeasure::from_pairs(vec![(
            Point::from_ints(&[1, 1]),
            int(1),
        )]);
        let inst = ProblemInstance::new(
            vec![m.clone(), m.clone(), m],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        );
        let (min, argmin) = min_triple_scan(&inst, 10).unwrap();
        assert_eq!(min, int(0));
        assert_eq!(argmin, vec![Tuple(vec![0, 0, 0])]);
    }

    #[test]
    fn min_scan_respects_cap() {
        let inst = crate::measures::random_instance(&[10, 10, 10], 2, 9, 5);
        assert!(matches!(
            min_triple_scan(&inst, 999),
            Err(Error::ScanCapExceeded { .. })
        ));
    }
}
