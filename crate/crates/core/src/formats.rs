//! JSON file formats. Rationals are strings "p/q" (or "p" for integers) so
//! every file round-trips bit-exactly; decimals are rejected.

use crate::error::{Error, Result};
use crate::measures::{
    CombinationEntry, CombinationMeasure, DiscreteMeasure, Flow, Point, ProblemInstance,
    SupportSlot, TransportPlan, Tuple,
};
use crate::rational::{format_rational, parse_rational};
use crate::reduction::{
    GadgetGraph, GadgetPair, GadgetPath, GadgetTriangle, InducedGraph, LayoutEdge, P3dmInstance,
    RectilinearLayout, TriangleKind, VertexKind,
};
use crate::verify::VerificationReport;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

fn bad(context: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{context}: {e}"))
}

fn from_json_str<'a, T: Deserialize<'a>>(s: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| bad(what, e))
}

fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization cannot fail")
}

// ---------------------------------------------------------------- instance

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    d: usize,
    weights: Vec<String>,
    measures: Vec<MeasureFile>,
}

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    points: Vec<PointFile>,
}

#[derive(Serialize, Deserialize)]
struct PointFile {
    mass: String,
    coords: Vec<String>,
}

fn measure_to_file(m: &DiscreteMeasure) -> MeasureFile {
    MeasureFile {
        points: m
            .slots
            .iter()
            .map(|s| PointFile {
                mass: format_rational(&s.mass),
                coords: s.point.coords.iter().map(format_rational).collect(),
            })
            .collect(),
    }
}

fn measure_from_file(m: &MeasureFile, d: usize, which: usize) -> Result<DiscreteMeasure> {
    let mut slots = Vec::with_capacity(m.points.len());
    for (k, p) in m.points.iter().enumerate() {
        let context = format!("measures[{which}].points[{k}]");
        if p.coords.len() != d {
            return Err(Error::Parse(format!(
                "{context}: {} coordinates, expected {d}",
                p.coords.len()
            )));
        }
        let mass = parse_rational(&p.mass).map_err(|e| bad(&format!("{context}.mass"), e))?;
        let coords = p
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                parse_rational(c).map_err(|e| bad(&format!("{context}.coords[{i}]"), e))
            })
            .collect::<Result<Vec<_>>>()?;
        slots.push(SupportSlot {
            point: Point::new(coords),
            mass,
        });
    }
    Ok(DiscreteMeasure::new(slots))
}

pub fn instance_to_json(inst: &ProblemInstance) -> String {
    to_json_string(&InstanceFile {
        d: inst.dim(),
        weights: inst.weights.iter().map(format_rational).collect(),
        measures: inst.measures.iter().map(measure_to_file).collect(),
    })
}

pub fn instance_from_json(s: &str) -> Result<ProblemInstance> {
    let file: InstanceFile = from_json_str(s, "instance file")?;
    let weights = file
        .weights
        .iter()
        .enumerate()
        .map(|(i, w)| parse_rational(w).map_err(|e| bad(&format!("weights[{i}]"), e)))
        .collect::<Result<Vec<_>>>()?;
    let measures = file
        .measures
        .iter()
        .enumerate()
        .map(|(i, m)| measure_from_file(m, file.d, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProblemInstance::new(measures, weights))
}

/// Single measure file, same point schema as instances.
pub fn measure_to_json(m: &DiscreteMeasure) -> String {
    to_json_string(&measure_to_file(m))
}

pub fn measure_from_json(s: &str, d: usize) -> Result<DiscreteMeasure> {
    let file: MeasureFile = from_json_str(s, "measure file")?;
    measure_from_file(&file, d, 0)
}

// ----------------------------------------------------- combination measure

#[derive(Serialize, Deserialize)]
struct CombinationFile {
    entries: Vec<CombinationEntryFile>,
}

#[derive(Serialize, Deserialize)]
struct CombinationEntryFile {
    tuple: Vec<usize>,
    mass: String,
}

pub fn combination_to_json(p: &CombinationMeasure) -> String {
    to_json_string(&CombinationFile {
        entries: p
            .entries
            .iter()
            .map(|e| CombinationEntryFile {
                tuple: e.tuple.0.clone(),
                mass: format_rational(&e.mass),
            })
            .collect(),
    })
}

pub fn combination_from_json(s: &str) -> Result<CombinationMeasure> {
    let file: CombinationFile = from_json_str(s, "combination measure file")?;
    let entries = file
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Ok(CombinationEntry {
                tuple: Tuple(e.tuple.clone()),
                mass: parse_rational(&e.mass)
                    .map_err(|err| bad(&format!("entries[{i}].mass"), err))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CombinationMeasure::new(entries))
}

// ------------------------------------------------------------- plan

#[derive(Serialize, Deserialize)]
struct PlanFile {
    flows: Vec<FlowFile>,
}

#[derive(Serialize, Deserialize)]
struct FlowFile {
    j: usize,
    i: usize,
    k: usize,
    mass: String,
}

pub fn plan_to_json(plan: &TransportPlan) -> String {
    to_json_string(&PlanFile {
        flows: plan
            .flows
            .iter()
            .map(|f| FlowFile {
                j: f.candidate,
                i: f.measure,
                k: f.slot,
                mass: format_rational(&f.mass),
            })
            .collect(),
    })
}

pub fn plan_from_json(s: &str) -> Result<TransportPlan> {
    let file: PlanFile = from_json_str(s, "transport plan file")?;
    let flows = file
        .flows
        .iter()
        .enumerate()
        .map(|(idx, f)| {
            Ok(Flow {
                candidate: f.j,
                measure: f.i,
                slot: f.k,
                mass: parse_rational(&f.mass)
                    .map_err(|e| bad(&format!("flows[{idx}].mass"), e))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransportPlan { flows })
}

// ------------------------------------------------------------------- p3dm

#[derive(Serialize, Deserialize)]
struct P3dmFile {
    #[serde(rename = "X")]
    x: Vec<String>,
    #[serde(rename = "Y")]
    y: Vec<String>,
    #[serde(rename = "Z")]
    z: Vec<String>,
    triples: Vec<[String; 3]>,
}

pub fn p3dm_to_json(p: &P3dmInstance) -> String {
    to_json_string(&P3dmFile {
        x: p.x.clone(),
        y: p.y.clone(),
        z: p.z.clone(),
        triples: p
            .triples
            .iter()
            .map(|t| {
                [
                    p.x[t[0]].clone(),
                    p.y[t[1]].clone(),
                    p.z[t[2]].clone(),
                ]
            })
            .collect(),
    })
}

pub fn p3dm_from_json(s: &str) -> Result<P3dmInstance> {
    let file: P3dmFile = from_json_str(s, "matching instance file")?;
    let index_of = |labels: &[String], label: &str, class: &str, t: usize| -> Result<usize> {
        labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "triples[{t}]: label {label:?} not in set {class}"
                ))
            })
    };
    let triples = file
        .triples
        .iter()
        .enumerate()
        .map(|(t, [a, b, c])| {
            Ok([
                index_of(&file.x, a, "X", t)?,
                index_of(&file.y, b, "Y", t)?,
                index_of(&file.z, c, "Z", t)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let p = P3dmInstance {
        x: file.x,
        y: file.y,
        z: file.z,
        triples,
    };
    p.validate()?;
    Ok(p)
}

// ------------------------------------------------------------------ layout

#[derive(Serialize, Deserialize)]
struct LayoutFile {
    vertices: BTreeMap<String, (i64, i64)>,
    edges: Vec<LayoutEdgeFile>,
}

#[derive(Serialize, Deserialize)]
struct LayoutEdgeFile {
    from: String,
    to: String,
    #[serde(default)]
    bends: Vec<(i64, i64)>,
}

fn vertex_name(g: &InducedGraph, p: &P3dmInstance, v: usize) -> String {
    match g.vertices[v] {
        VertexKind::Element { class, index } => p.element_label(class, index).to_string(),
        VertexKind::Triple { index } => format!("t{}", index + 1),
    }
}

pub fn layout_to_json(l: &RectilinearLayout, g: &InducedGraph, p: &P3dmInstance) -> String {
    to_json_string(&LayoutFile {
        vertices: (0..g.vertices.len())
            .map(|v| (vertex_name(g, p, v), l.positions[v]))
            .collect(),
        edges: l
            .edges
            .iter()
            .map(|e| LayoutEdgeFile {
                from: vertex_name(g, p, e.from),
                to: vertex_name(g, p, e.to),
                bends: e.bends.clone(),
            })
            .collect(),
    })
}

pub fn layout_from_json(s: &str, g: &InducedGraph, p: &P3dmInstance) -> Result<RectilinearLayout> {
    let file: LayoutFile = from_json_str(s, "layout file")?;
    let mut name_to_vertex = BTreeMap::new();
    for v in 0..g.vertices.len() {
        name_to_vertex.insert(vertex_name(g, p, v), v);
    }
    let mut positions = vec![None; g.vertices.len()];
    for (name, pos) in &file.vertices {
        let v = *name_to_vertex
            .get(name)
            .ok_or_else(|| Error::Parse(format!("unknown vertex {name:?} in layout")))?;
        positions[v] = Some(*pos);
    }
    let positions = positions
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| Error::Parse(format!("vertex {v} missing from layout"))))
        .collect::<Result<Vec<_>>>()?;
    let edges = file
        .edges
        .iter()
        .map(|e| {
            let from = *name_to_vertex
                .get(&e.from)
                .ok_or_else(|| Error::Parse(format!("unknown vertex {:?} in edge", e.from)))?;
            let to = *name_to_vertex
                .get(&e.to)
                .ok_or_else(|| Error::Parse(format!("unknown vertex {:?} in edge", e.to)))?;
            Ok(LayoutEdge {
                from,
                to,
                bends: e.bends.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RectilinearLayout { positions, edges })
}

// ------------------------------------------------------------------ gadget

#[derive(Serialize, Deserialize)]
struct GadgetFile {
    n: usize,
    triangles: Vec<GadgetTriangleFile>,
    paths: Vec<GadgetPathFile>,
    triple_triangles: Vec<(usize, usize)>,
    element_points: Vec<ElementPointFile>,
    vertex_colors: Vec<((i64, i64), usize)>,
    listings: [Vec<(i64, i64)>; 3],
}

#[derive(Serialize, Deserialize)]
struct GadgetTriangleFile {
    corners: [(i64, i64); 3],
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    path: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pair: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    triple: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct GadgetPathFile {
    element_class: usize,
    element_index: usize,
    triple: usize,
    tt_corner: (i64, i64),
    pairs: Vec<GadgetPairFile>,
}

#[derive(Serialize, Deserialize)]
struct GadgetPairFile {
    near: (i64, i64),
    far: (i64, i64),
    diagonals: [(i64, i64); 2],
    near_triangle: usize,
    far_triangle: usize,
}

#[derive(Serialize, Deserialize)]
struct ElementPointFile {
    class: usize,
    index: usize,
    position: (i64, i64),
}

pub fn gadget_to_json(g: &GadgetGraph) -> String {
    to_json_string(&GadgetFile {
        n: g.n,
        triangles: g
            .triangles
            .iter()
            .map(|t| {
                let (kind, path, pair, triple) = match t.kind {
                    TriangleKind::PathNear { path, pair } => {
                        ("path_near", Some(path), Some(pair), None)
                    }
                    TriangleKind::PathFar { path, pair } => {
                        ("path_far", Some(path), Some(pair), None)
                    }
                    TriangleKind::Triple { triple } => ("triple", None, None, Some(triple)),
                };
                GadgetTriangleFile {
                    corners: t.corners,
                    kind: kind.to_string(),
                    path,
                    pair,
                    triple,
                }
            })
            .collect(),
        paths: g
            .paths
            .iter()
            .map(|p| GadgetPathFile {
                element_class: p.element.0,
                element_index: p.element.1,
                triple: p.triple,
                tt_corner: p.tt_corner,
                pairs: p
                    .pairs
                    .iter()
                    .map(|pr| GadgetPairFile {
                        near: pr.near_private,
                        far: pr.far_private,
                        diagonals: pr.diagonals,
                        near_triangle: pr.near_triangle,
                        far_triangle: pr.far_triangle,
                    })
                    .collect(),
            })
            .collect(),
        triple_triangles: g.triple_triangles.clone(),
        element_points: g
            .element_points
            .iter()
            .map(|&((class, index), position)| ElementPointFile {
                class,
                index,
                position,
            })
            .collect(),
        vertex_colors: g.vertex_colors.iter().map(|(&p, &c)| (p, c)).collect(),
        listings: g.listings.clone(),
    })
}

pub fn gadget_from_json(s: &str) -> Result<GadgetGraph> {
    let file: GadgetFile = from_json_str(s, "gadget file")?;
    let triangles = file
        .triangles
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let kind = match (t.kind.as_str(), t.path, t.pair, t.triple) {
                ("path_near", Some(path), Some(pair), None) => {
                    TriangleKind::PathNear { path, pair }
                }
                ("path_far", Some(path), Some(pair), None) => TriangleKind::PathFar { path, pair },
                ("triple", None, None, Some(triple)) => TriangleKind::Triple { triple },
                _ => {
                    return Err(Error::Parse(format!(
                        "triangles[{i}]: inconsistent kind {:?}",
                        t.kind
                    )))
                }
            };
            Ok(GadgetTriangle {
                corners: t.corners,
                kind,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let paths = file
        .paths
        .iter()
        .map(|p| GadgetPath {
            element: (p.element_class, p.element_index),
            triple: p.triple,
            tt_corner: p.tt_corner,
            pairs: p
                .pairs
                .iter()
                .map(|pr| GadgetPair {
                    near_private: pr.near,
                    far_private: pr.far,
                    diagonals: pr.diagonals,
                    near_triangle: pr.near_triangle,
                    far_triangle: pr.far_triangle,
                })
                .collect(),
        })
        .collect();
    let gadget = GadgetGraph {
        n: file.n,
        triangles,
        paths,
        triple_triangles: file.triple_triangles,
        element_points: file
            .element_points
            .iter()
            .map(|e| ((e.class, e.index), e.position))
            .collect(),
        vertex_colors: file.vertex_colors.iter().copied().collect(),
        listings: file.listings,
    };
    let issues = crate::reduction::validate_gadget(&gadget);
    if !issues.is_empty() {
        return Err(Error::InvalidGadget(issues.join("; ")));
    }
    Ok(gadget)
}

// ------------------------------------------------------------------- cover

#[derive(Serialize, Deserialize)]
struct CoverFile {
    cover: Vec<[String; 3]>,
}

pub fn cover_to_json(cover: &[usize], p: &P3dmInstance) -> String {
    to_json_string(&CoverFile {
        cover: cover
            .iter()
            .map(|&t| {
                let [a, b, c] = p.triples[t];
                [p.x[a].clone(), p.y[b].clone(), p.z[c].clone()]
            })
            .collect(),
    })
}

// ------------------------------------------------------------------ report

#[derive(Serialize, Deserialize)]
pub struct ReportFile {
    pub accepted: bool,
    pub sparsity_ok: bool,
    pub cost: String,
    pub cost_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub non_mass_splitting: Option<bool>,
    pub details: String,
}

pub fn report_to_json(r: &VerificationReport) -> String {
    to_json_string(&ReportFile {
        accepted: r.accepted(),
        sparsity_ok: r.sparsity_ok,
        cost: format_rational(&r.cost),
        cost_ok: r.cost_ok,
        non_mass_splitting: r.non_mass_splitting,
        details: r.details.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{random_instance, square_instance};
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn instance_round_trip() {
        let inst = square_instance(&int(6), &rat(1, 2)).unwrap();
        let json = instance_to_json(&inst);
        let back = instance_from_json(&json).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn instance_schema_shape() {
        let inst = square_instance(&int(6), &rat(1, 2)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&instance_to_json(&inst)).unwrap();
        assert_eq!(v["d"], 2);
        assert_eq!(v["weights"][0], "1/2");
        assert_eq!(v["measures"][0]["points"][0]["coords"][0], "0");
        assert_eq!(v["measures"][0]["points"][0]["mass"], "1/2");
    }

    #[test]
    fn rejects_decimals() {
        let text = r#"{"d":1,"weights":["0.5","1/2"],"measures":[
            {"points":[{"mass":"1","coords":["0"]}]},
            {"points":[{"mass":"1","coords":["0"]}]}]}"#;
        assert!(matches!(instance_from_json(text), Err(Error::Parse(_))));
    }

    #[test]
    fn combination_round_trip() {
        let cm = CombinationMeasure::new(vec![
            CombinationEntry {
                tuple: Tuple(vec![0, 1]),
                mass: rat(1, 3),
            },
            CombinationEntry {
                tuple: Tuple(vec![1, 0]),
                mass: rat(2, 3),
            },
        ]);
        let back = combination_from_json(&combination_to_json(&cm)).unwrap();
        assert_eq!(cm, back);
    }

    #[test]
    fn p3dm_round_trip_with_labels() {
        let p = P3dmInstance {
            x: vec!["x1".into(), "x2".into()],
            y: vec!["y1".into(), "y2".into()],
            z: vec!["z1".into(), "z2".into()],
            triples: vec![[0, 0, 0], [1, 1, 1]],
        };
        let json = p3dm_to_json(&p);
        let back = p3dm_from_json(&json).unwrap();
        assert_eq!(p, back);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["triples"][0][0], "x1");
    }

    #[test]
    fn p3dm_rejects_unknown_labels() {
        let text = r#"{"X":["x1"],"Y":["y1"],"Z":["z1"],"triples":[["x1","nope","z1"]]}"#;
        assert!(p3dm_from_json(text).is_err());
    }

    proptest! {
        #[test]
        fn random_instances_round_trip(seed in 0u64..200, m in 1usize..4, d in 1usize..4) {
            let sizes: Vec<usize> = (0..m).map(|i| 1 + ((seed as usize + i) % 3)).collect();
            let inst = random_instance(&sizes, d, 9, seed);
            let back = instance_from_json(&instance_to_json(&inst)).unwrap();
            prop_assert_eq!(inst, back);
        }
    }
}
