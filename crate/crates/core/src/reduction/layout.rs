//! Rectilinear layout of the induced graph.
//!
//! Deterministic placement-and-routing heuristic adequate for the
//! max-degree-3 planar graphs this pipeline produces: vertices are placed
//! greedily on a unit grid near the centroid of their placed neighbors,
//! edges are routed as shortest axis-parallel grid paths with used cells
//! blocked, and the result is doubled so all features keep separation 2.
//! Correctness is enforced by `validate_layout`, not assumed from the
//! heuristic; externally produced layouts go through the same validator.

use super::InducedGraph;
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

pub use super::gadget::MIN_SCALE;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayoutEdge {
    pub from: usize,
    pub to: usize,
    /// Interior bend points of the axis-parallel polyline.
    pub bends: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectilinearLayout {
    /// Position per graph vertex.
    pub positions: Vec<(i64, i64)>,
    pub edges: Vec<LayoutEdge>,
}

/// Lays out the induced graph. Tries a few deterministic strategy variants
/// and returns the first result that validates.
pub fn layout_rectilinear(g: &InducedGraph) -> Result<RectilinearLayout> {
    for variant in 0..4u8 {
        if let Some(layout) = try_layout(g, variant) {
            if validate_layout(&layout, g).is_empty() {
                return Ok(layout);
            }
        }
    }
    Err(Error::LayoutFailed(
        "no placement variant produced a valid rectilinear drawing".into(),
    ))
}

fn try_layout(g: &InducedGraph, variant: u8) -> Option<RectilinearLayout> {
    let n = g.vertices.len();
    let mut positions: Vec<Option<(i64, i64)>> = vec![None; n];
    let mut vertex_cells: HashSet<(i64, i64)> = HashSet::new();
    let mut route_cells: HashSet<(i64, i64)> = HashSet::new();
    let mut routed: BTreeMap<(usize, usize), Vec<(i64, i64)>> = BTreeMap::new();

    // components in vertex order
    let mut component = vec![usize::MAX; n];
    let mut num_components = 0;
    for s in 0..n {
        if component[s] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([s]);
        component[s] = num_components;
        while let Some(u) = queue.pop_front() {
            for &v in &g.adjacency[u] {
                if component[v] == usize::MAX {
                    component[v] = num_components;
                    queue.push_back(v);
                }
            }
        }
        num_components += 1;
    }

    let mut offset_x: i64 = 0;
    for comp in 0..num_components {
        let members: Vec<usize> = (0..n).filter(|&v| component[v] == comp).collect();
        // root: highest degree (variant bit flips to lowest index)
        let root = if variant % 2 == 0 {
            *members
                .iter()
                .max_by_key(|&&v| (g.adjacency[v].len(), std::cmp::Reverse(v)))
                .unwrap()
        } else {
            members[0]
        };
        positions[root] = Some((offset_x, 0));
        vertex_cells.insert((offset_x, 0));

        // BFS placement order
        let mut order = Vec::new();
        let mut seen: BTreeSet<usize> = [root].into_iter().collect();
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs = g.adjacency[u].clone();
            nbrs.sort_unstable();
            if variant >= 2 {
                nbrs.reverse();
            }
            for v in nbrs {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }

        for &v in order.iter().skip(1) {
            let placed_neighbors: Vec<usize> = g.adjacency[v]
                .iter()
                .copied()
                .filter(|&u| positions[u].is_some())
                .collect();
            let centroid = {
                let (mut sx, mut sy) = (0i64, 0i64);
                for &u in &placed_neighbors {
                    let (x, y) = positions[u].unwrap();
                    sx += x;
                    sy += y;
                }
                let k = placed_neighbors.len().max(1) as i64;
                (sx.div_euclid(k), sy.div_euclid(k))
            };
            let others: Vec<(i64, i64)> = (0..n)
                .filter(|&u| u != v && positions[u].is_some() && !placed_neighbors.contains(&u))
                .map(|u| positions[u].unwrap())
                .collect();
            let candidates = candidate_ring(centroid, 2 + n as i64, &others);
            let mut placed = false;
            for c in candidates {
                if vertex_cells.contains(&c) || route_cells.contains(&c) {
                    continue;
                }
                // tentatively place and route all edges to placed neighbors
                positions[v] = Some(c);
                vertex_cells.insert(c);
                let mut added: Vec<(i64, i64)> = Vec::new();
                let mut new_routes: Vec<((usize, usize), Vec<(i64, i64)>)> = Vec::new();
                let mut ok = true;
                for &u in &placed_neighbors {
                    let path = route(
                        c,
                        positions[u].unwrap(),
                        &vertex_cells,
                        &route_cells,
                        &positions,
                        n,
                    );
                    match path {
                        Some(cells) => {
                            for &cell in &cells[1..cells.len() - 1] {
                                route_cells.insert(cell);
                                added.push(cell);
                            }
                            let key = (v.min(u), v.max(u));
                            new_routes.push((key, cells));
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    for (key, cells) in new_routes {
                        routed.insert(key, cells);
                    }
                    placed = true;
                    break;
                }
                // rollback
                for cell in added {
                    route_cells.remove(&cell);
                }
                vertex_cells.remove(&c);
                positions[v] = None;
            }
            if !placed {
                return None;
            }
        }

        let max_x = (0..n)
            .filter_map(|v| positions[v])
            .map(|(x, _)| x)
            .max()
            .unwrap_or(0);
        offset_x = max_x + 3;
    }

    // assemble, doubling every coordinate so features keep separation 2
    let final_positions: Vec<(i64, i64)> = positions
        .iter()
        .map(|p| {
            let (x, y) = p.expect("all vertices placed");
            (2 * x, 2 * y)
        })
        .collect();
    let mut edges = Vec::new();
    for (u, v) in g.edges() {
        let key = (u.min(v), u.max(v));
        let cells = routed.get(&key)?;
        // routed path runs from the later-placed vertex; orient from u to v
        let mut cells = cells.clone();
        if cells[0] != positions[u].unwrap() {
            cells.reverse();
        }
        let bends = bends_of(&cells)
            .into_iter()
            .map(|(x, y)| (2 * x, 2 * y))
            .collect();
        edges.push(LayoutEdge { from: u, to: v, bends });
    }
    Some(RectilinearLayout {
        positions: final_positions,
        edges,
    })
}

/// Candidate cells around the centroid: nearest first, then preferring
/// distance from other placed vertices, then lexicographic.
fn candidate_ring(
    centroid: (i64, i64),
    radius: i64,
    others: &[(i64, i64)],
) -> Vec<(i64, i64)> {
    let mut cells = Vec::new();
    for dx in -radius..=radius {
        for dy in -radius..=radius {
            if dx == 0 && dy == 0 {
                continue;
            }
            let c = (centroid.0 + dx, centroid.1 + dy);
            let d2 = dx * dx + dy * dy;
            let repulsion: i64 = others
                .iter()
                .map(|&(ox, oy)| {
                    let rx = c.0 - ox;
                    let ry = c.1 - oy;
                    rx * rx + ry * ry
                })
                .min()
                .unwrap_or(0);
            cells.push((d2, std::cmp::Reverse(repulsion), c));
        }
    }
    cells.sort();
    cells.into_iter().map(|(_, _, c)| c).collect()
}

/// Shortest grid path avoiding vertex cells (except the endpoints) and all
/// previously routed cells.
fn route(
    from: (i64, i64),
    to: (i64, i64),
    vertex_cells: &HashSet<(i64, i64)>,
    route_cells: &HashSet<(i64, i64)>,
    positions: &[Option<(i64, i64)>],
    n: usize,
) -> Option<Vec<(i64, i64)>> {
    let mut lo = (from.0.min(to.0), from.1.min(to.1));
    let mut hi = (from.0.max(to.0), from.1.max(to.1));
    for p in positions.iter().flatten() {
        lo = (lo.0.min(p.0), lo.1.min(p.1));
        hi = (hi.0.max(p.0), hi.1.max(p.1));
    }
    let margin = 2 + n as i64;
    let blocked = |c: (i64, i64)| {
        (vertex_cells.contains(&c) && c != from && c != to) || route_cells.contains(&c)
    };
    let in_bounds = |c: (i64, i64)| {
        c.0 >= lo.0 - margin && c.0 <= hi.0 + margin && c.1 >= lo.1 - margin && c.1 <= hi.1 + margin
    };
    let mut parent: HashMap<(i64, i64), (i64, i64)> = HashMap::new();
    let mut seen: HashSet<(i64, i64)> = [from].into_iter().collect();
    let mut queue = VecDeque::from([from]);
    while let Some(cur) = queue.pop_front() {
        if cur == to {
            let mut path = vec![to];
            let mut w = to;
            while w != from {
                w = parent[&w];
                path.push(w);
            }
            path.reverse();
            return Some(path);
        }
        for step in [(1i64, 0i64), (0, 1), (-1, 0), (0, -1)] {
            let next = (cur.0 + step.0, cur.1 + step.1);
            if seen.contains(&next) || !in_bounds(next) || blocked(next) {
                continue;
            }
            seen.insert(next);
            parent.insert(next, cur);
            queue.push_back(next);
        }
    }
    None
}

fn bends_of(cells: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut bends = Vec::new();
    for w in cells.windows(3) {
        let d1 = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        let d2 = (w[2].0 - w[1].0, w[2].1 - w[1].1);
        if d1 != d2 {
            bends.push(w[1]);
        }
    }
    bends
}

/// Scales all coordinates. Factors below `MIN_SCALE` leave no clearance for
/// triangle paths and are rejected.
pub fn scale_layout(l: &RectilinearLayout, factor: i64) -> Result<RectilinearLayout> {
    if factor < MIN_SCALE {
        return Err(Error::Precondition(format!(
            "scale factor {factor} below the minimum of {MIN_SCALE}"
        )));
    }
    Ok(RectilinearLayout {
        positions: l.positions.iter().map(|&(x, y)| (x * factor, y * factor)).collect(),
        edges: l
            .edges
            .iter()
            .map(|e| LayoutEdge {
                from: e.from,
                to: e.to,
                bends: e.bends.iter().map(|&(x, y)| (x * factor, y * factor)).collect(),
            })
            .collect(),
    })
}

type Segment = ((i64, i64), (i64, i64));

fn polyline_of(l: &RectilinearLayout, e: &LayoutEdge) -> Vec<(i64, i64)> {
    let mut pts = vec![l.positions[e.from]];
    pts.extend(e.bends.iter().copied());
    pts.push(l.positions[e.to]);
    pts
}

fn segments_of(pts: &[(i64, i64)]) -> Vec<Segment> {
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Squared distance between two axis-parallel segments (exact, integer).
fn seg_seg_dist_sq(a: Segment, b: Segment) -> i64 {
    let gap = |lo1: i64, hi1: i64, lo2: i64, hi2: i64| -> i64 {
        if hi1 < lo2 {
            lo2 - hi1
        } else if hi2 < lo1 {
            lo1 - hi2
        } else {
            0
        }
    };
    let gx = gap(
        a.0 .0.min(a.1 .0),
        a.0 .0.max(a.1 .0),
        b.0 .0.min(b.1 .0),
        b.0 .0.max(b.1 .0),
    );
    let gy = gap(
        a.0 .1.min(a.1 .1),
        a.0 .1.max(a.1 .1),
        b.0 .1.min(b.1 .1),
        b.0 .1.max(b.1 .1),
    );
    gx * gx + gy * gy
}

/// Intersection box of two touching axis-parallel segments, as
/// (lo, hi) per axis; meaningful when `seg_seg_dist_sq` is 0.
fn touch_box(a: Segment, b: Segment) -> ((i64, i64), (i64, i64)) {
    let lo = (
        a.0 .0.min(a.1 .0).max(b.0 .0.min(b.1 .0)),
        a.0 .1.min(a.1 .1).max(b.0 .1.min(b.1 .1)),
    );
    let hi = (
        a.0 .0.max(a.1 .0).min(b.0 .0.max(b.1 .0)),
        a.0 .1.max(a.1 .1).min(b.0 .1.max(b.1 .1)),
    );
    (lo, hi)
}

fn on_segment(p: (i64, i64), s: Segment) -> bool {
    let (lox, hix) = (s.0 .0.min(s.1 .0), s.0 .0.max(s.1 .0));
    let (loy, hiy) = (s.0 .1.min(s.1 .1), s.0 .1.max(s.1 .1));
    p.0 >= lox && p.0 <= hix && p.1 >= loy && p.1 <= hiy
}

/// Checks all layout invariants and returns every violation found.
pub fn validate_layout(l: &RectilinearLayout, g: &InducedGraph) -> Vec<String> {
    let mut issues = Vec::new();
    if l.positions.len() != g.vertices.len() {
        issues.push(format!(
            "{} positions for {} vertices",
            l.positions.len(),
            g.vertices.len()
        ));
        return issues;
    }
    let mut distinct: BTreeSet<(i64, i64)> = BTreeSet::new();
    for (v, &p) in l.positions.iter().enumerate() {
        if !distinct.insert(p) {
            issues.push(format!("vertex {v} duplicates position {p:?}"));
        }
    }
    let graph_edges: BTreeSet<(usize, usize)> = g.edges().into_iter().collect();
    let layout_edges: BTreeSet<(usize, usize)> = l
        .edges
        .iter()
        .map(|e| (e.from.min(e.to), e.from.max(e.to)))
        .collect();
    if graph_edges != layout_edges {
        issues.push("layout edges do not match the graph".into());
    }

    // polyline shape
    for (i, e) in l.edges.iter().enumerate() {
        let pts = polyline_of(l, e);
        for w in pts.windows(2) {
            if w[0] == w[1] {
                issues.push(format!("edge {i}: zero-length segment at {:?}", w[0]));
            } else if w[0].0 != w[1].0 && w[0].1 != w[1].1 {
                issues.push(format!(
                    "edge {i}: segment {:?} -> {:?} is not axis-parallel",
                    w[0], w[1]
                ));
            }
        }
    }

    // vertices may only touch their own polyline endpoints
    for (i, e) in l.edges.iter().enumerate() {
        let pts = polyline_of(l, e);
        let segs = segments_of(&pts);
        for (v, &p) in l.positions.iter().enumerate() {
            for (k, &s) in segs.iter().enumerate() {
                if !on_segment(p, s) {
                    continue;
                }
                let allowed = (v == e.from && k == 0 && p == s.0)
                    || (v == e.to && k == segs.len() - 1 && p == s.1);
                if !allowed {
                    issues.push(format!(
                        "vertex {v} at {p:?} lies on a segment of edge {i}"
                    ));
                }
            }
        }
    }

    // segment pairs: no improper touching, minimum separation 2
    for (i, e1) in l.edges.iter().enumerate() {
        let pts1 = polyline_of(l, e1);
        let segs1 = segments_of(&pts1);
        // self: non-consecutive segments must not touch
        for a in 0..segs1.len() {
            for b in (a + 1)..segs1.len() {
                let d = seg_seg_dist_sq(segs1[a], segs1[b]);
                if b == a + 1 {
                    let (lo, hi) = touch_box(segs1[a], segs1[b]);
                    if d != 0 || lo != hi {
                        issues.push(format!(
                            "edge {i}: consecutive segments {a}, {b} do not meet at a point"
                        ));
                    }
                } else if d == 0 {
                    issues.push(format!("edge {i}: segments {a} and {b} touch"));
                }
            }
        }
        for (j, e2) in l.edges.iter().enumerate().skip(i + 1) {
            let pts2 = polyline_of(l, e2);
            let segs2 = segments_of(&pts2);
            let shared: Vec<(i64, i64)> = [e1.from, e1.to]
                .iter()
                .filter(|v| **v == e2.from || **v == e2.to)
                .map(|&v| l.positions[v])
                .collect();
            for &s1 in &segs1 {
                for &s2 in &segs2 {
                    let d = seg_seg_dist_sq(s1, s2);
                    if d == 0 {
                        let (lo, hi) = touch_box(s1, s2);
                        let point_touch = lo == hi;
                        if !(point_touch && shared.contains(&lo)) {
                            issues.push(format!(
                                "edges {i} and {j} intersect near {lo:?}"
                            ));
                        }
                    } else if d < 4 {
                        issues.push(format!(
                            "edges {i} and {j} run closer than 2 units apart"
                        ));
                    }
                }
            }
        }
    }

    // vertex-to-foreign-segment separation
    for (i, e) in l.edges.iter().enumerate() {
        let pts = polyline_of(l, e);
        let segs = segments_of(&pts);
        for (v, &p) in l.positions.iter().enumerate() {
            if v == e.from || v == e.to {
                continue;
            }
            for &s in &segs {
                let d = seg_seg_dist_sq((p, p), s);
                if d > 0 && d < 4 {
                    issues.push(format!(
                        "vertex {v} is closer than 2 units to edge {i}"
                    ));
                }
            }
        }
    }

    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{induced_graph, P3dmInstance};

    fn labels(prefix: &str, q: usize) -> Vec<String> {
        (1..=q).map(|i| format!("{prefix}{i}")).collect()
    }

    fn instance(q: usize, triples: Vec<[usize; 3]>) -> P3dmInstance {
        P3dmInstance {
            x: labels("x", q),
            y: labels("y", q),
            z: labels("z", q),
            triples,
        }
    }

    #[test]
    fn star_layout_has_axis_legs() {
        let p = instance(1, vec![[0, 0, 0]]);
        let g = induced_graph(&p).unwrap();
        let l = layout_rectilinear(&g).unwrap();
        assert!(validate_layout(&l, &g).is_empty());
        // three straight legs out of the triple vertex
        let center = l.positions[g.triple_vertex(0)];
        for e in &l.edges {
            assert!(e.bends.is_empty(), "star edges should be straight");
            let other = if e.from == g.triple_vertex(0) {
                e.to
            } else {
                e.from
            };
            let p = l.positions[other];
            assert!(p.0 == center.0 || p.1 == center.1);
        }
    }

    #[test]
    fn layout_is_deterministic() {
        let p = instance(2, vec![[0, 0, 0], [1, 1, 1], [0, 1, 1]]);
        let g = induced_graph(&p).unwrap();
        let a = layout_rectilinear(&g).unwrap();
        let b = layout_rectilinear(&g).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn layouts_validate_for_small_instances() {
        let cases = vec![
            instance(1, vec![[0, 0, 0]]),
            instance(2, vec![[0, 0, 0], [1, 1, 1]]),
            instance(2, vec![[0, 0, 0], [1, 1, 1], [0, 1, 1], [1, 0, 0]]),
            instance(3, vec![[0, 0, 0], [1, 1, 1], [2, 2, 2]]),
            instance(2, vec![]),
        ];
        for p in cases {
            let g = induced_graph(&p).unwrap();
            let l = layout_rectilinear(&g).unwrap();
            let issues = validate_layout(&l, &g);
            assert!(issues.is_empty(), "{:?}: {issues:?}", p.triples);
        }
    }

    #[test]
    fn scaling_multiplies_coordinates() {
        let p = instance(1, vec![[0, 0, 0]]);
        let g = induced_graph(&p).unwrap();
        let l = layout_rectilinear(&g).unwrap();
        let s = scale_layout(&l, 1000).unwrap();
        for (a, b) in l.positions.iter().zip(&s.positions) {
            assert_eq!((a.0 * 1000, a.1 * 1000), *b);
        }
        assert!(scale_layout(&l, 1).is_err());
        assert!(validate_layout(&s, &g).is_empty());
    }
}
