//! Gadget construction: compiles a scaled rectilinear layout into a graph
//! of 3-4-5 triangles.
//!
//! Every triangle path is a chain of rectangular pairs: an axis-aligned
//! 3 x 4 rectangle split along a diagonal into two 3-4-5 triangles. The two
//! corners on the split diagonal belong to both triangles of the pair
//! ("diagonal" vertices); the other two corners are private, one per
//! triangle, at diagonally opposite corners of the rectangle. Consecutive
//! pairs link at a shared private corner, so a chain is a walk of privates
//! p0 (the element point), p1, ..., pK (a triple-triangle corner) with
//! steps of (+-3, +-4) or (+-4, +-3). The first pair is vertical, the
//! second horizontal. Private corners carry the color of the path's
//! element; diagonal corners carry the other two colors, fixed by a
//! two-coloring at the end. A vertex lying in two pairs is listed twice in
//! its measure; no coordinate is ever listed more than twice.

use super::layout::RectilinearLayout;
use super::{InducedGraph, P3dmInstance, VertexKind};
use crate::error::{Error, Result};
use crate::measures::{
    CombinationEntry, CombinationMeasure, DiscreteMeasure, Point, ProblemInstance, SupportSlot,
    Tuple,
};
use crate::rational::{rat, Rational};
use num::bigint::BigInt;
use num::One;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub type GridPoint = (i64, i64);

/// Smallest admissible scale factor: applied to a separation-2 layout it
/// leaves a gap of at least 3 between triangle footprints of adjacent
/// corridors.
pub const MIN_SCALE: i64 = 12;

const CORRIDOR_SQ: i64 = 36;
const MOVES: [(i64, i64); 8] = [
    (3, 4),
    (3, -4),
    (-3, 4),
    (-3, -4),
    (4, 3),
    (4, -3),
    (-4, 3),
    (-4, -3),
];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TriangleKind {
    /// Pair triangle containing the near private corner.
    PathNear { path: usize, pair: usize },
    /// Pair triangle containing the far private corner.
    PathFar { path: usize, pair: usize },
    Triple { triple: usize },
}

#[derive(Clone, Debug)]
pub struct GadgetTriangle {
    /// Corner per measure index; every triangle has one vertex per color.
    pub corners: [GridPoint; 3],
    pub kind: TriangleKind,
}

#[derive(Clone, Debug)]
pub struct GadgetPair {
    pub near_private: GridPoint,
    pub far_private: GridPoint,
    pub diagonals: [GridPoint; 2],
    pub near_triangle: usize,
    pub far_triangle: usize,
}

#[derive(Clone, Debug)]
pub struct GadgetPath {
    /// (class, index) of the element the path starts at.
    pub element: (usize, usize),
    pub triple: usize,
    /// Corner of the triple triangle the path ends at.
    pub tt_corner: GridPoint,
    pub pairs: Vec<GadgetPair>,
}

#[derive(Clone, Debug)]
pub struct GadgetGraph {
    pub triangles: Vec<GadgetTriangle>,
    pub paths: Vec<GadgetPath>,
    /// (triple index, triangle index) per triple triangle.
    pub triple_triangles: Vec<(usize, usize)>,
    pub element_points: Vec<((usize, usize), GridPoint)>,
    pub vertex_colors: BTreeMap<GridPoint, usize>,
    /// Slot coordinates per measure, sorted, duplicates adjacent. These
    /// define the emitted instance exactly.
    pub listings: [Vec<GridPoint>; 3],
    pub n: usize,
}

impl GadgetGraph {
    /// Triangle lookup keyed by color-indexed corners.
    pub fn triangle_index(&self) -> BTreeMap<[GridPoint; 3], usize> {
        self.triangles
            .iter()
            .enumerate()
            .map(|(i, t)| (t.corners, i))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Role {
    Element {
        class: usize,
    },
    /// Private corner of one or two chain-linked pairs.
    Private {
        class: usize,
    },
    TtCorner {
        triple: usize,
        class: usize,
        taken: bool,
    },
    Diag {
        refs: Vec<(usize, usize)>,
    },
}

#[derive(Clone, Debug)]
struct Registry {
    map: BTreeMap<GridPoint, Role>,
}

impl Registry {
    fn new() -> Self {
        Registry {
            map: BTreeMap::new(),
        }
    }

    /// True when `p` keeps Euclidean distance >= 3 from every registered
    /// vertex, with exact coincidences permitted only for `allow_exact`.
    fn clear_around(&self, p: GridPoint, allow_exact: bool) -> bool {
        for ((x, y), _) in self
            .map
            .range((p.0 - 2, i64::MIN)..=(p.0 + 2, i64::MAX))
        {
            let dy = y - p.1;
            if dy.abs() > 2 {
                continue;
            }
            let dx = x - p.0;
            if dx == 0 && dy == 0 {
                if !allow_exact {
                    return false;
                }
            } else if dx * dx + dy * dy < 9 {
                return false;
            }
        }
        true
    }
}

fn rect_diagonals(near: GridPoint, far: GridPoint) -> [GridPoint; 2] {
    [(near.0, far.1), (far.0, near.1)]
}

fn direction(from: GridPoint, to: GridPoint) -> (i64, i64) {
    ((to.0 - from.0).signum(), (to.1 - from.1).signum())
}

fn dist2(a: GridPoint, b: GridPoint) -> i64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Squared distance from a point to an axis-parallel segment.
fn seg_distance_sq(p: GridPoint, a: GridPoint, b: GridPoint) -> i64 {
    let (lox, hix) = (a.0.min(b.0), a.0.max(b.0));
    let (loy, hiy) = (a.1.min(b.1), a.1.max(b.1));
    let dx = if p.0 < lox {
        lox - p.0
    } else if p.0 > hix {
        p.0 - hix
    } else {
        0
    };
    let dy = if p.1 < loy {
        loy - p.1
    } else if p.1 > hiy {
        p.1 - hiy
    } else {
        0
    };
    dx * dx + dy * dy
}

#[derive(Clone, Debug)]
struct EdgeTask {
    path_index: usize,
    element: (usize, usize),
    element_pos: GridPoint,
    triple: usize,
    /// Polyline from the element to the triple vertex.
    polyline: Vec<GridPoint>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    North,
    East,
    South,
    West,
}

fn side_of(delta: (i64, i64)) -> Side {
    match delta {
        (0, 1) => Side::North,
        (1, 0) => Side::East,
        (0, -1) => Side::South,
        (-1, 0) => Side::West,
        other => unreachable!("non-axis direction {other:?}"),
    }
}

/// First-pair slot: a vertical rectangle with the element at one corner and
/// the far private at the diagonally opposite corner.
fn slot_move(side: Side) -> (i64, i64) {
    match side {
        Side::North => (3, 4),
        Side::East => (3, -4),
        Side::South => (-3, -4),
        Side::West => (-3, 4),
    }
}

fn opposite(a: Side, b: Side) -> bool {
    matches!(
        (a, b),
        (Side::North, Side::South)
            | (Side::South, Side::North)
            | (Side::East, Side::West)
            | (Side::West, Side::East)
    )
}

/// Builds the gadget from a scaled layout. The output always passes
/// `validate_gadget`; failures name the offending edge.
pub fn build_gadget(layout: &RectilinearLayout, p: &P3dmInstance) -> Result<GadgetGraph> {
    let graph = super::induced_graph(p)?;
    let layout_issues = super::layout::validate_layout(layout, &graph);
    if !layout_issues.is_empty() {
        return Err(Error::InvalidLayout(layout_issues.join("; ")));
    }
    if graph.num_triples > 0 && min_vertex_separation(layout) < 2 * MIN_SCALE {
        return Err(Error::Precondition(format!(
            "layout vertices closer than {} units; scale the layout first",
            2 * MIN_SCALE
        )));
    }

    let mut registry = Registry::new();
    let mut element_points = Vec::new();
    for (v, kind) in graph.vertices.iter().enumerate() {
        if let VertexKind::Element { class, index } = *kind {
            let pos = layout.positions[v];
            registry.map.insert(pos, Role::Element { class });
            element_points.push(((class, index), pos));
        }
    }

    let tasks = edge_tasks(layout, &graph)?;

    // reserve one triple-triangle corner per arriving element class
    let mut tt_corner_of: BTreeMap<(usize, usize), GridPoint> = BTreeMap::new();
    let mut tt_shape: BTreeMap<usize, [GridPoint; 3]> = BTreeMap::new();
    for (triple_idx, _) in p.triples.iter().enumerate() {
        let arriving: Vec<(usize, Side, GridPoint)> = tasks
            .iter()
            .filter(|t| t.triple == triple_idx)
            .map(|t| {
                let len = t.polyline.len();
                let tpos = t.polyline[len - 1];
                let before = t.polyline[len - 2];
                (t.element.0, side_of(direction(tpos, before)), tpos)
            })
            .collect();
        if arriving.len() != 3 {
            return Err(Error::InvalidLayout(format!(
                "triple {triple_idx} has {} incident edges, want 3",
                arriving.len()
            )));
        }
        let tpos = arriving[0].2;
        let sides: Vec<(usize, Side)> = arriving.iter().map(|&(c, s, _)| (c, s)).collect();
        let (corners, assignment) = place_triple_triangle(tpos, &sides, triple_idx)?;
        for &corner in &corners {
            if !registry.clear_around(corner, false) {
                return Err(Error::RoutingFailed {
                    element: format!("triple {triple_idx}"),
                    triple: triple_idx,
                    detail: format!("triple-triangle corner {corner:?} collides"),
                });
            }
        }
        for (class, corner) in &assignment {
            tt_corner_of.insert((triple_idx, *class), *corner);
            registry.map.insert(
                *corner,
                Role::TtCorner {
                    triple: triple_idx,
                    class: *class,
                    taken: false,
                },
            );
        }
        tt_shape.insert(triple_idx, corners);
    }

    let slot_sides = assign_slots(&tasks);

    let mut paths: Vec<GadgetPath> = Vec::new();
    for task in &tasks {
        let target = tt_corner_of[&(task.triple, task.element.0)];
        let pairs = route_chain(task, slot_sides[&task.path_index], target, &mut registry)?;
        paths.push(GadgetPath {
            element: task.element,
            triple: task.triple,
            tt_corner: target,
            pairs,
        });
    }

    let vertex_colors = color_vertices(&registry, &paths)?;

    // assemble triangles; corners are indexed by color
    let corner_by_color = |pts: [GridPoint; 3]| -> Result<[GridPoint; 3]> {
        let mut corners = [(0i64, 0i64); 3];
        let mut seen = [false; 3];
        for pt in pts {
            let c = *vertex_colors
                .get(&pt)
                .ok_or_else(|| Error::InvalidGadget(format!("uncolored vertex {pt:?}")))?;
            if seen[c] {
                return Err(Error::InvalidGadget(format!(
                    "two corners of one triangle share color {c}"
                )));
            }
            seen[c] = true;
            corners[c] = pt;
        }
        Ok(corners)
    };
    let mut triangles = Vec::new();
    for (path_idx, path) in paths.iter_mut().enumerate() {
        for (pair_idx, pair) in path.pairs.iter_mut().enumerate() {
            let near =
                corner_by_color([pair.near_private, pair.diagonals[0], pair.diagonals[1]])?;
            pair.near_triangle = triangles.len();
            triangles.push(GadgetTriangle {
                corners: near,
                kind: TriangleKind::PathNear {
                    path: path_idx,
                    pair: pair_idx,
                },
            });
            let far = corner_by_color([pair.far_private, pair.diagonals[0], pair.diagonals[1]])?;
            pair.far_triangle = triangles.len();
            triangles.push(GadgetTriangle {
                corners: far,
                kind: TriangleKind::PathFar {
                    path: path_idx,
                    pair: pair_idx,
                },
            });
        }
    }
    let mut triple_triangles = Vec::new();
    for (&triple_idx, corners) in &tt_shape {
        let corners = corner_by_color(*corners)?;
        triple_triangles.push((triple_idx, triangles.len()));
        triangles.push(GadgetTriangle {
            corners,
            kind: TriangleKind::Triple { triple: triple_idx },
        });
    }

    // slot listings with multiplicities
    let mut listings: [Vec<GridPoint>; 3] = Default::default();
    for (&pt, role) in &registry.map {
        let color = vertex_colors[&pt];
        let mult = match role {
            Role::Element { .. } | Role::Private { .. } | Role::TtCorner { .. } => 1,
            Role::Diag { refs } => refs.len(),
        };
        for _ in 0..mult {
            listings[color].push(pt);
        }
    }
    for l in listings.iter_mut() {
        l.sort_unstable();
    }
    let n = listings[0].len();
    if listings.iter().any(|l| l.len() != n) {
        return Err(Error::InvalidGadget(format!(
            "color classes have sizes {}, {}, {}",
            listings[0].len(),
            listings[1].len(),
            listings[2].len()
        )));
    }

    let gadget = GadgetGraph {
        triangles,
        paths,
        triple_triangles,
        element_points,
        vertex_colors,
        listings,
        n,
    };
    let issues = validate_gadget(&gadget);
    if !issues.is_empty() {
        return Err(Error::InvalidGadget(issues.join("; ")));
    }
    Ok(gadget)
}

fn min_vertex_separation(layout: &RectilinearLayout) -> i64 {
    let mut best = i64::MAX;
    for (i, a) in layout.positions.iter().enumerate() {
        for b in layout.positions.iter().skip(i + 1) {
            best = best.min((a.0 - b.0).abs().max((a.1 - b.1).abs()));
        }
    }
    best
}

fn edge_tasks(layout: &RectilinearLayout, graph: &InducedGraph) -> Result<Vec<EdgeTask>> {
    let mut tasks = Vec::new();
    for edge in &layout.edges {
        let (ev, tv, reversed) = match (graph.vertices[edge.from], graph.vertices[edge.to]) {
            (VertexKind::Element { .. }, VertexKind::Triple { .. }) => (edge.from, edge.to, false),
            (VertexKind::Triple { .. }, VertexKind::Element { .. }) => (edge.to, edge.from, true),
            _ => {
                return Err(Error::InvalidLayout(
                    "edge does not join an element to a triple".into(),
                ))
            }
        };
        let VertexKind::Element { class, index } = graph.vertices[ev] else {
            unreachable!()
        };
        let VertexKind::Triple { index: triple } = graph.vertices[tv] else {
            unreachable!()
        };
        let mut polyline = vec![layout.positions[edge.from]];
        polyline.extend(edge.bends.iter().copied());
        polyline.push(layout.positions[edge.to]);
        if reversed {
            polyline.reverse();
        }
        tasks.push(EdgeTask {
            path_index: 0,
            element: (class, index),
            element_pos: layout.positions[ev],
            triple,
            polyline,
        });
    }
    tasks.sort_by_key(|t| (t.element, t.triple));
    for (i, t) in tasks.iter_mut().enumerate() {
        t.path_index = i;
    }
    Ok(tasks)
}

/// First-pair slot per path. Defaults to the side the polyline leaves
/// through; an element with exactly two opposite departure sides gets one
/// remapped so its two first pairs share a rectangle edge (which removes
/// off-path minimum triangles there).
fn assign_slots(tasks: &[EdgeTask]) -> BTreeMap<usize, Side> {
    let mut by_element: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for t in tasks {
        by_element.entry(t.element).or_default().push(t.path_index);
    }
    let mut slots = BTreeMap::new();
    for (_, path_ids) in by_element {
        let sides: Vec<Side> = path_ids
            .iter()
            .map(|&i| side_of(direction(tasks[i].polyline[0], tasks[i].polyline[1])))
            .collect();
        let assigned: Vec<Side> = if sides.len() == 2 && opposite(sides[0], sides[1]) {
            match sides[0] {
                Side::North => vec![Side::North, Side::East],
                Side::South => vec![Side::South, Side::West],
                Side::East => vec![Side::East, Side::South],
                Side::West => vec![Side::West, Side::North],
            }
        } else {
            sides
        };
        for (&pid, &side) in path_ids.iter().zip(&assigned) {
            slots.insert(pid, side);
        }
    }
    slots
}

/// Chooses an orientation for a triple triangle and assigns each arriving
/// element class to a corner facing its arrival side.
fn place_triple_triangle(
    tpos: GridPoint,
    arriving: &[(usize, Side)],
    triple_idx: usize,
) -> Result<([GridPoint; 3], Vec<(usize, GridPoint)>)> {
    let sides: Vec<Side> = arriving.iter().map(|&(_, s)| s).collect();
    for (a, b) in [(3i64, 4i64), (4, 3)] {
        for (sx, sy) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            let w = sx * a;
            let h = sy * b;
            let legx = (tpos.0 + w, tpos.1);
            let legy = (tpos.0, tpos.1 + h);
            let face_x = if w > 0 { Side::East } else { Side::West };
            let face_y = if h > 0 { Side::North } else { Side::South };
            if !sides.contains(&face_x) || !sides.contains(&face_y) {
                continue;
            }
            let mut assignment = Vec::new();
            let mut center_used = false;
            let mut ok = true;
            for &(class, side) in arriving {
                let corner = if side == face_x {
                    legx
                } else if side == face_y {
                    legy
                } else if !center_used {
                    center_used = true;
                    tpos
                } else {
                    ok = false;
                    break;
                };
                assignment.push((class, corner));
            }
            if ok {
                return Ok(([tpos, legx, legy], assignment));
            }
        }
    }
    Err(Error::RoutingFailed {
        element: format!("triple {triple_idx}"),
        triple: triple_idx,
        detail: format!("no triangle orientation fits arrival sides {sides:?}"),
    })
}

fn element_name(element: (usize, usize)) -> String {
    let prefix = ["x", "y", "z"][element.0];
    format!("{prefix}{}", element.1 + 1)
}

/// Routes one chain from its element to the reserved triple corner and
/// commits it to the registry.
fn route_chain(
    task: &EdgeTask,
    slot: Side,
    target: GridPoint,
    registry: &mut Registry,
) -> Result<Vec<GadgetPair>> {
    let e = task.element_pos;
    let m1 = slot_move(slot);
    let p1 = (e.0 + m1.0, e.1 + m1.1);
    // the second pair is horizontal and continues into the same quadrant;
    // other orientations violate the 3-unit separation against the first
    let m2 = (m1.0.signum() * 4, m1.1.signum() * 3);
    let p2 = (p1.0 + m2.0, p1.1 + m2.1);

    let fail = |detail: String| Error::RoutingFailed {
        element: element_name(task.element),
        triple: task.triple,
        detail,
    };

    let mut banned: BTreeSet<GridPoint> = BTreeSet::new();
    for _attempt in 0..64 {
        let Some(moves) = chain_search(task, p2, m2, target, registry, &banned) else {
            return Err(fail(format!(
                "no rectangle chain reaches {target:?} within the corridor"
            )));
        };
        let mut privates = vec![e, p1, p2];
        for &mv in &moves {
            let last = *privates.last().unwrap();
            privates.push((last.0 + mv.0, last.1 + mv.1));
        }
        match commit_chain(task, &privates, target, registry) {
            Ok(pairs) => return Ok(pairs),
            Err(bad_position) => {
                if !banned.insert(bad_position) {
                    return Err(fail(format!(
                        "chain validation keeps failing at {bad_position:?}"
                    )));
                }
            }
        }
    }
    Err(fail("retry budget exhausted".into()))
}

/// BFS over (position, previous move) applying the pair collision rules.
fn chain_search(
    task: &EdgeTask,
    start: GridPoint,
    start_move: (i64, i64),
    target: GridPoint,
    registry: &Registry,
    banned: &BTreeSet<GridPoint>,
) -> Option<Vec<(i64, i64)>> {
    if start == target {
        return Some(Vec::new());
    }
    let mut lo = (i64::MAX, i64::MAX);
    let mut hi = (i64::MIN, i64::MIN);
    for &(x, y) in &task.polyline {
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    let margin = 18;
    let in_region = |p: GridPoint| {
        p.0 >= lo.0 - margin && p.0 <= hi.0 + margin && p.1 >= lo.1 - margin && p.1 <= hi.1 + margin
    };
    let in_corridor = |p: GridPoint| {
        task.polyline
            .windows(2)
            .any(|w| seg_distance_sq(p, w[0], w[1]) <= CORRIDOR_SQ)
    };

    let move_index = |m: (i64, i64)| MOVES.iter().position(|&x| x == m).unwrap();
    let start_state = (start, move_index(start_move));
    let mut seen: BTreeSet<(GridPoint, usize)> = BTreeSet::new();
    let mut parent: BTreeMap<(GridPoint, usize), ((GridPoint, usize), (i64, i64))> =
        BTreeMap::new();
    seen.insert(start_state);
    let mut queue = VecDeque::from([start_state]);
    while let Some((pos, prev_idx)) = queue.pop_front() {
        for &mv in &MOVES {
            let next = (pos.0 + mv.0, pos.1 + mv.1);
            let state = (next, move_index(mv));
            if seen.contains(&state) || banned.contains(&next) || !in_region(next) {
                continue;
            }
            if next != target && !in_corridor(next) {
                continue;
            }
            if !pair_admissible(pos, mv, MOVES[prev_idx], target, registry, task) {
                continue;
            }
            seen.insert(state);
            parent.insert(state, ((pos, prev_idx), mv));
            if next == target {
                let mut moves = vec![mv];
                let mut cur = (pos, prev_idx);
                while cur != start_state {
                    let (prev, m) = parent[&cur];
                    moves.push(m);
                    cur = prev;
                }
                moves.reverse();
                return Some(moves);
            }
            queue.push_back(state);
        }
    }
    None
}

/// Collision rules for appending one pair during the search: the new
/// corners keep distance 3 from everything registered (except the reserved
/// target corner) and from the previous pair's corners, coinciding only in
/// a diagonal-diagonal fold.
fn pair_admissible(
    pos: GridPoint,
    mv: (i64, i64),
    prev_mv: (i64, i64),
    target: GridPoint,
    registry: &Registry,
    task: &EdgeTask,
) -> bool {
    let far = (pos.0 + mv.0, pos.1 + mv.1);
    let diags = rect_diagonals(pos, far);
    let prev_near = (pos.0 - prev_mv.0, pos.1 - prev_mv.1);
    let prev_diags = rect_diagonals(prev_near, pos);

    if far == target {
        match registry.map.get(&far) {
            Some(Role::TtCorner {
                triple,
                class,
                taken,
            }) if !taken && *triple == task.triple && *class == task.element.0 => {}
            _ => return false,
        }
        if !registry.clear_around(far, true) {
            return false;
        }
    } else if !registry.clear_around(far, false) {
        return false;
    }
    for d in diags {
        if !registry.clear_around(d, false) {
            return false;
        }
    }

    // local rules against the previous pair's rectangle
    let prev_corners = [prev_near, pos, prev_diags[0], prev_diags[1]];
    for c_new in [far, diags[0], diags[1]] {
        for c_old in prev_corners {
            if c_new == c_old {
                let fold = diags.contains(&c_new) && prev_diags.contains(&c_old);
                if !fold {
                    return false;
                }
            } else if dist2(c_new, c_old) < 9 {
                return false;
            }
        }
    }
    true
}

/// Re-validates the whole chain with the commit rules against a scratch
/// registry and commits on success. On failure returns the far-private
/// position of the offending pair so the caller can ban it.
fn commit_chain(
    task: &EdgeTask,
    privates: &[GridPoint],
    target: GridPoint,
    registry: &mut Registry,
) -> std::result::Result<Vec<GadgetPair>, GridPoint> {
    let class = task.element.0;
    let mut scratch = registry.clone();
    let mut pairs = Vec::new();
    for j in 1..privates.len() {
        let near = privates[j - 1];
        let far = privates[j];
        let diags = rect_diagonals(near, far);
        let last = j == privates.len() - 1;

        if last {
            if far != target {
                return Err(far);
            }
            match scratch.map.get_mut(&far) {
                Some(Role::TtCorner {
                    triple,
                    class: corner_class,
                    taken,
                }) if !*taken && *triple == task.triple && *corner_class == class => {
                    *taken = true;
                }
                _ => return Err(far),
            }
        } else {
            if !scratch.clear_around(far, false) {
                return Err(far);
            }
            scratch.map.insert(far, Role::Private { class });
        }

        let prev_diags: Vec<GridPoint> = if j >= 2 {
            rect_diagonals(privates[j - 2], privates[j - 1]).to_vec()
        } else {
            Vec::new()
        };
        for d in diags {
            match scratch.map.get_mut(&d) {
                None => {
                    if !scratch.clear_around(d, false) {
                        return Err(far);
                    }
                    scratch.map.insert(
                        d,
                        Role::Diag {
                            refs: vec![(task.path_index, j - 1)],
                        },
                    );
                }
                Some(Role::Diag { refs }) => {
                    let fold = j >= 2
                        && prev_diags.contains(&d)
                        && refs.contains(&(task.path_index, j - 2));
                    let cluster = j == 1
                        && refs
                            .iter()
                            .all(|&(path, pair)| pair == 0 && path != task.path_index);
                    if refs.len() >= 2 || !(fold || cluster) {
                        return Err(far);
                    }
                    refs.push((task.path_index, j - 1));
                }
                Some(_) => return Err(far),
            }
        }
        pairs.push(GadgetPair {
            near_private: near,
            far_private: far,
            diagonals: diags,
            near_triangle: usize::MAX,
            far_triangle: usize::MAX,
        });
    }
    *registry = scratch;
    Ok(pairs)
}

/// Two-colors the diagonal corners. Components of the diagonal-share graph
/// belong to paths of a single element class, so the two remaining colors
/// alternate along each component.
fn color_vertices(
    registry: &Registry,
    paths: &[GadgetPath],
) -> Result<BTreeMap<GridPoint, usize>> {
    let mut colors: BTreeMap<GridPoint, usize> = BTreeMap::new();
    for (&pt, role) in &registry.map {
        match role {
            Role::Element { class } | Role::Private { class } => {
                colors.insert(pt, *class);
            }
            Role::TtCorner { class, .. } => {
                colors.insert(pt, *class);
            }
            Role::Diag { .. } => {}
        }
    }
    let mut adj: BTreeMap<GridPoint, Vec<GridPoint>> = BTreeMap::new();
    let mut complement: BTreeMap<GridPoint, [usize; 2]> = BTreeMap::new();
    for path in paths {
        let comp = match path.element.0 {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        };
        for pair in &path.pairs {
            let [a, b] = pair.diagonals;
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
            for d in [a, b] {
                if let Some(prev) = complement.insert(d, comp) {
                    if prev != comp {
                        return Err(Error::InvalidGadget(format!(
                            "diagonal {d:?} shared across element classes"
                        )));
                    }
                }
            }
        }
    }
    let keys: Vec<GridPoint> = adj.keys().copied().collect();
    let mut assigned: BTreeMap<GridPoint, usize> = BTreeMap::new();
    for &root in &keys {
        if assigned.contains_key(&root) {
            continue;
        }
        let comp = complement[&root];
        assigned.insert(root, comp[0]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let cu = assigned[&u];
            let other = if cu == comp[0] { comp[1] } else { comp[0] };
            for &v in &adj[&u] {
                match assigned.get(&v) {
                    None => {
                        assigned.insert(v, other);
                        queue.push_back(v);
                    }
                    Some(&cv) => {
                        if cv != other {
                            return Err(Error::InvalidGadget(format!(
                                "diagonal coloring conflict at {v:?}"
                            )));
                        }
                    }
                }
            }
        }
    }
    colors.extend(assigned);
    Ok(colors)
}

/// Emits the three uniform measures of the compiled instance.
pub fn emit_uc3p(g: &GadgetGraph) -> Result<ProblemInstance> {
    if g.n == 0 {
        return Err(Error::InvalidGadget("empty gadget".into()));
    }
    let unit = Rational::new(BigInt::one(), BigInt::from(g.n));
    let measures = g
        .listings
        .iter()
        .map(|l| {
            DiscreteMeasure::new(
                l.iter()
                    .map(|&(x, y)| SupportSlot {
                        point: Point::from_ints(&[x, y]),
                        mass: unit.clone(),
                    })
                    .collect(),
            )
        })
        .collect();
    Ok(ProblemInstance::new(
        measures,
        vec![rat(1, 3), rat(1, 3), rat(1, 3)],
    ))
}

/// Mass 1/n on the near triangle of every pair along paths leading to a
/// cover triple, on the far triangle of every pair of all other paths, and
/// on the cover's triple triangles.
pub fn construct_yes_barycenter(g: &GadgetGraph, cover: &[usize]) -> Result<CombinationMeasure> {
    let cover_set: BTreeSet<usize> = cover.iter().copied().collect();
    if cover_set.len() != cover.len() {
        return Err(Error::InvalidCover("repeated triple in cover".into()));
    }
    for &t in cover {
        if !g.triple_triangles.iter().any(|&(tr, _)| tr == t) {
            return Err(Error::InvalidCover(format!("unknown triple {t}")));
        }
    }
    let mut covered: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for path in &g.paths {
        if cover_set.contains(&path.triple) {
            *covered.entry(path.element).or_insert(0) += 1;
        }
    }
    for &(element, _) in &g.element_points {
        let count = covered.get(&element).copied().unwrap_or(0);
        if count != 1 {
            return Err(Error::InvalidCover(format!(
                "element {} covered {count} times",
                element_name(element)
            )));
        }
    }

    let mut selected: Vec<usize> = Vec::new();
    for path in &g.paths {
        let near_phase = cover_set.contains(&path.triple);
        for pair in &path.pairs {
            selected.push(if near_phase {
                pair.near_triangle
            } else {
                pair.far_triangle
            });
        }
    }
    for &(triple, tri) in &g.triple_triangles {
        if cover_set.contains(&triple) {
            selected.push(tri);
        }
    }
    debug_assert_eq!(selected.len(), g.n);

    let mut queues: [BTreeMap<GridPoint, VecDeque<usize>>; 3] = Default::default();
    for c in 0..3 {
        for (slot, &pt) in g.listings[c].iter().enumerate() {
            queues[c].entry(pt).or_default().push_back(slot);
        }
    }
    let unit = Rational::new(BigInt::one(), BigInt::from(g.n));
    let mut entries = Vec::new();
    for tri in selected {
        let corners = g.triangles[tri].corners;
        let mut slots = [0usize; 3];
        for c in 0..3 {
            let q = queues[c].get_mut(&corners[c]).ok_or_else(|| {
                Error::InvalidGadget(format!("no listing for corner {:?}", corners[c]))
            })?;
            slots[c] = q.pop_front().ok_or_else(|| {
                Error::InvalidGadget(format!("listing exhausted at {:?}", corners[c]))
            })?;
        }
        entries.push(CombinationEntry {
            tuple: Tuple(slots.to_vec()),
            mass: unit.clone(),
        });
    }
    for qs in &queues {
        if qs.values().any(|q| !q.is_empty()) {
            return Err(Error::InvalidGadget(
                "selection does not cover every slot".into(),
            ));
        }
    }
    Ok(CombinationMeasure::new(entries))
}

/// Checks every structural gadget invariant; returns all violations.
pub fn validate_gadget(g: &GadgetGraph) -> Vec<String> {
    let mut issues = Vec::new();

    for (idx, t) in g.triangles.iter().enumerate() {
        let [a, b, c] = t.corners;
        let mut sides = [
            (dist2(a, b), axis_aligned(a, b)),
            (dist2(a, c), axis_aligned(a, c)),
            (dist2(b, c), axis_aligned(b, c)),
        ];
        sides.sort_by_key(|s| s.0);
        if [sides[0].0, sides[1].0, sides[2].0] != [9, 16, 25] {
            issues.push(format!(
                "triangle {idx}: squared sides [{}, {}, {}], want [9, 16, 25]",
                sides[0].0, sides[1].0, sides[2].0
            ));
        }
        if !(sides[0].1 && sides[1].1) {
            issues.push(format!("triangle {idx}: legs are not axis-parallel"));
        }
        for (color, corner) in t.corners.iter().enumerate() {
            if g.vertex_colors.get(corner) != Some(&color) {
                issues.push(format!(
                    "triangle {idx}: corner {corner:?} is not colored {color}"
                ));
            }
        }
    }

    let element_pos: BTreeMap<(usize, usize), GridPoint> =
        g.element_points.iter().copied().collect();
    let mut paths_per_element: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (pi, path) in g.paths.iter().enumerate() {
        *paths_per_element.entry(path.element).or_insert(0) += 1;
        if path.pairs.len() < 2 {
            issues.push(format!("path {pi}: fewer than two pairs"));
            continue;
        }
        let first = &path.pairs[0];
        if (first.far_private.1 - first.near_private.1).abs() != 4 {
            issues.push(format!("path {pi}: first pair is not vertical"));
        }
        let second = &path.pairs[1];
        if (second.far_private.1 - second.near_private.1).abs() != 3 {
            issues.push(format!("path {pi}: second pair is not horizontal"));
        }
        match element_pos.get(&path.element) {
            Some(&e) if e == first.near_private => {}
            _ => issues.push(format!("path {pi}: does not start at its element point")),
        }
        if path.pairs.last().unwrap().far_private != path.tt_corner {
            issues.push(format!("path {pi}: does not end at its triple corner"));
        }
        for (j, w) in path.pairs.windows(2).enumerate() {
            if w[0].far_private != w[1].near_private {
                issues.push(format!("path {pi}: pairs {j} and {} do not link", j + 1));
            }
        }
        for (j, pair) in path.pairs.iter().enumerate() {
            let dx = (pair.far_private.0 - pair.near_private.0).abs();
            let dy = (pair.far_private.1 - pair.near_private.1).abs();
            if !((dx == 3 && dy == 4) || (dx == 4 && dy == 3)) {
                issues.push(format!(
                    "path {pi}, pair {j}: privates are not diagonal corners of a 3 x 4 rectangle"
                ));
            }
            let mut want = rect_diagonals(pair.near_private, pair.far_private);
            want.sort_unstable();
            let mut got = pair.diagonals;
            got.sort_unstable();
            if got != want {
                issues.push(format!(
                    "path {pi}, pair {j}: stored diagonals are not the rectangle's"
                ));
            }
        }
    }
    for (&element, &count) in &paths_per_element {
        if count > 3 {
            issues.push(format!(
                "element {} touches {count} paths",
                element_name(element)
            ));
        }
    }

    for &(triple, tri) in &g.triple_triangles {
        let corners: BTreeSet<GridPoint> = g.triangles[tri].corners.into_iter().collect();
        let arrivals: Vec<&GadgetPath> = g.paths.iter().filter(|p| p.triple == triple).collect();
        if arrivals.len() != 3 {
            issues.push(format!(
                "triple {triple}: {} arriving paths, want 3",
                arrivals.len()
            ));
        }
        for path in arrivals {
            if !corners.contains(&path.tt_corner) {
                issues.push(format!(
                    "triple {triple}: path corner {:?} is not a triangle corner",
                    path.tt_corner
                ));
            }
        }
    }

    // listings: equal class sizes, multiplicity at most 2, and exact match
    // with the coverage requirement of the triangle structure
    let n = g.n;
    let mut expected: [BTreeMap<GridPoint, usize>; 3] = Default::default();
    let mut bump = |pt: GridPoint, issues: &mut Vec<String>| match g.vertex_colors.get(&pt) {
        Some(&c) => {
            *expected[c].entry(pt).or_insert(0) += 1;
        }
        None => issues.push(format!("vertex {pt:?} has no color")),
    };
    for &(_, pos) in &g.element_points {
        bump(pos, &mut issues);
    }
    for path in &g.paths {
        for pair in &path.pairs {
            bump(pair.far_private, &mut issues);
            for d in pair.diagonals {
                bump(d, &mut issues);
            }
        }
    }
    for (c, l) in g.listings.iter().enumerate() {
        if l.len() != n {
            issues.push(format!("color class {c} has {} slots, want {n}", l.len()));
        }
        let mut actual: BTreeMap<GridPoint, usize> = BTreeMap::new();
        for &pt in l {
            *actual.entry(pt).or_insert(0) += 1;
        }
        for (&pt, &m) in &actual {
            if m > 2 {
                issues.push(format!("coordinate {pt:?} listed {m} times in class {c}"));
            }
        }
        if actual != expected[c] {
            issues.push(format!(
                "class {c}: listings do not match the coverage requirement"
            ));
        }
    }

    // minimum vertex separation 3
    let all: Vec<GridPoint> = g.vertex_colors.keys().copied().collect();
    for (i, &a) in all.iter().enumerate() {
        for &b in all.iter().skip(i + 1) {
            let d = dist2(a, b);
            if d > 0 && d < 9 {
                issues.push(format!("vertices {a:?} and {b:?} are closer than 3 apart"));
            }
        }
    }

    issues
}

fn axis_aligned(a: GridPoint, b: GridPoint) -> bool {
    a.0 == b.0 || a.1 == b.1
}
