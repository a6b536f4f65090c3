//! The planar-3DM to uniform-3-measure compiler: induced graph with
//! planarity validation, rectilinear layout, gadget construction from 3-4-5
//! triangles, and measure emission, plus the exact-cover oracle used to
//! cross-check the whole pipeline.

mod gadget;
mod layout;
mod planarity;

pub use gadget::{
    build_gadget, construct_yes_barycenter, emit_uc3p, validate_gadget, GadgetGraph,
    GadgetPair, GadgetPath, GadgetTriangle, GridPoint, TriangleKind, MIN_SCALE,
};
pub use layout::{
    layout_rectilinear, scale_layout, validate_layout, LayoutEdge, RectilinearLayout,
};
pub use planarity::is_planar;

use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Planar 3-dimensional matching instance: disjoint label sets X, Y, Z of
/// equal size and a triple set over them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P3dmInstance {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    /// Index triples (into x, y, z respectively).
    pub triples: Vec<[usize; 3]>,
}

impl P3dmInstance {
    pub fn q(&self) -> usize {
        self.x.len()
    }

    pub fn element_label(&self, class: usize, index: usize) -> &str {
        match class {
            0 => &self.x[index],
            1 => &self.y[index],
            _ => &self.z[index],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.x.len();
        if q == 0 {
            return Err(Error::InvalidP3dm("empty element sets".into()));
        }
        if self.y.len() != q || self.z.len() != q {
            return Err(Error::InvalidP3dm(format!(
                "element sets have sizes {}, {}, {}; they must be equal",
                self.x.len(),
                self.y.len(),
                self.z.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for label in self.x.iter().chain(&self.y).chain(&self.z) {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidP3dm(format!("duplicate label {label:?}")));
            }
        }
        let mut triple_set = BTreeSet::new();
        let mut occ = vec![vec![0usize; q]; 3];
        for (idx, t) in self.triples.iter().enumerate() {
            for (class, &e) in t.iter().enumerate() {
                if e >= q {
                    return Err(Error::InvalidP3dm(format!(
                        "triple {idx} references element {e} of class {class}, size {q}"
                    )));
                }
                occ[class][e] += 1;
            }
            if !triple_set.insert(*t) {
                return Err(Error::InvalidP3dm(format!("duplicate triple {t:?}")));
            }
        }
        for class in 0..3 {
            for e in 0..q {
                if occ[class][e] > 3 {
                    return Err(Error::InvalidP3dm(format!(
                        "element {:?} occurs in {} triples, at most 3 allowed",
                        self.element_label(class, e),
                        occ[class][e]
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Element { class: usize, index: usize },
    Triple { index: usize },
}

/// Bipartite graph between element vertices and triple vertices.
#[derive(Clone, Debug)]
pub struct InducedGraph {
    pub vertices: Vec<VertexKind>,
    pub adjacency: Vec<Vec<usize>>,
    pub q: usize,
    pub num_triples: usize,
}

impl InducedGraph {
    pub fn element_vertex(&self, class: usize, index: usize) -> usize {
        class * self.q + index
    }

    pub fn triple_vertex(&self, index: usize) -> usize {
        3 * self.q + index
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        edges
    }
}

/// Builds the induced graph and rejects non-planar or over-degree input.
pub fn induced_graph(p: &P3dmInstance) -> Result<InducedGraph> {
    p.validate()?;
    let q = p.q();
    let num_vertices = 3 * q + p.triples.len();
    let mut vertices = Vec::with_capacity(num_vertices);
    for class in 0..3 {
        for index in 0..q {
            vertices.push(VertexKind::Element { class, index });
        }
    }
    for index in 0..p.triples.len() {
        vertices.push(VertexKind::Triple { index });
    }
    let mut adjacency = vec![Vec::new(); num_vertices];
    for (idx, t) in p.triples.iter().enumerate() {
        let tv = 3 * q + idx;
        for (class, &e) in t.iter().enumerate() {
            let ev = class * q + e;
            adjacency[tv].push(ev);
            adjacency[ev].push(tv);
        }
    }
    let graph = InducedGraph {
        vertices,
        adjacency,
        q,
        num_triples: p.triples.len(),
    };
    let edges = graph.edges();
    if !is_planar(num_vertices, &edges) {
        return Err(Error::NonPlanar(
            "the induced element-triple graph has no planar embedding".into(),
        ));
    }
    Ok(graph)
}

const P3DM_GUARD_Q: usize = 10;

/// Exact-cover backtracking: returns a cover (triple indices) if one exists.
pub fn p3dm_bruteforce(p: &P3dmInstance) -> Result<Option<Vec<usize>>> {
    p.validate()?;
    if p.q() > P3DM_GUARD_Q {
        return Err(Error::Precondition(format!(
            "exact-cover search guarded at q <= {P3DM_GUARD_Q}, got q = {}",
            p.q()
        )));
    }
    let mut covers = Vec::new();
    search_covers(p, &mut covers, 1)?;
    Ok(covers.into_iter().next())
}

/// All exact covers, deterministic order; used by round-trip tests.
pub fn p3dm_all_covers(p: &P3dmInstance) -> Result<Vec<Vec<usize>>> {
    p.validate()?;
    if p.q() > P3DM_GUARD_Q {
        return Err(Error::Precondition(format!(
            "exact-cover search guarded at q <= {P3DM_GUARD_Q}, got q = {}",
            p.q()
        )));
    }
    let mut covers = Vec::new();
    search_covers(p, &mut covers, usize::MAX)?;
    Ok(covers)
}

fn search_covers(p: &P3dmInstance, covers: &mut Vec<Vec<usize>>, limit: usize) -> Result<()> {
    let q = p.q();
    // triples containing each x element, in index order
    let mut by_x: Vec<Vec<usize>> = vec![Vec::new(); q];
    for (idx, t) in p.triples.iter().enumerate() {
        by_x[t[0]].push(idx);
    }
    let mut used_y = vec![false; q];
    let mut used_z = vec![false; q];
    let mut chosen = Vec::new();

    fn recurse(
        p: &P3dmInstance,
        by_x: &[Vec<usize>],
        xi: usize,
        used_y: &mut [bool],
        used_z: &mut [bool],
        chosen: &mut Vec<usize>,
        covers: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if covers.len() >= limit {
            return;
        }
        if xi == p.q() {
            let mut cover = chosen.clone();
            cover.sort_unstable();
            covers.push(cover);
            return;
        }
        for &t_idx in &by_x[xi] {
            let t = p.triples[t_idx];
            if used_y[t[1]] || used_z[t[2]] {
                continue;
            }
            used_y[t[1]] = true;
            used_z[t[2]] = true;
            chosen.push(t_idx);
            recurse(p, by_x, xi + 1, used_y, used_z, chosen, covers, limit);
            chosen.pop();
            used_y[t[1]] = false;
            used_z[t[2]] = false;
        }
    }

    recurse(p, &by_x, 0, &mut used_y, &mut used_z, &mut chosen, covers, limit);
    Ok(())
}

/// Checks that `cover` is an exact cover of the instance.
pub fn check_cover(p: &P3dmInstance, cover: &[usize]) -> Result<()> {
    let q = p.q();
    let mut counts = vec![vec![0usize; q]; 3];
    for &idx in cover {
        let t = p
            .triples
            .get(idx)
            .ok_or_else(|| Error::InvalidCover(format!("triple index {idx} out of range")))?;
        for (class, &e) in t.iter().enumerate() {
            counts[class][e] += 1;
        }
    }
    for class in 0..3 {
        for e in 0..q {
            if counts[class][e] != 1 {
                return Err(Error::InvalidCover(format!(
                    "element {:?} covered {} times",
                    p.element_label(class, e),
                    counts[class][e]
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn labels(prefix: &str, q: usize) -> Vec<String> {
        (1..=q).map(|i| format!("{prefix}{i}")).collect()
    }

    pub(crate) fn instance(q: usize, triples: Vec<[usize; 3]>) -> P3dmInstance {
        P3dmInstance {
            x: labels("x", q),
            y: labels("y", q),
            z: labels("z", q),
            triples,
        }
    }

    #[test]
    fn star_graph_for_single_triple() {
        let p = instance(1, vec![[0, 0, 0]]);
        let g = induced_graph(&p).unwrap();
        assert_eq!(g.vertices.len(), 4);
        let tv = g.triple_vertex(0);
        assert_eq!(g.adjacency[tv].len(), 3);
        for class in 0..3 {
            assert_eq!(g.adjacency[g.element_vertex(class, 0)], vec![tv]);
        }
    }

    #[test]
    fn rejects_element_in_four_triples() {
        let p = instance(
            2,
            vec![[0, 0, 0], [0, 1, 1], [0, 0, 1], [0, 1, 0]],
        );
        assert!(matches!(induced_graph(&p), Err(Error::InvalidP3dm(_))));
    }

    #[test]
    fn rejects_duplicate_triples() {
        let p = instance(1, vec![[0, 0, 0], [0, 0, 0]]);
        assert!(p.validate().is_err());
    }

    #[test]
    fn cover_search_on_single_triple() {
        let p = instance(1, vec![[0, 0, 0]]);
        assert_eq!(p3dm_bruteforce(&p).unwrap(), Some(vec![0]));
        let none = instance(1, vec![]);
        assert!(p3dm_bruteforce(&none).unwrap().is_none());
    }

    #[test]
    fn cover_requires_every_element() {
        // x2 never appears
        let p = instance(2, vec![[0, 0, 0], [0, 1, 1]]);
        assert!(p3dm_bruteforce(&p).unwrap().is_none());
    }

    #[test]
    fn all_covers_enumerates_both() {
        // two disjoint perfect matchings over q = 2
        let p = instance(
            2,
            vec![[0, 0, 0], [1, 1, 1], [0, 1, 1], [1, 0, 0]],
        );
        let covers = p3dm_all_covers(&p).unwrap();
        assert_eq!(covers, vec![vec![0, 1], vec![2, 3]]);
        for c in &covers {
            check_cover(&p, c).unwrap();
        }
    }
}
