//! Planarity testing by Demoucron's incremental face embedding.
//!
//! The graph is split into biconnected components; each component is grown
//! from a cycle, placing one fragment path at a time into an admissible
//! face. A fragment with no admissible face certifies non-planarity. At the
//! sizes this crate handles the quadratic running time is irrelevant.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Planarity of the simple undirected graph on `n` vertices.
pub fn is_planar(n: usize, edges: &[(usize, usize)]) -> bool {
    if n <= 4 {
        return true;
    }
    if edges.len() > 3 * n - 6 {
        return false;
    }
    for component in biconnected_components(n, edges) {
        if !component_planar(&component) {
            return false;
        }
    }
    true
}

/// Biconnected components as edge lists (Tarjan's lowpoint algorithm,
/// iterative). Bridges come out as single-edge components.
fn biconnected_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbor, edge id)
    for (id, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, id));
        adj[v].push((u, id));
    }
    let mut components = Vec::new();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0usize;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if disc[start] != usize::MAX {
            continue;
        }
        // iterative DFS frame: (vertex, parent edge id, neighbor cursor)
        let mut stack: Vec<(usize, usize, usize)> = vec![(start, usize::MAX, 0)];
        disc[start] = time;
        low[start] = time;
        time += 1;
        while !stack.is_empty() {
            let frame = stack.len() - 1;
            let (u, parent_edge, cursor) = stack[frame];
            if cursor < adj[u].len() {
                stack[frame].2 += 1;
                let (v, id) = adj[u][cursor];
                if id == parent_edge {
                    continue;
                }
                if disc[v] == usize::MAX {
                    edge_stack.push((u, v));
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    stack.push((v, id, 0));
                } else if disc[v] < disc[u] {
                    edge_stack.push((u, v));
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        // p separates the finished subtree: pop its edges
                        let mut component = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            component.push(e);
                            if e == (p, u) {
                                break;
                            }
                        }
                        if !component.is_empty() {
                            components.push(component);
                        }
                    }
                }
            }
        }
    }
    components
}

/// Demoucron on one biconnected component.
fn component_planar(edges: &[(usize, usize)]) -> bool {
    // remap vertices
    let mut ids = BTreeMap::new();
    for &(u, v) in edges {
        let next = ids.len();
        ids.entry(u).or_insert(next);
        let next = ids.len();
        ids.entry(v).or_insert(next);
    }
    let n = ids.len();
    if n <= 4 || edges.len() <= 3 {
        return true;
    }
    if edges.len() > 3 * n - 6 {
        return false;
    }
    let edges: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (ids[&u], ids[&v])).collect();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(u, v) in &edges {
        adj[u].insert(v);
        adj[v].insert(u);
    }

    let Some(cycle) = find_cycle(n, &adj) else {
        return true; // acyclic pieces are trivially planar
    };

    // embedded subgraph state
    let mut embedded_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut embedded_vertices: BTreeSet<usize> = BTreeSet::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for w in cycle.windows(2) {
        embedded_edges.insert(norm(w[0], w[1]));
    }
    embedded_edges.insert(norm(cycle[0], *cycle.last().unwrap()));
    embedded_vertices.extend(cycle.iter().copied());
    faces.push(cycle.clone());
    faces.push(cycle);

    loop {
        if embedded_edges.len() == edges.len() {
            return true;
        }
        let fragments = fragments_of(n, &adj, &embedded_edges, &embedded_vertices);
        debug_assert!(!fragments.is_empty());
        // pick the fragment with the fewest admissible faces
        let mut best: Option<(usize, Vec<usize>)> = None; // (fragment idx, admissible faces)
        for (fi, fragment) in fragments.iter().enumerate() {
            let admissible: Vec<usize> = faces
                .iter()
                .enumerate()
                .filter(|(_, face)| {
                    let face_set: BTreeSet<usize> = face.iter().copied().collect();
                    fragment.attachments.iter().all(|a| face_set.contains(a))
                })
                .map(|(i, _)| i)
                .collect();
            if admissible.is_empty() {
                return false;
            }
            let better = match &best {
                None => true,
                Some((_, cur)) => admissible.len() < cur.len(),
            };
            if better {
                let single = admissible.len() == 1;
                best = Some((fi, admissible));
                if single {
                    break;
                }
            }
        }
        let (fi, admissible) = best.unwrap();
        let fragment = &fragments[fi];
        let face_idx = admissible[0];

        let path = fragment_path(fragment, &adj);
        // embed the path into the face, splitting it in two
        let face = faces.swap_remove(face_idx);
        let a = path[0];
        let b = *path.last().unwrap();
        let ai = face.iter().position(|&v| v == a).unwrap();
        let bi = face.iter().position(|&v| v == b).unwrap();
        let len = face.len();
        let interior: Vec<usize> = path[1..path.len() - 1].to_vec();
        // arc from a forward to b, plus path reversed
        let mut face1 = Vec::new();
        let mut i = ai;
        loop {
            face1.push(face[i]);
            if i == bi {
                break;
            }
            i = (i + 1) % len;
        }
        face1.extend(interior.iter().rev().copied());
        // arc from b forward to a, plus path
        let mut face2 = Vec::new();
        let mut i = bi;
        loop {
            face2.push(face[i]);
            if i == ai {
                break;
            }
            i = (i + 1) % len;
        }
        face2.extend(interior.iter().copied());
        faces.push(face1);
        faces.push(face2);
        for w in path.windows(2) {
            embedded_edges.insert(norm(w[0], w[1]));
        }
        embedded_vertices.extend(path.iter().copied());
    }
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn find_cycle(n: usize, adj: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; n];
    let mut state = vec![0u8; n];
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![start];
        state[start] = 1;
        while let Some(&u) = stack.last() {
            let mut advanced = false;
            for &v in &adj[u] {
                if v == parent[u] {
                    continue;
                }
                if state[v] == 0 {
                    parent[v] = u;
                    state[v] = 1;
                    stack.push(v);
                    advanced = true;
                    break;
                }
                if state[v] == 1 {
                    // back edge u -> v closes a cycle
                    let mut cycle = vec![u];
                    let mut w = u;
                    while w != v {
                        w = parent[w];
                        cycle.push(w);
                    }
                    return Some(cycle);
                }
            }
            if !advanced {
                state[u] = 2;
                stack.pop();
            }
        }
    }
    None
}

struct Fragment {
    /// Vertices of the fragment that lie on the embedded subgraph.
    attachments: Vec<usize>,
    /// All fragment vertices (attachments included).
    vertices: BTreeSet<usize>,
    /// Fragment edges.
    edges: Vec<(usize, usize)>,
}

fn fragments_of(
    n: usize,
    adj: &[BTreeSet<usize>],
    embedded_edges: &BTreeSet<(usize, usize)>,
    embedded_vertices: &BTreeSet<usize>,
) -> Vec<Fragment> {
    let mut fragments = Vec::new();
    // chords between embedded vertices
    for u in 0..n {
        for &v in &adj[u] {
            if u < v
                && embedded_vertices.contains(&u)
                && embedded_vertices.contains(&v)
                && !embedded_edges.contains(&(u, v))
            {
                fragments.push(Fragment {
                    attachments: vec![u, v],
                    vertices: [u, v].into_iter().collect(),
                    edges: vec![(u, v)],
                });
            }
        }
    }
    // components of G minus the embedded vertices, with their attachments
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] || embedded_vertices.contains(&s) || adj[s].is_empty() {
            continue;
        }
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        let mut vertices = BTreeSet::new();
        let mut attachments = BTreeSet::new();
        let mut edges = Vec::new();
        vertices.insert(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if embedded_vertices.contains(&v) {
                    attachments.insert(v);
                    vertices.insert(v);
                    edges.push(norm(u, v));
                } else {
                    if norm(u, v).0 == u {
                        edges.push((u, v));
                    }
                    if !seen[v] {
                        seen[v] = true;
                        vertices.insert(v);
                        queue.push_back(v);
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        fragments.push(Fragment {
            attachments: attachments.into_iter().collect(),
            vertices,
            edges,
        });
    }
    fragments
}

/// A simple path through the fragment between two distinct attachments.
fn fragment_path(fragment: &Fragment, adj: &[BTreeSet<usize>]) -> Vec<usize> {
    let from = fragment.attachments[0];
    let goals: BTreeSet<usize> = fragment.attachments[1..].iter().copied().collect();
    debug_assert!(!goals.is_empty(), "biconnected fragments attach twice");
    let frag_edges: BTreeSet<(usize, usize)> = fragment.edges.iter().copied().collect();
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen: BTreeSet<usize> = [from].into_iter().collect();
    while let Some(u) = queue.pop_front() {
        if u != from && goals.contains(&u) {
            let mut path = vec![u];
            let mut w = u;
            while w != from {
                w = parent[&w];
                path.push(w);
            }
            path.reverse();
            return path;
        }
        for &v in &adj[u] {
            if !fragment.vertices.contains(&v) || !frag_edges.contains(&norm(u, v)) {
                continue;
            }
            // never route through another attachment mid-path
            if seen.contains(&v) {
                continue;
            }
            seen.insert(v);
            parent.insert(v, u);
            queue.push_back(v);
        }
    }
    unreachable!("fragment must connect two attachments");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        edges
    }

    fn complete_bipartite(a: usize, b: usize) -> (usize, Vec<(usize, usize)>) {
        let mut edges = Vec::new();
        for u in 0..a {
            for v in 0..b {
                edges.push((u, a + v));
            }
        }
        (a + b, edges)
    }

    #[test]
    fn small_graphs_planar() {
        assert!(is_planar(4, &complete(4)));
        assert!(is_planar(3, &[(0, 1), (1, 2), (2, 0)]));
        assert!(is_planar(6, &[(0, 1), (1, 2), (3, 4)]));
        assert!(is_planar(5, &[]));
    }

    #[test]
    fn k5_not_planar() {
        assert!(!is_planar(5, &complete(5)));
    }

    #[test]
    fn k33_not_planar() {
        let (n, edges) = complete_bipartite(3, 3);
        assert!(!is_planar(n, &edges));
    }

    #[test]
    fn k33_minus_edge_planar() {
        let (n, mut edges) = complete_bipartite(3, 3);
        edges.pop();
        assert!(is_planar(n, &edges));
    }

    #[test]
    fn petersen_not_planar() {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5)); // outer cycle
            edges.push((i, i + 5)); // spokes
            edges.push((i + 5, (i + 2) % 5 + 5)); // pentagram
        }
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| if u < v { (u, v) } else { (v, u) })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(edges.len(), 15);
        assert!(!is_planar(10, &edges));
    }

    #[test]
    fn cube_planar() {
        let edges = vec![
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 4),
            (0, 4),
            (1, 5),
            (2, 6),
            (3, 7),
        ];
        assert!(is_planar(8, &edges));
    }

    #[test]
    fn grid_planar() {
        let mut edges = Vec::new();
        let idx = |r: usize, c: usize| r * 4 + c;
        for r in 0..4 {
            for c in 0..4 {
                if c + 1 < 4 {
                    edges.push((idx(r, c), idx(r, c + 1)));
                }
                if r + 1 < 4 {
                    edges.push((idx(r, c), idx(r + 1, c)));
                }
            }
        }
        assert!(is_planar(16, &edges));
    }

    #[test]
    fn two_blocks_sharing_a_cut_vertex() {
        // two K4s glued at vertex 0: planar
        let mut edges = complete(4);
        for u in [0usize, 4, 5, 6] {
            for v in [0usize, 4, 5, 6] {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        assert!(is_planar(7, &edges));
    }

    #[test]
    fn k5_plus_pendant_not_planar() {
        let mut edges = complete(5);
        edges.push((0, 5));
        assert!(!is_planar(6, &edges));
    }
}
