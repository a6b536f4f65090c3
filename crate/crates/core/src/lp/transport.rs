//! Transportation simplex on the bipartite supply-demand graph.
//!
//! Northwest-corner start, then potential (u, v) pivoting on the spanning
//! tree of basic arcs. Entering arc is the lexicographically first one with
//! negative reduced cost and the leaving arc is the lexicographically first
//! minimizer, so the method is deterministic and cannot cycle. This is an
//! independent algorithm from the general simplex in this crate; the two are
//! cross-checked in tests.

use crate::error::{Error, Result};
use crate::rational::Rational;
use num::{Signed, Zero};

#[derive(Clone, Debug)]
pub struct TransportationSolution {
    /// Positive flows (supplier, consumer, mass); support is a forest.
    pub flows: Vec<(usize, usize, Rational)>,
    pub value: Rational,
}

pub fn solve_transportation(
    supplies: &[Rational],
    demands: &[Rational],
    costs: &[Vec<Rational>],
) -> Result<TransportationSolution> {
    let m = supplies.len();
    let n = demands.len();
    if m == 0 || n == 0 {
        return Err(Error::Precondition("empty transportation problem".into()));
    }
    if costs.len() != m || costs.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "cost matrix must be {m} x {n}"
        )));
    }
    if supplies.iter().chain(demands).any(|v| v.is_negative()) {
        return Err(Error::Precondition(
            "negative supply or demand".into(),
        ));
    }
    let total_supply = supplies.iter().fold(Rational::zero(), |a, s| a + s);
    let total_demand = demands.iter().fold(Rational::zero(), |a, d| a + d);
    if total_supply != total_demand {
        return Err(Error::Precondition(format!(
            "unbalanced problem: supplies total {}, demands total {}",
            crate::rational::format_rational(&total_supply),
            crate::rational::format_rational(&total_demand)
        )));
    }

    // northwest-corner initial basis: m + n - 1 arcs forming a spanning tree
    let mut flow: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]; m];
    let mut basic: Vec<(usize, usize)> = Vec::with_capacity(m + n - 1);
    let mut rem_s: Vec<Rational> = supplies.to_vec();
    let mut rem_d: Vec<Rational> = demands.to_vec();
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let f = rem_s[i].clone().min(rem_d[j].clone());
        flow[i][j] = f.clone();
        basic.push((i, j));
        rem_s[i] -= &f;
        rem_d[j] -= &f;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if rem_s[i].is_zero() && i < m - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    debug_assert_eq!(basic.len(), m + n - 1);

    loop {
        // potentials from the tree: u[i] + v[j] = c[i][j] on basic arcs
        let (u, v) = potentials(m, n, &basic, costs);
        // entering: first arc in row-major order with negative reduced cost
        let mut entering = None;
        'outer: for a in 0..m {
            for b in 0..n {
                if basic.contains(&(a, b)) {
                    continue;
                }
                let rc = &costs[a][b] - &u[a] - &v[b];
                if rc.is_negative() {
                    entering = Some((a, b));
                    break 'outer;
                }
            }
        }
        let Some((ea, eb)) = entering else {
            break;
        };
        // unique tree path from supply ea to demand eb closes the cycle
        let path = tree_path(m, n, &basic, ea, eb);
        // walking the path from demand eb back to supply ea, arcs alternate
        // signs starting and ending with a donor (-)
        let mut donors: Vec<(usize, usize)> = Vec::new();
        let mut receivers: Vec<(usize, usize)> = Vec::new();
        for (pos, arc) in path.iter().enumerate() {
            if pos % 2 == 0 {
                donors.push(*arc);
            } else {
                receivers.push(*arc);
            }
        }
        let mut theta: Option<(Rational, (usize, usize))> = None;
        for &(a, b) in &donors {
            let f = flow[a][b].clone();
            match &theta {
                None => theta = Some((f, (a, b))),
                Some((best, arc)) => {
                    if f < *best || (f == *best && (a, b) < *arc) {
                        theta = Some((f, (a, b)));
                    }
                }
            }
        }
        let (theta, leaving) = theta.expect("cycle always has a donor arc");
        for &(a, b) in &donors {
            flow[a][b] -= &theta;
        }
        for &(a, b) in &receivers {
            flow[a][b] += &theta;
        }
        flow[ea][eb] += &theta;
        let pos = basic
            .iter()
            .position(|&arc| arc == leaving)
            .expect("leaving arc is basic");
        basic[pos] = (ea, eb);
        basic.sort_unstable();
    }

    let mut value = Rational::zero();
    let mut flows = Vec::new();
    for a in 0..m {
        for b in 0..n {
            if !flow[a][b].is_zero() {
                value += &costs[a][b] * &flow[a][b];
                flows.push((a, b, flow[a][b].clone()));
            }
        }
    }
    Ok(TransportationSolution { flows, value })
}

fn potentials(
    m: usize,
    n: usize,
    basic: &[(usize, usize)],
    costs: &[Vec<Rational>],
) -> (Vec<Rational>, Vec<Rational>) {
    // nodes: suppliers 0..m, consumers m..m+n
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m + n];
    for (idx, &(a, b)) in basic.iter().enumerate() {
        adj[a].push((m + b, idx));
        adj[m + b].push((a, idx));
    }
    let mut u = vec![Rational::zero(); m];
    let mut v = vec![Rational::zero(); n];
    let mut seen = vec![false; m + n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(node) = stack.pop() {
        for &(next, arc) in &adj[node] {
            if seen[next] {
                continue;
            }
            seen[next] = true;
            let (a, b) = basic[arc];
            if next >= m {
                // next is consumer b, node is supplier a
                v[b] = &costs[a][b] - &u[a];
            } else {
                u[a] = &costs[a][b] - &v[b];
            }
            stack.push(next);
        }
    }
    debug_assert!(seen.iter().all(|&s| s), "basic arcs must span all nodes");
    (u, v)
}

/// Arcs of the unique tree path from supplier `from` to consumer `to`.
fn tree_path(
    m: usize,
    n: usize,
    basic: &[(usize, usize)],
    from: usize,
    to: usize,
) -> Vec<(usize, usize)> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m + n];
    for (idx, &(a, b)) in basic.iter().enumerate() {
        adj[a].push((m + b, idx));
        adj[m + b].push((a, idx));
    }
    let start = m + to;
    let goal = from;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == goal {
            break;
        }
        for &(next, arc) in &adj[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, arc));
                queue.push_back(next);
            }
        }
    }
    // read the path from the goal back to the start: this yields the arcs in
    // the order leaving the entering arc's demand side
    let mut arcs = Vec::new();
    let mut node = goal;
    while let Some((prev, arc)) = parent[node] {
        arcs.push(basic[arc]);
        node = prev;
    }
    arcs.reverse();
    // arcs now run from `start` (demand side) towards `goal` (supply side)
    arcs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_lp, LinearProgram, Status};
    use crate::rational::{int, rat};
    use rand::Rng;
    use rand::SeedableRng;

    fn as_lp(
        supplies: &[Rational],
        demands: &[Rational],
        costs: &[Vec<Rational>],
    ) -> LinearProgram {
        let m = supplies.len();
        let n = demands.len();
        let mut objective = Vec::new();
        for row in costs {
            objective.extend(row.iter().cloned());
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for a in 0..m {
            let mut row = vec![int(0); m * n];
            for b in 0..n {
                row[a * n + b] = int(1);
            }
            rows.push(row);
            rhs.push(supplies[a].clone());
        }
        for b in 0..n {
            let mut row = vec![int(0); m * n];
            for a in 0..m {
                row[a * n + b] = int(1);
            }
            rows.push(row);
            rhs.push(demands[b].clone());
        }
        LinearProgram {
            objective,
            rows,
            rhs,
        }
    }

    #[test]
    fn single_arc() {
        let sol = solve_transportation(&[int(1)], &[int(1)], &[vec![rat(7, 3)]]).unwrap();
        assert_eq!(sol.flows, vec![(0, 0, int(1))]);
        assert_eq!(sol.value, rat(7, 3));
    }

    #[test]
    fn rejects_unbalanced() {
        let r = solve_transportation(&[int(1)], &[int(2)], &[vec![int(1)]]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn two_by_two_picks_cheap_diagonal() {
        let sol = solve_transportation(
            &[rat(1, 2), rat(1, 2)],
            &[rat(1, 2), rat(1, 2)],
            &[vec![int(0), int(5)], vec![int(5), int(0)]],
        )
        .unwrap();
        assert_eq!(sol.value, int(0));
        assert_eq!(sol.flows.len(), 2);
    }

    #[test]
    fn support_is_forest_sized() {
        let sol = solve_transportation(
            &[rat(1, 3), rat(1, 3), rat(1, 3)],
            &[rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)],
            &[
                vec![int(1), int(2), int(3), int(4)],
                vec![int(4), int(3), int(2), int(1)],
                vec![int(2), int(1), int(4), int(3)],
            ],
        )
        .unwrap();
        assert!(sol.flows.len() <= 3 + 4 - 1);
    }

    #[test]
    fn agrees_with_general_simplex_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let m = rng.gen_range(1..5usize);
            let n = rng.gen_range(1..5usize);
            let raw_s: Vec<i64> = (0..m).map(|_| rng.gen_range(1..9)).collect();
            let raw_d: Vec<i64> = (0..n).map(|_| rng.gen_range(1..9)).collect();
            let total_s: i64 = raw_s.iter().sum();
            let total_d: i64 = raw_d.iter().sum();
            let supplies: Vec<Rational> = raw_s.iter().map(|&v| rat(v, total_s)).collect();
            let demands: Vec<Rational> = raw_d.iter().map(|&v| rat(v, total_d)).collect();
            let costs: Vec<Vec<Rational>> = (0..m)
                .map(|_| (0..n).map(|_| int(rng.gen_range(0..20))).collect())
                .collect();
            let tp = solve_transportation(&supplies, &demands, &costs).unwrap();
            let lp = as_lp(&supplies, &demands, &costs);
            let general = solve_lp(&lp).unwrap();
            assert_eq!(general.status, Status::Optimal);
            assert_eq!(tp.value, general.objective_value, "m={m} n={n}");
            // marginals of the returned plan are exact
            for a in 0..m {
                let shipped = tp
                    .flows
                    .iter()
                    .filter(|(i, _, _)| *i == a)
                    .fold(Rational::zero(), |acc, (_, _, f)| acc + f);
                assert_eq!(shipped, supplies[a]);
            }
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let supplies = [rat(1, 2), rat(1, 2)];
        let demands = [rat(1, 4), rat(3, 4)];
        let costs = vec![vec![int(3), int(1)], vec![int(1), int(3)]];
        let a = solve_transportation(&supplies, &demands, &costs).unwrap();
        let b = solve_transportation(&supplies, &demands, &costs).unwrap();
        assert_eq!(a.flows, b.flows);
        assert_eq!(a.value, b.value);
    }
}
