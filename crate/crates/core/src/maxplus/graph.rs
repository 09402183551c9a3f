use std::collections::{BTreeSet, VecDeque};

use super::matrix::Matrix;
use super::scalar::Carrier;
use super::MaxPlusError;

/// Oriented graph with an arc `(i, j)` for every non-ε entry `x_ij` of a
/// square matrix. Nodes are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociatedGraph {
    node_count: usize,
    arcs: BTreeSet<(usize, usize)>,
}

/// Outcome of a topological analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acyclicity {
    /// `longest_path` counts arcs; it is 0 for a graph without arcs.
    Acyclic { longest_path: usize },
    /// Closed walk `[v0, v1, …, v0]` whose consecutive pairs are all arcs.
    Cyclic { cycle: Vec<usize> },
}

impl Acyclicity {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, Acyclicity::Acyclic { .. })
    }

    pub fn longest_path(&self) -> Option<usize> {
        match self {
            Acyclicity::Acyclic { longest_path } => Some(*longest_path),
            Acyclicity::Cyclic { .. } => None,
        }
    }

    pub fn witness_cycle(&self) -> Option<&[usize]> {
        match self {
            Acyclicity::Acyclic { .. } => None,
            Acyclicity::Cyclic { cycle } => Some(cycle),
        }
    }
}

impl AssociatedGraph {
    /// Panics if an arc endpoint is out of range.
    pub fn new(node_count: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let arcs: BTreeSet<_> = arcs.into_iter().collect();
        for &(i, j) in &arcs {
            assert!(
                i < node_count && j < node_count,
                "arc ({i}, {j}) outside graph of {node_count} nodes"
            );
        }
        AssociatedGraph { node_count, arcs }
    }

    pub fn of_matrix<T: Carrier>(x: &Matrix<T>) -> Result<Self, MaxPlusError> {
        if !x.is_square() {
            return Err(MaxPlusError::NotSquare { shape: x.shape() });
        }
        let n = x.rows();
        let arcs = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !x.get(i, j).is_eps());
        Ok(Self::new(n, arcs))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.arcs.contains(&(i, j))
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        // BTreeSet iteration keeps every list sorted ascending
        for &(i, j) in &self.arcs {
            adj[i].push(j);
        }
        adj
    }

    pub fn analyze(&self) -> Acyclicity {
        if let Some(cycle) = self.find_cycle() {
            return Acyclicity::Cyclic { cycle };
        }
        Acyclicity::Acyclic {
            longest_path: self.longest_path_acyclic(),
        }
    }

    /// Depth-first search from the lowest-numbered unvisited node, visiting
    /// successors in ascending order; the first back edge found closes the
    /// reported cycle.
    fn find_cycle(&self) -> Option<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }

        let adj = self.adjacency();
        let mut mark = vec![Mark::White; self.node_count];
        for start in 0..self.node_count {
            if mark[start] != Mark::White {
                continue;
            }
            // (node, index of next successor to inspect)
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            mark[start] = Mark::Grey;
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                if let Some(&v) = adj[u].get(*next) {
                    *next += 1;
                    match mark[v] {
                        Mark::White => {
                            mark[v] = Mark::Grey;
                            stack.push((v, 0));
                        }
                        Mark::Grey => {
                            let from = stack.iter().position(|&(w, _)| w == v).unwrap();
                            let mut cycle: Vec<usize> =
                                stack[from..].iter().map(|&(w, _)| w).collect();
                            cycle.push(v);
                            return Some(cycle);
                        }
                        Mark::Black => {}
                    }
                } else {
                    mark[u] = Mark::Black;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Longest arc count over all paths, via Kahn's order. Only meaningful
    /// on acyclic graphs.
    fn longest_path_acyclic(&self) -> usize {
        let adj = self.adjacency();
        let mut indegree = vec![0usize; self.node_count];
        for &(_, j) in &self.arcs {
            indegree[j] += 1;
        }
        let mut queue: VecDeque<usize> =
            (0..self.node_count).filter(|&i| indegree[i] == 0).collect();
        let mut depth = vec![0usize; self.node_count];
        let mut best = 0;
        while let Some(u) = queue.pop_front() {
            best = best.max(depth[u]);
            for &v in &adj[u] {
                depth[v] = depth[v].max(depth[u] + 1);
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        best
    }
}

pub fn associated_graph<T: Carrier>(x: &Matrix<T>) -> Result<AssociatedGraph, MaxPlusError> {
    AssociatedGraph::of_matrix(x)
}

pub fn analyze_acyclicity(graph: &AssociatedGraph) -> Acyclicity {
    graph.analyze()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxplus::scalar::{Eps, Fin};

    // Enumerates every simple path by brute force; exponential, fine for tiny graphs.
    fn brute_force_longest(g: &AssociatedGraph) -> usize {
        fn walk(g: &AssociatedGraph, u: usize, seen: &mut Vec<bool>, len: usize, best: &mut usize) {
            *best = (*best).max(len);
            for v in 0..g.node_count() {
                if g.has_arc(u, v) && !seen[v] {
                    seen[v] = true;
                    walk(g, v, seen, len + 1, best);
                    seen[v] = false;
                }
            }
        }
        let mut best = 0;
        for s in 0..g.node_count() {
            let mut seen = vec![false; g.node_count()];
            seen[s] = true;
            walk(g, s, &mut seen, 0, &mut best);
        }
        best
    }

    #[test]
    fn graph_of_matrices() {
        let g = associated_graph(&Matrix::<i64>::null(3, 3)).unwrap();
        assert_eq!(g.node_count(), 3);
        assert!(g.arcs().is_empty());

        let x = Matrix::from_rows(vec![vec![Eps, Fin(0)], vec![Eps, Eps]]).unwrap();
        let g = associated_graph(&x).unwrap();
        assert_eq!(g.arcs().iter().copied().collect::<Vec<_>>(), vec![(0, 1)]);

        let g = associated_graph(&Matrix::<i64>::identity(2)).unwrap();
        assert_eq!(
            g.arcs().iter().copied().collect::<Vec<_>>(),
            vec![(0, 0), (1, 1)]
        );
        assert_eq!(g.analyze(), Acyclicity::Cyclic { cycle: vec![0, 0] });

        assert!(associated_graph(&Matrix::<i64>::null(2, 3)).is_err());
    }

    #[test]
    fn chain_and_two_cycle() {
        let chain = AssociatedGraph::new(3, [(0, 1), (1, 2)]);
        assert_eq!(chain.analyze(), Acyclicity::Acyclic { longest_path: 2 });

        let two = AssociatedGraph::new(2, [(0, 1), (1, 0)]);
        assert_eq!(
            two.analyze(),
            Acyclicity::Cyclic {
                cycle: vec![0, 1, 0]
            }
        );
    }

    #[test]
    fn fork_join_g0_graph() {
        // G_0 of the six-node example network with r_3 = 1, r_2 = r_4 = r_5 = r_6 = 0
        let g = AssociatedGraph::new(6, [(0, 1), (3, 1), (2, 3), (1, 4), (4, 5), (2, 5)]);
        // brute force: 3→4→2→5→6 has four arcs
        assert_eq!(brute_force_longest(&g), 4);
        assert_eq!(g.analyze(), Acyclicity::Acyclic { longest_path: 4 });
    }

    #[test]
    fn first_cycle_is_deterministic() {
        // 1→2→3→4→2 plus a second circuit 5→6→5; DFS from node 1 finds 2,3,4 first
        let g = AssociatedGraph::new(6, [(0, 1), (1, 2), (2, 3), (3, 1), (4, 5), (5, 4)]);
        assert_eq!(
            g.analyze(),
            Acyclicity::Cyclic {
                cycle: vec![1, 2, 3, 1]
            }
        );
    }

    #[test]
    fn longest_path_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=7);
            // forward arcs of a random permutation give a DAG
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let mut arcs = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.35) {
                        arcs.push((perm[a], perm[b]));
                    }
                }
            }
            let g = AssociatedGraph::new(n, arcs);
            assert_eq!(g.analyze().longest_path(), Some(brute_force_longest(&g)));
        }
    }
}
