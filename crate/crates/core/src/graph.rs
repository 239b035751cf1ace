//! Undirected communication graphs and the matrices the estimation dynamics
//! are built on.
//!
//! Adjacency is binary: players either exchange estimates or they don't.
//! Everything downstream (the estimation system matrix, the stacked estimate
//! vector, the Lyapunov monitor) orders the n² per-player estimates
//! **player-major**: index `i * n + j` holds player `i`'s estimate of player
//! `j`'s action. This layout is fixed repo-wide.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Eigenvalues of the estimation matrix below this threshold are treated as
/// zero when deciding whether its negation is Hurwitz.
pub const HURWITZ_EIG_TOL: f64 = 1e-10;

/// An undirected communication graph over `n` players with 0/1 adjacency and
/// zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CommGraph {
    n: usize,
    adj: DMatrix<f64>,
}

impl CommGraph {
    /// Builds a graph from an explicit adjacency matrix, validating that it
    /// is square, symmetric, binary, and has a zero diagonal.
    pub fn from_adjacency(adj: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = adj.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyGraph);
        }
        for i in 0..rows {
            if adj[(i, i)] != 0.0 {
                return Err(Error::SelfLoop(i));
            }
            for j in 0..cols {
                let value = adj[(i, j)];
                if value != 0.0 && value != 1.0 {
                    return Err(Error::NonBinaryEntry { i, j, value });
                }
                if i < j && adj[(i, j)] != adj[(j, i)] {
                    return Err(Error::AsymmetricAdjacency {
                        i,
                        j,
                        upper: adj[(i, j)],
                        lower: adj[(j, i)],
                    });
                }
            }
        }
        Ok(Self { n: rows, adj })
    }

    /// Builds a graph on `n` nodes from an undirected edge list (0-indexed).
    /// Duplicate edges are idempotent; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adj = DMatrix::zeros(n, n);
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidEdge { i, j, n });
            }
            adj[(i, j)] = 1.0;
            adj[(j, i)] = 1.0;
        }
        Ok(Self { n, adj })
    }

    /// Cycle 0-1-...-(n-1)-0. For n <= 2 this degenerates to a single node or
    /// a single edge.
    pub fn cycle(n: usize) -> Result<Self> {
        let edges: Vec<_> = match n {
            0 | 1 => vec![],
            2 => vec![(0, 1)],
            _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        };
        Self::from_edges(n, &edges)
    }

    /// Path 0-1-...-(n-1).
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    /// Complete graph on n nodes.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Star with node 0 as the hub.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adj
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[(i, j)] != 0.0
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.adj.row(i).sum()
    }

    /// Graph Laplacian `L = D - A` with `D` the diagonal of row sums.
    ///
    /// Rows sum to zero; the result is symmetric positive semidefinite.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.adj.clone();
        for i in 0..self.n {
            l[(i, i)] = self.degree(i);
        }
        l
    }

    /// Breadth-first connectivity check. A single node counts as connected.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for j in 0..self.n {
                if self.adj[(i, j)] != 0.0 && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.n
    }

    /// System matrix of the stacked estimation dynamics,
    /// `M = L ⊗ I_n + B0`, where `B0 = diag{a_ij}` in player-major order
    /// (a_00, a_01, ..., a_0(n-1), a_10, ..., a_(n-1)(n-1)).
    ///
    /// `M` is symmetric, and `-M` is Hurwitz exactly when the graph is
    /// connected (for n >= 2).
    pub fn estimation_matrix(&self) -> DMatrix<f64> {
        let eye = DMatrix::<f64>::identity(self.n, self.n);
        let mut m = self.laplacian().kronecker(&eye);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i * self.n + j, i * self.n + j)] += self.adj[(i, j)];
            }
        }
        m
    }

    /// Smallest eigenvalue of the (symmetric) estimation matrix.
    pub fn estimation_spectral_gap(&self) -> f64 {
        let eig = self.estimation_matrix().symmetric_eigen();
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Whether the negated estimation matrix is Hurwitz, i.e. all eigenvalues
    /// of `M` exceed [`HURWITZ_EIG_TOL`].
    pub fn estimation_is_hurwitz(&self) -> bool {
        self.estimation_spectral_gap() > HURWITZ_EIG_TOL
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use proptest::prelude::*;

    fn two_disjoint_edges() -> CommGraph {
        CommGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap()
    }

    #[test]
    fn laplacian_single_node() {
        let g = CommGraph::from_edges(1, &[]).unwrap();
        assert_eq!(g.laplacian(), dmatrix![0.0]);
    }

    #[test]
    fn laplacian_path_two_nodes() {
        let g = CommGraph::path(2).unwrap();
        assert_eq!(g.laplacian(), dmatrix![1.0, -1.0; -1.0, 1.0]);
    }

    #[test]
    fn laplacian_five_cycle_spectrum() {
        let g = CommGraph::cycle(5).unwrap();
        let l = g.laplacian();
        for i in 0..5 {
            assert_eq!(l[(i, i)], 2.0);
            assert_eq!(l[(i, (i + 1) % 5)], -1.0);
            assert_eq!(l[((i + 1) % 5, i)], -1.0);
        }
        // Direct eigendecomposition against the circulant formula
        // 2 - 2cos(2*pi*k/5).
        let mut eigs: Vec<f64> = l.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(f64::total_cmp);
        let mut expected: Vec<f64> = (0..5)
            .map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 5.0).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (got, want) in eigs.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12, "eig {got} vs {want}");
        }
    }

    #[test]
    fn connectivity_cases() {
        assert!(CommGraph::cycle(5).unwrap().is_connected());
        assert!(!two_disjoint_edges().is_connected());
        assert!(CommGraph::from_edges(1, &[]).unwrap().is_connected());
    }

    #[test]
    fn estimation_matrix_path_two_matches_construction() {
        let g = CommGraph::path(2).unwrap();
        let m = g.estimation_matrix();
        let eye = DMatrix::<f64>::identity(2, 2);
        let mut expected = g.laplacian().kronecker(&eye);
        // B0 = diag(a_00, a_01, a_10, a_11) = diag(0, 1, 1, 0).
        expected[(1, 1)] += 1.0;
        expected[(2, 2)] += 1.0;
        assert_eq!(m, expected);
        // Player-major ordering spot check: the +a_ij lands on index i*n + j.
        assert_eq!(m[(1, 1)], 2.0); // L[0,0] + a_01
        assert_eq!(m[(0, 0)], 1.0); // L[0,0] + a_00

        let min_eig = g.estimation_spectral_gap();
        assert!(min_eig > 0.0, "min eigenvalue {min_eig}");
        assert!(g.estimation_is_hurwitz());
    }

    #[test]
    fn estimation_matrix_disconnected_is_singular() {
        let g = two_disjoint_edges();
        let min_abs = g
            .estimation_matrix()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|e| e.abs())
            .fold(f64::INFINITY, f64::min);
        assert!(min_abs <= 1e-12, "expected a zero eigenvalue, got {min_abs}");
        assert!(!g.estimation_is_hurwitz());
    }

    #[test]
    fn estimation_matrix_five_cycle_positive_spectrum() {
        let g = CommGraph::cycle(5).unwrap();
        let m = g.estimation_matrix();
        assert_eq!(m.shape(), (25, 25));
        assert_eq!(m, m.transpose());
        let eigs = m.symmetric_eigen().eigenvalues;
        assert!(eigs.iter().all(|&e| e > 0.0), "spectrum {eigs:?}");
    }

    #[test]
    fn validation_rejects_bad_adjacency() {
        let asym = dmatrix![0.0, 1.0; 0.0, 0.0];
        assert!(matches!(
            CommGraph::from_adjacency(asym),
            Err(Error::AsymmetricAdjacency { .. })
        ));

        let self_loop = dmatrix![1.0, 0.0; 0.0, 0.0];
        assert!(matches!(
            CommGraph::from_adjacency(self_loop),
            Err(Error::SelfLoop(0))
        ));

        let weighted = dmatrix![0.0, 0.5; 0.5, 0.0];
        assert!(matches!(
            CommGraph::from_adjacency(weighted),
            Err(Error::NonBinaryEntry { .. })
        ));

        assert!(matches!(
            CommGraph::from_edges(3, &[(0, 3)]),
            Err(Error::InvalidEdge { .. })
        ));
        assert!(matches!(
            CommGraph::from_edges(3, &[(1, 1)]),
            Err(Error::InvalidEdge { .. })
        ));
        assert!(matches!(CommGraph::from_edges(0, &[]), Err(Error::EmptyGraph)));
    }

    #[test]
    fn presets_have_expected_edge_counts() {
        let count = |g: &CommGraph| (g.adjacency().sum() / 2.0) as usize;
        assert_eq!(count(&CommGraph::cycle(5).unwrap()), 5);
        assert_eq!(count(&CommGraph::cycle(2).unwrap()), 1);
        assert_eq!(count(&CommGraph::path(4).unwrap()), 3);
        assert_eq!(count(&CommGraph::complete(5).unwrap()), 10);
        assert_eq!(count(&CommGraph::star(5).unwrap()), 4);
        assert!(CommGraph::star(1).unwrap().is_connected());
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = CommGraph> {
        (1..=max_n)
            .prop_flat_map(|n| {
                let pairs: Vec<(usize, usize)> = (0..n)
                    .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                    .collect();
                let k = pairs.len();
                (Just(n), Just(pairs), proptest::collection::vec(any::<bool>(), k))
            })
            .prop_map(|(n, pairs, mask)| {
                let edges: Vec<_> = pairs
                    .into_iter()
                    .zip(mask)
                    .filter_map(|(e, keep)| keep.then_some(e))
                    .collect();
                CommGraph::from_edges(n, &edges).unwrap()
            })
    }

    proptest! {
        #[test]
        fn laplacian_rows_sum_to_zero(g in arb_graph(7)) {
            let l = g.laplacian();
            for i in 0..g.n() {
                let s: f64 = l.row(i).sum();
                prop_assert!(s.abs() < 1e-12);
            }
        }

        #[test]
        fn estimation_matrix_symmetric_and_decides_connectivity(g in arb_graph(6)) {
            let m = g.estimation_matrix();
            prop_assert_eq!(&m, &m.transpose());
            if g.n() >= 2 {
                prop_assert_eq!(g.estimation_is_hurwitz(), g.is_connected());
            }
        }
    }
}
