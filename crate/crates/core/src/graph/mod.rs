//! Communication graph, graph shift operators and the delayed aggregation sequence.
//!
//! Agents `i` and `j` can talk at step `t` when `|r_i - r_j| <= R`. A graph shift
//! operator `S(t)` respects that sparsity, so `S(t) X` is one round of neighbor
//! exchange. [`AggregationBuffer`] stacks `X(t), S(t) X(t-1), S(t) S(t-1) X(t-2), ...`
//! by reusing last step's blocks, and [`message_passing`] computes the same rows
//! with agents that only ever see their neighbors' messages.

mod aggregation;
pub mod message_passing;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use aggregation::AggregationBuffer;

use crate::error::{Error, Result};
use crate::nn::Tensor;
use crate::vec2::Vec2;

/// Undirected radius graph without self-loops.
#[derive(Clone, Debug, PartialEq)]
pub struct CommGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl CommGraph {
    /// Builds a graph from explicit undirected edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidConfig(format!(
                    "bad edge ({a}, {b}) for n = {n}"
                )));
            }
            let e = (a.min(b), a.max(b));
            if canon.contains(&e) {
                continue;
            }
            canon.push(e);
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        canon.sort_unstable();
        neighbors.iter_mut().for_each(|l| l.sort_unstable());
        Ok(CommGraph {
            n,
            edges: canon,
            neighbors,
        })
    }

    pub fn fully_connected(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        CommGraph::from_edges(n, &edges).expect("complete graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Relabels nodes so that new node `k` is old node `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> CommGraph {
        let mut inverse = vec![0; perm.len()];
        for (k, &p) in perm.iter().enumerate() {
            inverse[p] = k;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(a, b)| (inverse[a], inverse[b]))
            .collect();
        CommGraph::from_edges(self.n, &edges).expect("permutation preserves validity")
    }
}

/// Connects every pair of agents at distance `<= radius`.
pub fn build_graph(positions: &[Vec2], radius: f64) -> CommGraph {
    let n = positions.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if (positions[i] - positions[j]).norm() <= radius {
                edges.push((i, j));
            }
        }
    }
    CommGraph::from_edges(n, &edges).expect("radius graph edges are in range")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `s_ij = 1` on edges.
    Adjacency,
    /// `s_ij = 1 / max(deg_i, 1)`: each agent averages its neighbors.
    #[default]
    Degree,
    /// `s_ij = 1 / sqrt(deg_i deg_j)`.
    Symmetric,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacency" => Ok(Normalization::Adjacency),
            "degree" => Ok(Normalization::Degree),
            "symmetric" => Ok(Normalization::Symmetric),
            other => Err(Error::UnknownNormalization(other.to_string())),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Adjacency => "adjacency",
            Normalization::Degree => "degree",
            Normalization::Symmetric => "symmetric",
        })
    }
}

/// Graph shift operator: `s_ij != 0` only if `j` is a neighbor of `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GsoMatrix {
    weights: Tensor,
    neighbors: Vec<Vec<usize>>,
    normalization: Normalization,
}

impl GsoMatrix {
    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights.at2(i, j)
    }

    pub fn dense(&self) -> &Tensor {
        &self.weights
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// `(j, s_ij)` for every neighbor `j` of `i`: the only part of `S` agent `i` knows.
    pub fn row_links(&self, i: usize) -> Vec<(usize, f64)> {
        self.neighbors[i]
            .iter()
            .map(|&j| (j, self.weights.at2(i, j)))
            .collect()
    }

    /// The all-zero operator on `n` nodes.
    pub fn zero(n: usize) -> Self {
        GsoMatrix {
            weights: Tensor::zeros(&[n, n]),
            neighbors: vec![Vec::new(); n],
            normalization: Normalization::Adjacency,
        }
    }
}

pub fn gso(graph: &CommGraph, normalization: Normalization) -> GsoMatrix {
    let n = graph.n();
    let mut weights = Tensor::zeros(&[n, n]);
    for i in 0..n {
        for &j in graph.neighbors(i) {
            let w = match normalization {
                Normalization::Adjacency => 1.0,
                Normalization::Degree => 1.0 / graph.degree(i).max(1) as f64,
                Normalization::Symmetric => {
                    1.0 / ((graph.degree(i) * graph.degree(j)) as f64).sqrt()
                }
            };
            weights.set2(i, j, w);
        }
    }
    GsoMatrix {
        weights,
        neighbors: graph.neighbors.clone(),
        normalization,
    }
}

fn check_shift_dims(s: &GsoMatrix, x: &Tensor) -> Result<()> {
    if x.shape().len() != 2 || x.rows() != s.n() {
        return Err(Error::ShapeMismatch(format!(
            "shift of {:?} by a {}-node operator",
            x.shape(),
            s.n()
        )));
    }
    Ok(())
}

/// `[S X]_i = sum_{j in N_i} s_ij x_j`.
pub fn shift(s: &GsoMatrix, x: &Tensor) -> Result<Tensor> {
    check_shift_dims(s, x)?;
    let mut out = x.zeros_like();
    for i in 0..s.n() {
        for &j in s.neighbors(i) {
            let w = s.weights.at2(i, j);
            let (src, dst) = (x.row(j), out.row_mut(i));
            for (d, v) in dst.iter_mut().zip(src) {
                *d += w * v;
            }
        }
    }
    Ok(out)
}

/// `S^T G`, the adjoint of [`shift`] used when backpropagating through aggregation.
pub fn shift_transpose(s: &GsoMatrix, g: &Tensor) -> Result<Tensor> {
    check_shift_dims(s, g)?;
    let mut out = g.zeros_like();
    for i in 0..s.n() {
        for &j in s.neighbors(i) {
            let w = s.weights.at2(i, j);
            let (src, dst) = (g.row(i), out.row_mut(j));
            for (d, v) in dst.iter_mut().zip(src) {
                *d += w * v;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_exactly_radius_connects() {
        let g = build_graph(&[Vec2::ZERO, Vec2::new(1.5, 0.0)], 1.5);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn far_agents_have_no_edges() {
        let g = build_graph(&[Vec2::ZERO, Vec2::new(2.0, 0.0), Vec2::new(0.0, 5.0)], 1.5);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn collinear_spacing_r_is_a_path() {
        let g = build_graph(&[Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)], 1.0);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn gso_normalizations() {
        let iso = CommGraph::from_edges(3, &[(0, 1)]).unwrap();
        let s = gso(&iso, Normalization::Degree);
        assert!(s.dense().row(2).iter().all(|&v| v == 0.0));

        let pair = CommGraph::from_edges(2, &[(0, 1)]).unwrap();
        let s = gso(&pair, Normalization::Degree);
        assert_eq!(s.dense().data(), &[0.0, 1.0, 1.0, 0.0]);

        let tri = CommGraph::fully_connected(3);
        let s = gso(&tri, Normalization::Degree);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.weight(i, j), if i == j { 0.0 } else { 0.5 });
            }
        }

        let path = CommGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s = gso(&path, Normalization::Symmetric);
        assert!((s.weight(0, 1) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn normalization_tags_parse() {
        assert_eq!(
            "degree".parse::<Normalization>().unwrap(),
            Normalization::Degree
        );
        assert!(matches!(
            "laplacian".parse::<Normalization>(),
            Err(Error::UnknownNormalization(_))
        ));
    }

    #[test]
    fn shift_examples() {
        let pair = CommGraph::from_edges(2, &[(0, 1)]).unwrap();
        let s = gso(&pair, Normalization::Adjacency);
        let x = Tensor::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(shift(&s, &x).unwrap().data(), &[2.0, 1.0]);

        let zero = GsoMatrix::zero(2);
        assert_eq!(shift(&zero, &x).unwrap().data(), &[0.0, 0.0]);

        let bad = Tensor::zeros(&[3, 1]);
        assert!(shift(&s, &bad).is_err());
    }

    #[test]
    fn shift_reads_only_neighbor_rows() {
        let path = CommGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s = gso(&path, Normalization::Degree);
        let x = Tensor::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let mut x2 = x.clone();
        // Agent 0's only neighbor is 1, so changing agent 2 cannot move row 0.
        x2.row_mut(2).copy_from_slice(&[100.0, -100.0]);
        let (a, b) = (shift(&s, &x).unwrap(), shift(&s, &x2).unwrap());
        assert_eq!(a.row(0), b.row(0));
        assert_ne!(a.row(1), b.row(1));
    }

    #[test]
    fn shift_transpose_is_adjoint() {
        let g = CommGraph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        let s = gso(&g, Normalization::Degree);
        let x = Tensor::from_rows(&[
            vec![1.0, -1.0],
            vec![0.5, 2.0],
            vec![3.0, 0.0],
            vec![-2.0, 1.0],
        ])
        .unwrap();
        let y = Tensor::from_rows(&[
            vec![0.3, 1.0],
            vec![-1.0, 0.2],
            vec![2.0, 2.0],
            vec![0.1, -0.7],
        ])
        .unwrap();
        let sx = shift(&s, &x).unwrap();
        let sty = shift_transpose(&s, &y).unwrap();
        let lhs: f64 = sx.data().iter().zip(y.data()).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.data().iter().zip(sty.data()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
