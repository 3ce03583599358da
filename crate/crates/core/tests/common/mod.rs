#![allow(dead_code)]

use flocknet::graph::CommGraph;
use flocknet::nn::Tensor;
use flocknet::swarm::SwarmState;
use flocknet::Vec2;
use rand::seq::SliceRandom;
use rand::Rng;

/// Erdős–Rényi graph on `n` nodes with edge probability `p`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> CommGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    CommGraph::from_edges(n, &edges).unwrap()
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Tensor {
    Tensor::from_vec(
        &[rows, cols],
        (0..rows * cols).map(|_| rng.gen_range(-2.0..2.0)).collect(),
    )
    .unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Agents scattered in a `side x side` box with a minimum spacing, random velocities.
pub fn random_state<R: Rng>(rng: &mut R, n: usize, side: f64, speed: f64) -> SwarmState {
    let mut positions: Vec<Vec2> = Vec::new();
    while positions.len() < n {
        let p = Vec2::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side));
        if positions.iter().all(|q| (*q - p).norm() > 0.1) {
            positions.push(p);
        }
    }
    let velocities = (0..n)
        .map(|_| Vec2::new(rng.gen_range(-speed..speed), rng.gen_range(-speed..speed)))
        .collect();
    SwarmState::new(positions, velocities).unwrap()
}
