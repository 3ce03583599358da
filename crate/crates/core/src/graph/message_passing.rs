//! Per-agent execution of the aggregation sequence.
//!
//! Each [`AgentNode`] stores only its own rows of the K blocks. During a step the
//! network runs K-1 exchange rounds: in round `k` every agent broadcasts the row it
//! held for block `k-1` at the previous step, and every agent sums what arrives from
//! its neighbors, weighted by its own row of the shift operator. The update code in
//! [`AgentNode::absorb`] receives nothing but that inbox, so no agent can read a
//! non-neighbor's state.

use super::GsoMatrix;
use crate::error::{Error, Result};
use crate::nn::Tensor;

/// One delivered message: payload from `from`, tagged with the receiver's link weight `s_ij`.
#[derive(Clone, Debug)]
pub struct Message {
    pub from: usize,
    pub weight: f64,
    pub payload: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct AgentNode {
    id: usize,
    blocks: Vec<Vec<f64>>,
}

impl AgentNode {
    fn new(id: usize, k: usize, features: usize) -> Self {
        AgentNode {
            id,
            blocks: vec![vec![0.0; features]; k],
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    /// What this agent broadcasts in round `round` (its previous block `round - 1`).
    fn outgoing(&self, round: usize) -> Vec<f64> {
        self.blocks[round - 1].clone()
    }

    /// Weighted sum of the round's inbox.
    fn absorb(inbox: &[Message], features: usize) -> Vec<f64> {
        let mut acc = vec![0.0; features];
        for m in inbox {
            for (a, v) in acc.iter_mut().zip(&m.payload) {
                *a += m.weight * v;
            }
        }
        acc
    }

    /// `z_i(t)`: all blocks concatenated.
    pub fn z(&self) -> Vec<f64> {
        self.blocks.concat()
    }
}

/// A swarm of [`AgentNode`]s exchanging messages along graph edges.
#[derive(Clone, Debug)]
pub struct MessagePassingNetwork {
    nodes: Vec<AgentNode>,
    features: usize,
    rounds_executed: usize,
    messages_delivered: usize,
}

impl MessagePassingNetwork {
    pub fn new(n: usize, features: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig(
                "aggregation depth K must be >= 1".into(),
            ));
        }
        Ok(MessagePassingNetwork {
            nodes: (0..n).map(|i| AgentNode::new(i, k, features)).collect(),
            features,
            rounds_executed: 0,
            messages_delivered: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.nodes.first().map_or(0, |n| n.blocks.len())
    }

    pub fn rounds_executed(&self) -> usize {
        self.rounds_executed
    }

    pub fn messages_delivered(&self) -> usize {
        self.messages_delivered
    }

    pub fn node(&self, i: usize) -> &AgentNode {
        &self.nodes[i]
    }

    /// One dynamics step: K-1 exchange rounds, then each agent records its own state.
    pub fn step(&mut self, s: &GsoMatrix, x: &Tensor) -> Result<()> {
        let n = self.nodes.len();
        if s.n() != n || x.shape() != [n, self.features] {
            return Err(Error::ShapeMismatch(format!(
                "network of {} agents with {} features got X {:?}",
                n,
                self.features,
                x.shape()
            )));
        }
        let k = self.k();
        let mut fresh: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(k); n];
        for (i, own) in fresh.iter_mut().enumerate() {
            own.push(x.row(i).to_vec());
        }
        for round in 1..k {
            // Every broadcast is taken from last step's blocks before anyone overwrites them.
            let outbox: Vec<Vec<f64>> = self.nodes.iter().map(|a| a.outgoing(round)).collect();
            for (i, own) in fresh.iter_mut().enumerate() {
                let inbox: Vec<Message> = s
                    .row_links(i)
                    .into_iter()
                    .map(|(j, w)| Message {
                        from: j,
                        weight: w,
                        payload: outbox[j].clone(),
                    })
                    .collect();
                self.messages_delivered += inbox.len();
                own.push(AgentNode::absorb(&inbox, self.features));
            }
            self.rounds_executed += 1;
        }
        for (node, blocks) in self.nodes.iter_mut().zip(fresh) {
            node.blocks = blocks;
        }
        Ok(())
    }

    /// All `z_i` stacked as an `N x KF` matrix.
    pub fn z(&self) -> Tensor {
        let rows: Vec<Vec<f64>> = self.nodes.iter().map(AgentNode::z).collect();
        Tensor::from_rows(&rows).expect("nodes share one shape")
    }
}
